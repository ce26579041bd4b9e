"""Exact dense linear algebra over prime fields GF(p) and the rationals.

Scalars are canonical Python values: residues 0..p-1 for GF(p), fully
reduced ``Fraction`` for the rationals.  Matrices are immutable, carry
their field, and admit 0xn and nx0 shapes.  Pivoting is deterministic
(first nonzero entry in column order) so every downstream object is
reproducible bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import GorhomError


class ExactLinalgError(GorhomError):
    pass


class FieldMismatch(ExactLinalgError):
    pass


class ShapeError(ExactLinalgError):
    """Dimension mismatch between operands; a contract violation."""


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid for n < 3 215 031 751."""
    if n < 2:
        return False
    for q in (2, 3, 5, 7):
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class FieldSpec:
    """Base field: GF(p) for a prime p < 2^31, or the rationals."""

    kind: str
    p: Optional[int] = None

    def __post_init__(self):
        if self.kind == "prime":
            if self.p is None or not (2 <= self.p < 2 ** 31):
                raise ExactLinalgError(f"prime field needs 2 <= p < 2^31, got {self.p}")
            if not is_prime(self.p):
                raise ExactLinalgError(f"{self.p} is not prime")
        elif self.kind == "rational":
            if self.p is not None:
                raise ExactLinalgError("rational field takes no modulus")
        else:
            raise ExactLinalgError(f"unknown field kind {self.kind!r}")

    @property
    def is_prime_field(self) -> bool:
        return self.kind == "prime"

    @property
    def zero(self):
        return 0 if self.is_prime_field else Fraction(0)

    @property
    def one(self):
        return 1 if self.is_prime_field else Fraction(1)

    def normalize(self, v):
        """Canonical representative of v in this field."""
        if self.is_prime_field:
            if isinstance(v, Fraction):
                if v.denominator != 1:
                    raise ExactLinalgError(f"{v} is not an integer residue mod {self.p}")
                v = v.numerator
            return int(v) % self.p
        return Fraction(v)

    def add(self, a, b):
        return (a + b) % self.p if self.is_prime_field else a + b

    def sub(self, a, b):
        return (a - b) % self.p if self.is_prime_field else a - b

    def mul(self, a, b):
        return (a * b) % self.p if self.is_prime_field else a * b

    def neg(self, a):
        return (-a) % self.p if self.is_prime_field else -a

    def inv(self, a):
        if self.is_prime_field:
            a %= self.p
            if a == 0:
                raise ZeroDivisionError("inverse of 0")
            return pow(a, self.p - 2, self.p)
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        return Fraction(1) / a

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def __str__(self):
        return f"GF({self.p})" if self.is_prime_field else "QQ"


RATIONAL = FieldSpec("rational")


def GF(p: int) -> FieldSpec:
    return FieldSpec("prime", p)


@dataclass(frozen=True)
class Scalar:
    """A field element tagged with its field; arithmetic never mixes fields."""

    value: object
    field: FieldSpec

    def __post_init__(self):
        object.__setattr__(self, "value", self.field.normalize(self.value))

    def _coerce(self, other) -> "Scalar":
        if isinstance(other, Scalar):
            if other.field != self.field:
                raise FieldMismatch(f"{self.field} vs {other.field}")
            return other
        return Scalar(other, self.field)

    def __add__(self, other):
        o = self._coerce(other)
        return Scalar(self.field.add(self.value, o.value), self.field)

    def __sub__(self, other):
        o = self._coerce(other)
        return Scalar(self.field.sub(self.value, o.value), self.field)

    def __mul__(self, other):
        o = self._coerce(other)
        return Scalar(self.field.mul(self.value, o.value), self.field)

    def __truediv__(self, other):
        o = self._coerce(other)
        return Scalar(self.field.div(self.value, o.value), self.field)

    def __neg__(self):
        return Scalar(self.field.neg(self.value), self.field)

    def inverse(self) -> "Scalar":
        return Scalar(self.field.inv(self.value), self.field)


# ---------------------------------------------------------------------------
# numpy backends.  Prime fields use integer ndarrays reduced mod p; the
# rationals use object ndarrays of Fraction.  GF(2) work beyond a size
# threshold is bit-packed into uint64 words.


def _dtype_for(p: int):
    return np.int8 if p <= 11 else np.int64


def _as_array(field: FieldSpec, data, rows: int, cols: int) -> np.ndarray:
    if field.is_prime_field:
        a = np.array(data, dtype=np.int64).reshape(rows, cols) % field.p
        a = a.astype(_dtype_for(field.p))
    else:
        a = np.empty((rows, cols), dtype=object)
        flat = [x for row in data for x in row] if rows and cols else []
        if flat:
            a[:] = np.array([[Fraction(x) for x in row] for row in data],
                            dtype=object).reshape(rows, cols)
    a.setflags(write=False)
    return a


def _matmul_arr(field: FieldSpec, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"matmul {a.shape} @ {b.shape}")
    if field.is_prime_field:
        p = field.p
        if p < (1 << 20) and a.shape[1] < (1 << 12):
            c = (a.astype(np.int64) @ b.astype(np.int64)) % p
            return c.astype(_dtype_for(p))
        c = np.dot(a.astype(object), b.astype(object))
        return (c % p).astype(np.int64) if c.size else np.zeros(c.shape, np.int64)
    if a.shape[0] == 0 or b.shape[1] == 0 or a.shape[1] == 0:
        out = np.empty((a.shape[0], b.shape[1]), dtype=object)
        out[:] = Fraction(0)
        return out
    return np.dot(a, b)


def _zeros_arr(field: FieldSpec, rows: int, cols: int) -> np.ndarray:
    if field.is_prime_field:
        return np.zeros((rows, cols), dtype=_dtype_for(field.p))
    a = np.empty((rows, cols), dtype=object)
    a[:] = Fraction(0)
    return a


# -- GF(2) bit packing ------------------------------------------------------

def _gf2_pack(a: np.ndarray) -> np.ndarray:
    """Pack 0/1 rows into little-endian uint64 words."""
    rows, cols = a.shape
    words = max(1, (cols + 63) // 64)
    bytes_ = np.packbits(a.astype(np.uint8), axis=1, bitorder="little")
    out = np.zeros((rows, words * 8), dtype=np.uint8)
    out[:, : bytes_.shape[1]] = bytes_
    return out.view(np.uint64)


def _gf2_unpack(packed: np.ndarray, cols: int) -> np.ndarray:
    if packed.shape[0] == 0:
        return np.zeros((0, cols), dtype=np.int8)
    bits = np.unpackbits(packed.view(np.uint8), axis=1,
                         count=max(cols, 1), bitorder="little")
    return bits[:, :cols].astype(np.int8)


def _gf2_rref_packed(P: np.ndarray, ncols: int):
    """In-place RREF of packed GF(2) rows; returns (rank, pivots)."""
    nrows = P.shape[0]
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        w, b = c >> 6, np.uint64(c & 63)
        col = (P[r:, w] >> b) & np.uint64(1)
        nz = np.nonzero(col)[0]
        if nz.size == 0:
            continue
        pr = r + int(nz[0])
        if pr != r:
            P[[r, pr]] = P[[pr, r]]
        mask = ((P[:, w] >> b) & np.uint64(1)).astype(bool)
        mask[r] = False
        if mask.any():
            P[mask] ^= P[r]
        pivots.append(c)
        r += 1
    return r, pivots


def _use_packed(field: FieldSpec, size: int) -> bool:
    return field.is_prime_field and field.p == 2 and size > 1 << 15


def rref_arr(field: FieldSpec, a: np.ndarray):
    """(reduced, rank, pivots) for an ndarray in this field's encoding."""
    rows, cols = a.shape
    if rows == 0 or cols == 0:
        return a.copy(), 0, []
    if _use_packed(field, a.size):
        P = _gf2_pack(a)
        rank, pivots = _gf2_rref_packed(P, cols)
        return _gf2_unpack(P, cols), rank, pivots
    if field.is_prime_field:
        p = field.p
        w = a.astype(np.int64).copy()
        r = 0
        pivots = []
        for c in range(cols):
            if r == rows:
                break
            nz = np.nonzero(w[r:, c])[0]
            if nz.size == 0:
                continue
            pr = r + int(nz[0])
            if pr != r:
                w[[r, pr]] = w[[pr, r]]
            w[r] = (w[r] * pow(int(w[r, c]), p - 2, p)) % p
            col = w[:, c].copy()
            col[r] = 0
            nzr = np.nonzero(col)[0]
            if nzr.size:
                w[nzr] = (w[nzr] - np.outer(col[nzr], w[r])) % p
            pivots.append(c)
            r += 1
        return w.astype(a.dtype), r, pivots
    w = [list(row) for row in a]
    r = 0
    pivots = []
    for c in range(cols):
        if r == rows:
            break
        pr = next((i for i in range(r, rows) if w[i][c] != 0), None)
        if pr is None:
            continue
        w[r], w[pr] = w[pr], w[r]
        inv = Fraction(1) / w[r][c]
        w[r] = [x * inv for x in w[r]]
        for i in range(rows):
            if i != r and w[i][c] != 0:
                f = w[i][c]
                w[i] = [x - f * y for x, y in zip(w[i], w[r])]
        pivots.append(c)
        r += 1
    out = np.empty((rows, cols), dtype=object)
    out[:] = w
    return out, r, pivots


def right_nullspace_arr(field: FieldSpec, a: np.ndarray) -> np.ndarray:
    """Rows v with a @ v^T = 0 (basis, one row per free column)."""
    rows, cols = a.shape
    red, rank, pivots = rref_arr(field, a)
    free = [c for c in range(cols) if c not in set(pivots)]
    out = _zeros_arr(field, len(free), cols)
    out = out.copy()
    out.setflags(write=True)
    for k, f in enumerate(free):
        out[k, f] = field.one
        for r, c in enumerate(pivots):
            out[k, c] = field.neg(red[r, f])
    return out


def left_nullspace_arr(field: FieldSpec, a: np.ndarray) -> np.ndarray:
    """Rows v with v @ a = 0."""
    return right_nullspace_arr(field, np.ascontiguousarray(a.T))


def solve_arr(field: FieldSpec, a: np.ndarray, b: np.ndarray):
    """Some x with a @ x = b, or None; free variables are set to 0."""
    if a.shape[0] != b.shape[0]:
        raise ShapeError(f"solve: {a.shape[0]} rows vs rhs {b.shape[0]}")
    rows, cols = a.shape
    if field.is_prime_field:
        aug = np.concatenate([a.astype(np.int64), b.astype(np.int64)], axis=1)
    else:
        aug = np.concatenate([a, b], axis=1)
    red, rank, pivots = rref_arr(field, aug)
    if any(c >= cols for c in pivots):
        return None
    x = _zeros_arr(field, cols, b.shape[1]).copy()
    x.setflags(write=True)
    for r, c in enumerate(pivots):
        x[c] = red[r, cols:]
    return x


class RowBasis:
    """Incremental row space kept in reduced echelon form.

    Rows are mutually reduced, so reducing a vector is a single gather
    of its pivot coordinates followed by one vectorized elimination.
    """

    def __init__(self, field: FieldSpec, width: int):
        self.field = field
        self.width = width
        self._pivots: list[int] = []
        self._packed = field.is_prime_field and field.p == 2 and width >= 256
        if self._packed:
            self._words = max(1, (width + 63) // 64)
            self._rows = np.zeros((0, self._words), dtype=np.uint64)
        else:
            self._rows = _zeros_arr(field, 0, width)

    @property
    def rank(self) -> int:
        return len(self._pivots)

    def _reduce_packed(self, r: np.ndarray) -> np.ndarray:
        if self._pivots:
            cols = np.array(self._pivots)
            bits = (r[cols >> 6] >> (cols & 63).astype(np.uint64)) & np.uint64(1)
            sel = np.nonzero(bits)[0]
            if sel.size:
                r = r ^ np.bitwise_xor.reduce(self._rows[sel], axis=0)
        return r

    def reduce(self, row: np.ndarray) -> np.ndarray:
        """Canonical representative of row modulo this row space."""
        if self._packed:
            r = self._reduce_packed(_gf2_pack(row.reshape(1, -1))[0])
            return _gf2_unpack(r.reshape(1, -1), self.width)[0]
        if not self._pivots:
            return row.copy()
        coeffs = row[self._pivots]
        if self.field.is_prime_field:
            if not np.any(coeffs):
                return row.copy()
            r = (row.astype(np.int64) - coeffs.astype(np.int64) @
                 self._rows.astype(np.int64)) % self.field.p
            return r.astype(row.dtype)
        if all(c == 0 for c in coeffs):
            return row.copy()
        return row - np.dot(coeffs, self._rows)

    def insert(self, row: np.ndarray) -> bool:
        """Add a row; returns True when it enlarged the space."""
        if self._packed:
            r = self._reduce_packed(_gf2_pack(row.reshape(1, -1))[0])
            if not r.any():
                return False
            w = int(np.nonzero(r)[0][0])
            word = int(r[w])
            b = (word & -word).bit_length() - 1
            col = (w << 6) + b
            if self._rows.shape[0]:
                bits = ((self._rows[:, w] >> np.uint64(b)) & np.uint64(1)).astype(bool)
                if bits.any():
                    self._rows[bits] ^= r
            self._rows = np.vstack([self._rows, r.reshape(1, -1)])
            self._pivots.append(col)
            return True
        r = self.reduce(row)
        if self.field.is_prime_field:
            nz = np.nonzero(r)[0]
            if nz.size == 0:
                return False
            col = int(nz[0])
            r = (r.astype(np.int64) * pow(int(r[col]), self.field.p - 2,
                                          self.field.p)) % self.field.p
            r = r.astype(row.dtype)
            if self._rows.shape[0]:
                coeffs = self._rows[:, col].copy()
                hit = np.nonzero(coeffs)[0]
                if hit.size:
                    rows = self._rows.astype(np.int64, copy=True)
                    rows[hit] = (rows[hit] - np.outer(
                        coeffs[hit].astype(np.int64), r.astype(np.int64))) % self.field.p
                    self._rows = rows.astype(r.dtype)
        else:
            col = next((i for i, x in enumerate(r) if x != 0), None)
            if col is None:
                return False
            r = r * (Fraction(1) / r[col])
            for i in range(self._rows.shape[0]):
                if self._rows[i, col] != 0:
                    self._rows[i] = self._rows[i] - self._rows[i, col] * r
        self._rows = np.vstack([self._rows, r.reshape(1, -1)])
        self._pivots.append(col)
        return True

    def contains(self, row: np.ndarray) -> bool:
        r = self.reduce(row)
        return not np.any(r != 0) if self.field.is_prime_field else all(
            x == 0 for x in r)

    def rows_array(self) -> np.ndarray:
        """The RREF rows, sorted by pivot column."""
        order = np.argsort(np.array(self._pivots)) if self._pivots else []
        if self._packed:
            rows = self._rows[order] if len(self._pivots) else self._rows
            return _gf2_unpack(rows, self.width)
        return self._rows[order] if len(self._pivots) else self._rows

    def pivots_sorted(self) -> list[int]:
        return sorted(self._pivots)


class RowSpace:
    """Frozen RREF row space with cheap coordinatization."""

    def __init__(self, field: FieldSpec, rows: np.ndarray, pivots: Sequence[int]):
        self.field = field
        self.rows = rows
        self.pivots = list(pivots)
        self.width = rows.shape[1]

    @classmethod
    def from_rows(cls, field: FieldSpec, rows: np.ndarray) -> "RowSpace":
        red, rank, pivots = rref_arr(field, rows)
        return cls(field, red[:rank], pivots)

    @property
    def dim(self) -> int:
        return len(self.pivots)

    def coords(self, v: np.ndarray, check: bool = True) -> np.ndarray:
        c = v[self.pivots]
        if check:
            back = _matmul_arr(self.field, c.reshape(1, -1), self.rows)[0]
            same = np.array_equal(back, v) if self.field.is_prime_field else all(
                x == y for x, y in zip(back, v))
            if not same:
                raise ExactLinalgError("vector not in row space")
        return c

    def coords_rows(self, m: np.ndarray, check: bool = True) -> np.ndarray:
        c = m[:, self.pivots]
        if check and m.shape[0]:
            back = _matmul_arr(self.field, c, self.rows)
            same = np.array_equal(back, m) if self.field.is_prime_field else bool(
                np.all(back == m))
            if not same:
                raise ExactLinalgError("rows not in row space")
        return c

    def reduce(self, v: np.ndarray) -> np.ndarray:
        c = v[self.pivots]
        if self.dim == 0:
            return v.copy()
        return (v.astype(np.int64) - c.astype(np.int64) @ self.rows.astype(np.int64)) \
            % self.field.p if self.field.is_prime_field else v - np.dot(c, self.rows)

    def contains(self, v: np.ndarray) -> bool:
        r = self.reduce(v)
        return not np.any(r != 0) if self.field.is_prime_field else all(
            x == 0 for x in r)


class Matrix:
    """Immutable exact matrix over a FieldSpec."""

    __slots__ = ("field", "rows", "cols", "_a", "_tup")

    def __init__(self, field: FieldSpec, data, rows: int = None, cols: int = None):
        if isinstance(data, np.ndarray):
            a = data
            rows, cols = a.shape
            if field.is_prime_field:
                a = a % field.p if a.flags.writeable else a
        else:
            data = [list(r) for r in data]
            rows = len(data) if rows is None else rows
            cols = (len(data[0]) if data else 0) if cols is None else cols
            if any(len(r) != cols for r in data):
                raise ShapeError("ragged rows")
            a = _as_array(field, data, rows, cols)
        a.setflags(write=False)
        self.field = field
        self.rows = rows
        self.cols = cols
        self._a = a
        self._tup = None

    # -- constructors -------------------------------------------------------

    @classmethod
    def zeros(cls, field: FieldSpec, rows: int, cols: int) -> "Matrix":
        return cls(field, _zeros_arr(field, rows, cols))

    @classmethod
    def identity(cls, field: FieldSpec, n: int) -> "Matrix":
        if field.is_prime_field:
            return cls(field, np.eye(n, dtype=_dtype_for(field.p)))
        a = _zeros_arr(field, n, n).copy()
        for i in range(n):
            a[i, i] = Fraction(1)
        return cls(field, a)

    @classmethod
    def row_vector(cls, field: FieldSpec, entries: Iterable) -> "Matrix":
        return cls(field, [list(entries)])

    # -- views --------------------------------------------------------------

    @property
    def arr(self) -> np.ndarray:
        return self._a

    @property
    def entries(self):
        if self._tup is None:
            if self.field.is_prime_field:
                tup = tuple(tuple(int(x) for x in row) for row in self._a)
            else:
                tup = tuple(tuple(row) for row in self._a)
            self._tup = tup
        return self._tup

    @property
    def shape(self):
        return (self.rows, self.cols)

    def entry(self, i: int, j: int):
        v = self._a[i, j]
        return int(v) if self.field.is_prime_field else v

    def row(self, i: int) -> np.ndarray:
        return self._a[i]

    def transpose(self) -> "Matrix":
        return Matrix(self.field, np.ascontiguousarray(self._a.T))

    @property
    def T(self) -> "Matrix":
        return self.transpose()

    def is_zero(self) -> bool:
        return not np.any(self._a != 0) if self.field.is_prime_field else all(
            x == 0 for x in self._a.flat)

    # -- arithmetic ----------------------------------------------------------

    def _check_field(self, other: "Matrix"):
        if self.field != other.field:
            raise FieldMismatch(f"{self.field} vs {other.field}")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check_field(other)
        if self.shape != other.shape:
            raise ShapeError(f"{self.shape} + {other.shape}")
        if self.field.is_prime_field:
            return Matrix(self.field,
                          (self._a.astype(np.int64) + other._a) % self.field.p)
        return Matrix(self.field, self._a + other._a)

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check_field(other)
        if self.shape != other.shape:
            raise ShapeError(f"{self.shape} - {other.shape}")
        if self.field.is_prime_field:
            return Matrix(self.field,
                          (self._a.astype(np.int64) - other._a) % self.field.p)
        return Matrix(self.field, self._a - other._a)

    def __neg__(self) -> "Matrix":
        if self.field.is_prime_field:
            return Matrix(self.field, (-self._a.astype(np.int64)) % self.field.p)
        return Matrix(self.field, -self._a)

    def scale(self, c) -> "Matrix":
        c = self.field.normalize(c)
        if self.field.is_prime_field:
            return Matrix(self.field, (self._a.astype(np.int64) * c) % self.field.p)
        return Matrix(self.field, self._a * c)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        self._check_field(other)
        return Matrix(self.field, _matmul_arr(self.field, self._a, other._a))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        if self.field != other.field or self.shape != other.shape:
            return False
        return np.array_equal(self._a, other._a) if self.field.is_prime_field \
            else bool(np.all(self._a == other._a)) if self._a.size else True

    def __hash__(self):
        return hash((self.field, self.shape, self.entries))

    def __repr__(self):
        return f"Matrix({self.field}, {self.rows}x{self.cols})"


def rref(m: Matrix):
    """(reduced, rank, pivots): the unique reduced row echelon form."""
    red, rank, pivots = rref_arr(m.field, m.arr)
    return Matrix(m.field, red), rank, list(pivots)


def rank(m: Matrix) -> int:
    return rref_arr(m.field, m.arr)[1]


def nullspace_basis(m: Matrix) -> Matrix:
    """Rows span the right kernel: each row v has m @ v^T = 0."""
    return Matrix(m.field, right_nullspace_arr(m.field, m.arr))


def left_nullspace(m: Matrix) -> Matrix:
    """Rows v with v @ m = 0."""
    return Matrix(m.field, left_nullspace_arr(m.field, m.arr))


def solve(m: Matrix, rhs: Matrix) -> Optional[Matrix]:
    """Some x with m @ x = rhs when consistent, else None (free vars 0)."""
    if m.field != rhs.field:
        raise FieldMismatch(f"{m.field} vs {rhs.field}")
    x = solve_arr(m.field, m.arr, rhs.arr)
    return None if x is None else Matrix(m.field, x)


def hstack(ms: Sequence[Matrix]) -> Matrix:
    field = ms[0].field
    return Matrix(field, np.concatenate([m.arr for m in ms], axis=1))


def vstack(ms: Sequence[Matrix]) -> Matrix:
    field = ms[0].field
    return Matrix(field, np.concatenate([m.arr for m in ms], axis=0))


def block_diag(ms: Sequence[Matrix], field: FieldSpec = None) -> Matrix:
    field = field or ms[0].field
    r = sum(m.rows for m in ms)
    c = sum(m.cols for m in ms)
    out = _zeros_arr(field, r, c).copy()
    out.setflags(write=True)
    i = j = 0
    for m in ms:
        out[i:i + m.rows, j:j + m.cols] = m.arr
        i += m.rows
        j += m.cols
    return Matrix(field, out)


def kron(a: Matrix, b: Matrix) -> Matrix:
    if a.field != b.field:
        raise FieldMismatch(f"{a.field} vs {b.field}")
    field = a.field
    if field.is_prime_field:
        return Matrix(field, np.kron(a.arr.astype(np.int64), b.arr) % field.p)
    out = _zeros_arr(field, a.rows * b.rows, a.cols * b.cols).copy()
    out.setflags(write=True)
    for i in range(a.rows):
        for j in range(a.cols):
            out[i * b.rows:(i + 1) * b.rows, j * b.cols:(j + 1) * b.cols] = \
                a.arr[i, j] * b.arr
    return Matrix(field, out)
