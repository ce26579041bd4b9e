"""Finite-dimensional associative algebras.

An algebra is stored as a basis with structure constants c[i][j][k]
(b_i * b_j = sum_k c[i][j][k] b_k), a unit vector, a complete list of
orthogonal primitive idempotents, and a basis of the Jacobson radical.
Constructors: quiver-with-relations presentations, explicit tables,
opposite, tensor and enveloping algebras.

Path composition convention: the path [a, b] means "a then b", and right
modules are representations where arrows act in this order.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .errors import GorhomError, InternalInconsistency
from .exactlinalg import (
    FieldSpec,
    FieldMismatch,
    Matrix,
    RowBasis,
    RowSpace,
    _zeros_arr,
    left_nullspace_arr,
    rref_arr,
    solve_arr,
)


class NotAdmissible(GorhomError):
    """The relation ideal does not contain all paths of the bound length."""


class InhomogeneousRelation(GorhomError):
    """A relation mixes paths with different sources or targets."""


class ValidationFailed(GorhomError):
    def __init__(self, report: "AlgebraValidationReport"):
        super().__init__(f"algebra validation failed: {report.first_failure}")
        self.report = report


class QuiverTooLarge(GorhomError):
    pass


class DisconnectedAlgebraWarning(UserWarning):
    pass


@dataclass(frozen=True)
class QuiverPresentation:
    """Quiver with relations.  Relations are K-linear combinations of
    paths, each path a nonempty composable arrow-name sequence; all paths
    in one relation must share source and target."""

    vertices: tuple
    arrows: tuple  # (name, source, target)
    relations: tuple  # each: tuple of (coeff, tuple-of-arrow-names)
    max_path_length: int

    def __post_init__(self):
        if self.max_path_length < 2:
            raise GorhomError("max_path_length must be >= 2")
        names = set()
        vset = set(self.vertices)
        if len(vset) != len(self.vertices):
            raise GorhomError("duplicate vertex labels")
        for name, s, t in self.arrows:
            if name in names or name in vset:
                raise GorhomError(f"duplicate arrow name {name!r}")
            names.add(name)
            if s not in vset or t not in vset:
                raise GorhomError(f"arrow {name!r} endpoints must be declared vertices")


@dataclass
class AlgebraValidationReport:
    associativity_ok: bool = True
    unit_ok: bool = True
    idempotents_ok: bool = True
    radical_ok: bool = True
    primitivity_verified: bool = True
    witnesses: dict = dc_field(default_factory=dict)

    @property
    def all_ok(self) -> bool:
        return (self.associativity_ok and self.unit_ok and
                self.idempotents_ok and self.radical_ok)

    @property
    def first_failure(self) -> Optional[str]:
        for key in ("associativity", "unit", "idempotents", "radical"):
            if not getattr(self, key + "_ok"):
                return f"{key}: {self.witnesses.get(key, 'failed')}"
        return None


class Algebra:
    """Immutable finite-dimensional algebra over GF(p) or the rationals."""

    def __init__(self, field: FieldSpec, structure: np.ndarray, unit: np.ndarray,
                 idempotents: np.ndarray, radical: np.ndarray,
                 basis_labels: Sequence[str], name: str = "",
                 generators: Optional[np.ndarray] = None,
                 presentation: object = None):
        self.field = field
        self.dim = structure.shape[0]
        self._c = structure
        self._c.setflags(write=False)
        self.unit_row = unit
        self.idem_rows = idempotents
        rad_red, rad_rank, rad_piv = rref_arr(field, radical)
        self.radical_rows = rad_red[:rad_rank]
        self.radical_space = RowSpace(field, self.radical_rows, rad_piv)
        self.basis_labels = tuple(basis_labels)
        self.name = name or f"algebra-{self.dim}"
        self.gen_rows = generators if generators is not None else np.eye(
            self.dim, dtype=self._c.dtype) if field.is_prime_field else _ident_obj(self.dim)
        self.presentation = presentation
        self._cache: dict = {}
        self._opposite_of: Optional["Algebra"] = None

    # -- raw arithmetic on coefficient rows ---------------------------------

    def lmat(self, x: np.ndarray) -> np.ndarray:
        """Matrix of left multiplication: y |-> x*y is y @ lmat(x)."""
        return _contract(self.field, x, self._c, 0)

    def rmat(self, y: np.ndarray) -> np.ndarray:
        """Matrix of right multiplication: x |-> x*y is x @ rmat(y)."""
        return _contract(self.field, y, self._c, 1)

    def mul(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        out = _contract2(self.field, x, y, self._c)
        return out

    def basis_row(self, i: int) -> np.ndarray:
        e = _zeros_arr(self.field, 1, self.dim).copy()
        e.setflags(write=True)
        e[0, i] = self.field.one
        return e[0]

    @property
    def structure_constants(self):
        if self.field.is_prime_field:
            return tuple(tuple(tuple(int(v) for v in row) for row in plane)
                         for plane in self._c)
        return tuple(tuple(tuple(row) for row in plane) for plane in self._c)

    @property
    def unit(self) -> Matrix:
        return Matrix(self.field, self.unit_row.reshape(1, -1))

    @property
    def idempotents(self) -> tuple:
        return tuple(Matrix(self.field, r.reshape(1, -1)) for r in self.idem_rows)

    @property
    def n_idempotents(self) -> int:
        return self.idem_rows.shape[0]

    @property
    def radical_dim(self) -> int:
        return self.radical_rows.shape[0]

    def __repr__(self):
        return f"Algebra({self.name}, dim={self.dim}, {self.field})"


def _ident_obj(n: int) -> np.ndarray:
    a = _zeros_arr(FieldSpec("rational"), n, n).copy()
    for i in range(n):
        a[i, i] = Fraction(1)
    return a


def _contract(field: FieldSpec, v: np.ndarray, c: np.ndarray, axis: int) -> np.ndarray:
    """Sum_i v[i] * c[i,:,:] (axis 0) or Sum_j v[j] * c[:,j,:] (axis 1)."""
    if field.is_prime_field:
        out = np.tensordot(v.astype(np.int64), c.astype(np.int64),
                           axes=([0], [axis])) % field.p
        return out
    n = c.shape[0]
    out = _zeros_arr(field, n, n).copy()
    for i, vi in enumerate(v):
        if vi != 0:
            out += vi * (c[i] if axis == 0 else c[:, i, :])
    return out


def _contract2(field: FieldSpec, x: np.ndarray, y: np.ndarray, c: np.ndarray) -> np.ndarray:
    if field.is_prime_field:
        t = np.tensordot(x.astype(np.int64), c.astype(np.int64), axes=([0], [0]))
        return (y.astype(np.int64) @ t) % field.p
    out = _zeros_arr(field, 1, c.shape[0])[0].copy()
    for i, xi in enumerate(x):
        if xi == 0:
            continue
        for j, yj in enumerate(y):
            if yj != 0:
                out = out + xi * yj * c[i, j]
    return out


# ---------------------------------------------------------------------------
# Jacobson radical.
#
# Over the rationals (and over GF(p) with p > dim) the radical is the
# radical of the trace form.  Over small characteristic we run the
# p-power trace refinement: a descending chain of subspaces cut out by
# the functionals x |-> Tr(M_{xy}^{p^k}) / p^k mod p on integer lifts,
# for p^k <= dim.


def _radical_rows_raw(field: FieldSpec, c: np.ndarray, unit: np.ndarray) -> np.ndarray:
    n = c.shape[0]
    if n == 0:
        return _zeros_arr(field, 0, 0)

    def lift_lmat(z):
        m = _contract(field, z, c, 0)
        if field.is_prime_field:
            return m.astype(object)
        return m

    def mulrow(x, y):
        return _contract2(field, x, y, c)

    basis = [np.eye(n, dtype=np.int64)[i] if field.is_prime_field
             else _ident_obj(n)[i] for i in range(n)]

    if not field.is_prime_field:
        tau = [np.trace(lift_lmat(b)) for b in basis]
        cond = _zeros_arr(field, n, n).copy()
        for t in range(n):
            for u in range(n):
                prod = mulrow(basis[t], basis[u])
                cond[t, u] = sum(prod[k] * tau[k] for k in range(n))
        sol = left_nullspace_arr(field, cond)
        red, rk, _ = rref_arr(field, sol)
        return red[:rk]

    p = field.p
    levels = 0
    while p ** levels <= n:
        levels += 1
    # levels = smallest m with p^m > n; chain runs k = 0 .. levels-1
    V = np.eye(n, dtype=np.int64)
    for k in range(levels):
        s = V.shape[0]
        if s == 0:
            break
        modulus = p ** (k + 1)
        cond = np.zeros((s, s), dtype=np.int64)
        for t in range(s):
            for u in range(s):
                z = mulrow(V[t] % p, V[u] % p)
                M = _contract(field, z, c, 0).astype(np.int64) % modulus
                P = _matpow_mod(M, p ** k, modulus)
                tr = int(np.trace(P)) % modulus
                if tr % (p ** k) != 0:
                    raise InternalInconsistency(
                        "trace divisibility violated in radical chain")
                cond[t, u] = (tr // (p ** k)) % p
        K = left_nullspace_arr(field, cond.astype(np.int64) % p)
        V = (K.astype(np.int64) @ V) % p
    red, rk, _ = rref_arr(field, V % p)
    return red[:rk]


def _matpow_mod(m: np.ndarray, e: int, modulus: int) -> np.ndarray:
    n = m.shape[0]
    result = np.eye(n, dtype=np.int64)
    base = m % modulus
    while e:
        if e & 1:
            result = (result @ base) % modulus
        base = (base @ base) % modulus
        e >>= 1
    return result


def radical_basis(a: Algebra) -> Matrix:
    """Recompute the Jacobson radical from the multiplication table."""
    rows = _radical_rows_raw(a.field, a._c, a.unit_row)
    return Matrix(a.field, rows)


# ---------------------------------------------------------------------------
# Quotient of a table by a two-sided ideal (raw tables; used for A/J checks).


def _quotient_table(field, c, unit, ideal: RowSpace):
    n = c.shape[0]
    nonpiv = [i for i in range(n) if i not in set(ideal.pivots)]
    qn = len(nonpiv)
    if field.is_prime_field:
        cq = np.zeros((qn, qn, qn), dtype=np.int64)
    else:
        cq = _zeros_arr(field, qn * qn, qn).reshape(qn, qn, qn).copy()
    lifts = []
    for i in nonpiv:
        e = _zeros_arr(field, 1, n)[0].copy()
        e[i] = field.one
        lifts.append(e)
    for i in range(qn):
        for j in range(qn):
            prod = _contract2(field, lifts[i], lifts[j], c)
            red = ideal.reduce(prod)
            cq[i][j] = red[nonpiv]
    uq = ideal.reduce(unit)[nonpiv]
    return cq, uq


# ---------------------------------------------------------------------------
# Constructors.


def _path_key(path):
    return (-len(path[1]), path[1]) if path[0] == "p" else (0, path[1])


class _PathSpace:
    """Paths of length <= bound in a quiver, in a fixed deterministic order:
    longest first so reduced products rewrite long paths into short ones."""

    def __init__(self, pres: QuiverPresentation, bound: int, cap: int = 40000):
        self.pres = pres
        self.vidx = {v: i for i, v in enumerate(pres.vertices)}
        self.aidx = {a[0]: i for i, a in enumerate(pres.arrows)}
        self.src = [self.vidx[a[1]] for a in pres.arrows]
        self.tgt = [self.vidx[a[2]] for a in pres.arrows]
        paths = [("v", (i,)) for i in range(len(pres.vertices))]
        frontier = paths
        for _ in range(bound):
            new = []
            for kind, seq in frontier:
                end = self.path_target((kind, seq))
                for ai in range(len(pres.arrows)):
                    if self.src[ai] == end:
                        nseq = (ai,) if kind == "v" else seq + (ai,)
                        new.append(("p", nseq))
            paths.extend(new)
            frontier = new
            if len(paths) > cap:
                raise QuiverTooLarge(
                    f"more than {cap} paths up to length {bound}")
            if not frontier:
                break
        paths.sort(key=lambda p: (-len(p[1]) if p[0] == "p" else 0,
                                  p[0] == "v", p[1]))
        self.paths = paths
        self.index = {p: i for i, p in enumerate(paths)}

    def path_source(self, p):
        kind, seq = p
        return seq[0] if kind == "v" else self.src[seq[0]]

    def path_target(self, p):
        kind, seq = p
        return seq[0] if kind == "v" else self.tgt[seq[-1]]

    def path_len(self, p):
        return 0 if p[0] == "v" else len(p[1])

    def concat(self, p, q):
        """p then q; None when not composable."""
        if self.path_target(p) != self.path_source(q):
            return None
        if p[0] == "v":
            return q
        if q[0] == "v":
            return p
        return ("p", p[1] + q[1])


def from_quiver(pres: QuiverPresentation, field: FieldSpec,
                name: str = "") -> Algebra:
    """Bounded linear closure of the relation ideal; the quotient basis is
    the set of irreducible path normal forms of length < L.  Raises
    NotAdmissible when some path class of length >= L survives."""
    L = pres.max_path_length
    work = max(L, 2 * L - 2)
    ps = _PathSpace(pres, work)
    npaths = len(ps.paths)

    rels = []
    for ri, rel in enumerate(pres.relations):
        terms = []
        st = None
        for coeff, names in rel:
            if not names:
                raise GorhomError(f"relation {ri}: empty path")
            try:
                seq = tuple(ps.aidx[nm] for nm in names)
            except KeyError as exc:
                raise GorhomError(f"relation {ri}: unknown arrow {exc}")
            for a, b in zip(seq, seq[1:]):
                if ps.tgt[a] != ps.src[b]:
                    raise GorhomError(f"relation {ri}: non-composable path")
            if len(seq) > L:
                raise GorhomError(
                    f"relation {ri}: path longer than max_path_length")
            p = ("p", seq)
            pst = (ps.path_source(p), ps.path_target(p))
            if st is None:
                st = pst
            elif st != pst:
                raise InhomogeneousRelation(
                    f"relation {ri} mixes source/target {st} vs {pst}")
            terms.append((field.normalize(coeff), p))
        rels.append((st, terms))

    rb = RowBasis(field, npaths)
    for (rs, rt), terms in rels:
        maxlen = max(ps.path_len(p) for _, p in terms)
        for lp in ps.paths:
            if ps.path_target(lp) != rs:
                continue
            llen = ps.path_len(lp)
            if llen + maxlen > work:
                continue
            for rp in ps.paths:
                if ps.path_source(rp) != rt:
                    continue
                if llen + maxlen + ps.path_len(rp) > work:
                    continue
                vec = _zeros_arr(field, 1, npaths)[0].copy()
                for coeff, p in terms:
                    whole = ps.concat(ps.concat(lp, p), rp)
                    vec[ps.index[whole]] = field.add(vec[ps.index[whole]], coeff)
                rb.insert(vec)

    # a-posteriori admissibility: every long path class must vanish
    for p in ps.paths:
        if ps.path_len(p) >= L:
            vec = _zeros_arr(field, 1, npaths)[0].copy()
            vec[ps.index[p]] = field.one
            if not rb.contains(vec):
                label = "*".join(pres.arrows[ai][0] for ai in p[1])
                raise NotAdmissible(
                    f"path {label} of length {ps.path_len(p)} is nonzero in the "
                    f"quotient; raise max_path_length or fix the relations")

    pivots = set(rb.pivots_sorted())
    basis_paths = [p for i, p in enumerate(ps.paths) if i not in pivots]
    basis_idx = {p: i for i, p in enumerate(basis_paths)}
    nonpiv = [ps.index[p] for p in basis_paths]
    n = len(basis_paths)

    def label(p):
        if p[0] == "v":
            return f"e_{pres.vertices[p[1][0]]}"
        return "*".join(pres.arrows[ai][0] for ai in p[1])

    c = np.zeros((n, n, n), dtype=np.int64) if field.is_prime_field \
        else _zeros_arr(field, n * n, n).reshape(n, n, n).copy()
    for i, u in enumerate(basis_paths):
        for j, v in enumerate(basis_paths):
            w = ps.concat(u, v)
            if w is None:
                continue
            vec = _zeros_arr(field, 1, npaths)[0].copy()
            vec[ps.index[w]] = field.one
            red = rb.reduce(vec)
            c[i][j] = red[nonpiv]

    unit = _zeros_arr(field, 1, n)[0].copy()
    idem = _zeros_arr(field, len(pres.vertices), n).copy()
    for vi in range(len(pres.vertices)):
        k = basis_idx[("v", (vi,))]
        unit[k] = field.one
        idem[vi, k] = field.one
    rad = _zeros_arr(field, sum(1 for p in basis_paths if p[0] == "p"), n).copy()
    r = 0
    for i, p in enumerate(basis_paths):
        if p[0] == "p":
            rad[r, i] = field.one
            r += 1

    gens = []
    for vi in range(len(pres.vertices)):
        gens.append(idem[vi])
    for ai in range(len(pres.arrows)):
        vec = _zeros_arr(field, 1, npaths)[0].copy()
        vec[ps.index[("p", (ai,))]] = field.one
        gens.append(rb.reduce(vec)[nonpiv])
    gen_arr = np.stack(gens) if gens else _zeros_arr(field, 0, n)

    if field.is_prime_field:
        c = c % field.p
        c = c.astype(np.int8 if field.p <= 11 else np.int64)

    a = Algebra(field, c, unit, idem, rad, [label(p) for p in basis_paths],
                name=name or "quiver-algebra", generators=gen_arr,
                presentation=pres)
    _warn_if_disconnected(a)
    return a


def from_table(basis: Sequence[str], unit: Sequence, products,
               idempotents, field: FieldSpec, name: str = "") -> Algebra:
    """Build from an explicit multiplication table.  The supplied
    idempotents must be orthogonal, primitive and sum to the unit; the
    radical is computed from the table.  Raises ValidationFailed."""
    n = len(basis)
    if field.is_prime_field:
        c = np.array([[[field.normalize(v) for v in products[i][j]]
                       for j in range(n)] for i in range(n)], dtype=np.int64)
        c = c.astype(np.int8 if field.p <= 11 else np.int64)
    else:
        c = _zeros_arr(field, n * n, n).reshape(n, n, n).copy()
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    c[i, j, k] = field.normalize(products[i][j][k])
    u = np.array([field.normalize(v) for v in unit], dtype=c.dtype) \
        if field.is_prime_field else np.array(
            [field.normalize(v) for v in unit], dtype=object)
    e = _zeros_arr(field, len(idempotents), n).copy()
    for r, row in enumerate(idempotents):
        for k in range(n):
            e[r, k] = field.normalize(row[k])
    rad = _radical_rows_raw(field, c, u)
    a = Algebra(field, c, u, e, rad, basis, name=name or "table-algebra")
    report = validate(a)
    if not report.all_ok:
        raise ValidationFailed(report)
    _warn_if_disconnected(a)
    return a


def opposite(a: Algebra) -> Algebra:
    """Same basis, c_op[i][j][k] = c[j][i][k]; an involution."""
    if a._opposite_of is not None:
        return a._opposite_of
    if "opposite" in a._cache:
        return a._cache["opposite"]
    c_op = np.ascontiguousarray(a._c.transpose(1, 0, 2))
    op = Algebra(a.field, c_op, a.unit_row, a.idem_rows, a.radical_rows,
                 a.basis_labels, name=f"op({a.name})",
                 generators=a.gen_rows, presentation=None)
    op._opposite_of = a
    a._cache["opposite"] = op
    return op


def tensor(a: Algebra, b: Algebra, name: str = "") -> Algebra:
    """Tensor product over the base field; basis b_i (x) b'_j in
    lexicographic order, idempotents all e_i (x) e'_j."""
    if a.field != b.field:
        raise FieldMismatch(f"{a.field} vs {b.field}")
    field = a.field
    na, nb = a.dim, b.dim
    n = na * nb
    if field.is_prime_field:
        c = np.einsum("ijk,lmn->iljmkn", a._c.astype(np.int64),
                      b._c.astype(np.int64)).reshape(n, n, n) % field.p
        c = c.astype(np.int8 if field.p <= 11 else np.int64)
    else:
        c = _zeros_arr(field, n * n, n).reshape(n, n, n).copy()
        for i in range(na):
            for l in range(nb):
                for j in range(na):
                    for m in range(nb):
                        for k in range(na):
                            for q in range(nb):
                                c[i * nb + l, j * nb + m, k * nb + q] = \
                                    a._c[i, j, k] * b._c[l, m, q]
    unit = _kron_row(field, a.unit_row, b.unit_row)
    idem = np.stack([_kron_row(field, ea, eb)
                     for ea in a.idem_rows for eb in b.idem_rows]) \
        if a.idem_rows.shape[0] and b.idem_rows.shape[0] \
        else _zeros_arr(field, 0, n)
    rb = RowBasis(field, n)
    eyeb = np.eye(nb, dtype=np.int64) if field.is_prime_field else _ident_obj(nb)
    eyea = np.eye(na, dtype=np.int64) if field.is_prime_field else _ident_obj(na)
    for x in a.radical_rows:
        for y in eyeb:
            rb.insert(_kron_row(field, x, y))
    for x in eyea:
        for y in b.radical_rows:
            rb.insert(_kron_row(field, x, y))
    rad = rb.rows_array()
    labels = [f"{la}(x){lb}" for la in a.basis_labels for lb in b.basis_labels]
    gens = []
    for g in a.gen_rows:
        gens.append(_kron_row(field, g, b.unit_row))
    for g in b.gen_rows:
        gens.append(_kron_row(field, a.unit_row, g))
    t = Algebra(field, c, unit, idem, rad,
                labels, name=name or f"tensor({a.name},{b.name})",
                generators=np.stack(gens) if gens else None)
    ok, why = _radical_axioms(t)
    if not ok:
        raise InternalInconsistency(f"tensor radical check failed: {why}")
    _warn_if_disconnected(t)
    return t


def _kron_row(field: FieldSpec, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    if field.is_prime_field:
        return (np.kron(x.astype(np.int64), y.astype(np.int64))) % field.p
    return np.kron(x, y)


def enveloping(a: Algebra) -> Algebra:
    """A^op (x) A; cached on the algebra."""
    if "enveloping" in a._cache:
        return a._cache["enveloping"]
    env = tensor(opposite(a), a, name=f"env({a.name})")
    a._cache["enveloping"] = env
    return env


# ---------------------------------------------------------------------------
# Validation.


def validate(a: Algebra) -> AlgebraValidationReport:
    """Check all Algebra invariants; never throws."""
    rep = AlgebraValidationReport()
    field, n, c = a.field, a.dim, a._c

    # associativity: (b_i b_j) b_k = b_i (b_j b_k) for all basis triples
    if field.is_prime_field and n > 0:
        c64 = c.astype(np.int64)
        flat_m_kr = c64.reshape(n, n * n)          # [m, (k,r)]
        for i in range(n):
            # t1[j,(k,r)] = sum_m c[i,j,m] c[m,k,r] = ((b_i b_j) b_k)_r
            t1 = (c64[i] @ flat_m_kr).reshape(n, n, n) % field.p
            # t2[j,k,r] = sum_m c[j,k,m] c[i,m,r] = (b_i (b_j b_k))_r
            t2 = np.tensordot(c64.reshape(n * n, n), c64[i],
                              axes=([1], [0])).reshape(n, n, n) % field.p
            if not np.array_equal(t1, t2):
                bad = np.argwhere(t1 != t2)[0]
                rep.associativity_ok = False
                rep.witnesses["associativity"] = (
                    f"(b{i}*b{bad[0]})*b{bad[1]} != b{i}*(b{bad[0]}*b{bad[1]})")
                break
    else:
        for i in range(n):
            for j in range(n):
                pij = a.mul(a.basis_row(i), a.basis_row(j))
                for k in range(n):
                    lhs = a.mul(pij, a.basis_row(k))
                    rhs = a.mul(a.basis_row(i), a.mul(a.basis_row(j), a.basis_row(k)))
                    if not _rows_equal(field, lhs, rhs):
                        rep.associativity_ok = False
                        rep.witnesses["associativity"] = \
                            f"(b{i}*b{j})*b{k} != b{i}*(b{j}*b{k})"
                        break
                if not rep.associativity_ok:
                    break
            if not rep.associativity_ok:
                break

    for j in range(n):
        bj = a.basis_row(j)
        if not _rows_equal(field, a.mul(a.unit_row, bj), bj) or \
           not _rows_equal(field, a.mul(bj, a.unit_row), bj):
            rep.unit_ok = False
            rep.witnesses["unit"] = f"unit law fails on basis element {j}"
            break

    r = a.idem_rows.shape[0]
    for i in range(r):
        for j in range(r):
            prod = a.mul(a.idem_rows[i], a.idem_rows[j])
            want = a.idem_rows[i] if i == j else _zeros_arr(field, 1, n)[0]
            if not _rows_equal(field, prod, want):
                rep.idempotents_ok = False
                rep.witnesses["idempotents"] = f"e{i}*e{j} != " + \
                    ("e" + str(i) if i == j else "0")
    if rep.idempotents_ok and r:
        s = a.idem_rows[0].copy()
        for i in range(1, r):
            s = s + a.idem_rows[i]
            if field.is_prime_field:
                s = s % field.p
        if not _rows_equal(field, s, a.unit_row):
            rep.idempotents_ok = False
            rep.witnesses["idempotents"] = "idempotents do not sum to the unit"
    if rep.idempotents_ok:
        for i in range(r):
            prim = _is_primitive(a, a.idem_rows[i])
            if prim is False:
                rep.idempotents_ok = False
                rep.witnesses["idempotents"] = f"idempotent {i} is not primitive"
                break
            if prim is None:
                rep.primitivity_verified = False

    ok, why = _radical_axioms(a)
    if not ok:
        rep.radical_ok = False
        rep.witnesses["radical"] = why
    return rep


def _rows_equal(field, x, y) -> bool:
    if field.is_prime_field:
        return np.array_equal(np.asarray(x) % field.p, np.asarray(y) % field.p)
    return all(p == q for p, q in zip(x, y))


def _radical_axioms(a: Algebra):
    """J is a two-sided ideal, nilpotent, with semisimple quotient."""
    field, n = a.field, a.dim
    J = a.radical_rows
    sp = a.radical_space
    for row in J:
        for g in a.gen_rows:
            if not sp.contains(a.mul(row, g)):
                return False, "radical is not a right ideal"
            if not sp.contains(a.mul(g, row)):
                return False, "radical is not a left ideal"
    cur = J
    for _ in range(n + 1):
        if cur.shape[0] == 0:
            break
        rb = RowBasis(field, n)
        for x in cur:
            for y in J:
                rb.insert(a.mul(x, y))
        nxt = rb.rows_array()
        if nxt.shape[0] >= cur.shape[0]:
            # J^(k+1) = J^k != 0 cannot reach zero (Nakayama)
            return False, "radical is not nilpotent"
        cur = nxt
    if cur.shape[0] != 0:
        return False, "radical is not nilpotent"
    cq, uq = _quotient_table(field, a._c, a.unit_row, sp)
    qrad = _radical_rows_raw(field, cq, uq)
    if qrad.shape[0] != 0:
        return False, "quotient by the radical is not semisimple"
    return True, ""


def _is_primitive(a: Algebra, e_row: np.ndarray):
    """True / False / None (unverified).  e is primitive iff eAe modulo
    its radical has no idempotent besides 0 and 1."""
    field, n = a.field, a.dim
    rows = []
    for j in range(n):
        rows.append(a.mul(a.mul(e_row, a.basis_row(j)), e_row))
    sub = RowSpace.from_rows(field, np.stack(rows))
    s = sub.dim
    if s == 0:
        return False
    lifts = sub.rows
    cB = _zeros_arr(field, s * s, s).reshape(s, s, s).copy() \
        if not field.is_prime_field else np.zeros((s, s, s), dtype=np.int64)
    for i in range(s):
        for j in range(s):
            cB[i][j] = sub.coords(a.mul(lifts[i], lifts[j]), check=False)
    uB = sub.coords(e_row, check=False)
    radB = _radical_rows_raw(field, cB, uB)
    radsp = RowSpace.from_rows(field, radB)
    cC, uC = _quotient_table(field, cB, uB, radsp)
    m = cC.shape[0]
    if m == 1:
        return True
    if field.is_prime_field and field.p ** m <= 4096:
        zero = np.zeros(m, dtype=np.int64)
        for coeffs in itertools.product(range(field.p), repeat=m):
            x = np.array(coeffs, dtype=np.int64)
            if np.array_equal(x, zero) or _rows_equal(field, x, uC):
                continue
            xx = _contract2(field, x, x, cC)
            if _rows_equal(field, xx, x):
                return False
        return True
    return _minpoly_primitivity_probe(field, cC, uC)


def _minpoly_primitivity_probe(field, cC, uC):
    """Factor minimal polynomials of basis elements; a reducible minimal
    polynomial inside a would-be division algebra is a disproof, a full
    degree irreducible one is a proof.  Otherwise unverified (None)."""
    import sympy

    m = cC.shape[0]
    x = sympy.Symbol("x")
    for idx in range(m):
        z = _zeros_arr(field, 1, m)[0].copy()
        z[idx] = field.one
        # minimal polynomial by linear dependence of powers
        powers = [uC.copy()]
        rb = RowBasis(field, m)
        rb.insert(uC)
        cur = uC
        while True:
            cur = _contract2(field, cur, z, cC)
            if not rb.insert(cur):
                powers.append(cur)
                break
            powers.append(cur)
        deg = len(powers) - 1
        stacked = np.stack(powers[:-1])
        target = powers[-1]
        sol = solve_arr(field, np.ascontiguousarray(stacked.T),
                        target.reshape(-1, 1))
        coeffs = [field.neg(sol[i, 0]) for i in range(deg)] + [field.one]
        if field.is_prime_field:
            poly = sympy.Poly([int(coeffs[deg - i]) for i in range(deg + 1)],
                              x, modulus=field.p)
        else:
            poly = sympy.Poly([sympy.Rational(coeffs[deg - i])
                               for i in range(deg + 1)], x, domain="QQ")
        factors = poly.factor_list()[1]
        if len(factors) > 1 or any(mult > 1 for _, mult in factors):
            return False
        if deg == m:
            return True
    return None


def _warn_if_disconnected(a: Algebra):
    r = a.n_idempotents
    if r <= 1:
        return
    parent = list(range(r))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in range(r):
        for j in range(i + 1, r):
            linked = False
            for k in range(a.dim):
                v = a.mul(a.mul(a.idem_rows[i], a.basis_row(k)), a.idem_rows[j])
                w = a.mul(a.mul(a.idem_rows[j], a.basis_row(k)), a.idem_rows[i])
                if np.any(v != 0) or np.any(w != 0):
                    linked = True
                    break
            if linked:
                parent[find(i)] = find(j)
    if len({find(i) for i in range(r)}) > 1:
        warnings.warn(f"algebra {a.name} is disconnected",
                      DisconnectedAlgebraWarning, stacklevel=3)


def table_equal(a: Algebra, b: Algebra) -> bool:
    """Structure constants, unit and idempotents equal entrywise."""
    if a.field != b.field or a.dim != b.dim:
        return False
    if a.field.is_prime_field:
        return (np.array_equal(a._c, b._c) and
                np.array_equal(a.unit_row, b.unit_row) and
                np.array_equal(a.idem_rows, b.idem_rows))
    return (a.structure_constants == b.structure_constants and
            tuple(a.unit_row) == tuple(b.unit_row))
