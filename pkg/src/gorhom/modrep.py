"""Finite-dimensional right modules and the standard functors.

Row-vector convention throughout: a module of dimension d stores one
d x d matrix rho(b) per algebra basis element with m*a = m @ rho(a), so
rho(ab) = rho(a) @ rho(b).  Module maps act as f(m) = m @ F and satisfy
rho_source(b) @ F = F @ rho_target(b).

The zero module is a first-class citizen; every operation accepts it.
"""

from __future__ import annotations

import itertools
import os
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .algebra import Algebra, opposite, enveloping
from .errors import GorhomError, InternalInconsistency
from .exactlinalg import (
    FieldSpec,
    Matrix,
    RowBasis,
    RowSpace,
    _zeros_arr,
    left_nullspace_arr,
    right_nullspace_arr,
    rref_arr,
)

DEFAULT_ISO_SEED = 271828


def _iso_seed() -> int:
    env = os.environ.get("GORHOM_SEED")
    return int(env) if env else DEFAULT_ISO_SEED


class Module:
    """A right module given by one action matrix per algebra basis element."""

    def __init__(self, algebra: Algebra, action: Sequence[np.ndarray],
                 check: str = "gens"):
        self.algebra = algebra
        field = algebra.field
        self.field = field
        acts = []
        for arr in action:
            a = np.asarray(arr)
            if field.is_prime_field and a.dtype == object:
                a = a.astype(np.int64)
            a = a.copy()
            a.setflags(write=False)
            acts.append(a)
        self._act = acts
        self.dim = acts[0].shape[0] if acts else 0
        if len(acts) != algebra.dim:
            raise GorhomError("need one action matrix per algebra basis element")
        for a in acts:
            if a.shape != (self.dim, self.dim):
                raise GorhomError("action matrices must be square of equal size")
        self._cache: dict = {}
        if check:
            self._check_structure(full=(check == "full"))

    # -- action --------------------------------------------------------------

    def act_matrix(self, elem: np.ndarray) -> np.ndarray:
        """rho(x) for a coefficient row x."""
        out = _zeros_arr(self.field, self.dim, self.dim).copy()
        if self.field.is_prime_field:
            out = out.astype(np.int64)
            for j, c in enumerate(elem):
                if c:
                    out += int(c) * self._act[j].astype(np.int64)
            return out % self.field.p
        for j, c in enumerate(elem):
            if c != 0:
                out = out + c * self._act[j]
        return out

    def act_rows(self, rows: np.ndarray, elem: np.ndarray) -> np.ndarray:
        m = self.act_matrix(elem)
        if self.field.is_prime_field:
            return (rows.astype(np.int64) @ m) % self.field.p
        return np.dot(rows, m)

    @property
    def action(self) -> tuple:
        return tuple(Matrix(self.field, a) for a in self._act)

    def _check_structure(self, full: bool = False):
        alg = self.algebra
        ident = np.eye(self.dim, dtype=np.int64) if self.field.is_prime_field \
            else _ident_obj_mat(self.dim)
        if not _arr_eq(self.field, self.act_matrix(alg.unit_row), ident):
            raise GorhomError("rho(unit) is not the identity")
        gens = [alg.basis_row(j) for j in range(alg.dim)] if full \
            else list(alg.gen_rows)
        for g in gens:
            rg = self.act_matrix(g)
            for j in range(alg.dim):
                prod = alg.mul(g, alg.basis_row(j))
                lhs = self.act_matrix(prod)
                rhs = _mm(self.field, rg, self._act[j])
                if not _arr_eq(self.field, lhs, rhs):
                    raise GorhomError(
                        f"action is not multiplicative on generator x basis {j}")

    def verify(self) -> bool:
        """Full multiplicativity check over every basis pair."""
        self._check_structure(full=True)
        return True

    def __repr__(self):
        return f"Module(dim={self.dim} over {self.algebra.name})"


def _ident_obj_mat(n):
    a = _zeros_arr(FieldSpec("rational"), n, n).copy()
    for i in range(n):
        a[i, i] = Fraction(1)
    return a


def _arr_eq(field, x, y) -> bool:
    if field.is_prime_field:
        return np.array_equal(np.asarray(x) % field.p, np.asarray(y) % field.p)
    return x.shape == y.shape and (x.size == 0 or bool(np.all(x == y)))


def _mm(field, a, b):
    if field.is_prime_field:
        return (a.astype(np.int64) @ b.astype(np.int64)) % field.p
    return np.dot(a, b)


class ModuleMap:
    """An intertwiner between modules over the same algebra."""

    def __init__(self, source: Module, target: Module, matrix: Matrix,
                 check: bool = True):
        if source.algebra is not target.algebra:
            raise GorhomError("module map needs a shared algebra")
        if matrix.shape != (source.dim, target.dim):
            raise GorhomError(
                f"map matrix {matrix.shape} vs ({source.dim},{target.dim})")
        self.source = source
        self.target = target
        self.matrix = matrix
        if check:
            self._check()

    def _check(self):
        F = self.matrix.arr
        for g in self.source.algebra.gen_rows:
            lhs = _mm(self.source.field, self.source.act_matrix(g), F)
            rhs = _mm(self.source.field, F, self.target.act_matrix(g))
            if not _arr_eq(self.source.field, lhs, rhs):
                raise GorhomError("map does not intertwine the actions")

    def then(self, other: "ModuleMap") -> "ModuleMap":
        if other.source is not self.target:
            raise GorhomError("composition mismatch")
        return ModuleMap(self.source, other.target,
                         self.matrix @ other.matrix, check=False)

    @property
    def rank(self) -> int:
        return rref_arr(self.matrix.field, self.matrix.arr)[1]

    def is_isomorphism(self) -> bool:
        return (self.source.dim == self.target.dim and
                self.rank == self.source.dim)

    def __repr__(self):
        return f"ModuleMap({self.source.dim}->{self.target.dim})"


# ---------------------------------------------------------------------------
# Basic constructions.


def zero_module(a: Algebra) -> Module:
    z = _zeros_arr(a.field, 0, 0)
    return Module(a, [z] * a.dim, check=False)


def regular_right(a: Algebra) -> Module:
    """A acting on itself by right multiplication."""
    if "regular" not in a._cache:
        acts = [np.ascontiguousarray(a._c[:, j, :]) for j in range(a.dim)]
        a._cache["regular"] = Module(a, acts, check=False)
    return a._cache["regular"]


def dual_module(m: Module) -> Module:
    """D(M): the dual space as a right module over the opposite algebra."""
    acts = [np.ascontiguousarray(x.T) for x in m._act]
    return Module(opposite(m.algebra), acts, check=False)


def coregular(a: Algebra) -> Module:
    """D(A): dual of the left regular module, with (f*a)(x) = f(a*x)."""
    if "coregular" not in a._cache:
        a._cache["coregular"] = dual_module(regular_right(opposite(a)))
    return a._cache["coregular"]


def bimodule_as_env_module(a: Algebra) -> Module:
    """A as a right module over A^e = A^op (x) A via m*(x(x)y) = x*m*y."""
    if "env_bimodule" not in a._cache:
        env = enveloping(a)
        acts = []
        for i in range(a.dim):
            li = a._c[i]  # y @ li = b_i * y
            for j in range(a.dim):
                rj = a._c[:, j, :]
                acts.append(_mm(a.field, li, rj))
        a._cache["env_bimodule"] = Module(env, acts)
    return a._cache["env_bimodule"]


def dsum(m: Module, n: Module) -> Module:
    if m.algebra is not n.algebra:
        raise GorhomError("direct sum needs a shared algebra")
    field = m.field
    d = m.dim + n.dim
    acts = []
    for j in range(m.algebra.dim):
        out = _zeros_arr(field, d, d).copy()
        out[:m.dim, :m.dim] = m._act[j]
        out[m.dim:, m.dim:] = n._act[j]
        acts.append(out)
    return Module(m.algebra, acts, check=False)


def submodule(m: Module, rows: np.ndarray, check_closed: bool = True) -> tuple:
    """(module on the row span, RowSpace); rows must be action-closed."""
    space = RowSpace.from_rows(m.field, rows)
    acts = []
    for j in range(m.algebra.dim):
        img = _mm(m.field, space.rows, m._act[j])
        acts.append(space.coords_rows(img, check=check_closed))
    return Module(m.algebra, acts, check=False), space


def quotient_module(m: Module, sub_rows: np.ndarray) -> tuple:
    """(m / span(sub_rows), RowSpace of the subspace); the subspace must be
    action-closed.  Quotient coordinates are the non-pivot columns."""
    space = RowSpace.from_rows(m.field, sub_rows)
    nonpiv = [i for i in range(m.dim) if i not in set(space.pivots)]
    acts = []
    for j in range(m.algebra.dim):
        img = m._act[j][nonpiv]
        red = _reduce_rows(space, img)
        acts.append(red[:, nonpiv])
    return Module(m.algebra, acts, check=False), space


def _reduce_rows(space: RowSpace, rows: np.ndarray) -> np.ndarray:
    if space.dim == 0:
        return rows
    c = rows[:, space.pivots]
    if space.field.is_prime_field:
        return (rows.astype(np.int64) -
                c.astype(np.int64) @ space.rows.astype(np.int64)) % space.field.p
    return rows - np.dot(c, space.rows)


def radical_subspace(m: Module) -> RowSpace:
    """m*J as a row space inside m."""
    if "mJ" not in m._cache:
        rad = m.algebra.radical_rows
        if rad.shape[0] == 0 or m.dim == 0:
            m._cache["mJ"] = RowSpace.from_rows(m.field, _zeros_arr(m.field, 0, m.dim))
        else:
            stacked = np.concatenate([m.act_matrix(r) for r in rad], axis=0)
            m._cache["mJ"] = RowSpace.from_rows(m.field, stacked)
    return m._cache["mJ"]


def top(m: Module) -> Module:
    """m / m*J."""
    if "top" not in m._cache:
        m._cache["top"] = quotient_module(m, radical_subspace(m).rows)[0]
    return m._cache["top"]


# ---------------------------------------------------------------------------
# Indecomposable projectives, simples, projective sums.


@dataclass
class IndecProjective:
    idx: int
    basis: np.ndarray        # k x n rows: basis of e_i A inside A
    space: RowSpace
    gen_coords: np.ndarray   # coords of e_i in that basis
    module: Module
    rad_space: RowSpace      # P_i J in P_i coordinates


def _projectives(a: Algebra) -> list:
    if "projs" not in a._cache:
        reg = regular_right(a)
        out = []
        for i in range(a.n_idempotents):
            e = a.idem_rows[i]
            rows = a.lmat(e)  # row j = e * b_j
            mod, space = submodule(reg, rows)
            gen = space.coords(e, check=True)
            if a.radical_rows.shape[0] and mod.dim:
                radrows = np.concatenate(
                    [mod.act_matrix(r) for r in a.radical_rows], axis=0)
            else:
                radrows = _zeros_arr(a.field, 0, mod.dim)
            out.append(IndecProjective(
                idx=i, basis=space.rows, space=space, gen_coords=gen,
                module=mod, rad_space=RowSpace.from_rows(a.field, radrows)))
        a._cache["projs"] = out
    return a._cache["projs"]


def indecomposable_projectives(a: Algebra) -> list:
    """P_i = e_i A, aligned with the idempotent list."""
    return [p.module for p in _projectives(a)]


def simples(a: Algebra) -> list:
    """S_i = P_i / P_i J, aligned with the idempotent list."""
    if "simples" not in a._cache:
        out = []
        for p in _projectives(a):
            out.append(quotient_module(p.module, p.rad_space.rows)[0])
        a._cache["simples"] = out
    return a._cache["simples"]


class ProjectiveSum:
    """A formal direct sum of indecomposable projectives, with fast
    blockwise action and generator bookkeeping."""

    def __init__(self, algebra: Algebra, summands: Sequence[int]):
        self.algebra = algebra
        self.summands = tuple(summands)
        projs = _projectives(algebra)
        dims = [projs[i].module.dim for i in self.summands]
        self.offsets = [0]
        for d in dims:
            self.offsets.append(self.offsets[-1] + d)
        self.dim = self.offsets[-1]
        self._projs = projs
        gen = _zeros_arr(algebra.field, len(self.summands), self.dim).copy()
        for a_idx, i in enumerate(self.summands):
            sl = self.block_slice(a_idx)
            gen[a_idx, sl] = projs[i].gen_coords
        gen.setflags(write=False)
        self.gen_rows = gen

    def block_slice(self, a_idx: int) -> slice:
        return slice(self.offsets[a_idx], self.offsets[a_idx + 1])

    def block_basis(self, a_idx: int) -> np.ndarray:
        return self._projs[self.summands[a_idx]].basis

    def act_rows(self, rows: np.ndarray, elem: np.ndarray) -> np.ndarray:
        """rows @ rho_P(elem), exploiting the block structure."""
        field = self.algebra.field
        if self.dim == 0 or rows.shape[0] == 0:
            return rows.copy()
        out = _zeros_arr(field, rows.shape[0], self.dim).copy()
        by_idem: dict = {}
        for a_idx, i in enumerate(self.summands):
            by_idem.setdefault(i, []).append(a_idx)
        for i, blocks in by_idem.items():
            M = self._projs[i].module.act_matrix(elem)
            k = M.shape[0]
            cols = np.concatenate([np.arange(self.offsets[b], self.offsets[b + 1])
                                   for b in blocks])
            seg = rows[:, cols]
            r = seg.reshape(rows.shape[0], len(blocks), k)
            if field.is_prime_field:
                res = (r.astype(np.int64) @ M) % field.p
            else:
                res = np.einsum("rbk,kl->rbl", r, M) if r.size else r
            out[:, cols] = res.reshape(rows.shape[0], len(blocks) * k)
        return out

    def module(self) -> Module:
        if not hasattr(self, "_module"):
            field = self.algebra.field
            acts = []
            for j in range(self.algebra.dim):
                out = _zeros_arr(field, self.dim, self.dim).copy()
                for a_idx, i in enumerate(self.summands):
                    sl = self.block_slice(a_idx)
                    out[sl, sl] = self._projs[i].module._act[j]
                acts.append(out)
            self._module = Module(self.algebra, acts, check=False)
        return self._module

    def kernel_in_radical(self, rows: np.ndarray) -> bool:
        """Every row lies in P*J (blockwise membership)."""
        if rows.shape[0] == 0:
            return True
        by_idem: dict = {}
        for a_idx, i in enumerate(self.summands):
            by_idem.setdefault(i, []).append(a_idx)
        for i, blocks in by_idem.items():
            rs = self._projs[i].rad_space
            k = self._projs[i].module.dim
            cols = np.concatenate([np.arange(self.offsets[b], self.offsets[b + 1])
                                   for b in blocks])
            segs = rows[:, cols].reshape(rows.shape[0] * len(blocks), k)
            red = _reduce_rows(rs, segs)
            if self.algebra.field.is_prime_field:
                if np.any(red):
                    return False
            elif any(x != 0 for x in red.flat):
                return False
        return True


# ---------------------------------------------------------------------------
# Minimal covers and the iterated-cover chain.


def _minimal_generators(algebra: Algebra, cand_rows: np.ndarray, act):
    """Greedy minimal generating set of the module spanned by cand_rows.

    act(rows, elem) applies the ambient module action.  Returns
    (list of (idempotent index, generator row), final row basis)."""
    field = algebra.field
    width = cand_rows.shape[1]
    W = RowBasis(field, width)
    if algebra.radical_rows.shape[0] and cand_rows.shape[0]:
        for r in algebra.radical_rows:
            for row in act(cand_rows, r):
                W.insert(row)
    gens = []
    basis_elems = [algebra.basis_row(j) for j in range(algebra.dim)]
    for v in cand_rows:
        vr = v.reshape(1, -1)
        for i in range(algebra.n_idempotents):
            comp = act(vr, algebra.idem_rows[i])[0]
            if field.is_prime_field:
                if not np.any(comp):
                    continue
            elif all(x == 0 for x in comp):
                continue
            if W.contains(comp):
                continue
            gens.append((i, comp))
            compr = comp.reshape(1, -1)
            for b in basis_elems:
                W.insert(act(compr, b)[0])
    # the picked generators together with the radical part span everything
    for v in cand_rows:
        if not W.contains(v):
            raise InternalInconsistency("cover generators fail to span")
    return gens, W


@dataclass
class ChainStep:
    psum: ProjectiveSum
    diff: np.ndarray          # dim P_i x dim(previous): the map d_i
    kernel_rows: np.ndarray   # basis rows of the next syzygy inside P_i
    minimal: bool


class MinimalChain:
    """Iterated minimal projective covers of a module, extended on demand.

    Step i holds P_i, the differential d_i into the previous term (the
    module itself for i = 0), and a basis of ker(d_i) = the next syzygy."""

    def __init__(self, module: Module):
        self.module = module
        self.algebra = module.algebra
        self.steps: list[ChainStep] = []
        self.finite_at: Optional[int] = None  # first r with syzygy_r = 0

    def extend(self, upto: int):
        """Ensure steps 0..upto exist (or the chain has terminated)."""
        while len(self.steps) <= upto:
            if self.finite_at is not None and len(self.steps) >= self.finite_at:
                # resolution has terminated; append empty terms
                psum = ProjectiveSum(self.algebra, [])
                prev_dim = self._prev_dim()
                empty = _zeros_arr(self.algebra.field, 0, prev_dim)
                self.steps.append(ChainStep(psum, empty, empty[:, :0], True))
                continue
            self._build_step()

    def _prev_dim(self) -> int:
        if not self.steps:
            return self.module.dim
        return self.steps[-1].psum.dim

    def _build_step(self):
        alg = self.algebra
        field = alg.field
        i = len(self.steps)
        if i == 0:
            cand = np.eye(self.module.dim, dtype=np.int64) \
                if field.is_prime_field else _ident_obj_mat(self.module.dim)
            if field.is_prime_field and self.module.dim:
                cand = cand.astype(self.module._act[0].dtype)
            act = self.module.act_rows
            ambient_dim = self.module.dim
        else:
            cand = self.steps[-1].kernel_rows
            act = self.steps[-1].psum.act_rows
            ambient_dim = self.steps[-1].psum.dim
        target_rank = cand.shape[0]
        gens, _ = _minimal_generators(alg, cand, act)
        psum = ProjectiveSum(alg, [g[0] for g in gens])
        if psum.dim == 0:
            diff = _zeros_arr(field, 0, ambient_dim)
            kernel = _zeros_arr(field, 0, 0)
            if target_rank != 0:
                raise InternalInconsistency("empty cover of a nonzero module")
            self.steps.append(ChainStep(psum, diff, kernel, True))
            if self.finite_at is None:
                self.finite_at = i
            return
        blocks = []
        basis_elems = [alg.basis_row(j) for j in range(alg.dim)]
        for (idem, g) in gens:
            G = np.concatenate([act(g.reshape(1, -1), b) for b in basis_elems],
                               axis=0)  # n_alg x ambient
            B = _projectives(alg)[idem].basis  # k x n_alg
            blocks.append(_mm(field, B, G))
        diff = np.concatenate(blocks, axis=0)
        rk = rref_arr(field, diff)[1]
        if rk != target_rank:
            raise InternalInconsistency("cover epi is not surjective")
        kernel = left_nullspace_arr(field, diff)
        minimal = psum.kernel_in_radical(kernel)
        if not minimal:
            raise InternalInconsistency("cover kernel not inside P*J")
        self.steps.append(ChainStep(psum, diff, kernel, minimal))
        if kernel.shape[0] == 0 and self.finite_at is None:
            self.finite_at = i + 1

    # -- views ---------------------------------------------------------------

    def betti(self, i: int) -> int:
        self.extend(i)
        return len(self.steps[i].psum.summands)

    def syzygy_dim(self, r: int) -> int:
        if r == 0:
            return self.module.dim
        self.extend(r - 1)
        return self.steps[r - 1].kernel_rows.shape[0]

    def syzygy_module(self, r: int) -> Module:
        if r == 0:
            return self.module
        key = ("syzygy", r)
        if key in self.module._cache:
            return self.module._cache[key]
        self.extend(r - 1)
        rows = self.steps[r - 1].kernel_rows
        psum = self.steps[r - 1].psum
        field = self.algebra.field
        if rows.shape[0] == 0:
            mod = zero_module(self.algebra)
            mod._cache["syzygy_of"] = (self, r)
            mod._cache["syzygy_space"] = None
        else:
            space = RowSpace.from_rows(field, rows)
            acts = []
            for j in range(self.algebra.dim):
                img = psum.act_rows(space.rows, self.algebra.basis_row(j))
                acts.append(space.coords_rows(img, check=True))
            mod = Module(self.algebra, acts, check="gens")
            mod._cache["syzygy_of"] = (self, r)
            mod._cache["syzygy_space"] = space
        self.module._cache[key] = mod
        return mod


def chain_of(m: Module) -> MinimalChain:
    """The minimal-cover chain attached to a module.  Syzygies share and
    extend the chain of the module they came from."""
    parent = m._cache.get("syzygy_of")
    if parent is not None:
        chain, r = parent
        return _ShiftedChain(chain, r)
    if "chain" not in m._cache:
        m._cache["chain"] = MinimalChain(m)
    return m._cache["chain"]


class _ShiftedChain:
    """View of a chain starting at syzygy r (so resolutions of syzygies
    reuse the parent computation)."""

    def __init__(self, chain: MinimalChain, shift: int):
        while isinstance(chain, _ShiftedChain):
            shift += chain.shift
            chain = chain.chain
        self.chain = chain
        self.shift = shift
        self.algebra = chain.algebra

    @property
    def module(self) -> Module:
        return self.chain.syzygy_module(self.shift)

    @property
    def finite_at(self) -> Optional[int]:
        f = self.chain.finite_at
        if f is None:
            return None
        return max(0, f - self.shift)

    def extend(self, upto: int):
        self.chain.extend(upto + self.shift)

    @property
    def steps(self):
        return self.chain.steps[self.shift:]

    def betti(self, i: int) -> int:
        return self.chain.betti(i + self.shift)

    def syzygy_dim(self, r: int) -> int:
        return self.chain.syzygy_dim(r + self.shift)

    def syzygy_module(self, r: int) -> Module:
        return self.chain.syzygy_module(r + self.shift)


@dataclass
class CoverData:
    cover: Module
    epi: ModuleMap
    kernel: Module
    inclusion: ModuleMap
    psum: ProjectiveSum


def projective_cover(m: Module) -> CoverData:
    """Minimal projective cover; the zero module gets the zero cover."""
    chain = chain_of(m)
    chain.extend(0)
    step = chain.steps[0]
    cover = step.psum.module()
    if isinstance(chain, _ShiftedChain):
        # m was materialized as a syzygy subspace: re-coordinate the epi
        space = m._cache.get("syzygy_space")
        if m.dim == 0:
            epi_mat = _zeros_arr(m.field, step.psum.dim, 0)
        else:
            epi_mat = space.coords_rows(step.diff, check=True)
    else:
        epi_mat = step.diff
    epi = ModuleMap(cover, m, Matrix(m.field, epi_mat), check=False)
    kernel = chain.syzygy_module(1)
    kspace = kernel._cache.get("syzygy_space")
    incl_rows = kspace.rows if kspace is not None \
        else _zeros_arr(m.field, 0, cover.dim)
    inclusion = ModuleMap(kernel, cover, Matrix(m.field, incl_rows), check=False)
    return CoverData(cover=cover, epi=epi, kernel=kernel,
                     inclusion=inclusion, psum=step.psum)


def syzygy(m: Module, r: int) -> Module:
    """Omega^r by iterated minimal covers; Omega^0 is m itself."""
    if r < 0:
        raise GorhomError("syzygy index must be nonnegative")
    if r == 0:
        return m
    chain = chain_of(m)
    return chain.syzygy_module(r)


def is_projective(m: Module) -> bool:
    if m.dim == 0:
        return True
    chain = chain_of(m)
    return chain.syzygy_dim(1) == 0


# ---------------------------------------------------------------------------
# Hom spaces, duals, isomorphism testing.


def hom_basis(m: Module, n: Module) -> list:
    """Basis of Hom(m, n): nullspace of the stacked intertwining system
    rho_m(g) F - F rho_n(g) = 0 over the algebra's generators."""
    if m.algebra is not n.algebra:
        raise GorhomError("hom needs a shared algebra")
    field = m.field
    D = m.dim * n.dim
    if D == 0:
        return []
    N = None  # rows parameterizing the current solution space
    for g in m.algebra.gen_rows:
        rm = m.act_matrix(g)
        rn = n.act_matrix(g)
        if field.is_prime_field:
            M = (np.kron(rm.astype(np.int64), np.eye(n.dim, dtype=np.int64)) -
                 np.kron(np.eye(m.dim, dtype=np.int64), rn.astype(np.int64).T)) \
                % field.p
        else:
            M = np.kron(rm, _ident_obj_mat(n.dim)) - \
                np.kron(_ident_obj_mat(m.dim), np.ascontiguousarray(rn.T))
        if N is None:
            N = right_nullspace_arr(field, M)
        else:
            if N.shape[0] == 0:
                break
            MN = _mm(field, M, np.ascontiguousarray(N.T))
            X = right_nullspace_arr(field, MN)
            N = _mm(field, X, N)
        if N.shape[0] == 0:
            break
    if N is None:
        N = np.eye(D, dtype=np.int64) if field.is_prime_field else _ident_obj_mat(D)
    red, rank, _ = rref_arr(field, N)
    out = []
    for i in range(rank):
        F = Matrix(field, red[i].reshape(m.dim, n.dim))
        out.append(ModuleMap(m, n, F, check=True))
    return out


def star_dual(m: Module) -> Module:
    """M* = Hom_A(M, A) as a right module over the opposite algebra."""
    if "star" in m._cache:
        return m._cache["star"]
    a = m.algebra
    field = m.field
    homs = hom_basis(m, regular_right(a))
    s = len(homs)
    op = opposite(a)
    if s == 0:
        star = zero_module(op)
        m._cache["star"] = star
        m._cache["star_homs"] = []
        return star
    flat = np.stack([h.matrix.arr.reshape(-1) for h in homs])
    space = RowSpace.from_rows(field, flat)
    acts = []
    for i in range(a.dim):
        li = a._c[i]  # left multiplication by b_i
        rows = np.stack([
            _mm(field, h.matrix.arr, li).reshape(-1) for h in homs])
        acts.append(space.coords_rows(rows, check=True))
    star = Module(op, acts, check="gens")
    m._cache["star"] = star
    m._cache["star_homs"] = homs
    m._cache["star_space"] = space
    return star


def eval_to_double_dual(m: Module) -> ModuleMap:
    """The natural map m -> (m*)*, x |-> (f |-> f(x))."""
    a = m.algebra
    field = m.field
    star = star_dual(m)
    dd = star_dual(star)  # module over opposite(opposite(a)) = a
    if m.dim == 0:
        return ModuleMap(m, dd, Matrix.zeros(field, 0, 0), check=False)
    homs = m._cache["star_homs"]
    if star.dim == 0:
        return ModuleMap(m, dd, Matrix.zeros(field, m.dim, 0), check=False)
    ddspace = star._cache["star_space"]
    rows = []
    for x in range(m.dim):
        ex = np.stack([h.matrix.arr[x] for h in homs])  # star.dim x n
        rows.append(ddspace.coords(ex.reshape(-1), check=True))
    mat = Matrix(field, np.stack(rows))
    return ModuleMap(m, dd, mat, check=True)


@dataclass
class IsoVerdict:
    kind: str  # "yes" / "no" / "unknown"
    witness: Optional[ModuleMap] = None
    reason: str = ""
    seed: Optional[int] = None

    @property
    def is_yes(self) -> bool:
        return self.kind == "yes"


def is_isomorphic(m: Module, n: Module, seed: Optional[int] = None) -> IsoVerdict:
    """Three-valued isomorphism test.  Certified "no" when dimensions or
    Hom dimensions differ, or exhaustive search over the Hom space finds
    no invertible element; "unknown" only on randomized-path exhaustion."""
    if m.algebra is not n.algebra:
        raise GorhomError("isomorphism test needs a shared algebra")
    if m.dim != n.dim:
        return IsoVerdict("no", reason=f"dim {m.dim} != {n.dim}")
    if m.dim == 0:
        return IsoVerdict("yes", witness=ModuleMap(
            m, n, Matrix.zeros(m.field, 0, 0), check=False))
    h_mn = hom_basis(m, n)
    h_nm = hom_basis(n, m)
    if len(h_mn) != len(h_nm):
        return IsoVerdict("no", reason=(
            f"dim Hom(m,n)={len(h_mn)} != dim Hom(n,m)={len(h_nm)}"))
    s = len(h_mn)
    if s == 0:
        return IsoVerdict("no", reason="Hom(m,n) = 0")
    field = m.field
    mats = [h.matrix.arr for h in h_mn]

    def combo_rank(coeffs) -> Optional[ModuleMap]:
        F = _zeros_arr(field, m.dim, n.dim).copy()
        if field.is_prime_field:
            F = F.astype(np.int64)
            for c, M in zip(coeffs, mats):
                if c:
                    F += int(c) * M.astype(np.int64)
            F %= field.p
        else:
            for c, M in zip(coeffs, mats):
                if c != 0:
                    F = F + c * M
        if rref_arr(field, F)[1] == m.dim:
            return ModuleMap(m, n, Matrix(field, F), check=False)
        return None

    if field.is_prime_field and field.p ** s <= 1 << 16:
        for coeffs in itertools.product(range(field.p), repeat=s):
            if not any(coeffs):
                continue
            w = combo_rank(coeffs)
            if w is not None:
                return IsoVerdict("yes", witness=w)
        return IsoVerdict("no", reason="no invertible hom (exhaustive)")
    used = seed if seed is not None else _iso_seed()
    rng = random.Random(used)
    for _ in range(64):
        if field.is_prime_field:
            coeffs = [rng.randrange(field.p) for _ in range(s)]
        else:
            coeffs = [Fraction(rng.randrange(-9, 10)) for _ in range(s)]
        if not any(coeffs):
            continue
        w = combo_rank(coeffs)
        if w is not None:
            return IsoVerdict("yes", witness=w, seed=used)
    return IsoVerdict("unknown", reason="64 random trials found no unit",
                      seed=used)
