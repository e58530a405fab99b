"""Finite-dimensional algebras given by a multiplication table, and left-module
linear algebra inside free modules Lambda^r.

Conventions: elements are coefficient vectors over the normal-form basis (index 0
is the identity).  A module vector in Lambda^r is an ``(r, N)`` array, a matrix
over Lambda is an ``(rows, cols, N)`` array.  Matrices act on row vectors from
the right, and all module actions are left actions.
"""

from __future__ import annotations

from fractions import Fraction
from functools import cached_property

import numpy as np

from .linalg import EchelonSpace, Field, LinearSolver, NoSolutionError, float_type, is_zero, kernel_basis, matmul

INFINITE_DEGREE = float("inf")


class FiniteDimAlgebra:
    def __init__(self, field: Field, basis, table: np.ndarray, *, alphabet=None, name: str = "custom"):
        self.field = field
        self.basis = [tuple(w) for w in basis]
        self.dim = len(self.basis)
        if self.basis[0] != ():
            raise ValueError("basis[0] must be the identity word")
        self.table = table
        self.alphabet = tuple(alphabet) if alphabet is not None else ()
        self.name = name
        self.index = {w: i for i, w in enumerate(self.basis)}
        self.rewrite_system = None
        n = self.dim
        # flattened tables, stored in a float dtype when products of length N are exact in it
        ftype = float_type(field, n)
        cast = (lambda a: a.astype(ftype)) if ftype is not None else (lambda a: a)
        self._left_flat = cast(np.ascontiguousarray(table.reshape(n, n * n)))
        self._right_flat = cast(np.ascontiguousarray(table.transpose(1, 0, 2).reshape(n, n * n)))

    def __repr__(self) -> str:
        return f"<FiniteDimAlgebra {self.name} dim={self.dim} over {self.field.name}>"

    # elements

    def zero(self) -> "AlgebraElement":
        return AlgebraElement(self, self.field.zeros(self.dim))

    def one(self) -> "AlgebraElement":
        return self.basis_element(0)

    def basis_element(self, i: int) -> "AlgebraElement":
        v = self.field.zeros(self.dim)
        v[i] = self.field(1)
        return AlgebraElement(self, v)

    def element_from_word(self, w) -> "AlgebraElement":
        out = self.one()
        for g in w:
            out = out * self.gen(g)
        return out

    def gen(self, g) -> "AlgebraElement":
        return self.basis_element(self.index[(g,)])

    def element_from_poly(self, poly) -> "AlgebraElement":
        out = self.zero()
        for w, c in poly.terms.items():
            out = out + self.element_from_word(w).scale(c)
        return out

    def element(self, data) -> "AlgebraElement":
        """Coerce a vector, scalar, NCPoly, word string or AlgebraElement."""
        from .rewrite import NCPoly, parse_poly

        if isinstance(data, AlgebraElement):
            return data
        if isinstance(data, NCPoly):
            return self.element_from_poly(data)
        if isinstance(data, str):
            return self.element_from_poly(parse_poly(data, self.field, self.alphabet))
        if isinstance(data, (int, Fraction, np.integer)):
            return self.one().scale(data)
        return AlgebraElement(self, self.field.array(data))

    # arithmetic on raw vectors

    def left_op(self, a: np.ndarray) -> np.ndarray:
        """Matrix ``L`` with ``coeffs(a * v) = coeffs(v) @ L``."""
        n = self.dim
        return matmul(a.reshape(1, n), self._left_flat, self.field).reshape(n, n)

    def right_op(self, g: np.ndarray) -> np.ndarray:
        """Matrix ``R`` with ``coeffs(v * g) = coeffs(v) @ R``."""
        n = self.dim
        return matmul(g.reshape(1, n), self._right_flat, self.field).reshape(n, n)

    def mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return matmul(b.reshape(1, -1), self.left_op(a), self.field)[0]

    def monomial_multiples(self, vs: np.ndarray) -> np.ndarray:
        """``out[m, i] = b_m * vs[i]`` for every basis monomial ``b_m``; ``vs`` is ``(k, N)``."""
        n = self.dim
        k = vs.shape[0]
        prod = matmul(vs, self._right_flat, self.field)
        return prod.reshape(k, n, n).transpose(1, 0, 2)

    # structure

    @cached_property
    def radical_layers(self) -> list:
        """``[J^0 = Lambda, J^1, J^2, ...]`` as echelon spaces, ending with the first zero power.

        J is the span of the non-identity monomials; J^m is computed as
        J * J^(m-1) from the generators, which is valid once J is an ideal.
        """
        n, f = self.dim, self.field
        full = EchelonSpace(n, f)
        full.add(f.eye(n))
        layers = [full]
        rad = EchelonSpace(n, f)
        rad.add(f.eye(n)[1:])
        if not self._radical_is_ideal():
            raise ValueError("span of non-identity monomials is not an ideal: algebra is not local in this basis")
        layers.append(rad)
        gens = [self.index[(g,)] for g in self.alphabet if (g,) in self.index] or list(range(1, n))
        ops = [self.table[i] for i in gens]  # coeffs(b_i * v) = v @ table[i]
        cur = rad
        while cur.dim:
            nxt = EchelonSpace(n, f)
            nxt.add(np.concatenate([matmul(cur.basis, op, f) for op in ops], axis=0))
            if nxt.dim >= cur.dim:
                raise ValueError("radical powers do not decrease: J is not nilpotent")
            layers.append(nxt)
            cur = nxt
        return layers

    def _radical_is_ideal(self) -> bool:
        # every product of two non-identity monomials has zero identity coefficient
        return is_zero(self.table[1:, 1:, 0])

    @property
    def loewy_length(self) -> int:
        return len(self.radical_layers) - 1

    def radical_degree(self, a) -> float:
        """Largest m with ``a`` in J^m; infinity for zero."""
        v = a.vec if isinstance(a, AlgebraElement) else a
        if is_zero(v):
            return INFINITE_DEGREE
        layers = self.radical_layers
        for m in range(len(layers) - 1, -1, -1):
            if layers[m].contains(v):
                return m
        return 0

    @cached_property
    def socle_basis(self) -> list:
        """Basis of the two-sided annihilator of the radical."""
        gens = [self.index[(g,)] for g in self.alphabet if (g,) in self.index] or list(range(1, self.dim))
        blocks = []
        for i in gens:
            blocks.append(self.table[i].T)  # s -> b_i * s
            blocks.append(self.table[:, i, :].T)  # s -> s * b_i
        return kernel_basis(np.concatenate(blocks, axis=0), self.field)

    def in_socle(self, a) -> bool:
        v = a.vec if isinstance(a, AlgebraElement) else a
        space = EchelonSpace(self.dim, self.field)
        if self.socle_basis:
            space.add(np.array(self.socle_basis))
        return space.contains(v)

    def locality_report(self) -> dict:
        layers = self.radical_layers
        jj = layers[2] if len(layers) > 2 else EchelonSpace(self.dim, self.field)
        return {
            "dimension": self.dim,
            "radical_codimension": self.dim - layers[1].dim,
            "socle_dimension": len(self.socle_basis),
            "top_generators": layers[1].dim - jj.dim,
            "loewy_length": self.loewy_length,
        }

    # formatting

    def format_word(self, w) -> str:
        pos = {g: i for i, g in enumerate(self.alphabet)}
        idx = [pos[g] for g in w]
        if idx == sorted(idx):
            return " ".join(f"{g}^{w.count(g)}" for g in self.alphabet)
        runs = []
        for g in w:
            if runs and runs[-1][0] == g:
                runs[-1][1] += 1
            else:
                runs.append([g, 1])
        return " ".join(f"{g}^{e}" for g, e in runs)

    def format(self, v: np.ndarray) -> str:
        """``coeff*monomial`` terms joined by ``+``; ``0`` for zero."""
        terms = [f"{self.field.format(c)}*{self.format_word(self.basis[i])}" for i, c in enumerate(v) if c != 0]
        return "+".join(terms) if terms else "0"

    def parse(self, text: str) -> "AlgebraElement":
        return self.element(text)


class AlgebraElement:
    __slots__ = ("alg", "vec")

    def __init__(self, alg: FiniteDimAlgebra, vec: np.ndarray):
        self.alg = alg
        self.vec = vec

    def _coerce(self, other) -> "AlgebraElement":
        return other if isinstance(other, AlgebraElement) else self.alg.element(other)

    def __add__(self, other):
        other = self._coerce(other)
        return AlgebraElement(self.alg, self.alg.field.reduce(self.vec + other.vec))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        return AlgebraElement(self.alg, self.alg.field.reduce(self.vec - other.vec))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return AlgebraElement(self.alg, self.alg.field.reduce(-self.vec))

    def scale(self, s) -> "AlgebraElement":
        f = self.alg.field
        return AlgebraElement(self.alg, f.reduce(self.vec * f(s)))

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return AlgebraElement(self.alg, self.alg.mul(self.vec, other.vec))
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, e: int):
        # square-and-multiply; powers of one element commute
        out, base = self.alg.one(), self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __eq__(self, other):
        if not isinstance(other, AlgebraElement):
            other = self.alg.element(other)
        return bool(np.all(self.vec == other.vec))

    def __hash__(self):
        return hash(tuple(self.vec.tolist()))

    def is_zero(self) -> bool:
        return is_zero(self.vec)

    def residue(self):
        """Image in k = Lambda/J."""
        return self.alg.field(self.vec[0])

    def __str__(self) -> str:
        return self.alg.format(self.vec)

    def __repr__(self) -> str:
        return f"AlgebraElement({self})"


# module vectors and matrices over Lambda


def vector(alg: FiniteDimAlgebra, entries) -> np.ndarray:
    return np.stack([alg.element(e).vec for e in entries])


def matrix(alg: FiniteDimAlgebra, rows) -> np.ndarray:
    return np.stack([vector(alg, row) for row in rows])


def zero_matrix(alg: FiniteDimAlgebra, rows: int, cols: int) -> np.ndarray:
    return alg.field.zeros((rows, cols, alg.dim))


def mat_mul(alg: FiniteDimAlgebra, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Product of matrices over Lambda: ``(A B)[i, j] = sum_k A[i, k] * B[k, j]``."""
    p, q, n = a.shape
    q2, r, _ = b.shape
    if q != q2:
        raise ValueError(f"shape mismatch {a.shape[:2]} x {b.shape[:2]}")
    f = alg.field
    out = f.zeros((p, r, n))
    if p == 0 or r == 0 or q == 0:
        return out
    # left[i, k, v, o] = coeffs of a[i, k] * b_v
    left = matmul(a.reshape(p * q, n), alg._left_flat, f).reshape(p, q * n, n)
    bt = np.ascontiguousarray(b.transpose(1, 0, 2).reshape(r, q * n))
    for i in range(p):
        out[i] = matmul(bt, left[i], f)
    return out


def row_times(alg: FiniteDimAlgebra, u: np.ndarray, d: np.ndarray) -> np.ndarray:
    """``u . D`` for ``u`` in Lambda^s and ``D`` an s x r matrix."""
    return mat_mul(alg, u[None], d)[0]


def left_scale(alg: FiniteDimAlgebra, a: np.ndarray, v: np.ndarray) -> np.ndarray:
    """``a * v`` componentwise for ``v`` in Lambda^r."""
    return matmul(v, alg.left_op(a), alg.field)


def linearize(alg: FiniteDimAlgebra, d: np.ndarray) -> np.ndarray:
    """The k-matrix of ``u -> u . D`` on concatenated coefficient vectors, shape (sN, rN)."""
    s, r, n = d.shape
    ops = matmul(d.reshape(s * r, n), alg._right_flat, alg.field).reshape(s, r, n, n)
    return np.ascontiguousarray(ops.transpose(0, 2, 1, 3).reshape(s * n, r * n))


def left_span(alg: FiniteDimAlgebra, vs) -> EchelonSpace:
    """The left submodule generated by ``vs`` (each in Lambda^r) as a k-subspace of k^(rN).

    The k-span of all monomial multiples ``b_m * v`` is already closed under left
    multiplication, since products of monomials are combinations of monomials.
    """
    vs = [np.asarray(v) for v in vs]
    if not vs:
        raise ValueError("left_span needs at least one vector (to fix r)")
    r, n = vs[0].shape
    space = EchelonSpace(r * n, alg.field)
    for v in vs:
        space.add(alg.monomial_multiples(v).reshape(n, r * n))
    return space


def kernel_of_right_action(alg: FiniteDimAlgebra, g: np.ndarray):
    """k-basis of ``{(a_1..a_r) : sum a_i g_i = 0}`` for ``g`` in Lambda^r, plus its dimension."""
    d = np.asarray(g)[:, None, :]  # r x 1 matrix
    return syzygy_space(alg, d)


def syzygy_space(alg: FiniteDimAlgebra, d: np.ndarray):
    """k-basis (rows) and dimension of ``{u in Lambda^s : u . D = 0}``."""
    m = linearize(alg, d)
    basis = kernel_basis(m.T, alg.field)
    s, _, n = d.shape
    arr = np.array(basis) if basis else alg.field.zeros((0, s * n))
    return arr, len(basis)


class RightFactorSolver:
    """Solve ``u . D = t`` repeatedly for a fixed matrix ``D`` over Lambda."""

    def __init__(self, alg: FiniteDimAlgebra, d: np.ndarray):
        self.alg = alg
        self.d = d
        self.s, self.r, _ = d.shape
        self._lin = LinearSolver(linearize(alg, d).T, alg.field)

    def solve(self, t: np.ndarray) -> np.ndarray:
        n = self.alg.dim
        return self._lin.solve(np.asarray(t).reshape(self.r * n)).reshape(self.s, n)

    def solve_rows(self, ts: np.ndarray) -> np.ndarray:
        """Solve for each row of a ``(k, r, N)`` stack; returns ``(k, s, N)``."""
        n = self.alg.dim
        k = ts.shape[0]
        sol = self._lin.solve_many(ts.reshape(k, self.r * n).T)
        return sol.T.reshape(k, self.s, n)

    def residues(self, t: np.ndarray) -> np.ndarray:
        """Images in k of the coefficients of any solution."""
        return self.solve(t)[:, 0]

    @cached_property
    def _kernel(self) -> np.ndarray:
        basis = self._lin.kernel_basis()
        n = self.alg.dim
        if not basis:
            return self.alg.field.zeros((0, self.s, n))
        return np.array(basis).reshape(len(basis), self.s, n)

    def kernel_basis(self) -> np.ndarray:
        """k-basis of ``{u : u . D = 0}`` as a ``(count, s, N)`` array."""
        return self._kernel.copy()

    def solvable(self, t: np.ndarray) -> bool:
        return self._lin.solvable(np.asarray(t).reshape(-1))


def solve_right_factor(alg: FiniteDimAlgebra, d: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Some ``u`` in Lambda^s with ``u . D = t``; raises :class:`NoSolutionError`."""
    return RightFactorSolver(alg, d).solve(t)


def express_in_minimal_generators(alg: FiniteDimAlgebra, d: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Residues mod J of the coefficients expressing ``t`` in the rows of ``D``."""
    return RightFactorSolver(alg, d).residues(t)


def radical_generator_check(alg: FiniteDimAlgebra, gens) -> bool:
    """Whether the given elements map to a basis of J/J^2."""
    layers = alg.radical_layers
    rad, rad2 = layers[1], layers[2] if len(layers) > 2 else EchelonSpace(alg.dim, alg.field)
    if any(not rad.contains(g.vec) for g in gens):
        return False
    space = rad2.copy()
    added = space.add(np.array([g.vec for g in gens]))
    return len(added) == len(gens) == rad.dim - rad2.dim


__all__ = [
    "AlgebraElement",
    "FiniteDimAlgebra",
    "NoSolutionError",
    "RightFactorSolver",
    "express_in_minimal_generators",
    "kernel_of_right_action",
    "left_span",
    "linearize",
    "mat_mul",
    "matrix",
    "radical_generator_check",
    "row_times",
    "solve_right_factor",
    "syzygy_space",
    "vector",
    "zero_matrix",
]
