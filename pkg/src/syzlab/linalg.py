"""Exact dense linear algebra over F_p and Q.

Matrices are numpy arrays: ``int64`` holding canonical residues for F_p,
``object`` holding :class:`fractions.Fraction` for Q.  Every routine takes the
:class:`Field` explicitly.  Pivoting is always leftmost column, topmost row, so
results are deterministic.
"""

from __future__ import annotations

import re
import math
from fractions import Fraction

import numpy as np

_FLOAT_EXACT = 2**53
_FLOAT32_EXACT = 2**24
_INT64_SAFE = 2**62


class NoSolutionError(ArithmeticError):
    """Raised when a linear system has no solution."""


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


class Field:
    """Either the prime field F_p (``p`` an int) or the rationals (``p=None``)."""

    def __init__(self, p: int | None = None):
        if p is not None:
            p = int(p)
            if not _is_prime(p):
                raise ValueError(f"{p} is not prime")
            if p >= 2**31:
                raise ValueError("primes >= 2^31 are not supported")
        self.p = p

    @classmethod
    def parse(cls, spec) -> "Field":
        """Accept ``"F5"``, ``"Q"``, ``{"kind": "Fp", "p": 5}`` or ``{"kind": "Q"}``."""
        if isinstance(spec, Field):
            return spec
        if isinstance(spec, dict):
            kind = str(spec.get("kind", "")).upper()
            if kind in ("Q", "QQ"):
                return cls(None)
            if kind in ("FP", "F", "GF"):
                return cls(int(spec["p"]))
            raise ValueError(f"unknown field kind {spec.get('kind')!r}")
        text = str(spec).strip().upper()
        if text in ("Q", "QQ"):
            return cls(None)
        m = re.fullmatch(r"(?:F|GF|FP)\(?(\d+)\)?", text)
        if not m:
            raise ValueError(f"cannot parse field {spec!r}")
        return cls(int(m.group(1)))

    @property
    def is_prime_field(self) -> bool:
        return self.p is not None

    @property
    def characteristic(self) -> int:
        return self.p or 0

    @property
    def dtype(self):
        return np.int64 if self.p is not None else object

    @property
    def name(self) -> str:
        return f"F{self.p}" if self.p is not None else "Q"

    def to_json(self) -> dict:
        return {"kind": "Fp", "p": self.p} if self.p is not None else {"kind": "Q"}

    def __repr__(self) -> str:
        return f"Field({self.name})"

    def __eq__(self, other) -> bool:
        return isinstance(other, Field) and other.p == self.p

    def __hash__(self) -> int:
        return hash(("Field", self.p))

    # scalars

    def __call__(self, x):
        """Canonical scalar: an int in [0, p) or a Fraction."""
        if self.p is not None:
            if isinstance(x, Fraction):
                return (x.numerator * pow(x.denominator, -1, self.p)) % self.p
            if isinstance(x, str):
                return self(Fraction(x))
            return int(x) % self.p
        return Fraction(x)

    def inv(self, x):
        x = self(x)
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        if self.p is not None:
            return pow(int(x), -1, self.p)
        return 1 / x

    def pow(self, x, e: int):
        x = self(x)
        if e < 0:
            return self.pow(self.inv(x), -e)
        if self.p is not None:
            return pow(int(x), e, self.p)
        return x**e

    def elements(self):
        """Deterministic enumeration of scalars; infinite for Q."""
        if self.p is not None:
            yield from range(self.p)
            return
        yield Fraction(0)
        k = 1
        while True:
            yield Fraction(k)
            yield Fraction(-k)
            k += 1

    def random(self, rng: np.random.Generator):
        if self.p is not None:
            return int(rng.integers(0, self.p))
        return Fraction(int(rng.integers(-5, 6)), int(rng.integers(1, 4)))

    def format(self, x) -> str:
        x = self(x)
        return str(x)

    # arrays

    def zeros(self, shape) -> np.ndarray:
        if self.p is not None:
            return np.zeros(shape, dtype=np.int64)
        out = np.empty(shape, dtype=object)
        out.fill(Fraction(0))
        return out

    def eye(self, n: int) -> np.ndarray:
        out = self.zeros((n, n))
        for i in range(n):
            out[i, i] = self(1)
        return out

    def array(self, data) -> np.ndarray:
        arr = np.array(data, dtype=object)
        if self.p is not None:
            flat = [self(v) for v in arr.ravel()]
            return np.array(flat, dtype=np.int64).reshape(arr.shape)
        out = np.empty(arr.shape, dtype=object)
        for idx, v in np.ndenumerate(arr):
            out[idx] = Fraction(v)
        return out

    def reduce(self, arr: np.ndarray) -> np.ndarray:
        if self.p is not None:
            return np.mod(arr, self.p)
        return arr

    def random_array(self, shape, rng: np.random.Generator) -> np.ndarray:
        if self.p is not None:
            return rng.integers(0, self.p, size=shape).astype(np.int64)
        out = np.empty(shape, dtype=object)
        for idx in np.ndindex(*np.atleast_1d(shape)):
            out[idx] = self.random(rng)
        return out


def float_type(field: Field, inner: int):
    """A float dtype in which an F_p dot product of this length is exact, if any."""
    if field.p is None:
        return None
    bound = max(inner, 1) * (field.p - 1) ** 2
    if bound < _FLOAT32_EXACT:
        return np.float32
    if bound < _FLOAT_EXACT:
        return np.float64
    return None


def _common_denominator(arr: np.ndarray):
    """Integer numerators over one common denominator."""
    flat = arr.ravel()
    den = math.lcm(*[x.denominator for x in flat]) if flat.size else 1
    nums = [x.numerator * (den // x.denominator) for x in flat]
    return nums, den


def _rational_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # clear denominators, multiply integers, then divide once per entry
    a_nums, da = _common_denominator(a)
    b_nums, db = _common_denominator(b)
    inner = a.shape[-1] if a.ndim else 1
    amax = max(map(abs, a_nums), default=0)
    bmax = max(map(abs, b_nums), default=0)
    if amax * bmax * max(inner, 1) < _INT64_SAFE:
        ai = np.array(a_nums, dtype=np.int64).reshape(a.shape)
        bi = np.array(b_nums, dtype=np.int64).reshape(b.shape)
    else:
        ai = np.array(a_nums + [None], dtype=object)[:-1].reshape(a.shape)
        bi = np.array(b_nums + [None], dtype=object)[:-1].reshape(b.shape)
    prod = np.dot(ai, bi)
    den = da * db
    out = np.empty(prod.shape, dtype=object)
    flat_out = out.reshape(-1) if out.ndim else None
    if flat_out is None:
        return Fraction(int(prod), den)
    for k, v in enumerate(prod.reshape(-1).tolist()):
        flat_out[k] = Fraction(v, den)
    return out


def matmul(a: np.ndarray, b: np.ndarray, field: Field) -> np.ndarray:
    """Exact product ``a @ b`` reduced into the field.

    For F_p the product runs through float64 BLAS whenever every partial sum
    stays below 2^53, which keeps it exact.
    """
    if field.p is None:
        return _rational_matmul(a, b)
    inner = a.shape[-1] if a.ndim else 1
    ftype = float_type(field, inner)
    if ftype is not None:
        out = np.dot(a.astype(ftype, copy=False), b.astype(ftype, copy=False))
        return np.mod(out.astype(np.int64), field.p)
    bound = max(inner, 1) * (field.p - 1) ** 2
    if bound < _INT64_SAFE:
        return np.mod(np.dot(a, b), field.p)
    out = np.dot(a.astype(object), b.astype(object))
    return np.mod(out, field.p).astype(np.int64)


def is_zero(arr: np.ndarray) -> bool:
    return not np.any(arr != 0)


def rref(a: np.ndarray, field: Field, *, ncols: int | None = None, reduced: bool = True):
    """Row-reduce ``a``; return ``(R, pivots)``.

    Only the first ``ncols`` columns are used for pivoting (the rest ride along,
    as in an augmented matrix).  Pivot rows come first, ordered by pivot column.
    With ``reduced=False`` the Q path skips back-substitution; over F_p the
    blocked elimination always produces the reduced form.
    """
    if ncols is None:
        ncols = a.shape[1]
    if field.p is not None and a.shape[0] > _BLOCK and ncols > _BLOCK:
        return _rref_blocked(a, field, ncols)
    return _rref_simple(a, field, ncols, reduced)


_BLOCK = 48


def _rref_simple(a, field, ncols, reduced):
    m = a.copy()
    rows, cols = m.shape
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == rows:
            break
        nz = np.flatnonzero(m[r:, c] != 0)
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            m[[r, k]] = m[[k, r]]
        inv = field.inv(m[r, c])
        m[r, c:] = field.reduce(m[r, c:] * inv)
        col = m[:, c]
        if reduced:
            targets = np.flatnonzero(col != 0)
            targets = targets[targets != r]
        else:
            targets = r + 1 + np.flatnonzero(col[r + 1:] != 0)
        if targets.size:
            f = col[targets].copy()
            m[targets, c:] = field.reduce(m[targets, c:] - np.outer(f, m[r, c:]))
        pivots.append(c)
        r += 1
    return m, pivots


def _panel_pivots(panel, field):
    """(row, col) pivot positions of a forward elimination of ``panel``."""
    m = panel.copy()
    rows, cols = m.shape
    idx = np.arange(rows)
    found = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(m[r:, c] != 0)
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            m[[r, k]] = m[[k, r]]
            idx[[r, k]] = idx[[k, r]]
        m[r, c:] = field.reduce(m[r, c:] * field.inv(m[r, c]))
        below = r + 1 + np.flatnonzero(m[r + 1:, c] != 0)
        if below.size:
            f = m[below, c].copy()
            m[below, c:] = field.reduce(m[below, c:] - np.outer(f, m[r, c:]))
        found.append((int(idx[r]), c))
        r += 1
    return found


def _inverse(a, field):
    n = a.shape[0]
    r, pivots = _rref_simple(np.concatenate([a, field.eye(n)], axis=1), field, n, True)
    if len(pivots) != n:
        raise ZeroDivisionError("singular pivot block")
    return r[:, n:]


def _rref_blocked(a, field, ncols):
    # Panel-wise Gauss-Jordan: pivots of a narrow panel are found naively, then
    # the whole matrix is updated with one matrix product per panel.
    m = a.copy()
    rows = m.shape[0]
    pivot_row = np.zeros(rows, dtype=bool)
    found: list[tuple[int, int]] = []
    for c0 in range(0, ncols, _BLOCK):
        free = np.flatnonzero(~pivot_row)
        if free.size == 0:
            break
        c1 = min(c0 + _BLOCK, ncols)
        sel = _panel_pivots(m[free, c0:c1], field)
        if not sel:
            continue
        srows = free[[i for i, _ in sel]]
        scols = [c0 + j for _, j in sel]
        block = matmul(_inverse(m[np.ix_(srows, scols)], field), m[srows], field)
        keep = np.ones(rows, dtype=bool)
        keep[srows] = False
        others = np.flatnonzero(keep)
        coeff = m[np.ix_(others, scols)]
        hit = np.any(coeff != 0, axis=1)
        if np.any(hit):
            targets = others[hit]
            m[targets] = field.reduce(m[targets] - matmul(coeff[hit], block, field))
        m[srows] = block
        pivot_row[srows] = True
        found.extend(zip(scols, srows.tolist()))
    found.sort()
    order = [r for _, r in found] + np.flatnonzero(~pivot_row).tolist()
    return m[order], [c for c, _ in found]


def rank(a: np.ndarray, field: Field) -> int:
    if a.size == 0:
        return 0
    # eliminate along the shorter side
    if a.shape[0] > a.shape[1]:
        a = a.T
    _, pivots = rref(a, field, reduced=False)
    return len(pivots)


def kernel_basis(a: np.ndarray, field: Field) -> list[np.ndarray]:
    """Basis of ``{v : a @ v = 0}``, one vector per free column (ascending).

    Each vector has a 1 in its free column and zeros in the other free columns.
    """
    rows, cols = a.shape
    if rows == 0:
        return [field.eye(cols)[i] for i in range(cols)]
    r, pivots = rref(a, field)
    return _kernel_from_rref(r, pivots, cols, field)


def _kernel_from_rref(r, pivots, cols, field) -> list[np.ndarray]:
    pivot_set = set(pivots)
    free = [c for c in range(cols) if c not in pivot_set]
    if not free:
        return []
    basis = field.zeros((len(free), cols))
    for k, c in enumerate(free):
        basis[k, c] = field(1)
    if pivots:
        basis[:, list(pivots)] = field.reduce(-r[: len(pivots), free].T)
    return list(basis)


def solve_one(a: np.ndarray, t: np.ndarray, field: Field) -> np.ndarray:
    """Some ``v`` with ``a @ v = t``; free variables are set to zero."""
    rows, cols = a.shape
    if rows == 0:
        return field.zeros(cols)
    aug = np.concatenate([a, t.reshape(-1, 1)], axis=1)
    r, pivots = rref(aug, field, ncols=cols)
    rk = len(pivots)
    if not is_zero(r[rk:, cols]):
        raise NoSolutionError("right-hand side is not in the column space")
    v = field.zeros(cols)
    for i, pc in enumerate(pivots):
        v[pc] = r[i, cols]
    return v


class LinearSolver:
    """Factor ``a`` once, then solve ``a @ v = t`` for many right-hand sides.

    The answers coincide with :func:`solve_one` (same pivots, free variables
    zero).
    """

    def __init__(self, a: np.ndarray, field: Field):
        self.field = field
        self.rows, self.cols = a.shape
        aug = np.concatenate([a, field.eye(self.rows)], axis=1)
        r, pivots = rref(aug, field, ncols=self.cols)
        self.pivots = pivots
        self.rank = len(pivots)
        self._reduced = r[:, : self.cols]
        self._transform = r[:, self.cols:]

    def kernel_basis(self) -> list[np.ndarray]:
        return _kernel_from_rref(self._reduced, self.pivots, self.cols, self.field)

    def solve_many(self, ts: np.ndarray) -> np.ndarray:
        """Solve for each column of ``ts``; raise if any column is unsolvable."""
        y = matmul(self._transform, ts, self.field)
        if not is_zero(y[self.rank:]):
            raise NoSolutionError("right-hand side is not in the column space")
        out = self.field.zeros((self.cols, ts.shape[1]))
        out[self.pivots, :] = y[: self.rank]
        return out

    def solve(self, t: np.ndarray) -> np.ndarray:
        return self.solve_many(t.reshape(-1, 1))[:, 0]

    def solvable(self, t: np.ndarray) -> bool:
        y = matmul(self._transform, t.reshape(-1, 1), self.field)
        return is_zero(y[self.rank:])


class EchelonSpace:
    """A subspace of k^n kept as a reduced row echelon basis.

    Supports incremental extension, membership and reduction of vectors.
    """

    def __init__(self, n: int, field: Field):
        self.n = n
        self.field = field
        self.basis = field.zeros((0, n))
        self.pivots: list[int] = []

    @property
    def dim(self) -> int:
        return len(self.pivots)

    def reduce(self, vs: np.ndarray) -> np.ndarray:
        """Residues of the rows of ``vs`` modulo the space (zero iff member)."""
        if not self.pivots:
            return vs.copy()
        coeffs = vs[:, self.pivots]
        return self.field.reduce(vs - matmul(coeffs, self.basis, self.field))

    def contains(self, v: np.ndarray) -> bool:
        return is_zero(self.reduce(v.reshape(1, -1)))

    def add(self, vs: np.ndarray) -> np.ndarray:
        """Extend by the rows of ``vs``; return the newly added basis rows."""
        vs = np.asarray(vs)
        if vs.size == 0:
            return self.field.zeros((0, self.n))
        res = self.reduce(vs.reshape(-1, self.n))
        res = res[np.any(res != 0, axis=1)]
        if res.shape[0] == 0:
            return res
        new, newpiv = rref(res, self.field)
        new = new[: len(newpiv)]
        if self.pivots:
            coeffs = self.basis[:, newpiv]
            self.basis = self.field.reduce(self.basis - matmul(coeffs, new, self.field))
        basis = np.concatenate([self.basis, new], axis=0)
        pivots = self.pivots + list(newpiv)
        order = np.argsort(pivots, kind="stable")
        self.basis = basis[order]
        self.pivots = [pivots[i] for i in order]
        return new

    def copy(self) -> "EchelonSpace":
        other = EchelonSpace(self.n, self.field)
        other.basis = self.basis.copy()
        other.pivots = list(self.pivots)
        return other

    def same_as(self, other: "EchelonSpace") -> bool:
        return self.pivots == other.pivots and bool(np.all(self.basis == other.basis))
