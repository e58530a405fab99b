"""Cohomology ring Ext(k, k): dual bases, chain-map lifts and Yoneda products."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .algebra import RightFactorSolver, mat_mul, zero_matrix
from .checks import Report
from .linalg import NoSolutionError, is_zero, matmul, rank
from .resolution import Resolution


class LiftError(ArithmeticError):
    code = "LIFT_FAILURE"


@dataclass
class ExtElement:
    """``sum coeffs[i] * phi_{i+1}^degree``."""

    degree: int
    coeffs: np.ndarray
    field: object

    @classmethod
    def basis(cls, field, degree: int, i: int) -> "ExtElement":
        """phi_i^degree, with i counted from 1."""
        v = field.zeros(degree + 1)
        v[i - 1] = field(1)
        return cls(degree, v, field)

    def __add__(self, other):
        if other.degree != self.degree:
            raise ValueError("degrees differ")
        return ExtElement(self.degree, self.field.reduce(self.coeffs + other.coeffs), self.field)

    def scale(self, s):
        return ExtElement(self.degree, self.field.reduce(self.coeffs * self.field(s)), self.field)

    def __eq__(self, other):
        return self.degree == other.degree and bool(np.all(self.coeffs == other.coeffs))

    def is_zero(self) -> bool:
        return is_zero(self.coeffs)

    def __str__(self) -> str:
        terms = [f"{self.field.format(c)}*phi_{i + 1}^{self.degree}" for i, c in enumerate(self.coeffs) if c != 0]
        return " + ".join(terms) if terms else "0"


@dataclass
class ChainLift:
    s: int
    i: int
    mats: list  # mats[u] is the (s+u+1) x (u+1) matrix L_u

    @property
    def depth(self) -> int:
        return len(self.mats) - 1

    def verify(self, res: Resolution) -> bool:
        alg = res.alg
        for u in range(1, len(self.mats)):
            lhs = mat_mul(alg, self.mats[u], res.d(u))
            rhs = mat_mul(alg, res.d(self.s + u), self.mats[u - 1])
            if not np.all(lhs == rhs):
                return False
        return True


@dataclass
class ProductTable:
    """``table[i, j, m]``: coefficient of phi_{m+1}^{s+t} in phi_{i+1}^s phi_{j+1}^t."""

    s: int
    t: int
    table: np.ndarray
    field: object

    def product(self, i: int, j: int) -> ExtElement:
        return ExtElement(self.s + self.t, self.table[i - 1, j - 1].copy(), self.field)

    def flattened_rank(self) -> int:
        return rank(self.table.reshape(-1, self.s + self.t + 1), self.field)

    def to_tsv(self) -> str:
        lines = ["i\tj\tm\tcoefficient"]
        for i, j, m in zip(*np.nonzero(self.table != 0)):
            lines.append(f"{i + 1}\t{j + 1}\t{m + 1}\t{self.field.format(self.table[i, j, m])}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {
            "s": self.s,
            "t": self.t,
            "field": self.field.name,
            "table": [[[self.field.format(c) for c in row] for row in block] for block in self.table],
        }


class ExtRing:
    """Caches solvers and lifts for one resolution."""

    def __init__(self, res: Resolution):
        self.res = res
        self.alg = res.alg
        self.field = res.alg.field
        self._solvers = {}
        self._lifts = {}

    def solver(self, u: int) -> RightFactorSolver:
        if u not in self._solvers:
            self._solvers[u] = RightFactorSolver(self.alg, self.res.d(u))
        return self._solvers[u]

    def lift(self, s: int, i: int, depth: int, rng: np.random.Generator | None = None) -> ChainLift:
        """Lift phi_i^s through ``depth`` steps; with ``rng`` each step is perturbed by a
        random solution of the homogeneous system (not cached)."""
        if s + depth > self.res.max_degree:
            self.res.extend(s + depth)
        key = (s, i)
        cached = None if rng is not None else self._lifts.get(key)
        if cached is not None and cached.depth >= depth:
            return ChainLift(s, i, cached.mats[: depth + 1])
        alg, f = self.alg, self.field
        if cached is not None:
            mats = list(cached.mats)
        else:
            l0 = zero_matrix(alg, s + 1, 1)
            l0[i - 1, 0, 0] = f(1)
            mats = [l0]
        for u in range(len(mats), depth + 1):
            target = mat_mul(alg, self.res.d(s + u), mats[u - 1])
            solver = self.solver(u)
            try:
                lu = solver.solve_rows(target)
            except NoSolutionError as exc:
                raise LiftError(f"cannot lift phi_{i}^{s} at step {u}") from exc
            if rng is not None:
                kern = solver.kernel_basis()
                if len(kern):
                    coeffs = f.random_array((lu.shape[0], len(kern)), rng)
                    shift = matmul(coeffs, kern.reshape(len(kern), -1), f).reshape(lu.shape)
                    lu = f.reduce(lu + shift)
            mats.append(lu)
        lift = ChainLift(s, i, mats)
        if rng is None:
            self._lifts[key] = lift
        return lift

    def basis_product_row(self, s: int, i: int, t: int, rng=None) -> np.ndarray:
        """``out[j, m]`` = coefficient of phi_{m+1}^{s+t} in phi_i^s phi_{j+1}^t."""
        lift = self.lift(s, i, t, rng)
        lt = lift.mats[t]  # (s+t+1) x (t+1)
        return np.ascontiguousarray(lt[:, :, 0].T)

    def product_table(self, s: int, t: int) -> ProductTable:
        rows = [self.basis_product_row(s, i, t) for i in range(1, s + 2)]
        return ProductTable(s, t, np.stack(rows), self.field)

    def product(self, a: ExtElement, b: ExtElement) -> ExtElement:
        s, t, f = a.degree, b.degree, self.field
        out = f.zeros(s + t + 1)
        for i, ca in enumerate(a.coeffs):
            if ca == 0:
                continue
            row = self.basis_product_row(s, i + 1, t)
            contrib = matmul(b.coeffs.reshape(1, -1), row, f)[0]
            out = f.reduce(out + contrib * f(ca))
        return ExtElement(s + t, out, f)


def ext_ring(res: Resolution) -> ExtRing:
    ring = getattr(res, "_ext_ring", None)
    if ring is None:
        ring = ExtRing(res)
        res._ext_ring = ring
    return ring


def lift(res: Resolution, s: int, i: int, depth: int, rng=None) -> ChainLift:
    return ext_ring(res).lift(s, i, depth, rng)


def yoneda_product(res: Resolution, a: ExtElement, b: ExtElement) -> ExtElement:
    return ext_ring(res).product(a, b)


def product_table(res: Resolution, s: int, t: int) -> ProductTable:
    return ext_ring(res).product_table(s, t)


def phi(res: Resolution, degree: int, i: int) -> ExtElement:
    return ExtElement.basis(res.alg.field, degree, i)


# verification


def verify_finite_generation(res: Resolution, max_degree: int | None = None) -> Report:
    """Products H^{2t} x H^1 -> H^{2t+1} and H^{2t} x H^2 -> H^{2t+2} are onto for t >= 1."""
    R = res.max_degree if max_degree is None else max_degree
    rep = Report("finite generation")
    ranks = {}
    for s in range(2, R, 2):
        for t in (1, 2):
            if s + t > R:
                continue
            tab = product_table(res, s, t)
            rk = tab.flattened_rank()
            target = s + t + 1
            ranks[f"{s}x{t}"] = {"rank": rk, "target_dim": target}
            rep.add(f"H^{s} x H^{t} -> H^{s + t} is onto", rk == target, target, rk,
                    "cohomology is generated in degrees 1 and 2")
    rep.data["ranks"] = ranks
    rep.data["max_degree"] = R
    return rep


def check_structure_constants(res: Resolution, max_degree: int | None = None, c=None) -> Report:
    """Products of odd-indexed even-degree classes with degree 1 and 2 classes.

    Expected: phi_{2s+1}^{2t} phi_1^1 = phi_{2s+1}^{2t+1}, phi_{2s+1}^{2t} phi_2^1 = phi_{2s+2}^{2t+1},
    phi_{2s+1}^{2t} phi_1^2 = c^s phi_{2s+1}^{2t+2}, phi_2^2 -> phi_{2s+2}^{2t+2}, phi_3^2 -> phi_{2s+3}^{2t+2}.
    """
    R = res.max_degree if max_degree is None else max_degree
    f = res.alg.field
    c = res.seed.c if c is None else f(c)
    rep = Report("structure constants")
    ring = ext_ring(res)
    for t in range(0, R // 2):
        deg = 2 * t
        for s in range(t + 1):
            left = 2 * s + 1
            if deg + 1 <= R:
                row = ring.basis_product_row(deg, left, 1)
                for j, target in ((1, left), (2, left + 1)):
                    exp = phi(res, deg + 1, target)
                    got = ExtElement(deg + 1, row[j - 1], f)
                    rep.add(f"phi_{left}^{deg} phi_{j}^1 = phi_{target}^{deg + 1}", got == exp, exp, got,
                            "odd-index products with degree 1")
            if deg + 2 <= R:
                row = ring.basis_product_row(deg, left, 2)
                for j, target, scale in ((1, left, f.pow(c, s)), (2, left + 1, 1), (3, left + 2, 1)):
                    exp = phi(res, deg + 2, target).scale(scale)
                    got = ExtElement(deg + 2, row[j - 1], f)
                    name = f"phi_{left}^{deg} phi_{j}^2 = " + (f"c^{s} " if j == 1 else "") + f"phi_{target}^{deg + 2}"
                    rep.add(name, got == exp, exp, got, "odd-index products with degree 2")
    return rep


def check_low_degree_products(res: Resolution, n: int, m: int, q) -> Report:
    """Degree-one products for the quantum complete intersection."""
    f = res.alg.field
    q = f(q)
    rep = Report("degree one products")
    p = lambda d, i: phi(res, d, i)  # noqa: E731
    prod = lambda a, b: yoneda_product(res, a, b)  # noqa: E731
    sq = prod(p(1, 1), p(1, 1))
    exp = p(2, 1) if n == 2 else ExtElement(2, f.zeros(3), f)
    rep.add(f"phi_1^1 phi_1^1 = {'phi_1^2' if n == 2 else '0'} (n={n})", sq == exp, exp, sq,
            "x-square class nonzero only when n = 2")
    got = prod(p(1, 2), p(1, 1))
    rep.add("phi_2^1 phi_1^1 = phi_2^2", got == p(2, 2), p(2, 2), got, "degree one products")
    got = prod(p(1, 1), p(1, 2))
    exp = p(2, 2).scale(-q)
    rep.add("phi_1^1 phi_2^1 = -q phi_2^2", got == exp, exp, got, "degree one products", informational=True)
    got = prod(p(1, 2), p(1, 2))
    exp = p(2, 3) if m == 2 else ExtElement(2, f.zeros(3), f)
    rep.add(f"phi_2^1 phi_2^1 = {'phi_3^2' if m == 2 else '0'} (m={m})", got == exp, exp, got,
            "y-square class nonzero only when m = 2", informational=True)
    tab = product_table(res, 1, 1)
    rep.data["table_1_1"] = tab.to_json()["table"]
    return rep


def verify_even_commutativity(res: Resolution, max_degree: int | None = None) -> Report:
    """phi_i^2 phi_j^2 = phi_j^2 phi_i^2, and optionally all even-degree pairs up to max_degree."""
    rep = Report("even commutativity")
    R = 4 if max_degree is None else max_degree
    f = res.alg.field
    pairs = [(s, t) for s in range(2, R + 1, 2) for t in range(s, R + 1, 2) if s + t <= R]
    for s, t in pairs:
        ab = product_table(res, s, t)
        ba = product_table(res, t, s)
        for i in range(1, s + 2):
            for j in range(1, t + 2):
                if s == t and j < i:
                    continue
                x, y = ab.product(i, j), ba.product(j, i)
                rep.add(f"phi_{i}^{s} phi_{j}^{t} = phi_{j}^{t} phi_{i}^{s}", x == y, y, x,
                        "even-degree classes commute")
    tab = product_table(res, 2, 2)
    for i, j, m in ((2, 1, 2), (2, 3, 4)):
        got = tab.product(i, j)
        exp = phi(res, 4, m)
        rep.add(f"phi_{i}^2 phi_{j}^2 = phi_{m}^4", got == exp, exp, got, "degree-two products")
    rep.data["table_2_2"] = tab.to_json()["table"]
    return rep


def check_lift_independence(res: Resolution, trials: int = 100, seed: int = 0, max_degree=None) -> Report:
    """Products are unchanged when every lift step is perturbed by a random homogeneous solution."""
    R = res.max_degree if max_degree is None else max_degree
    rng = np.random.default_rng(seed)
    ring = ext_ring(res)
    rep = Report("lift independence")
    bad = 0
    for _ in range(trials):
        s = int(rng.integers(0, R))
        t = int(rng.integers(1, R - s + 1))
        i = int(rng.integers(1, s + 2))
        base = ring.basis_product_row(s, i, t)
        pert_lift = ring.lift(s, i, t, rng)
        pert = np.ascontiguousarray(pert_lift.mats[t][:, :, 0].T)
        ok = bool(np.all(base == pert)) and pert_lift.verify(res)
        bad += not ok
        if not ok:
            rep.add(f"perturbed lift of phi_{i}^{s} depth {t}", False, "same product", "different")
    rep.add(f"{trials} perturbed lifts give identical products", bad == 0, 0, bad,
            "the Yoneda product does not depend on the lift")
    return rep


def check_associativity(res: Resolution, samples: int = 100, seed: int = 0, max_degree=None) -> Report:
    """(a b) c = a (b c) on random basis triples with total degree at most max_degree."""
    R = res.max_degree if max_degree is None else max_degree
    rng = np.random.default_rng(seed)
    rep = Report("product associativity")
    f = res.alg.field
    triples = [(a, b, c) for a, b, c in itertools.product(range(R + 1), repeat=3) if a + b + c <= R]
    bad = 0
    for _ in range(samples):
        a, b, c = triples[int(rng.integers(len(triples)))]
        x = phi(res, a, int(rng.integers(1, a + 2)))
        y = phi(res, b, int(rng.integers(1, b + 2)))
        z = phi(res, c, int(rng.integers(1, c + 2)))
        lhs = yoneda_product(res, yoneda_product(res, x, y), z)
        rhs = yoneda_product(res, x, yoneda_product(res, y, z))
        if lhs != rhs:
            bad += 1
            rep.add(f"({x})({y})({z})", False, rhs, lhs)
    rep.add(f"{samples} sampled triples associate", bad == 0, 0, bad, "the Yoneda product is associative")
    return rep


def check_unit(res: Resolution, max_degree=None) -> Report:
    R = res.max_degree if max_degree is None else max_degree
    rep = Report("unit")
    one = phi(res, 0, 1)
    ok = True
    for r in range(R + 1):
        for i in range(1, r + 2):
            x = phi(res, r, i)
            ok &= yoneda_product(res, one, x) == x and yoneda_product(res, x, one) == x
    rep.add("degree-0 class is a two-sided unit", ok, "True", str(ok), "unit of the ring")
    return rep
