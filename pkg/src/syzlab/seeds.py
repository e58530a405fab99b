"""Seed data for the periodic resolution: the relations sigma, psi, theta, the
connecting elements rho_1..rho_4, the socle element omega and the scalar c.

Scalar conventions.  ``omega = theta_1 rho_1 + theta_2 rho_2``.  The scalar ``c``
is the one making ``theta.rho_12 + c * sigma.rho_34 = 0``; this is the equation
the differentials need (it is the (3,2) entry of d_4 d_3).  The alternative
reading ``sigma.rho_34 = -c * omega`` gives ``c_literal``, which agrees with
``c`` only when ``c^2 = 1``; both are recorded.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace

import numpy as np

from .algebra import AlgebraElement, FiniteDimAlgebra, left_span, syzygy_space
from .checks import Report
from .families import FamilyConfig, family_algebra, radical_generators
from .linalg import EchelonSpace, LinearSolver, NoSolutionError, is_zero, kernel_basis, matmul


class RhoError(ArithmeticError):
    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code


@dataclass
class SeedData:
    alg: FiniteDimAlgebra
    x: AlgebraElement
    y: AlgebraElement
    sigma: tuple
    psi: tuple
    theta: tuple
    rho: tuple
    omega: AlgebraElement | None = None
    c: object = None
    c_literal: object = None
    label: str = ""

    @property
    def field(self):
        return self.alg.field

    def relation(self, name: str) -> tuple:
        return {"sigma": self.sigma, "psi": self.psi, "theta": self.theta}[name]

    def vec(self, name: str) -> np.ndarray:
        """A relation as a module vector in Lambda^2."""
        a, b = self.relation(name)
        return np.stack([a.vec, b.vec])

    def with_rho(self, rho) -> "SeedData":
        return finish_seed(replace(self, rho=tuple(self.alg.element(r) for r in rho)))

    def with_relation(self, name: str, value) -> "SeedData":
        value = tuple(self.alg.element(v) for v in value)
        return finish_seed(replace(self, **{name: value}))

    def to_json(self) -> dict:
        fmt = str
        return {
            "x": fmt(self.x),
            "y": fmt(self.y),
            "sigma": [fmt(e) for e in self.sigma],
            "psi": [fmt(e) for e in self.psi],
            "theta": [fmt(e) for e in self.theta],
            "rho": [fmt(e) for e in self.rho],
            "omega": fmt(self.omega) if self.omega is not None else None,
            "c": self.field.format(self.c) if self.c is not None else None,
            "c_literal": self.field.format(self.c_literal) if self.c_literal is not None else None,
        }


def _pair(s: SeedData, rel: tuple, r1, r2) -> AlgebraElement:
    return rel[0] * r1 + rel[1] * r2


def scalar_ratio(alg, v: np.ndarray, w: np.ndarray):
    """``lam`` with ``v = lam * w`` (``w`` nonzero), or None if not proportional."""
    f = alg.field
    nz = np.flatnonzero(w != 0)
    if nz.size == 0:
        return None
    i = int(nz[0])
    lam = f(f(v[i]) * f.inv(w[i]))
    if is_zero(f.reduce(v - w * lam)):
        return lam
    return None


def compute_omega_and_c(seed: SeedData):
    """Return ``(omega, c, c_literal)``; the scalars are None when undefined."""
    f = seed.field
    rho = seed.rho
    omega = _pair(seed, seed.theta, rho[0], rho[1])
    s34 = _pair(seed, seed.sigma, rho[2], rho[3])
    if omega.is_zero():
        return omega, None, None
    mu = scalar_ratio(seed.alg, s34.vec, omega.vec)
    if mu is None or mu == 0:
        return omega, None, None
    return omega, f(-f.inv(mu)), f(-mu)


def finish_seed(seed: SeedData) -> SeedData:
    omega, c, c_lit = compute_omega_and_c(seed)
    seed.omega, seed.c, seed.c_literal = omega, c, c_lit
    return seed


# closed-form seeds


def qci_seed(config: FamilyConfig, alg=None) -> SeedData:
    """sigma = (x^(n-1), 0), psi = (-q y, x), theta = (0, y^(m-1)) and the matching rho."""
    if config.family != "qci":
        raise ValueError("qci_seed needs a qci config")
    alg = alg or family_algebra(config)
    f = alg.field
    prm = config.p
    n, m = int(prm["n"]), int(prm["m"])
    q = config.scalar("q")
    x, y = radical_generators(config, alg)
    zero = alg.zero()
    seed = SeedData(
        alg, x, y,
        sigma=(x ** (n - 1), zero),
        psi=(y.scale(-q), x),
        theta=(zero, y ** (m - 1)),
        rho=(zero, (x ** (n - 1)).scale(f.pow(f.inv(q), n)), (y ** (m - 1)).scale(-f.pow(q, m - 1)), zero),
        label=config.label,
    )
    return finish_seed(seed)


def a5_seed(config: FamilyConfig, alg=None) -> SeedData:
    """The A5 seed; the radical generator z plays the role of x."""
    if config.family != "a5":
        raise ValueError("a5_seed needs an a5 config")
    alg = alg or family_algebra(config)
    f = alg.field
    p = int(config.p["p"])
    beta = config.scalar("beta")
    bi = f.inv(beta)
    a, y, z = alg.gen("a"), alg.gen("y"), alg.gen("z")
    zero = alg.zero()
    rho3 = (
        (y ** (p - 1)).scale(-bi)
        - (y ** (p - 2) * z ** (p - 1)).scale(f.pow(bi, 2))
        + (a ** (p - 1) * y ** (p - 2) * z ** (p - 2)).scale(f.pow(bi, 3))
    )
    seed = SeedData(
        alg, z, y,
        sigma=(z ** (p * p - 1), zero),
        psi=(z ** (p - 1) - y.scale(beta), a ** (p - 1) + z.scale(beta)),
        theta=(zero, y ** (p - 1)),
        rho=(zero, (z ** (p * p - 1)).scale(bi), rho3, zero),
        label=config.label,
    )
    return finish_seed(seed)


def custom_seed(config: FamilyConfig, alg=None) -> SeedData:
    """Seed read from config strings; rho is solved for when absent."""
    alg = alg or family_algebra(config)
    prm = config.p
    x, y = radical_generators(config, alg)
    el = alg.element
    seed = SeedData(
        alg, x, y,
        sigma=tuple(el(s) for s in prm["sigma"]),
        psi=tuple(el(s) for s in prm["psi"]),
        theta=tuple(el(s) for s in prm["theta"]),
        rho=tuple(el(s) for s in prm["rho"]) if "rho" in prm else (alg.zero(),) * 4,
        label=config.label,
    )
    if "rho" not in prm:
        return solve_rho(seed).seeds[0]
    return finish_seed(seed)


def seed_for(config: FamilyConfig, alg=None) -> SeedData:
    if config.family == "qci":
        return qci_seed(config, alg)
    if config.family == "a5":
        return a5_seed(config, alg)
    return custom_seed(config, alg)


# seed checks


def _d1(seed: SeedData) -> np.ndarray:
    return np.stack([seed.x.vec, seed.y.vec])[:, None, :]


def second_syzygy(seed: SeedData):
    """k-basis (rows, flattened Lambda^2) of ``{(a, b) : a x + b y = 0}``."""
    return syzygy_space(seed.alg, _d1(seed))[0]


def radical_times(alg, basis: np.ndarray, r: int) -> EchelonSpace:
    """J * M for the submodule M of Lambda^r with k-basis ``basis`` (flattened rows)."""
    n = alg.dim
    space = EchelonSpace(r * n, alg.field)
    if basis.shape[0] == 0:
        return space
    for v in basis:
        mult = alg.monomial_multiples(v.reshape(r, n))  # (N, r, N)
        space.add(mult[1:].reshape(n - 1, r * n))
    return space


def check_relation_conditions(alg, seed: SeedData) -> Report:
    """Clauses on sigma, psi, theta: independence of psi mod J^2, relations,
    minimality in Omega^2 / J Omega^2, and dim(k sigma + k theta + Lambda psi) = N + 1."""
    rep = Report("relation conditions")
    n = alg.dim
    layers = alg.radical_layers
    rad = layers[1]
    rad2 = layers[2] if len(layers) > 2 else EchelonSpace(n, alg.field)

    in_rad = all(rad.contains(e.vec) for e in seed.psi)
    space = rad2.copy()
    added = space.add(np.stack([e.vec for e in seed.psi]))
    rep.add("(i) psi_1, psi_2 lie in J and are independent modulo J^2", in_rad and len(added) == 2,
            "rank 2 modulo J^2", f"rank {len(added)} modulo J^2, in J: {in_rad}",
            "psi is a minimal relation whose entries are independent modulo J^2")

    for name in ("sigma", "psi", "theta"):
        a, b = seed.relation(name)
        val = a * seed.x + b * seed.y
        rep.add(f"(ii) {name}_1 x + {name}_2 y = 0", val.is_zero(), "0", str(val),
                "sigma, psi, theta are relations for x, y")

    omega2 = second_syzygy(seed)
    j_omega2 = radical_times(alg, omega2, 2)
    for name in ("sigma", "psi", "theta"):
        v = seed.vec(name).reshape(-1)
        ok = not j_omega2.contains(v)
        rep.add(f"(iii) {name} is nonzero in Omega^2/J Omega^2", ok, "nonzero",
                "nonzero" if ok else "lies in J Omega^2", "each relation is minimal")
    top = j_omega2.copy()
    added = top.add(np.stack([seed.vec(nm).reshape(-1) for nm in ("sigma", "psi", "theta")]))
    top_dim = omega2.shape[0] - j_omega2.dim
    rep.add("(iii) sigma, psi, theta form a basis of Omega^2/J Omega^2", len(added) == 3 == top_dim,
            "3 independent of 3", f"{len(added)} independent of {top_dim}",
            "the three relations minimally generate Omega^2", informational=True)

    span = left_span(alg, [seed.vec("psi")])
    span_psi = span.dim
    span.add(np.stack([seed.vec("sigma").reshape(-1), seed.vec("theta").reshape(-1)]))
    rep.add("(iv) dim(k sigma + k theta + Lambda psi) = N + 1", span.dim == n + 1, n + 1, span.dim,
            "sigma and theta are independent modulo Lambda psi")
    rep.data.update({"dim_Lambda_psi": span_psi, "dim_Omega2": int(omega2.shape[0]), "dim_top_Omega2": top_dim})
    return rep


def check_assumption_2_1(alg, seed: SeedData) -> Report:
    return check_relation_conditions(alg, seed)


def _identity(rep, alg, name, lhs, rhs, reference, informational=False):
    rhs = rhs if isinstance(rhs, AlgebraElement) else alg.element(rhs)
    ok = lhs == rhs
    rep.add(name, ok, str(rhs), str(lhs), reference, informational)
    return ok


def check_identity_blocks(alg, seed: SeedData) -> Report:
    """Evaluate the relation, rho and omega identities exactly."""
    rep = Report("identity blocks")
    f = alg.field
    x, y = seed.x, seed.y
    sg, ps, th, rho = seed.sigma, seed.psi, seed.theta, seed.rho
    zero = alg.zero()

    for name, rel in (("sigma", sg), ("psi", ps), ("theta", th)):
        _identity(rep, alg, f"[1] {name}_1 x + {name}_2 y = 0", rel[0] * x + rel[1] * y, zero,
                  "relations")

    for gname, g, left_rel, r in (("x", x, "sigma", 0), ("y", y, "sigma", 1),
                                  ("x", x, "theta", 2), ("y", y, "theta", 3)):
        rel = seed.relation(left_rel)
        for j in (0, 1):
            _identity(rep, alg, f"[2] {gname} {left_rel}_{j + 1} + rho_{r + 1} psi_{j + 1} = 0",
                      g * rel[j] + rho[r] * ps[j], zero, "rho connects d_3 to d_2")

    omega, c = seed.omega, seed.c
    omega = omega if omega is not None else zero
    s12 = {nm: _pair(seed, seed.relation(nm), rho[0], rho[1]) for nm in ("sigma", "psi", "theta")}
    s34 = {nm: _pair(seed, seed.relation(nm), rho[2], rho[3]) for nm in ("sigma", "psi", "theta")}
    ref = "products of relations with rho"
    _identity(rep, alg, "[3] sigma_1 rho_1 + sigma_2 rho_2 = 0", s12["sigma"], zero, ref)
    _identity(rep, alg, "[3] psi_1 rho_1 + psi_2 rho_2 = 0", s12["psi"], zero, ref)
    _identity(rep, alg, "[3] theta_1 rho_1 + theta_2 rho_2 = omega", s12["theta"], omega, ref)
    if c is not None:
        _identity(rep, alg, "[3] sigma_1 rho_3 + sigma_2 rho_4 = -c^-1 omega", s34["sigma"],
                  omega.scale(-f.inv(c)), ref)
        _identity(rep, alg, "[3'] sigma_1 rho_3 + sigma_2 rho_4 = (-c) omega (literal sign form)",
                  s34["sigma"], omega.scale(-c), ref, informational=True)
    else:
        rep.add("[3] sigma_1 rho_3 + sigma_2 rho_4 is a nonzero multiple of omega", False,
                "nonzero multiple of omega", str(s34["sigma"]), ref)
    _identity(rep, alg, "[3] psi_1 rho_3 + psi_2 rho_4 = 0", s34["psi"], zero, ref)
    _identity(rep, alg, "[3] theta_1 rho_3 + theta_2 rho_4 = 0", s34["theta"], zero, ref)

    if c is not None:
        _identity(rep, alg, "[c] theta_1 rho_1 + theta_2 rho_2 + c (sigma_1 rho_3 + sigma_2 rho_4) = 0",
                  s12["theta"] + s34["sigma"].scale(c), zero, "defines the scalar c")
    rep.add("omega != 0", not omega.is_zero(), "nonzero", str(omega), "omega spans part of the socle")
    rep.add("omega in socle", alg.in_socle(omega.vec), "True", str(alg.in_socle(omega.vec)),
            "omega spans part of the socle")
    rep.add("c != 0", c is not None and c != 0, "nonzero", f.format(c) if c is not None else "undefined",
            "the scalar c is invertible")
    for nm in ("sigma", "psi", "theta"):
        for label, val in (("rho_12", s12[nm]), ("rho_34", s34[nm])):
            ins = alg.in_socle(val.vec)
            rep.add(f"{nm} . {label} lies in the socle", ins, "True", str(ins),
                    "products with rho land in the socle")
    rep.data.update({
        "omega": str(omega),
        "c": f.format(c) if c is not None else None,
        "c_literal": f.format(seed.c_literal) if seed.c_literal is not None else None,
    })
    return rep


# expected preset values


def preset_expectations(config: FamilyConfig, seed: SeedData) -> Report:
    """Compare computed omega, c and products with the closed-form values for the shipped families."""
    alg, f = seed.alg, seed.field
    rep = Report("closed-form values")
    rho = seed.rho
    if config.family == "qci":
        n, m = int(config.p["n"]), int(config.p["m"])
        q = config.scalar("q")
        x, y = seed.x, seed.y
        _identity(rep, alg, "theta . rho_12 = q^-n y^(m-1) x^(n-1)", _pair(seed, seed.theta, rho[0], rho[1]),
                  (y ** (m - 1) * x ** (n - 1)).scale(f.pow(f.inv(q), n)), "products with rho for QCI")
        _identity(rep, alg, "sigma . rho_34 = -q^(m-1) x^(n-1) y^(m-1)", _pair(seed, seed.sigma, rho[2], rho[3]),
                  (x ** (n - 1) * y ** (m - 1)).scale(-f.pow(q, m - 1)), "products with rho for QCI")
        qnm = f.pow(q, n * m)
        rep.add("c_literal (from sigma.rho_34 = (-c) omega) = q^(nm)", seed.c_literal == qnm,
                f.format(qnm), f.format(seed.c_literal) if seed.c_literal is not None else "undefined",
                "QCI scalar under the literal sign form")
        qinv = f.inv(qnm)
        rep.add("c (from theta.rho_12 + c sigma.rho_34 = 0) = q^(-nm)", seed.c == qinv,
                f.format(qinv), f.format(seed.c) if seed.c is not None else "undefined",
                "QCI scalar used by the differentials")
    elif config.family == "a5":
        p = int(config.p["p"])
        beta = config.scalar("beta")
        a, y, z = alg.gen("a"), alg.gen("y"), alg.gen("z")
        expected = (a ** (p - 1) * y ** (p - 1) * z ** (p - 1)).scale(f.pow(beta, p - 2))
        _identity(rep, alg, "omega = beta^(p-2) a^(p-1) y^(p-1) z^(p-1)", seed.omega, expected,
                  "A5 socle element")
        rep.add("c = 1", seed.c == 1, "1", f.format(seed.c) if seed.c is not None else "undefined",
                "A5 scalar")
        zero = alg.zero()
        _identity(rep, alg, "psi_1 rho_1 + psi_2 rho_2 = (a^(p-1) + beta z) beta^-1 z^(p^2-1) = 0",
                  _pair(seed, seed.psi, rho[0], rho[1]), zero, "A5 seed")
        _identity(rep, alg, "psi_1 rho_3 = 0", seed.psi[0] * rho[2], zero, "A5 seed")
        _identity(rep, alg, "z y^(p-1) + rho_3 psi_2 = 0", z * y ** (p - 1) + rho[2] * seed.psi[1], zero,
                  "A5 seed")
        sigma_in = left_span(alg, [seed.vec("psi")])
        for nm in ("sigma", "theta"):
            inside = sigma_in.contains(seed.vec(nm).reshape(-1))
            rep.add(f"{nm} not in Lambda psi", not inside, "False", str(inside), "A5 relations")
    return rep


# solving for rho


@dataclass
class RhoSolutions:
    seeds: list
    solution_dim: int  # dimension of the affine space cut out by the linear identities
    rho_psi_dim: int  # dimension of the affine space for the rho-psi identities alone
    exhausted: bool  # True when the enumeration visited the whole search space
    _system: tuple = None

    def contains(self, rho) -> bool:
        """Whether ``rho`` satisfies every identity with some nonzero omega and c."""
        alg, a_mat, b, base = self._system
        xv = np.concatenate([alg.element(r).vec for r in rho])
        if not is_zero(alg.field.reduce(matmul(xv.reshape(1, -1), a_mat, alg.field)[0] - b)):
            return False
        s = base.with_rho(rho)
        return s.c is not None and not s.omega.is_zero() and alg.in_socle(s.omega.vec)


def _stack_ops(alg, ops_per_rho: list) -> np.ndarray:
    """Stack four (N, N) blocks (None for zero) vertically into a (4N, N) matrix."""
    n = alg.dim
    return np.concatenate([op if op is not None else alg.field.zeros((n, n)) for op in ops_per_rho], axis=0)


def _nonzero_scalars(field, limit: int = 4) -> list:
    if field.p is not None:
        return list(range(1, field.p))
    out = []
    for v in field.elements():
        if v != 0:
            out.append(v)
        if len(out) >= limit:
            return out
    return out


def solve_rho(seed: SeedData, *, cap: int = 16, budget: int = 20000, seed_rng: int = 0) -> RhoSolutions:
    """All rho compatible with sigma, psi, theta, enumerated by Hamming weight over a kernel basis."""
    alg, f = seed.alg, seed.field
    n = alg.dim
    x, y = seed.x, seed.y
    R = alg.right_op
    L = alg.left_op

    # rho_i psi_j = -(g rel_j)
    cols, rhs = [], []
    targets = [(x, seed.sigma), (y, seed.sigma), (x, seed.theta), (y, seed.theta)]
    for i, (g, rel) in enumerate(targets):
        for j in (0, 1):
            blocks = [None] * 4
            blocks[i] = R(seed.psi[j].vec)
            cols.append(_stack_ops(alg, blocks))
            rhs.append(f.reduce(-(g * rel[j]).vec))
    a_rp = np.concatenate(cols, axis=1)
    b_rp = np.concatenate(rhs)
    rp_solver = LinearSolver(a_rp.T, f)
    if not rp_solver.solvable(b_rp):
        raise RhoError("NO_RHO_FOR_3_2", "the rho-psi identities have no solution for this seed")
    rho_psi_dim = len(rp_solver.kernel_basis())

    soc = np.array(alg.socle_basis) if alg.socle_basis else f.zeros((0, n))
    anti = kernel_basis(soc, f) if soc.shape[0] else [f.eye(n)[i] for i in range(n)]
    anti = np.array(anti).T if len(anti) else f.zeros((n, 0))  # v in socle iff v @ anti = 0

    def pair_op(rel, first):
        blocks = [None] * 4
        blocks[first], blocks[first + 1] = L(rel[0].vec), L(rel[1].vec)
        return _stack_ops(alg, blocks)

    extra = [
        pair_op(seed.sigma, 0),
        pair_op(seed.psi, 0),
        pair_op(seed.psi, 2),
        pair_op(seed.theta, 2),
        matmul(pair_op(seed.theta, 0), anti, f),
        matmul(pair_op(seed.sigma, 2), anti, f),
    ]
    a_mat = np.concatenate([a_rp] + extra, axis=1)
    b = np.concatenate([b_rp, f.zeros(sum(e.shape[1] for e in extra))])
    full = LinearSolver(a_mat.T, f)
    if not full.solvable(b):
        raise RhoError("NO_RHO_FOR_3_4", "no rho satisfies the vanishing identities")
    x0 = full.solve(b)
    dirs = full.kernel_basis()
    omega_op = pair_op(seed.theta, 0)
    s34_op = pair_op(seed.sigma, 2)

    def as_rho(xv):
        return tuple(alg.element(xv[k * n:(k + 1) * n].copy()) for k in range(4))

    def admissible(xv):
        om = matmul(xv.reshape(1, -1), omega_op, f)[0]
        s34 = matmul(xv.reshape(1, -1), s34_op, f)[0]
        if is_zero(om):
            return False
        mu = scalar_ratio(alg, s34, om)
        return mu is not None and mu != 0

    def affine_zero(op):
        return is_zero(matmul(x0.reshape(1, -1), op, f)) and all(is_zero(matmul(d.reshape(1, -1), op, f)) for d in dirs)

    if affine_zero(omega_op) or affine_zero(s34_op):
        raise RhoError("NO_RHO_FOR_3_4", "omega or sigma.rho_34 vanishes on every solution")

    found, visited = [], 0
    values = _nonzero_scalars(f)
    exhausted = True
    for w in range(len(dirs) + 1):
        for pos in itertools.combinations(range(len(dirs)), w):
            for vals in itertools.product(values, repeat=w):
                visited += 1
                if visited > budget:
                    exhausted = False
                    break
                xv = x0.copy()
                for k, v in zip(pos, vals):
                    xv = f.reduce(xv + dirs[k] * f(v))
                if admissible(xv):
                    found.append(xv)
                    if len(found) >= cap:
                        break
            if len(found) >= cap or visited > budget:
                break
        if len(found) >= cap or visited > budget:
            exhausted = exhausted and len(found) < cap
            break
    if f.p is None:
        exhausted = False  # only a finite sample of the rational coefficients was visited

    if not found:
        # sample uniformly; a nonzero affine pair almost never vanishes together
        rng = np.random.default_rng(seed_rng)
        for _ in range(1000):
            xv = x0.copy()
            for d in dirs:
                xv = f.reduce(xv + d * f.random(rng))
            if admissible(xv):
                found.append(xv)
                break
    if not found:
        raise RhoError("NO_RHO_FOR_3_4", "every solution has omega = 0 or sigma.rho_34 not a nonzero multiple of omega")

    seeds = [seed.with_rho(as_rho(xv)) for xv in found]
    return RhoSolutions(seeds, len(dirs), rho_psi_dim, exhausted, (alg, a_mat, b, seed))


# binomial identity


def a5_binomial_check(p: int) -> Report:
    """c_r = -r! C(p-2, r) C(p-1, r) + (r+1)! C(p-1, r+1)^2 vanishes mod p for 0 <= r <= p-2."""
    rep = Report(f"binomial identity p={p}")
    values = {}
    for r in range(p - 1):
        c_r = -math.factorial(r) * math.comb(p - 2, r) * math.comb(p - 1, r) \
            + math.factorial(r + 1) * math.comb(p - 1, r + 1) ** 2
        values[r] = c_r
        rep.add(f"c_{r} = 0 mod {p}", c_r % p == 0, "0", f"{c_r} = {c_r % p} mod {p}",
                "coefficient vanishing in the A5 commutation computation")
    rep.data["c_r"] = {str(k): v for k, v in values.items()}
    return rep
