"""The periodic-block minimal resolution of the trivial module and its verification."""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np

from .algebra import left_span, linearize, mat_mul, syzygy_space, zero_matrix
from .checks import Report
from .linalg import EchelonSpace, is_zero, rank
from .seeds import SeedData, radical_times


def expected_image_dim(r: int, n: int) -> int:
    """tN + 1 for r = 2t, tN - 1 for r = 2t - 1."""
    if r % 2 == 0:
        return (r // 2) * n + 1
    return ((r + 1) // 2) * n - 1


def build_d(r: int, seed: SeedData, _cache: dict | None = None) -> np.ndarray:
    """The (r+1) x r differential as a ``(r+1, r, N)`` array."""
    alg, f = seed.alg, seed.field
    cache = _cache if _cache is not None else {}
    if r in cache:
        return cache[r]
    sg, ps, th, rho = seed.sigma, seed.psi, seed.theta, seed.rho
    zero = alg.zero().vec
    if r == 1:
        d = np.stack([seed.x.vec, seed.y.vec])[:, None, :]
    elif r == 2:
        d = np.stack([np.stack([a.vec, b.vec]) for a, b in (sg, ps, th)])
    elif r == 3:
        d = np.stack([
            np.stack([seed.x.vec, rho[0].vec, zero]),
            np.stack([seed.y.vec, rho[1].vec, zero]),
            np.stack([zero, rho[2].vec, seed.x.vec]),
            np.stack([zero, rho[3].vec, seed.y.vec]),
        ])
    else:
        prev = build_d(r - 2, seed, cache)
        d = zero_matrix(alg, r + 1, r)
        d[: r - 1, : r - 2] = prev
        if r % 2:
            t = (r + 1) // 2
            ct = f.pow(seed.c, t - 2)
            d[r - 3, r - 2] = rho[0].scale(ct).vec
            d[r - 2, r - 2] = rho[1].scale(ct).vec
            d[r - 1:, r - 2:] = np.stack([np.stack([rho[2].vec, seed.x.vec]),
                                          np.stack([rho[3].vec, seed.y.vec])])
        else:
            t = r // 2
            ct = f.pow(seed.c, t - 1)
            d[r - 2, r - 2] = sg[0].scale(ct).vec
            d[r - 2, r - 1] = sg[1].scale(ct).vec
            d[r - 1:, r - 2:] = np.stack([np.stack([ps[0].vec, ps[1].vec]),
                                          np.stack([th[0].vec, th[1].vec])])
    cache[r] = d
    return d


@dataclass
class Resolution:
    seed: SeedData
    max_degree: int
    slices: dict = dc_field(default_factory=dict)

    @classmethod
    def build(cls, seed: SeedData, max_degree: int = 8) -> "Resolution":
        if max_degree < 1:
            raise ValueError("max degree must be at least 1")
        if seed.c is None and max_degree >= 4:
            raise ValueError("seed has no valid scalar c; run the identity checks")
        res = cls(seed, max_degree)
        for r in range(1, max_degree + 1):
            build_d(r, seed, res.slices)
        return res

    @property
    def alg(self):
        return self.seed.alg

    def d(self, r: int) -> np.ndarray:
        if r not in self.slices:
            if r > self.max_degree:
                if r >= 4 and self.seed.c is None:
                    raise ValueError("seed has no valid scalar c")
                build_d(r, self.seed, self.slices)
                self.max_degree = r
            else:
                raise KeyError(r)
        return self.slices[r]

    def extend(self, max_degree: int) -> None:
        if max_degree >= 4 and self.seed.c is None:
            raise ValueError("seed has no valid scalar c")
        for r in range(self.max_degree + 1, max_degree + 1):
            build_d(r, self.seed, self.slices)
        self.max_degree = max(self.max_degree, max_degree)

    def generators(self, r: int) -> list:
        """The rows f_1^r, ..., f_{r+1}^r of d_r."""
        return list(self.d(r))

    def image(self, r: int) -> EchelonSpace:
        return left_span(self.alg, self.generators(r))


def verify_complex(res: Resolution) -> Report:
    rep = Report("complex")
    alg = res.alg
    for r in range(1, res.max_degree):
        prod = mat_mul(alg, res.d(r + 1), res.d(r))
        bad = [(int(i), int(j)) for i, j in zip(*np.nonzero(np.any(prod != 0, axis=2)))]
        computed = "0" if not bad else "; ".join(f"({i + 1},{j + 1}): {alg.format(prod[i, j])}" for i, j in bad[:5])
        rep.add(f"d_{r + 1} d_{r} = 0", not bad, "0", computed, "consecutive differentials compose to zero")
    return rep


def verify_exactness(res: Resolution) -> Report:
    """Image dimensions against tN +- 1, and equality with the kernel of the previous map."""
    rep = Report("exactness")
    alg = res.alg
    n = alg.dim
    dims = {}
    for r in range(1, res.max_degree + 1):
        d = res.d(r)
        img = res.image(r).dim
        dims[r] = img
        exp = expected_image_dim(r, n)
        rep.add(f"dim im d_{r} = {exp}", img == exp, exp, img, "syzygy dimensions tN+1 / tN-1")
        if r == 1:
            ker = n - 1  # kernel of Lambda -> k is J
        else:
            prev = res.d(r - 1)
            ker = r * n - rank(linearize(alg, prev), alg.field)
        rep.add(f"im d_{r} = ker d_{r - 1}" if r > 1 else "im d_1 = J", img == ker, ker, img,
                "the sequence is exact")
        minimal = bool(is_zero(d[:, :, 0]))
        rep.add(f"d_{r} has all entries in J", minimal, "True", str(minimal), "the resolution is minimal")
        # J * (sum Lambda f_i) = sum J f_i, so the rows themselves suffice here
        top = radical_times(alg, d.reshape(r + 1, r * n), r)
        independent = len(top.add(d.reshape(r + 1, r * n)))
        rep.add(f"rows of d_{r} are independent modulo J im d_{r}", independent == r + 1, r + 1, independent,
                "the rows minimally generate the syzygy")
        if r >= 4:
            same = bool(np.all(d[: r - 1, : r - 2] == res.d(r - 2)))
            rep.add(f"d_{r} top-left block equals d_{r - 2}", same, "True", str(same), "block recursion")
    for r in range(1, res.max_degree):
        total = dims[r] + dims[r + 1]
        rep.add(f"dim im d_{r} + dim im d_{r + 1} = {r + 1}N", total == (r + 1) * n, (r + 1) * n, total,
                "rank-nullity along the sequence")
    rep.data["image_dims"] = {str(k): v for k, v in dims.items()}
    return rep


def generic_syzygy(alg, gens) -> np.ndarray:
    """Minimal generators of ``{(a_i) : sum a_i g_i = 0}`` as a ``(count, len(gens), N)`` array.

    Brute force: the k-kernel of the linearized map, then a basis of K / J K
    picked greedily from the kernel basis.
    """
    gens = np.asarray(gens)
    k = gens.shape[0]
    n = alg.dim
    kernel, dim = syzygy_space(alg, gens)
    if dim == 0:
        return alg.field.zeros((0, k, n))
    jk = radical_times(alg, kernel, k)
    chosen = []
    for v in kernel:
        if len(jk.add(v.reshape(1, -1))):
            chosen.append(v.reshape(k, n))
        if jk.dim == dim:
            break
    return np.array(chosen)


def compare_with_oracle(res: Resolution, r: int) -> Report:
    rep = Report(f"oracle r={r}")
    alg = res.alg
    ours = res.image(r)
    if r == 1:
        theirs = alg.radical_layers[1]
        count = theirs.dim
    else:
        gens = generic_syzygy(alg, res.d(r - 1))
        count = len(gens)
        theirs = left_span(alg, list(gens))
    rep.add(f"span of d_{r} rows equals brute-force syzygy of d_{r - 1}" if r > 1 else "span of d_1 equals J",
            ours.same_as(theirs), f"dim {theirs.dim}", f"dim {ours.dim}",
            "explicit rows generate the whole syzygy")
    if r > 1:
        rep.add(f"brute-force syzygy of d_{r - 1} needs {r + 1} generators", count == r + 1, r + 1, count,
                "the generator count matches the rank of the free module", informational=True)
    return rep


# dumps


def format_tsv(res: Resolution, r: int) -> str:
    """d_r as ``row, col, entry`` lines (1-based), every entry included."""
    alg = res.alg
    d = res.d(r)
    lines = ["row\tcol\tentry"]
    for i in range(d.shape[0]):
        for j in range(d.shape[1]):
            lines.append(f"{i + 1}\t{j + 1}\t{alg.format(d[i, j])}")
    return "\n".join(lines) + "\n"


def dump_tsv(res: Resolution, r: int, path) -> None:
    Path(path).write_text(format_tsv(res, r), encoding="utf-8")


def load_tsv(alg, path) -> np.ndarray:
    rows = Path(path).read_text(encoding="utf-8").splitlines()[1:]
    entries = [line.split("\t") for line in rows if line.strip()]
    nr = max(int(e[0]) for e in entries)
    nc = max(int(e[1]) for e in entries)
    out = zero_matrix(alg, nr, nc)
    for i, j, text in entries:
        out[int(i) - 1, int(j) - 1] = alg.parse(text).vec
    return out
