"""The shipped algebra families and the configuration that selects one."""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import lru_cache

from .linalg import Field
from .rewrite import Rule, RewriteSystem, build_algebra, system_from_config


class ConfigError(ValueError):
    code = "CONFIG_INVALID"


@dataclass(frozen=True)
class FamilyConfig:
    """Which algebra to build.

    ``params`` is a tuple of ``(key, value)`` pairs so the config is hashable:
    qci uses n, m, q; a5 uses p, beta; custom carries its rules and seed strings.
    """

    family: str
    params: tuple
    field: Field = dc_field(default_factory=lambda: Field(2))

    @classmethod
    def make(cls, family: str, field=None, **params) -> "FamilyConfig":
        family = family.lower()
        if field is None:
            if family == "a5" and "p" in params:
                field = Field(params["p"])
            else:
                raise ConfigError("a field is required")
        field = Field.parse(field)
        frozen = tuple(sorted((k, _freeze(v)) for k, v in params.items() if v is not None))
        cfg = cls(family, frozen, field)
        cfg.validate()
        return cfg

    @property
    def p(self) -> dict:
        return dict(self.params)

    def scalar(self, key: str):
        return self.field(self.p[key])

    def validate(self) -> None:
        prm = self.p
        if self.family == "qci":
            for key in ("n", "m", "q"):
                if key not in prm:
                    raise ConfigError(f"qci needs parameter {key}")
            if int(prm["n"]) < 2 or int(prm["m"]) < 2:
                raise ConfigError("qci needs n, m >= 2")
            if self.field(_scalar_value(prm["q"])) == 0:
                raise ConfigError("qci needs q != 0 in the field")
        elif self.family == "a5":
            for key in ("p", "beta"):
                if key not in prm:
                    raise ConfigError(f"a5 needs parameter {key}")
            p = int(prm["p"])
            if p < 3:
                raise ConfigError("a5 needs p >= 3")
            if self.field.p != p:
                raise ConfigError(f"a5 needs the ground field to have characteristic p = {p}")
            if self.field(_scalar_value(prm["beta"])) == 0:
                raise ConfigError("a5 needs beta != 0")
        elif self.family == "custom":
            for key in ("alphabet", "rules", "x", "y", "sigma", "psi", "theta"):
                if key not in prm:
                    raise ConfigError(f"custom family needs {key}")
        else:
            raise ConfigError(f"unknown family {self.family!r}")

    @property
    def label(self) -> str:
        prm = self.p
        if self.family == "qci":
            return f"QCI(n={prm['n']},m={prm['m']},q={prm['q']}) over {self.field.name}"
        if self.family == "a5":
            return f"A5(p={prm['p']},beta={prm['beta']}) over {self.field.name}"
        return f"custom({prm.get('name', 'unnamed')}) over {self.field.name}"

    def to_json(self) -> dict:
        return {"family": self.family, "params": _thaw(dict(self.params)), "field": self.field.to_json()}


def _freeze(v):
    if isinstance(v, dict):
        return tuple(sorted((k, _freeze(x)) for k, x in v.items()))
    if isinstance(v, list):
        return tuple(_freeze(x) for x in v)
    return v


def _thaw(v):
    if isinstance(v, dict):
        return {k: _thaw(x) for k, x in v.items()}
    if isinstance(v, tuple):
        if v and all(isinstance(x, tuple) and len(x) == 2 and isinstance(x[0], str) for x in v):
            return {k: _thaw(x) for k, x in v}
        return [_thaw(x) for x in v]
    if isinstance(v, Fraction):
        return str(v)
    return v


def _scalar_value(v):
    return Fraction(v) if isinstance(v, str) else v


def qci_system(n: int, m: int, q, field: Field) -> RewriteSystem:
    """k<x,y>/(x^n, y^m, xy - q yx) with normal words x^i y^j."""
    q = field(_scalar_value(q))
    rules = [
        Rule(("y", "x"), {("x", "y"): field.inv(q)}),
        Rule(("x",) * n, {}),
        Rule(("y",) * m, {}),
    ]
    return RewriteSystem(field, ("x", "y"), rules, weights={"x": 1, "y": 1}, dimension=n * m,
                         name=f"QCI({n},{m},{q})")


def a5_system(p: int, beta, field: Field) -> RewriteSystem:
    """A5(beta) with the central generator a = yz - zy adjoined; normal words a^i y^j z^k."""
    beta = field(_scalar_value(beta))
    rules = [
        Rule(("z", "y"), {("y", "z"): 1, ("a",): -1}),
        Rule(("z", "a"), {("a", "z"): 1}),
        Rule(("y", "a"), {("a", "y"): 1}),
        Rule(("y",) * p, {}),
        Rule(("a",) * p, {}),
        Rule(("z",) * p, {("a",): beta, ("a",) * (p - 1) + ("y",): -1}),
    ]
    # a is light so that z^p -> beta a - a^(p-1) y decreases
    return RewriteSystem(field, ("a", "y", "z"), rules, weights={"a": 1, "y": 2, "z": 2},
                         dimension=p**3, name=f"A5({p},{beta})")


def rewrite_system(config: FamilyConfig) -> RewriteSystem:
    prm = config.p
    if config.family == "qci":
        return qci_system(int(prm["n"]), int(prm["m"]), prm["q"], config.field)
    if config.family == "a5":
        return a5_system(int(prm["p"]), prm["beta"], config.field)
    rules = [tuple(r) for r in prm["rules"]]
    weights = _thaw(prm["weights"]) if "weights" in prm else None
    return system_from_config(config.field, list(prm["alphabet"]), rules, weights=weights,
                              dimension=prm.get("dimension"), name=str(prm.get("name", "custom")))


@lru_cache(maxsize=32)
def family_algebra(config: FamilyConfig, assoc_samples: int = 10**5, seed: int = 0):
    return build_algebra(rewrite_system(config), assoc_samples=assoc_samples, seed=seed)


def radical_generators(config: FamilyConfig, alg):
    """The pair playing the roles of x and y (for A5 these are z and y)."""
    if config.family == "qci":
        return alg.gen("x"), alg.gen("y")
    if config.family == "a5":
        return alg.gen("z"), alg.gen("y")
    return alg.element(config.p["x"]), alg.element(config.p["y"])


def qci(n: int, m: int, q, field) -> FamilyConfig:
    return FamilyConfig.make("qci", field=field, n=n, m=m, q=q)


def a5(p: int, beta) -> FamilyConfig:
    return FamilyConfig.make("a5", field=Field(p), p=p, beta=beta)
