"""Command line entry point: ``syzlab verify | resolve | ext | binomial-check``."""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from .checks import Report
from .families import ConfigError, FamilyConfig, family_algebra
from .linalg import Field
from .rewrite import RewriteError, verify_commutation_formula

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2
DEFAULT_SEED = 20240101


@dataclass
class RunConfig:
    family: FamilyConfig | None
    command: str
    max_degree: int = 8
    out: Path = Path("syzlab_out")
    oracle: bool = True
    assoc_samples: int = 100
    seed: int = DEFAULT_SEED
    primes: tuple = ()

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "family": self.family.to_json() if self.family else None,
            "max_degree": self.max_degree,
            "checks": {"oracle": self.oracle, "assoc_samples": self.assoc_samples, "seed": self.seed},
            "primes": list(self.primes),
        }


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON config file; flags override its values")
    common.add_argument("--family", choices=["qci", "a5", "custom"])
    common.add_argument("-n", type=int)
    common.add_argument("-m", type=int)
    common.add_argument("-q", type=str, help="QCI parameter (integer or fraction)")
    common.add_argument("-p", type=int, help="A5 characteristic")
    common.add_argument("--beta", type=str)
    common.add_argument("--field", type=str, help="F<p> or Q")
    common.add_argument("--max-degree", type=int)
    common.add_argument("--out", type=Path)
    common.add_argument("--no-oracle", action="store_true")
    common.add_argument("--assoc-samples", type=int)
    common.add_argument("--seed", type=int)

    parser = argparse.ArgumentParser(prog="syzlab", description="Periodic resolutions and Ext rings of local algebras.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("verify", parents=[common], help="check the seed relations and identities")
    sub.add_parser("resolve", parents=[common], help="build and verify the resolution, dump d_r")
    sub.add_parser("ext", parents=[common], help="Yoneda product tables and generation certificate")
    bc = sub.add_parser("binomial-check", help="vanishing of the A5 binomial coefficients mod p")
    bc.add_argument("-p", type=int, nargs="+", required=True)
    bc.add_argument("--out", type=Path)
    return parser


def _number(text):
    from fractions import Fraction

    if text is None:
        return None
    value = Fraction(str(text))
    return int(value) if value.denominator == 1 else value


def build_run_config(args: argparse.Namespace) -> RunConfig:
    if args.command == "binomial-check":
        for p in args.p:
            try:
                Field(p)
            except ValueError as exc:
                raise ConfigError(str(exc)) from exc
        return RunConfig(None, args.command, out=args.out or Path("syzlab_out"), primes=tuple(args.p))

    data = {}
    if args.config:
        try:
            data = json.loads(args.config.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
    params = dict(data.get("params", {}))
    checks = dict(data.get("checks", {}))
    family = args.family or data.get("family")
    if family is None:
        raise ConfigError("no family given")
    for key, val in (("n", args.n), ("m", args.m), ("q", _number(args.q)), ("p", args.p), ("beta", _number(args.beta))):
        if val is not None:
            params[key] = val
    for key in ("q", "beta"):
        if isinstance(params.get(key), str):
            params[key] = _number(params[key])
    field = args.field or data.get("field")
    try:
        if field is None and family == "a5" and "p" in params:
            field = Field(int(params["p"]))
        if field is None:
            raise ConfigError("no field given")
        fam = FamilyConfig.make(family, field=Field.parse(field), **params)
    except (ValueError, TypeError, KeyError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc
    rc = RunConfig(
        fam,
        args.command,
        max_degree=args.max_degree if args.max_degree is not None else int(data.get("max_degree", 8)),
        out=args.out or Path(data.get("out", "syzlab_out")),
        oracle=not args.no_oracle and bool(checks.get("oracle", True)),
        assoc_samples=args.assoc_samples if args.assoc_samples is not None else int(checks.get("assoc_samples", 100)),
        seed=args.seed if args.seed is not None else int(checks.get("seed", DEFAULT_SEED)),
    )
    if rc.max_degree < 1:
        raise ConfigError("max degree must be at least 1")
    return rc


# commands; each returns (report, {filename: text})


def cmd_verify(rc: RunConfig):
    from .seeds import (RhoError, a5_binomial_check, check_identity_blocks, check_relation_conditions,
                        preset_expectations, seed_for, solve_rho)

    rep = Report("verify")
    files = {}
    alg = _algebra(rc, rep)
    if alg is None:
        return rep, files
    seed = seed_for(rc.family, alg)
    rep.extend(check_relation_conditions(alg, seed), "relations: ")
    rep.extend(check_identity_blocks(alg, seed), "identities: ")
    rep.extend(preset_expectations(rc.family, seed), "closed form: ")
    try:
        sols = solve_rho(seed)
        rep.add("rho solver: solution set contains the seed's rho", sols.contains(seed.rho), "True",
                str(sols.contains(seed.rho)), "rho is determined up to the listed solution space")
        rep.data["rho_solutions"] = {
            "dim_rho_psi_identities": sols.rho_psi_dim,
            "dim_all_linear_identities": sols.solution_dim,
            "listed": [s.to_json()["rho"] for s in sols.seeds],
        }
    except RhoError as exc:
        rep.add("rho solver", False, "a solution", exc.code)
    if rc.family.family == "a5":
        p = int(rc.family.p["p"])
        comm = verify_commutation_formula(alg, p)
        rep.add("y^b z^c reordering formula", comm["passed"], "no mismatches",
                f"{len(comm['mismatches'])} mismatches of {comm['checked']}", "A5 commutation formula")
        rep.extend(a5_binomial_check(p), "binomial: ")
    rep.data["seed"] = seed.to_json()
    rep.data["algebra"] = alg.locality_report()
    return rep, files


def cmd_resolve(rc: RunConfig):
    from .resolution import Resolution, compare_with_oracle, format_tsv, verify_complex, verify_exactness
    from .seeds import seed_for

    rep = Report("resolve")
    files = {}
    alg = _algebra(rc, rep)
    if alg is None:
        return rep, files
    seed = seed_for(rc.family, alg)
    if seed.c is None:
        rep.add("seed has a nonzero scalar c", False, "nonzero", "undefined")
        return rep, files
    res = Resolution.build(seed, rc.max_degree)
    rep.extend(verify_complex(res), "complex: ")
    rep.extend(verify_exactness(res), "exactness: ")
    if rc.oracle:
        for r in range(1, min(rc.max_degree, 6) + 1):
            rep.extend(compare_with_oracle(res, r), "oracle: ")
    for r in range(1, rc.max_degree + 1):
        files[f"d_{r}.tsv"] = format_tsv(res, r)
    return rep, files


def cmd_ext(rc: RunConfig):
    from .ext import (check_associativity, check_lift_independence, check_low_degree_products,
                      check_structure_constants, check_unit, product_table, verify_even_commutativity,
                      verify_finite_generation)
    from .resolution import Resolution
    from .seeds import seed_for

    rep = Report("ext")
    files = {}
    alg = _algebra(rc, rep)
    if alg is None:
        return rep, files
    seed = seed_for(rc.family, alg)
    if seed.c is None:
        rep.add("seed has a nonzero scalar c", False, "nonzero", "undefined")
        return rep, files
    R = rc.max_degree
    res = Resolution.build(seed, R)
    for s in range(R + 1):
        for t in range(R + 1 - s):
            tab = product_table(res, s, t)
            files[f"products_{s}_{t}.tsv"] = tab.to_tsv()
            files[f"products_{s}_{t}.json"] = _dumps(tab.to_json())
    fg = verify_finite_generation(res, R)
    rep.extend(fg, "generation: ")
    files["fingen.json"] = _dumps({"passed": fg.passed, **fg.data})
    rep.extend(check_structure_constants(res, R), "constants: ")
    rep.extend(check_unit(res, R), "unit: ")
    fam = rc.family
    if fam.family == "qci" and R >= 2:
        rep.extend(check_low_degree_products(res, int(fam.p["n"]), int(fam.p["m"]), fam.p["q"]), "degree one: ")
    if fam.family == "a5" and R >= 4:
        rep.extend(verify_even_commutativity(res, R), "commutativity: ")
    if rc.assoc_samples > 0:
        rep.extend(check_lift_independence(res, rc.assoc_samples, rc.seed, R), "lifts: ")
        rep.extend(check_associativity(res, rc.assoc_samples, rc.seed, R), "associativity: ")
    return rep, files


def cmd_binomial(rc: RunConfig):
    from .seeds import a5_binomial_check

    rep = Report("binomial-check")
    for p in rc.primes:
        rep.extend(a5_binomial_check(p), f"p={p}: ")
    return rep, {}


COMMANDS = {"verify": cmd_verify, "resolve": cmd_resolve, "ext": cmd_ext, "binomial-check": cmd_binomial}


def _algebra(rc: RunConfig, rep: Report):
    try:
        alg = family_algebra(rc.family, seed=rc.seed)
    except RewriteError as exc:
        rep.add("algebra construction", False, "a consistent algebra", f"{exc.code}: {exc}")
        return None
    rep.add("algebra construction", True, "", f"dimension {alg.dim}")
    return alg


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def run(rc: RunConfig) -> tuple:
    """Execute a command and write its outputs; returns (report, exit code)."""
    start = time.perf_counter()
    rep, files = COMMANDS[rc.command](rc)
    elapsed = time.perf_counter() - start
    rc.out.mkdir(parents=True, exist_ok=True)
    payload = {"command": rc.command, "config": rc.to_json(), **rep.to_json()}
    files = dict(files)
    files["report.json"] = _dumps(payload)
    files["timing.json"] = _dumps({"command": rc.command, "seconds": round(elapsed, 3)})
    for name, text in sorted(files.items()):
        (rc.out / name).write_text(text, encoding="utf-8")
    return rep, EXIT_OK if rep.passed else EXIT_FAIL


def main(argv=None) -> int:
    parser = _parser()
    args = parser.parse_args(argv)
    try:
        rc = build_run_config(args)
    except ConfigError as exc:
        print(f"CONFIG_INVALID: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    rep, code = run(rc)
    print(rep.summary())
    print(f"wrote {rc.out}/report.json")
    return code


if __name__ == "__main__":
    sys.exit(main())
