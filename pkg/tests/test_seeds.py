import math

import pytest

from syzlab.families import a5, family_algebra, qci
from syzlab.linalg import Field
from syzlab.seeds import (RhoError, a5_binomial_check, check_identity_blocks, check_relation_conditions,
                          preset_expectations, second_syzygy, seed_for, solve_rho)

PRESETS = [qci(2, 2, 1, "F2"), qci(2, 3, 2, "F5"), qci(3, 3, -1, "Q"), a5(3, 1), a5(3, 2)]


def failing(rep):
    return [c.name for c in rep.failures]


@pytest.mark.parametrize("cfg", PRESETS, ids=lambda c: c.label)
def test_seed_passes_all_checks(cfg):
    alg = family_algebra(cfg)
    seed = seed_for(cfg, alg)
    assert failing(check_relation_conditions(alg, seed)) == []
    assert failing(check_identity_blocks(alg, seed)) == []
    assert failing(preset_expectations(cfg, seed)) == []


def test_qci_scalar_values():
    f = Field(None)
    seed = seed_for(qci(2, 3, 2, "Q"))
    assert seed.c == f("1/64")
    assert seed.c_literal == 64
    # omega = y^2 * q^-2 x = q^-4 x y^2
    assert seed.omega == seed.alg.element("1/16*x y^2")


def test_theta_equal_to_psi_breaks_independence():
    cfg = qci(2, 3, 1, "F3")
    alg = family_algebra(cfg)
    seed = seed_for(cfg, alg)
    bad = seed.with_relation("theta", seed.psi)
    names = failing(check_relation_conditions(alg, bad))
    assert any(n.startswith("(iv)") for n in names)


def test_non_relation_is_caught():
    cfg = qci(2, 2, 1, "F2")
    alg = family_algebra(cfg)
    seed = seed_for(cfg, alg)
    bad = seed.with_relation("sigma", (alg.one(), alg.zero()))
    assert any(n.startswith("(ii) sigma") for n in failing(check_relation_conditions(alg, bad)))


def test_zero_psi_has_no_rho():
    cfg = qci(2, 2, 1, "F2")
    alg = family_algebra(cfg)
    seed = seed_for(cfg, alg).with_relation("psi", (alg.zero(), alg.zero()))
    with pytest.raises(RhoError) as err:
        solve_rho(seed)
    assert err.value.code == "NO_RHO_FOR_3_2"


@pytest.mark.parametrize("cfg", PRESETS[:3] + [a5(3, 1)], ids=lambda c: c.label)
def test_solver_recovers_closed_form_rho(cfg):
    seed = seed_for(cfg)
    sols = solve_rho(seed)
    assert sols.contains(seed.rho)
    assert sols.seeds
    for s in sols.seeds:
        assert failing(check_identity_blocks(s.alg, s)) == []


def test_second_syzygy_dimension():
    # 0 -> Omega^2 -> Lambda^2 -> J -> 0
    cfg = qci(3, 3, 2, "F5")
    seed = seed_for(cfg)
    assert second_syzygy(seed).shape[0] == 2 * 9 - 8


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13])
def test_binomial_coefficients_vanish(p):
    assert a5_binomial_check(p).passed
    for r in range(p - 1):
        val = -math.factorial(r) * math.comb(p - 2, r) * math.comb(p - 1, r) \
            + math.factorial(r + 1) * math.comb(p - 1, r + 1) ** 2
        assert val % p == 0


def test_to_json_is_strings():
    data = seed_for(a5(3, 2)).to_json()
    assert set(data) >= {"sigma", "psi", "theta", "rho", "omega", "c", "c_literal"}
    assert data["c"] == "1"
