"""Explicit periodic minimal resolutions and Ext rings for local selfinjective algebras."""

from .algebra import (AlgebraElement, FiniteDimAlgebra, express_in_minimal_generators, left_span,
                      solve_right_factor)
from .checks import Check, Report
from .families import ConfigError, FamilyConfig, a5, family_algebra, qci
from .linalg import EchelonSpace, Field, kernel_basis, rank, rref
from .resolution import Resolution, build_d, compare_with_oracle, generic_syzygy, verify_complex, verify_exactness
from .rewrite import RewriteSystem, Rule, build_algebra
from .seeds import (SeedData, a5_binomial_check, a5_seed, check_assumption_2_1, check_identity_blocks,
                    check_relation_conditions, qci_seed, seed_for, solve_rho)
from .ext import (ExtElement, lift, product_table, verify_even_commutativity, verify_finite_generation,
                  yoneda_product)

__version__ = "0.1.0"
