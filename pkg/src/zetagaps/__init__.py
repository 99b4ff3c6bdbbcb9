"""Normalized gaps between zeros of zeta and L-functions, the argument a(t) and
the inequality chain relating them to branch changes.
"""

from .arg_tracker import ArgRecord, arg_at, arg_limit_at_zero, branch_delta
from .errors import ZetaGapsError
from .euler_arg import EulerArgConfig, FixedN, GonekTSquared, char_walk, euler_arg
from .gap_stats import GapRecord, SweepSummary, gap, merge, summarize, verify_chain
from .lfunc import (DirichletCharacter, LFamily, character, characters, dirichlet_l,
                    dirichlet_scan, ingest_zeros, normalized_gap)
from .special_fn import ThetaMode, lambert_w, theta, theta_derivative
from .zero_solver import SolveReport, seed_ordinate, solve_transcendental
from .zeta_engine import ZeroRecord, count_zeros, hardy_z, scan_zeros, zeta_off_line

__version__ = "0.1.0"
