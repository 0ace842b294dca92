"""Exact analysis of two-item auctions with two-point IID valuations.

Closed-form optimal revenues under dominant-strategy and Bayesian
implementations, the explicit optimal mechanisms, exhaustive exact
incentive audits, and an independent exact-LP certifier.
"""

from .core import (
    AuctionSpec,
    CapExceeded,
    HierarchyScheme,
    InvalidSpec,
    Rational,
    TYPES,
    allocate_hierarchy,
    class_probabilities,
    classify_profile,
    enumerate_profiles,
    rat,
    rat_str,
)
from .formulas import (
    Breakpoints,
    IndicatorFlags,
    RevenueReport,
    breakpoints,
    grand_bundle_revenue,
    indicator_flags,
    revenue_bic,
    revenue_dic,
    revenue_report,
    separate_revenue,
    sweep_high_value,
)
from .mechanisms import (
    Mechanism,
    build_bic_mechanism,
    build_dic_mechanism,
    payments,
)
from .audit import (
    AuditReport,
    check_bic,
    check_bir,
    check_dic,
    check_ir,
    expected_revenue,
    qu_statistics,
    transfer_equation_check,
)
from .oracle import (
    build_bic_lp,
    build_dic_lp,
    certification_grid,
    certify_main_theorem,
    extract_mechanism,
    solve_auction_lp,
)
from .simplex import LinearProgram, LPSolution, make_constraint, solve
from .continuous import ContinuousSpec, corollary_probe, discretize, lp_over_grid

__version__ = "0.1.0"
