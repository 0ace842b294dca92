"""Numeric exploration of the two-interval continuous family.

The value distribution is uniform over [a, a+1] u [lam*a, lam*a+1] per
buyer-item cell (two buyers).  Discretizing each interval with grid_m
equal-mass midpoint atoms yields a finite instance whose exact LP optimum is
computable; scaling by 1/a it approaches the two-point optimum of the
normalized instance (2, 1/2, 1, lam) as a grows.  Everything here is an
exploration harness, not a proof: band membership of the discretized optima
against the known additive-error windows is reported as indicative only.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .core import AuctionSpec, CapExceeded, InvalidSpec, rat
from .formulas import revenue_bic, revenue_dic
from .oracle import FiniteValueDistribution, build_auction_lp, solve_auction_lp

#: Per-interval grid ceiling; the LP grows with the 4th power of 2*grid_m.
DEFAULT_GRID_CAP = 3

#: Additive error windows above r*a for the true continuous optima at lam=2,
#: valid for a >= 6: [r_D*a, r_D*a + 5/4) and [r_B*a, r_B*a + 3/2).
BAND_SLACK_DIC = Fraction(5, 4)
BAND_SLACK_BIC = Fraction(3, 2)


@dataclass(frozen=True)
class ContinuousSpec:
    """Two-buyer two-item instance with two-interval uniform marginals."""

    n: int
    a: Fraction
    lam: Fraction
    grid_m: int

    def __post_init__(self):
        object.__setattr__(self, "a", rat(self.a))
        object.__setattr__(self, "lam", rat(self.lam))
        if self.n != 2:
            raise InvalidSpec("the continuous lab is restricted to n=2")
        if self.lam <= 1:
            raise InvalidSpec("lam must exceed 1")
        if self.a <= 1 / (self.lam - 1):
            raise InvalidSpec("a must exceed 1/(lam-1) so the intervals are disjoint")
        if self.grid_m < 1:
            raise InvalidSpec("grid_m must be a positive integer")


def discretize(cspec: ContinuousSpec) -> FiniteValueDistribution:
    """2*grid_m equal-mass atoms at the midpoint grid of the two intervals.

    Atom s of an interval with left endpoint L sits at L + (s + 1/2)/grid_m,
    carrying mass 1/(2*grid_m); the low/high mass split stays exactly 1/2.
    """
    m = cspec.grid_m
    atoms = []
    for left in (cspec.a, cspec.lam * cspec.a):
        for s in range(m):
            atoms.append(left + Fraction(2 * s + 1, 2 * m))
    w = Fraction(1, 2 * m)
    return FiniteValueDistribution(tuple(atoms), tuple(w for _ in atoms))


def lp_over_grid(
    cspec: ContinuousSpec,
    impl: str,
    grid_cap: int = DEFAULT_GRID_CAP,
    symmetrize: bool = True,
) -> Fraction:
    """Exact LP optimum of the discretized instance, impl in {'dic','bic'}."""
    if cspec.grid_m > grid_cap:
        raise CapExceeded(
            f"instance too large for exhaustive mode: grid_m={cspec.grid_m} "
            f"exceeds the cap of {grid_cap}"
        )
    dist = discretize(cspec)
    n_profiles = (2 * cspec.grid_m) ** (2 * cspec.n)
    lp = build_auction_lp(cspec.n, dist, impl, max_profiles=n_profiles)
    sol = solve_auction_lp(lp, cspec.n, symmetrize=symmetrize)
    if sol.status != "optimal":
        raise RuntimeError("discretized auction LP must be feasible and bounded")
    return sol.optimum


def collapsed_two_point_spec(cspec: ContinuousSpec) -> AuctionSpec:
    """The grid_m=1 discretization is exactly a two-point instance."""
    return AuctionSpec(
        cspec.n,
        Fraction(1, 2),
        cspec.a + Fraction(1, 2),
        cspec.lam * cspec.a + Fraction(1, 2),
    )


@dataclass(frozen=True)
class ProbeRow:
    a: Fraction
    grid_m: int
    lp_dic: Fraction
    lp_bic: Fraction
    ratio_dic: Fraction  # lp_dic / a
    ratio_bic: Fraction
    ref_dic: Fraction  # two-point reference r values of (2, 1/2, 1, lam)
    ref_bic: Fraction
    within_band_dic: bool | None  # indicative; evaluated only at lam=2
    within_band_bic: bool | None


def corollary_probe(
    a_values: Sequence,
    grid_m: int,
    lam=Fraction(2),
    grid_cap: int = DEFAULT_GRID_CAP,
) -> list[ProbeRow]:
    """Discretized optima across a list of scales.

    ref columns carry the normalized two-point optima the scaled values
    approach.  Band membership checks the discretized value against the
    additive windows known for the true continuous optima at lam=2; the
    discretized value only approximates those, so the flag is indicative.
    """
    lam = rat(lam)
    reference = AuctionSpec(2, Fraction(1, 2), 1, lam)
    ref_d = revenue_dic(reference)
    ref_b = revenue_bic(reference)
    rows = []
    for a in a_values:
        cspec = ContinuousSpec(2, rat(a), lam, grid_m)
        lp_d = lp_over_grid(cspec, "dic", grid_cap=grid_cap)
        lp_b = lp_over_grid(cspec, "bic", grid_cap=grid_cap)
        if lam == 2:
            band_d = ref_d * cspec.a <= lp_d < ref_d * cspec.a + BAND_SLACK_DIC
            band_b = ref_b * cspec.a <= lp_b < ref_b * cspec.a + BAND_SLACK_BIC
        else:
            band_d = band_b = None
        rows.append(
            ProbeRow(
                a=cspec.a,
                grid_m=grid_m,
                lp_dic=lp_d,
                lp_bic=lp_b,
                ratio_dic=lp_d / cspec.a,
                ratio_bic=lp_b / cspec.a,
                ref_dic=ref_d,
                ref_bic=ref_b,
                within_band_dic=band_d,
                within_band_bic=band_b,
            )
        )
    return rows
