"""Brute-force LP certification of the optimal revenues.

The oracle knows nothing about the closed forms: it maximizes expected
payment over *all* feasible allocation/utility tables, subject to either the
per-profile truthfulness constraints (dominant-strategy program) or the
interim ones (Bayesian program), and reports the exact optimum.  Agreement
with the formula module is then an exact rational equality test.

Builders work over any finite per-item value distribution shared by all
buyers and both items; the two-point family is the special case with two
atoms.  Because the distribution is exchangeable across buyers and items,
every program here is invariant under the buyer/item symmetry group, and an
optional reduction averages variables over that group before solving.  The
reduction is itself validated: reduced and unreduced optima are asserted
equal (exactly) in the test suite, and every expanded solution is
re-verified against the full constraint set.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .core import (
    AuctionSpec,
    CapExceeded,
    InvalidSpec,
    rat_str,
)
from .formulas import revenue_bic, revenue_dic
from .mechanisms import Mechanism
from .simplex import Constraint, LinearProgram, LPSolution, make_constraint, solve

#: LP-oracle ceiling: exhaustive programs are kept desk-scale.
DEFAULT_LP_PROFILE_CAP = 4 ** 4


@dataclass(frozen=True)
class FiniteValueDistribution:
    """One marginal shared by every buyer-item cell: atoms and their masses."""

    values: tuple
    probs: tuple

    def __post_init__(self):
        if len(self.values) != len(self.probs):
            raise ValueError("values and probs must align")
        if sum(self.probs, Fraction(0)) != 1:
            raise ValueError("atom masses must sum to 1")
        if any(p <= 0 for p in self.probs):
            raise ValueError("atom masses must be positive")
        if list(self.values) != sorted(set(self.values)):
            raise ValueError("atoms must be strictly increasing")


def two_point_distribution(spec: AuctionSpec) -> FiniteValueDistribution:
    return FiniteValueDistribution((spec.a, spec.b), (spec.p, 1 - spec.p))


def _types(dist):
    k = len(dist.values)
    return list(itertools.product(range(k), range(k)))


def _type_prob(dist, t) -> Fraction:
    return dist.probs[t[0]] * dist.probs[t[1]]


def _type_values(dist, t):
    return (dist.values[t[0]], dist.values[t[1]])


def _profiles(dist, n):
    return list(itertools.product(_types(dist), repeat=n))


def _profile_prob(dist, profile) -> Fraction:
    out = Fraction(1)
    for t in profile:
        out *= _type_prob(dist, t)
    return out


def build_auction_lp(
    n: int,
    dist: FiniteValueDistribution,
    regime: str,
    max_profiles: int = DEFAULT_LP_PROFILE_CAP,
) -> LinearProgram:
    """The revenue-maximization LP over full (q, u) tables.

    Variables: q[i,j,t] (allocation, nonnegative) and u[i,t] (utility, free)
    for every buyer i, item j, profile t.  Objective: expected payment
    sum_t Pr{t} sum_i (t_i . q_i(t) - u_i(t)).  Rows: per-item supply at
    every profile; then either per-profile participation ('ir') and
    truthfulness ('dic') rows, or their interim counterparts ('bir', 'bic').
    """
    if regime not in ("dic", "bic"):
        raise ValueError("regime must be 'dic' or 'bic'")
    types = _types(dist)
    n_profiles = len(types) ** n
    if n_profiles > max_profiles:
        raise CapExceeded(
            f"instance too large for exhaustive mode: {n_profiles} profiles "
            f"exceeds the LP cap of {max_profiles}"
        )
    profiles = _profiles(dist, n)

    q_vars = [
        ("q", i, j, t) for t in profiles for i in range(n) for j in range(2)
    ]
    u_vars = [("u", i, t) for t in profiles for i in range(n)]
    variables = q_vars + u_vars

    objective = {}
    for t in profiles:
        prob = _profile_prob(dist, t)
        for i in range(n):
            vals = _type_values(dist, t[i])
            for j in range(2):
                objective[("q", i, j, t)] = prob * vals[j]
            objective[("u", i, t)] = -prob
    constraints = []
    for t in profiles:
        for j in range(2):
            constraints.append(
                make_constraint(
                    {("q", i, j, t): Fraction(1) for i in range(n)},
                    "<=",
                    1,
                    tag="supply",
                )
            )

    others_space = list(itertools.product(types, repeat=n - 1))

    def insert(others, i, t_i):
        return tuple(others[:i]) + (t_i,) + tuple(others[i:])

    if regime == "dic":
        for t in profiles:
            for i in range(n):
                constraints.append(
                    make_constraint({("u", i, t): Fraction(1)}, ">=", 0, tag="ir")
                )
        for i in range(n):
            for t_true in types:
                v_true = _type_values(dist, t_true)
                for t_rep in types:
                    if t_rep == t_true:
                        continue
                    v_rep = _type_values(dist, t_rep)
                    dv = (v_true[0] - v_rep[0], v_true[1] - v_rep[1])
                    # One-step misreports along a single coordinate tend to
                    # be the binding rows; tag them so lazy solving can keep
                    # them in the model from the start.
                    adjacent = sorted(
                        (abs(t_true[0] - t_rep[0]), abs(t_true[1] - t_rep[1]))
                    ) == [0, 1]
                    tag = "dic_local" if adjacent else "dic"
                    for others in others_space:
                        truthful = insert(others, i, t_true)
                        deviated = insert(others, i, t_rep)
                        coeffs = {
                            ("u", i, truthful): Fraction(1),
                            ("u", i, deviated): Fraction(-1),
                        }
                        for j in range(2):
                            if dv[j] != 0:
                                coeffs[("q", i, j, deviated)] = -dv[j]
                        constraints.append(
                            make_constraint(coeffs, ">=", 0, tag=tag)
                        )
    else:
        others_prob = {o: _profile_prob(dist, o) if o else Fraction(1)
                       for o in others_space}
        for i in range(n):
            for t_i in types:
                coeffs = {
                    ("u", i, insert(o, i, t_i)): w for o, w in others_prob.items()
                }
                constraints.append(make_constraint(coeffs, ">=", 0, tag="bir"))
        for i in range(n):
            for t_true in types:
                v_true = _type_values(dist, t_true)
                for t_rep in types:
                    if t_rep == t_true:
                        continue
                    v_rep = _type_values(dist, t_rep)
                    dv = (v_true[0] - v_rep[0], v_true[1] - v_rep[1])
                    coeffs = {}
                    for o, w in others_prob.items():
                        truthful = insert(o, i, t_true)
                        deviated = insert(o, i, t_rep)
                        coeffs[("u", i, truthful)] = (
                            coeffs.get(("u", i, truthful), Fraction(0)) + w
                        )
                        coeffs[("u", i, deviated)] = (
                            coeffs.get(("u", i, deviated), Fraction(0)) - w
                        )
                        for j in range(2):
                            if dv[j] != 0:
                                key = ("q", i, j, deviated)
                                coeffs[key] = coeffs.get(key, Fraction(0)) - w * dv[j]
                    constraints.append(make_constraint(coeffs, ">=", 0, tag="bic"))

    lp = LinearProgram(
        variables=variables,
        objective=objective,
        constraints=constraints,
        nonneg=set(q_vars),
    )
    return lp.validate()


def build_dic_lp(spec: AuctionSpec, max_profiles: int = DEFAULT_LP_PROFILE_CAP):
    return build_auction_lp(spec.n, two_point_distribution(spec), "dic", max_profiles)


def build_bic_lp(spec: AuctionSpec, max_profiles: int = DEFAULT_LP_PROFILE_CAP):
    return build_auction_lp(spec.n, two_point_distribution(spec), "bic", max_profiles)


# ---------------------------------------------------------------------------
# Buyer/item symmetry reduction
# ---------------------------------------------------------------------------


def _apply_to_profile(perm, swap, profile):
    out = [None] * len(profile)
    for i, t in enumerate(profile):
        out[perm[i]] = (t[1], t[0]) if swap else t
    return tuple(out)


def _apply_to_var(perm, swap, var):
    if var[0] == "q":
        _, i, j, t = var
        return ("q", perm[i], 1 - j if swap else j, _apply_to_profile(perm, swap, t))
    _, i, t = var
    return ("u", perm[i], _apply_to_profile(perm, swap, t))


def symmetry_representatives(lp: LinearProgram, n: int) -> dict:
    """Map each variable to the least member of its orbit under buyer
    permutations and the item swap."""
    group = [
        (perm, swap)
        for perm in itertools.permutations(range(n))
        for swap in (False, True)
    ]
    rep = {}
    for v in lp.variables:
        rep[v] = min(_apply_to_var(perm, swap, v) for perm, swap in group)
    return rep


def symmetrize_lp(lp: LinearProgram, rep: dict) -> LinearProgram:
    """Restrict the LP to the symmetric subspace (all orbit members equal).

    For an exchangeable distribution the optimum is unchanged: averaging any
    feasible point over the group stays feasible and preserves the
    objective.  The test suite asserts the exact agreement rather than
    assuming it.
    """
    variables = []
    seen = set()
    for v in lp.variables:
        r = rep[v]
        if r not in seen:
            seen.add(r)
            variables.append(r)
    objective = {}
    for v, c in lp.objective.items():
        r = rep[v]
        objective[r] = objective.get(r, Fraction(0)) + c
    constraints = []
    row_keys = set()
    for cons in lp.constraints:
        coeffs = {}
        for v, c in cons.coeffs:
            r = rep[v]
            coeffs[r] = coeffs.get(r, Fraction(0)) + c
        key = (tuple(sorted(coeffs.items())), cons.rel, cons.rhs)
        if key in row_keys:
            continue
        row_keys.add(key)
        constraints.append(make_constraint(coeffs, cons.rel, cons.rhs, cons.tag))
    nonneg = {rep[v] for v in lp.nonneg}
    return LinearProgram(variables, objective, constraints, nonneg).validate()


def expand_assignment(lp: LinearProgram, rep: dict, assignment: dict) -> dict:
    return {v: assignment[rep[v]] for v in lp.variables}


def dic_row_count(lp: LinearProgram) -> int:
    return lp.n_constraints("dic") + lp.n_constraints("dic_local")


def solve_auction_lp(
    lp: LinearProgram,
    n: int,
    symmetrize: bool = False,
    rule: str = "auto",
    lazy_threshold: int = 1500,
) -> LPSolution:
    """Solve an auction LP, optionally through the symmetry reduction.

    Large per-profile truthfulness families are generated lazily (one-step
    misreport rows stay seeded).  The returned assignment always covers the
    full variable set and is verified against every original row.
    """
    lazy = ("dic",) if dic_row_count(lp) > lazy_threshold else ()
    if not symmetrize:
        return solve(lp, rule=rule, lazy_tags=lazy)
    rep = symmetry_representatives(lp, n)
    reduced = symmetrize_lp(lp, rep)
    lazy = ("dic",) if dic_row_count(reduced) > lazy_threshold else ()
    sol = solve(reduced, rule=rule, lazy_tags=lazy)
    if sol.status != "optimal":
        return sol
    assignment = expand_assignment(lp, rep, sol.assignment)
    full = LPSolution(sol.status, sol.optimum, assignment, sol.pivots)
    from .simplex import _certify  # full-model feasibility certificate

    _certify(lp, full)
    return full


# ---------------------------------------------------------------------------
# Mechanism extraction and certification
# ---------------------------------------------------------------------------


_CHAR = {0: "a", 1: "b"}


def extract_mechanism(spec: AuctionSpec, assignment: dict, label: str = "custom") -> Mechanism:
    """Turn a two-point LP assignment back into explicit mechanism tables."""
    n = spec.n
    allocation = {}
    utility = {}
    for t in itertools.product(itertools.product((0, 1), repeat=2), repeat=n):
        profile = tuple(_CHAR[k1] + _CHAR[k2] for k1, k2 in t)
        allocation[profile] = tuple(
            (assignment[("q", i, 0, t)], assignment[("q", i, 1, t)])
            for i in range(n)
        )
        utility[profile] = tuple(assignment[("u", i, t)] for i in range(n))
    return Mechanism(spec=spec, label=label, allocation=allocation, utility=utility)


@dataclass(frozen=True)
class CertificationReport:
    spec: AuctionSpec
    lp_dic: Fraction
    r_dic: Fraction
    equal_dic: bool
    lp_bic: Fraction
    r_bic: Fraction
    equal_bic: bool

    @property
    def all_equal(self) -> bool:
        return self.equal_dic and self.equal_bic

    def to_json(self) -> dict:
        return {
            "spec": self.spec.to_json(),
            "lp_D": rat_str(self.lp_dic),
            "r_D": rat_str(self.r_dic),
            "equal_D": self.equal_dic,
            "lp_B": rat_str(self.lp_bic),
            "r_B": rat_str(self.r_bic),
            "equal_B": self.equal_bic,
        }


def certify_main_theorem(
    spec: AuctionSpec,
    symmetrize: bool | None = None,
    max_profiles: int = DEFAULT_LP_PROFILE_CAP,
) -> CertificationReport:
    """Exact equality test between the LP optima and the closed forms.

    symmetrize=None picks the reduction automatically (n >= 3); at n = 2 the
    unreduced brute-force program is small enough to solve directly.
    """
    if spec.n < 2:
        raise InvalidSpec("certification needs n >= 2; the formulas make no claim at n=1")
    if symmetrize is None:
        symmetrize = spec.n >= 3
    sol_d = solve_auction_lp(
        build_dic_lp(spec, max_profiles), spec.n, symmetrize=symmetrize
    )
    sol_b = solve_auction_lp(
        build_bic_lp(spec, max_profiles), spec.n, symmetrize=symmetrize
    )
    if sol_d.status != "optimal" or sol_b.status != "optimal":
        raise RuntimeError("auction LPs must be feasible and bounded")
    r_d = revenue_dic(spec)
    r_b = revenue_bic(spec)
    return CertificationReport(
        spec=spec,
        lp_dic=sol_d.optimum,
        r_dic=r_d,
        equal_dic=sol_d.optimum == r_d,
        lp_bic=sol_b.optimum,
        r_bic=r_b,
        equal_bic=sol_b.optimum == r_b,
    )


# ---------------------------------------------------------------------------
# The certification grid
# ---------------------------------------------------------------------------


def grid_b_values(n: int, p: Fraction, a: Fraction) -> list:
    """Three interior points per linearity interval plus the breakpoints.

    With a = 0 every breakpoint collapses to 0 and only the top interval
    exists; three separated points stand in for the whole sweep.
    """
    if a == 0:
        return [Fraction(1), Fraction(2), Fraction(3)]
    probe = AuctionSpec(n, p, a, a + 1)
    from .formulas import breakpoints

    v = breakpoints(probe)
    out = set()
    edges = [a, v.v1, v.v2, v.v3, v.v3 + (v.v3 - a)]
    for lo, hi in zip(edges, edges[1:]):
        for k in (1, 2, 3):
            out.add(lo + Fraction(k, 4) * (hi - lo))
    out.update((v.v1, v.v2, v.v3))
    return sorted(x for x in out if x > a)


def certification_grid(
    ns: Sequence[int] = (2, 3),
    ps: Sequence = (Fraction(1, 4), Fraction(1, 3), Fraction(1, 2), Fraction(2, 3), Fraction(3, 4)),
    a_values: Sequence = (Fraction(0), Fraction(1)),
) -> list:
    """The built-in grid of specs used for end-to-end certification."""
    specs = []
    for n in ns:
        for p in ps:
            for a in a_values:
                for b in grid_b_values(n, p, a):
                    specs.append(AuctionSpec(n, p, a, b))
    return specs
