import itertools
from fractions import Fraction as F

import pytest

from twopoint_auctions.core import (
    AuctionSpec,
    TYPES,
    class_probabilities,
    enumerate_profiles,
)
from twopoint_auctions.formulas import breakpoints, indicator_flags
from twopoint_auctions.mechanisms import (
    Mechanism,
    build_bic_mechanism,
    build_dic_mechanism,
)
from twopoint_auctions.audit import (
    check_bic,
    check_bir,
    check_dic,
    check_ir,
    class_sets,
    dic_case_family,
    expected_revenue,
    interim_allocation,
    interim_utility,
    qu_statistics,
    total_utility_mass,
    transfer_equation_check,
)

from test_mechanisms import grid_specs

EXAMPLE = AuctionSpec(2, F(1, 2), 1, 2)


def zero_mechanism(spec):
    zero = (F(0), F(0))
    profiles = [t for t, _ in enumerate_profiles(spec)]
    return Mechanism(
        spec=spec,
        label="custom",
        allocation={t: tuple(zero for _ in range(spec.n)) for t in profiles},
        utility={t: tuple(F(0) for _ in range(spec.n)) for t in profiles},
    )


def with_utility(mech, profile, buyer, value):
    utility = dict(mech.utility)
    us = list(utility[profile])
    us[buyer] = value
    utility[profile] = tuple(us)
    return Mechanism(mech.spec, "custom", mech.allocation, utility)


class TestExpectedRevenue:
    def test_example_values(self):
        assert expected_revenue(build_dic_mechanism(EXAMPLE)) == F(25, 8)
        assert expected_revenue(build_bic_mechanism(EXAMPLE)) == F(51, 16)

    def test_zero_mechanism(self):
        assert expected_revenue(zero_mechanism(EXAMPLE)) == 0


class TestIR:
    @pytest.mark.parametrize("spec", grid_specs(), ids=str)
    def test_built_mechanisms_pass(self, spec):
        assert check_ir(build_dic_mechanism(spec)).passed
        assert check_ir(build_bic_mechanism(spec)).passed

    def test_planted_defect(self):
        bad = with_utility(build_dic_mechanism(EXAMPLE), ("ab", "ba"), 0, F(-1))
        report = check_ir(bad)
        assert not report.passed
        assert len(report.violations) == 1
        v = report.violations[0]
        assert (v.buyer, v.true_type, v.others) == (0, "ab", ("ba",))
        assert (v.lhs, v.rhs) == (F(-1), F(0))

    def test_constraint_count(self):
        report = check_ir(build_dic_mechanism(EXAMPLE))
        assert report.n_constraints == 2 * 16


class TestDIC:
    @pytest.mark.parametrize("spec", grid_specs(), ids=str)
    def test_dic_mechanism_passes(self, spec):
        assert check_dic(build_dic_mechanism(spec)).passed

    def test_zero_mechanism_passes(self):
        assert check_dic(zero_mechanism(EXAMPLE)).passed

    def test_constraint_count(self):
        assert check_dic(build_dic_mechanism(EXAMPLE)).n_constraints == 2 * 12 * 4
        spec3 = AuctionSpec(3, F(1, 2), 1, 2)
        assert check_dic(build_dic_mechanism(spec3)).n_constraints == 3 * 12 * 16

    @pytest.mark.parametrize("spec", grid_specs(), ids=str)
    def test_bic_mechanism_witness(self, spec):
        """Below v3 the Bayesian-optimal mechanism fails dominant-strategy
        truthfulness, and the named witness is in the violation set: a (b,b)
        buyer facing one (a,b) opponent (others all-low) gains by reporting
        (a,b).  From v3 on it passes."""
        report = check_dic(build_bic_mechanism(spec))
        if spec.b >= breakpoints(spec).v3:
            assert report.passed
            return
        assert not report.passed
        others = ("ab",) + ("aa",) * (spec.n - 2)
        witness = [
            v
            for v in report.violations
            if (v.buyer, v.true_type, v.reported_type, v.others)
            == (0, "bb", "ab", others)
        ]
        assert len(witness) == 1
        v = witness[0]
        # u_0((b,b),others) = (b-a)/4 against rhs (b-a)*q^1 = (b-a)/2
        assert v.lhs == (spec.b - spec.a) / 4
        assert v.rhs == (spec.b - spec.a) / 2

    def test_violation_order_is_deterministic(self):
        r1 = check_dic(build_bic_mechanism(EXAMPLE))
        r2 = check_dic(build_bic_mechanism(EXAMPLE))
        assert r1.violations == r2.violations


class TestBICandBIR:
    @pytest.mark.parametrize("spec", grid_specs(), ids=str)
    def test_built_mechanisms_pass(self, spec):
        mb = build_bic_mechanism(spec)
        assert check_bic(mb).passed
        assert check_bir(mb).passed
        md = build_dic_mechanism(spec)
        assert check_bic(md).passed  # averaging preserves truthfulness
        assert check_bir(md).passed

    def test_constraint_counts(self):
        mech = build_bic_mechanism(EXAMPLE)
        assert check_bic(mech).n_constraints == 2 * 12
        assert check_bir(mech).n_constraints == 2 * 4

    def test_planted_interim_defect(self):
        mech = build_bic_mechanism(EXAMPLE)
        bad = mech
        for others in TYPES:
            bad = with_utility(bad, ("aa", others), 0, F(-5))
        rep = check_bir(bad)
        assert not rep.passed
        assert rep.violations[0].others == "averaged"
        assert rep.violations[0].true_type == "aa"

    def test_planted_bb_bonus_fails_reported_pairs(self):
        # lifting the (b,b) row uniformly makes misreporting *to* (b,b)
        # attractive; the violations appear exactly on those pairs
        mech = build_bic_mechanism(EXAMPLE)
        bad = mech
        for others in TYPES:
            profile = ("bb", others)
            bad = with_utility(bad, profile, 0, bad.u(0, profile) + 100)
        rep = check_bic(bad)
        assert not rep.passed
        assert {(v.true_type, v.reported_type) for v in rep.violations} == {
            ("aa", "bb"),
            ("ab", "bb"),
            ("ba", "bb"),
        }

    def test_payments_are_rederived_from_tables(self):
        # the audit consumes (q, u) only; shifting u changes the derived
        # payment, which expected_revenue must reflect
        mech = build_bic_mechanism(EXAMPLE)
        shifted = with_utility(mech, ("bb", "aa"), 0, mech.u(0, ("bb", "aa")) + 1)
        assert expected_revenue(shifted) == expected_revenue(mech) - F(1, 16)


class TestTransferEquation:
    @pytest.mark.parametrize(
        "builder", [build_dic_mechanism, build_bic_mechanism, zero_mechanism]
    )
    def test_identity_holds(self, builder):
        assert transfer_equation_check(builder(EXAMPLE))

    def test_interim_form(self):
        mech = build_bic_mechanism(EXAMPLE)
        for i in range(2):
            for t_true in TYPES:
                for t_rep in TYPES:
                    vt = mech.spec.type_values(t_true)
                    vr = mech.spec.type_values(t_rep)
                    q = interim_allocation(mech, i, t_rep)
                    misreport = sum(
                        (F(1, 4) if o in ("ab", "ba") else F(1, 4))
                        * (
                            vt[0] * mech.q(i, (t_rep, o) if i == 0 else (o, t_rep))[0]
                            + vt[1] * mech.q(i, (t_rep, o) if i == 0 else (o, t_rep))[1]
                            - mech.payment(i, (t_rep, o) if i == 0 else (o, t_rep))
                        )
                        for o in TYPES
                    )
                    expected = interim_utility(mech, i, t_rep) + (
                        (vt[0] - vr[0]) * q[0] + (vt[1] - vr[1]) * q[1]
                    )
                    assert misreport == expected


class TestClassSets:
    def test_sizes(self):
        sets = class_sets(3)
        assert len(sets["S0"]) == 1
        assert len(sets["S1"]) == 6
        assert len(sets["S1_prime"]) == 9
        # every raised one-cheap profile is reachable from exactly one parent
        assert len(sets["S2_prime"]) == 3 * len(sets["S2"])

    def test_example_q_masses(self):
        spec = AuctionSpec(2, F(1, 2), 1, F(3, 2))  # alpha = 1
        stats = qu_statistics(build_dic_mechanism(spec))
        assert stats["S0"][0] == F(1, 8)  # 2 * p0
        assert stats["S1_prime"][0] == 0
        assert stats["S2_prime"][0] == 0

    @pytest.mark.parametrize("spec", grid_specs(ns=(2, 3)), ids=str)
    def test_bic_upper_bound_chain_is_tight(self, spec):
        # the interim machinery's lower bound on utility mass is achieved
        p, a, b = spec.p, spec.a, spec.b
        mech = build_bic_mechanism(spec)
        stats = qu_statistics(mech)
        bound = (b - a) * (
            (1 - p ** 2) / (2 * p ** 2) * stats["S0"][0]
            + (1 - p) / (2 * p) * (stats["S1"][0] + stats["S2"][0])
        )
        assert total_utility_mass(mech) == bound


class TestInterimFacts:
    """Interim monotonicity and envelope equalities of the Bayesian-optimal
    mechanism, across the grid."""

    @staticmethod
    def _geq(x, y):
        return x[0] >= y[0] and x[1] >= y[1]

    @pytest.mark.parametrize("spec", grid_specs(), ids=str)
    def test_interim_allocation_monotone(self, spec):
        mech = build_bic_mechanism(spec)
        order = {"aa": (0, 0), "ab": (0, 1), "ba": (1, 0), "bb": (1, 1)}
        for t1, t2 in itertools.product(TYPES, repeat=2):
            if all(x >= y for x, y in zip(order[t1], order[t2])):
                assert self._geq(
                    interim_allocation(mech, 0, t1), interim_allocation(mech, 0, t2)
                )

    @pytest.mark.parametrize("spec", grid_specs(), ids=str)
    def test_envelope_equalities(self, spec):
        mech = build_bic_mechanism(spec)
        d = spec.b - spec.a
        u = {t: interim_utility(mech, 0, t) for t in TYPES}
        q_aa = interim_allocation(mech, 0, "aa")
        q_ab = interim_allocation(mech, 0, "ab")
        assert u["ab"] - u["aa"] == d * q_aa[1]
        assert u["bb"] - u["ab"] == d * q_ab[0]

    @pytest.mark.parametrize("spec", grid_specs(), ids=str)
    def test_cross_item_interim_comparisons(self, spec):
        mech = build_bic_mechanism(spec)
        q_ab = interim_allocation(mech, 0, "ab")
        q_ba = interim_allocation(mech, 0, "ba")
        assert q_ab[0] <= q_ab[1]
        assert q_ba[0] >= q_ba[1]


class TestCaseFamilies:
    def test_partition_at_n3(self):
        seen = {}
        for others in itertools.product(TYPES, repeat=2):
            seen.setdefault(dic_case_family(others), []).append(others)
        assert set(seen) == {"A", "B", "C", "D", "E"}
        assert seen["A"] == [("aa", "aa")]
        assert ("ab", "ba") in seen["D"]

    def test_no_middle_family_at_n2(self):
        families = {dic_case_family((t,)) for t in TYPES}
        assert families == {"A", "B", "C", "E"}

    def test_dic_audit_covers_every_family(self):
        spec = AuctionSpec(3, F(1, 2), 1, 2)
        mech = build_dic_mechanism(spec)
        report = check_dic(mech)
        assert report.passed
        families = {
            dic_case_family(others)
            for others in itertools.product(TYPES, repeat=2)
        }
        assert families == {"A", "B", "C", "D", "E"}


class TestReportSerialization:
    def test_json_round_trip_fields(self):
        report = check_dic(build_bic_mechanism(EXAMPLE))
        doc = report.to_json()
        assert doc["condition"] == "DIC"
        assert doc["passed"] is False
        v = doc["violations"][0]
        assert set(v) == {"buyer", "true_type", "reported_type", "others", "lhs", "rhs"}
        assert v["lhs"] == "1/4"
