import random
from fractions import Fraction as F

import numpy as np
import pytest
import scipy.optimize

from twopoint_auctions.simplex import (
    Constraint,
    LinearProgram,
    SimplexError,
    lp_to_text,
    make_constraint,
    solve,
)


def lp1d(c, rows, nonneg=True):
    return LinearProgram(
        ["x"],
        {"x": F(c)},
        [make_constraint({"x": F(a)}, rel, F(b)) for a, rel, b in rows],
        {"x"} if nonneg else set(),
    )


class TestBasics:
    def test_one_dimensional(self):
        sol = solve(lp1d(1, [(1, "<=", F(3, 7))]))
        assert sol.status == "optimal"
        assert sol.optimum == F(3, 7)
        assert sol.assignment["x"] == F(3, 7)

    def test_degenerate_redundant_rows_terminate(self):
        rows = [(1, "<=", 1)] * 6 + [(2, "<=", 2)] * 6 + [(1, ">=", 0)] * 4
        sol = solve(lp1d(1, rows), rule="bland")
        assert sol.optimum == 1

    def test_infeasible(self):
        sol = solve(lp1d(1, [(1, "<=", 1), (1, ">=", 2)]))
        assert sol.status == "infeasible"

    def test_unbounded(self):
        assert solve(lp1d(1, [])).status == "unbounded"

    def test_phase_one(self):
        # origin infeasible: x >= 5
        sol = solve(lp1d(-1, [(1, ">=", 5)]))
        assert sol.status == "optimal"
        assert sol.optimum == -5

    def test_free_variable(self):
        sol = solve(lp1d(-1, [(1, ">=", F(-7, 3))], nonneg=False))
        assert sol.optimum == F(7, 3)
        assert sol.assignment["x"] == F(-7, 3)

    def test_two_variables_exact(self):
        lp = LinearProgram(
            ["x", "y"],
            {"x": F(2), "y": F(3)},
            [
                make_constraint({"x": F(1), "y": F(1)}, "<=", F(4)),
                make_constraint({"x": F(1), "y": F(3)}, "<=", F(6)),
            ],
            {"x", "y"},
        )
        sol = solve(lp)
        assert sol.optimum == 9  # at the vertex x=3, y=1
        assert (sol.assignment["x"], sol.assignment["y"]) == (3, 1)

    def test_validation_rejects_undeclared(self):
        lp = LinearProgram(["x"], {"y": F(1)}, [], set())
        with pytest.raises(ValueError, match="undeclared"):
            solve(lp)

    def test_relation_validation(self):
        with pytest.raises(ValueError):
            Constraint((("x", F(1)),), "==", F(0))


class TestRules:
    @pytest.mark.parametrize("rule", ["bland", "auto"])
    def test_rules_agree(self, rule):
        lp = LinearProgram(
            ["x", "y", "z"],
            {"x": F(10), "y": F(-57), "z": F(-9)},
            [
                make_constraint({"x": F(1), "y": F(-11), "z": F(-5)}, "<=", 0),
                make_constraint({"x": F(1), "y": F(-3), "z": F(-1)}, "<=", 0),
                make_constraint({"x": F(1)}, "<=", 1),
            ],
            {"x", "y", "z"},
        )
        # a classic cycling-prone instance; both rules must terminate at 1
        assert solve(lp, rule=rule).optimum == 1


class TestLazyRows:
    def test_lazy_matches_dense(self):
        rows = [
            make_constraint({"x": F(1), "y": F(k)}, "<=", F(k * k + 1), tag="lazy")
            for k in range(1, 20)
        ]
        lp = LinearProgram(
            ["x", "y"],
            {"x": F(1), "y": F(3)},
            rows + [make_constraint({"y": F(1)}, "<=", 5)],
            {"x", "y"},
        )
        dense = solve(lp)
        lazy = solve(lp, lazy_tags=("lazy",))
        assert dense.optimum == lazy.optimum
        assert dense.status == lazy.status == "optimal"


class TestCertificate:
    def test_tampered_solution_rejected(self):
        from twopoint_auctions.simplex import LPSolution, _certify

        lp = lp1d(1, [(1, "<=", 1)])
        with pytest.raises(SimplexError):
            _certify(lp, LPSolution("optimal", F(2), {"x": F(2)}))


def random_lp(rng, nvars, nrows):
    variables = [f"x{i}" for i in range(nvars)]
    objective = {v: F(rng.randint(-5, 5)) for v in variables}
    constraints = [
        make_constraint({v: F(1) for v in variables}, "<=", F(nvars * 6))
    ]
    for _ in range(nrows):
        coeffs = {v: F(rng.randint(-4, 4)) for v in variables}
        rel = rng.choice(["<=", ">="])
        rhs = F(rng.randint(-3 if rel == "<=" else -12, 12 if rel == "<=" else 3))
        constraints.append(make_constraint(coeffs, rel, rhs))
    return LinearProgram(variables, objective, constraints, set(variables))


class TestAgainstScipy:
    def test_random_instances(self):
        rng = random.Random(20240811)
        solved = 0
        for _ in range(40):
            lp = random_lp(rng, rng.randint(2, 5), rng.randint(1, 6))
            sol = solve(lp)
            a_ub, b_ub = [], []
            for c in lp.constraints:
                coeffs = dict(c.coeffs)
                row = [float(coeffs.get(v, 0)) for v in lp.variables]
                sgn = 1 if c.rel == "<=" else -1
                a_ub.append([sgn * x for x in row])
                b_ub.append(sgn * float(c.rhs))
            ref = scipy.optimize.linprog(
                [-float(lp.objective[v]) for v in lp.variables],
                A_ub=np.array(a_ub),
                b_ub=np.array(b_ub),
                bounds=(0, None),
                method="highs",
            )
            if sol.status == "optimal":
                assert ref.status == 0
                assert abs(float(sol.optimum) + ref.fun) < 1e-7
                solved += 1
            elif sol.status == "infeasible":
                assert ref.status == 2
            else:
                assert ref.status == 3
        assert solved >= 10


class TestExport:
    def test_text_export_contents(self):
        lp = LinearProgram(
            [("q", 0)],
            {("q", 0): F(1, 16)},
            [make_constraint({("q", 0): F(1)}, "<=", 1)],
            {("q", 0)},
        )
        text = lp_to_text(lp, "demo")
        assert text.startswith("\\ demo")
        assert "Maximize" in text and "Subject To" in text and "End" in text
        assert "1/16 q_0" in text  # exact comment
        assert "0.0625 q_0" in text  # decimal body
        assert "q_0 >= 0" in text
