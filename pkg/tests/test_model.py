import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pricedyn.expectations import DemandExpectation, SupplyExpectation, eval_supply
from pricedyn.model import J_MIN, firm_plan, household_plan, produce, utility
from pricedyn.params import ModelParams, Version

from oracles import firm_labour_grid, firm_labour_grid_v3

V1 = ModelParams(Version.NO_MONEY)
V2 = ModelParams(Version.MONEY_STORE)

positive = st.floats(0.01, 100.0)


class TestUtility:
    def test_zero_leisure(self):
        assert utility(V1, 400, 10) == 0

    def test_zero_consumption(self):
        assert utility(V1, 300, 0) == 0

    def test_direct_evaluation(self):
        p = ModelParams(Version.NO_MONEY, alpha=1, beta=1)
        assert utility(p, 320, 2) == 160

    @pytest.mark.parametrize("L, J", [(-1, 1), (1, -1), (401, 1)])
    def test_domain(self, L, J):
        with pytest.raises(ValueError):
            utility(V1, L, J)

    @given(L=st.floats(1, 399), J=st.floats(0.1, 1e3))
    def test_monotone(self, L, J):
        h = 1e-6 * max(L, J)
        assert utility(V1, L, J + h) > utility(V1, L, J)
        assert utility(V1, L + h, J) < utility(V1, L, J)


class TestProduce:
    @pytest.mark.parametrize("L, J", [(0, 0), (1, 1), (320, math.sqrt(320))])
    def test_values(self, L, J):
        assert produce(V1, L) == pytest.approx(J, rel=1e-15)

    def test_negative(self):
        with pytest.raises(ValueError):
            produce(V1, -1)


class TestHouseholdPlan:
    def test_v1_example(self):
        plan = household_plan(V1, price=2, wage=1)
        assert plan.labour_supply == 320
        assert plan.planned_jelly_demand == pytest.approx(160, rel=1e-15)

    def test_v3_example(self):
        p = ModelParams(Version.MONEY_COMMODITY, savings_fraction=0.2)
        plan = household_plan(p, price=1, wage=1, m_household=64)
        assert plan.labour_supply == pytest.approx(304, rel=1e-15)
        assert plan.planned_jelly_demand == pytest.approx(307.2, rel=1e-15)

    @pytest.mark.parametrize("price, wage", [(0, 1), (1, 0), (-1, 1)])
    def test_domain(self, price, wage):
        with pytest.raises(ValueError):
            household_plan(V1, price, wage)

    def test_v3_large_cash_clamps_labour(self):
        p = ModelParams(Version.MONEY_COMMODITY, savings_fraction=0.2)
        plan = household_plan(p, 1.0, 1.0, m_household=1e6)
        assert plan.labour_supply == 0.0
        assert plan.planned_jelly_demand > 0

    @given(p1=positive, w1=positive, p2=positive, w2=positive)
    def test_labour_supply_constant_v1_v2(self, p1, w1, p2, w2):
        for params in (V1, V2):
            a = household_plan(params, p1, w1, m_household=50.0)
            b = household_plan(params, p2, w2, m_household=0.0)
            assert a.labour_supply == b.labour_supply

    @given(price=positive, wage=positive, beta=st.floats(0.1, 10))
    def test_v3_s0_reduces_to_v1(self, price, wage, beta):
        v1 = household_plan(ModelParams(Version.NO_MONEY, beta=beta), price, wage)
        v3 = household_plan(ModelParams(Version.MONEY_COMMODITY, beta=beta), price, wage, 0.0)
        assert v1 == v3


class TestFirmPlan:
    def test_closed_form_root(self):
        plan = firm_plan(V1, DemandExpectation(z=4, zeta=0.5), budget=400)
        assert plan.labour_demand == pytest.approx(4 ** (4 / 3), rel=1e-12)
        assert plan.planned_jelly_supply == pytest.approx(plan.labour_demand**0.5, rel=1e-15)
        assert plan.price == pytest.approx(4 / plan.planned_jelly_supply**0.5, rel=1e-15)

    def test_closed_form_root_vs_grid(self):
        plan = firm_plan(V1, DemandExpectation(z=4, zeta=0.5), budget=400)
        L, h = firm_labour_grid(4, 0.5, 0.5, cap=400)
        assert abs(plan.labour_demand - L) <= h

    def test_unit_root(self):
        assert firm_plan(V1, DemandExpectation(1, 0.5)).labour_demand == pytest.approx(1, rel=1e-15)

    def test_equilibrium_plan(self):
        plan = firm_plan(V2, DemandExpectation(320**0.75, 0.5), budget=400)
        assert plan.labour_demand == pytest.approx(320, rel=1e-12)
        assert plan.price == pytest.approx(math.sqrt(320), rel=1e-12)
        assert plan.wage == 1.0

    def test_budget_cap_binds(self):
        plan = firm_plan(V2, DemandExpectation(320**0.75, 0.5), budget=100)
        assert plan.labour_demand == 100

    def test_zero_budget_degenerate(self):
        exp = DemandExpectation(10, 0.5)
        plan = firm_plan(V2, exp, budget=0.0)
        assert plan.labour_demand == 0 and plan.price_floored
        assert plan.price == pytest.approx(10 / J_MIN**0.5)

    def test_negative_budget(self):
        with pytest.raises(ValueError):
            firm_plan(V2, DemandExpectation(10, 0.5), budget=-1)

    def test_v3_needs_supply(self):
        with pytest.raises(ValueError):
            firm_plan(ModelParams(Version.MONEY_COMMODITY), DemandExpectation(10, 0.5))

    @settings(max_examples=40, deadline=None)
    @given(
        z=st.floats(0.5, 200),
        zeta=st.floats(0.05, 0.95),
        gamma=st.floats(0.2, 0.8),
        budget=st.floats(1, 600),
    )
    def test_v2_matches_grid(self, z, zeta, gamma, budget):
        params = ModelParams(Version.MONEY_STORE, gamma=gamma)
        plan = firm_plan(params, DemandExpectation(z, zeta), budget=budget)
        cap = min(400.0, budget)
        assert plan.labour_demand <= cap
        L, h = firm_labour_grid(z, zeta, gamma, cap)
        assert abs(plan.labour_demand - L) <= h

    @settings(max_examples=40, deadline=None)
    @given(
        z=st.floats(1, 200),
        zeta=st.floats(0.05, 0.95),
        x=st.floats(20, 400),
        xi=st.floats(0.3, 3),
        budget=st.floats(1, 2000),
    )
    def test_v3_matches_grid(self, z, zeta, x, xi, budget):
        params = ModelParams(Version.MONEY_COMMODITY, savings_fraction=0.2)
        supply = SupplyExpectation(x, xi)
        plan = firm_plan(params, DemandExpectation(z, zeta), supply, budget=budget)
        if plan.price_floored:
            return
        L = plan.labour_demand
        assert plan.wage == eval_supply(supply, L, 400)
        assert plan.wage * L <= budget * (1 + 1e-10)
        L_grid, h = firm_labour_grid_v3(z, zeta, 0.5, x, xi, 400, budget)
        assert abs(L - L_grid) <= 2 * h
