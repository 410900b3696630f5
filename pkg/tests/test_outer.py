import pytest

from sigmarket import (
    CostFamily,
    CreditFamily,
    DeviationGrid,
    EquilibriumOutcome,
    InputError,
    InvariantViolation,
    MarketParams,
    Policy,
    PolicyProfile,
    PopulationStrategy,
    Signal,
    StepMonitoringPolicy,
    StrategyAtom,
    WageSchedule,
    check_minimality,
    credit_monopoly_rpbe,
    deviation_audit,
    expected_type,
    is_fierce,
    max_welfare,
    mild_fee_set,
    monopoly_rpbe,
    riley_effort,
    riley_rpbe,
    select_iis,
    semipooling_family,
    verify_extended_d1,
    verify_pbe,
    welfare,
)

LIN = CostFamily.linear(2.0, 1.0)


class TestMonopoly:
    def test_sorting(self, sorting):
        out = monopoly_rpbe(sorting)
        assert out.fee == pytest.approx(1.5)
        assert out.profits == (pytest.approx(1.5),)
        rep = welfare(out, sorting)
        assert rep.total == pytest.approx(1.5)
        assert rep.total == rep.max_welfare
        assert out.payoffs == (0.0, 0.0)

    def test_screening(self, screening):
        out = monopoly_rpbe(screening)
        assert out.fee == 2.0
        assert out.profits == (pytest.approx(1.0),)
        assert out.enrollment == (0.0, 1.0)
        rep = welfare(out, screening)
        assert rep.total == pytest.approx(1.0) == rep.max_welfare

    def test_boundary_theta_l_zero(self, sorting):
        p = sorting.with_(theta_L=0.0)
        out = monopoly_rpbe(p)
        assert out.fee == pytest.approx(p.lam * p.theta_H)
        assert out.enrollment == (1.0, 1.0)

    def test_needs_single_school(self, sorting):
        with pytest.raises(InputError):
            monopoly_rpbe(sorting.with_(n_schools=2))

    def test_bundle_verifies(self, sorting, screening):
        for params in (sorting, screening):
            out = monopoly_rpbe(params)
            eq = out.to_subgame(params)
            grid = DeviationGrid.for_profile(out.profile, params)
            assert verify_pbe(out.profile, eq, params, grid).passed
            assert verify_extended_d1(out.profile, eq, params, grid).passed
            assert check_minimality(out.profile, eq, params, grid).passed


class TestCreditMonopoly:
    def test_screening_binding_cap(self, screening):
        out = credit_monopoly_rpbe(screening.with_(credit_cap=1.0))
        assert isinstance(out, EquilibriumOutcome)
        assert out.fee == 1.0
        assert out.enrollment[1] == 1.0
        assert out.enrollment[0] == pytest.approx(0.5, abs=1e-9)
        assert out.profits[0] == pytest.approx(0.75, abs=1e-9)
        assert out.wages.offer(Signal(0, 0)) == pytest.approx(1.0, abs=1e-12)

    def test_alpha_interior_and_pinned_wage(self, screening):
        for cap in (0.6, 1.0, 1.5, 1.9):
            out = credit_monopoly_rpbe(screening.with_(credit_cap=cap))
            alpha = out.enrollment[0]
            assert 0.0 < alpha <= 1.0
            # pooled wage equals the cap exactly
            assert out.wages.offer(Signal(0, 0)) == pytest.approx(cap, abs=1e-9)

    def test_sorting_slack_cap_delegates(self, sorting):
        out = credit_monopoly_rpbe(sorting.with_(credit_cap=1.8))
        assert out.label == "monopoly_sorting"
        assert out.fee == pytest.approx(1.5)

    def test_high_cap_delegates(self, screening):
        out = credit_monopoly_rpbe(screening.with_(credit_cap=5.0))
        assert out.label == "monopoly_screening"

    def test_tight_cap_family(self, sorting):
        fam = credit_monopoly_rpbe(sorting.with_(credit_cap=1.0))
        assert isinstance(fam, CreditFamily)
        assert fam.fee == 1.0
        assert fam.e_prime == pytest.approx(0.25, abs=1e-9)
        zero = fam.zero_effort_member()
        assert zero.wages.offer(Signal(0, 0)) == pytest.approx(1.5)
        assert zero.payoffs == (pytest.approx(0.5), pytest.approx(0.5))
        assert zero.profits == (pytest.approx(1.0),)
        edge = fam.pooling_member(fam.e_limit)
        assert edge.boundary
        with pytest.raises(InputError):
            fam.pooling_member(fam.e_limit + 0.05)

    def test_family_members_share_fee_and_profit(self, sorting):
        fam = credit_monopoly_rpbe(sorting.with_(credit_cap=1.0))
        for member in fam.sample(4):
            assert member.fee == 1.0
            assert member.profits == (pytest.approx(1.0),)
            assert member.enrollment == (1.0, 1.0)

    def test_partial_member_indifference(self, screening):
        fam = credit_monopoly_rpbe(screening.with_(theta_L=-0.2, credit_cap=0.5))
        assert isinstance(fam, CreditFamily)
        m = fam.partial_member(0.0, 0.6)
        if m is None:
            pytest.skip("no feasible partial member at this point")
        cf = fam.params.cost
        high_atoms = {round(a.effort, 9): a for a in m.on_path.high}
        efforts = sorted(high_atoms)
        w_l = m.wages.offer(m.profile.signal_of(0, efforts[0]))
        u_pool = w_l - cf.cost("H", efforts[0]) - fam.fee
        u_top = fam.params.theta_H - cf.cost("H", efforts[1]) - fam.fee
        assert u_pool == pytest.approx(u_top, abs=1e-8)

    def test_requires_cap(self, screening):
        with pytest.raises(InputError):
            credit_monopoly_rpbe(screening)

    def test_alpha_equals_subgame_mixing_weight(self, screening, sorting):
        """The capped-pooling enrollment fraction is exactly the mixing
        weight the subgame constructor derives on the fee-capped profile."""
        from sigmarket import construct_epbe

        for cap in (0.8, 1.3, 1.7):
            out = credit_monopoly_rpbe(screening.with_(credit_cap=cap))
            eq = construct_epbe(out.profile, screening.with_(credit_cap=cap))
            assert eq.strategy.enrollment_total("L") == pytest.approx(out.enrollment[0], abs=1e-12)
            assert eq.wages.offer(Signal(0, 0)) == pytest.approx(cap, abs=1e-12)
        fam = credit_monopoly_rpbe(sorting.with_(credit_cap=1.0))
        member = fam.zero_effort_member()
        eq = construct_epbe(member.profile, sorting.with_(credit_cap=1.0))
        assert eq.strategy.enrollment_total("L") == 1.0
        assert eq.wages.offer(Signal(0, 0)) == pytest.approx(1.5)


class TestFierce:
    def test_documented_instances(self):
        base = dict(theta_H=2.0, lam=0.5, cost=LIN)
        v = is_fierce(MarketParams(theta_L=-1.0, **{**base, "lam": 0.4}), 3)
        assert v.fierce and "n_exceeds_inv_lambda" in v.reasons
        v = is_fierce(MarketParams(theta_L=1.0, **base), 2)
        assert v.fierce and v.reasons == ("n_thetaL_exceeds_mean",)
        v = is_fierce(MarketParams(theta_L=-1.0, **base), 2)
        assert not v.fierce
        with pytest.raises(InputError):
            is_fierce(MarketParams(theta_L=-1.0, **base), 1)


class TestRiley:
    def test_screening_values(self, screening):
        out = riley_rpbe(screening, 2)
        assert out.fee == 0.0
        assert out.profits == (0.0, 0.0)
        assert out.payoffs == (0.0, pytest.approx(1.0, abs=1e-9))
        rep = welfare(out, screening)
        assert rep.total == pytest.approx(0.5, abs=1e-9)

    def test_sorting_values(self, sorting):
        out = riley_rpbe(sorting, 2)
        rep = welfare(out, sorting)
        assert rep.total == pytest.approx(1.25, abs=1e-9)
        assert out.enrollment == (1.0, 1.0)

    def test_needs_competition(self, sorting):
        with pytest.raises(InputError):
            riley_rpbe(sorting, 1)


class TestSemipooling:
    PARAMS = MarketParams(theta_L=-1.0, theta_H=2.0, lam=0.5, cost=CostFamily.linear(2.0, 1.8), n_schools=2)

    def test_zero_fee_at_e_l_zero(self):
        fam = semipooling_family(self.PARAMS, 2, "zero_fee", e_l=0.0)
        assert len(fam) == 1
        m = fam[0]
        q_h = sum(a.prob for a in m.on_path.high if a.effort < 1e-9)
        assert q_h == pytest.approx(2.0 / 3.0, abs=1e-6)
        assert m.wages.offer(Signal(0, 0)) == pytest.approx(0.2, abs=1e-6)

    def test_zero_fee_at_e_l_tenth(self):
        fam = semipooling_family(self.PARAMS, 2, "zero_fee", e_l=0.1)
        m = fam[0]
        q_h = sum(a.prob for a in m.on_path.high if abs(a.effort - 0.1) < 1e-9)
        assert q_h == pytest.approx(1.38 / 1.62, abs=1e-6)
        assert m.wages.offer(Signal(0, 1)) == pytest.approx(0.38, abs=1e-6)

    def test_free_parameter_inversion_consistency(self):
        fam_e = semipooling_family(self.PARAMS, 2, "zero_fee", e_l=0.05)
        m = fam_e[0]
        q_h = sum(a.prob for a in m.on_path.high if abs(a.effort - 0.05) < 1e-9)
        fam_q = semipooling_family(self.PARAMS, 2, "zero_fee", q_h=q_h)
        m2 = fam_q[0]
        e_l = min(a.effort for a in m2.on_path.high)
        assert e_l == pytest.approx(0.05, abs=1e-6)

    def test_empty_family_certificate(self, screening):
        fam = semipooling_family(screening.with_(n_schools=2), 2, "zero_fee", e_l=0.0)
        assert len(fam) == 0
        cert = fam.certificate
        assert cert is not None
        assert cert.sup_pooled_wage == pytest.approx(expected_type(screening))
        assert cert.required_pooled_wage == pytest.approx(
            screening.theta_H - screening.cost.cost("H", riley_effort(screening)), abs=1e-8
        )
        assert cert.sup_pooled_wage < cert.required_pooled_wage

    def test_member_indifference_and_interval(self):
        for q in (0.3, 0.5, 0.8):
            fam = semipooling_family(self.PARAMS, 2, "zero_fee", q_h=q)
            if not len(fam):
                continue
            m = fam[0]
            efforts = sorted({a.effort for a in m.on_path.high})
            assert len(efforts) == 2
            e_l, e_h = efforts
            w_l = m.wages.offer(m.profile.signal_of(0, e_l))
            cf = self.PARAMS.cost
            assert w_l - cf.cost("H", e_l) == pytest.approx(
                self.PARAMS.theta_H - cf.cost("H", e_h), abs=1e-8
            )
            assert max(self.PARAMS.theta_L, 0.0) < w_l < self.PARAMS.theta_H
            assert e_l < riley_effort(self.PARAMS) + 1e-9

    def test_with_fee_member(self):
        params = MarketParams(theta_L=-1.0, theta_H=2.0, lam=0.5, cost=CostFamily.linear(2.0, 1.8), n_schools=2)
        fee_set = mild_fee_set(params, 2)
        fee = 0.2
        assert fee_set.contains(fee)
        # q_h = 0.8 puts the pooled wage at 1/3 > fee, so low types clear it
        fam = semipooling_family(params, 2, "with_fee", q_h=0.8, fee=fee)
        assert len(fam) == 1
        m = fam[0]
        assert m.fee == fee
        assert m.payoffs[0] == pytest.approx(0.0, abs=1e-8)
        efforts = sorted({a.effort for a in m.on_path.high})
        w_l = m.wages.offer(m.profile.signal_of(0, efforts[0]))
        assert w_l == pytest.approx(1.0 / 3.0, abs=1e-9)
        cf = params.cost
        assert w_l - cf.cost("H", efforts[0]) == pytest.approx(
            params.theta_H - cf.cost("H", efforts[1]), abs=1e-8
        )

    def test_with_fee_infeasible_probe_is_empty(self):
        params = MarketParams(theta_L=-1.0, theta_H=2.0, lam=0.5, cost=CostFamily.linear(2.0, 1.8), n_schools=2)
        fam = semipooling_family(params, 2, "with_fee", q_h=0.6, fee=0.2)
        assert len(fam) == 0 and fam.certificate is None

    def test_with_fee_rejected_under_fierce(self):
        fierce = MarketParams(theta_L=-3.0, theta_H=2.0, lam=0.5, cost=LIN, n_schools=2)
        fam = semipooling_family(fierce, 2, "with_fee", q_h=0.5, fee=0.2)
        assert len(fam) == 0
        assert "fierce" in fam.certificate.reason

    def test_mixed_wage_inversion_round_trip(self):
        from hypothesis import given, settings
        from hypothesis import strategies as st

        from sigmarket.outer import _mixed_wage, _q_h_for_wage

        @given(
            lam=st.floats(0.05, 0.95),
            theta_h=st.floats(0.5, 5.0),
            gap=st.floats(0.1, 5.0),
            q=st.floats(0.01, 0.99),
        )
        @settings(max_examples=80)
        def check(lam, theta_h, gap, q):
            p = MarketParams(theta_L=theta_h - gap, theta_H=theta_h, lam=lam, cost=LIN)
            w = _mixed_wage(q, p)
            # raw formula ranges over (theta_L, theta_H); the equilibrium
            # filters are what pin members above max(theta_L, 0)
            assert p.theta_L < w < p.theta_H
            assert _q_h_for_wage(w, p) == pytest.approx(q, rel=1e-9)

        check()

    def test_bad_free_params(self):
        with pytest.raises(InputError):
            semipooling_family(self.PARAMS, 2, "zero_fee", e_l=5.0)
        with pytest.raises(InputError):
            semipooling_family(self.PARAMS, 2, "zero_fee", q_h=1.5)
        with pytest.raises(InputError):
            semipooling_family(self.PARAMS, 2, "zero_fee")
        with pytest.raises(InputError):
            semipooling_family(self.PARAMS, 2, "with_fee", q_h=0.5)


class TestFamilyBundlesVerify:
    """Every emitted family member is a refined equilibrium of its own subgame."""

    def test_semipooling_members(self):
        params = MarketParams(
            theta_L=-1.0, theta_H=2.0, lam=0.5, cost=CostFamily.linear(2.0, 1.8), n_schools=2
        )
        probes = [("zero_fee", dict(q_h=q)) for q in (0.7, 0.8, 0.95)]
        probes.append(("with_fee", dict(q_h=0.8, fee=0.2)))
        checked = 0
        for variant, kwargs in probes:
            for m in semipooling_family(params, 2, variant, **kwargs):
                eq = m.to_subgame(params, tag="semi_pooling")
                grid = DeviationGrid.for_profile(m.profile, params)
                assert verify_pbe(m.profile, eq, params, grid).passed
                assert verify_extended_d1(m.profile, eq, params, grid).passed
                assert check_minimality(m.profile, eq, params, grid).passed
                checked += 1
        assert checked >= 3

    def test_credit_members(self, sorting, screening):
        out = credit_monopoly_rpbe(screening.with_(credit_cap=1.0))
        members = [(out, screening.with_(credit_cap=1.0))]
        fam = credit_monopoly_rpbe(sorting.with_(credit_cap=1.0))
        members += [(m, sorting.with_(credit_cap=1.0)) for m in fam.sample(3)]
        for m, params in members:
            eq = m.to_subgame(params)
            grid = DeviationGrid.for_profile(m.profile, params)
            assert verify_pbe(m.profile, eq, params, grid).passed, m.label
            assert verify_extended_d1(m.profile, eq, params, grid).passed, m.label


class TestMildFeeSet:
    def test_sorting_instance(self):
        p = MarketParams(theta_L=0.5, theta_H=2.0, lam=0.5, cost=LIN, n_schools=2)
        fs = mild_fee_set(p, 2)
        assert fs.points == (0.0,)
        (iv,) = fs.intervals
        assert (iv.lo, iv.hi, iv.closed_lo, iv.closed_hi) == (1.0, 1.25, True, False)
        assert fs.contains(1.0) and fs.contains(1.2499999) and not fs.contains(1.25)
        assert fs.contains(0.0) and not fs.contains(0.5)

    def test_screening_instance(self, screening):
        fs = mild_fee_set(screening.with_(n_schools=2), 2)
        (iv,) = fs.intervals
        assert (iv.lo, iv.hi, iv.closed_lo, iv.closed_hi) == (0.0, 0.5, True, True)
        assert fs.contains(0.5) and not fs.contains(0.51)

    def test_fierce_collapses(self):
        p = MarketParams(theta_L=-3.0, theta_H=2.0, lam=0.5, cost=LIN, n_schools=2)
        fs = mild_fee_set(p, 2)
        assert fs.points == (0.0,) and fs.intervals == ()


class TestWelfare:
    def test_identity_on_all_solver_outputs(self, sorting, screening):
        outcomes = []
        for params in (sorting, screening):
            outcomes.append((monopoly_rpbe(params), params))
            p2 = params.with_(n_schools=2)
            outcomes.append((riley_rpbe(p2, 2), p2))
        sp = MarketParams(theta_L=-1.0, theta_H=2.0, lam=0.5, cost=CostFamily.linear(2.0, 1.8), n_schools=2)
        for m in semipooling_family(sp, 2, "zero_fee", q_h=0.5):
            outcomes.append((m, sp))
        cr = credit_monopoly_rpbe(screening.with_(credit_cap=1.0))
        outcomes.append((cr, screening.with_(credit_cap=1.0)))
        for out, params in outcomes:
            rep = welfare(out, params)
            lhs = rep.total
            rhs = (
                params.lam * out.payoffs[1]
                + (1.0 - params.lam) * out.payoffs[0]
                + sum(out.profits)
            )
            assert lhs == pytest.approx(rhs, abs=1e-9), out.label

    def test_nobody_enrolls_is_zero(self, screening):
        prof = PolicyProfile.of(Policy(fee=2.0, monitoring=StepMonitoringPolicy.uninformative()))
        strat = PopulationStrategy(
            low=(StrategyAtom(None, 0.0, 1.0),), high=(StrategyAtom(None, 0.0, 1.0),)
        )
        out = EquilibriumOutcome(
            profile=prof,
            on_path=strat,
            wages=WageSchedule(offers={Signal(0, 0): None}),
            profits=(0.0,),
            enrollment=(0.0, 0.0),
            employment=(0.0, 0.0),
            payoffs=(0.0, 0.0),
            label="monopoly_screening",
        )
        assert welfare(out, screening).total == 0.0

    def test_max_welfare_switches_at_zero(self, sorting):
        assert max_welfare(sorting) == expected_type(sorting)
        assert max_welfare(sorting.with_(theta_L=-0.5)) == sorting.lam * sorting.theta_H


class TestSelectIIS:
    def test_riley_selected(self, screening):
        p = screening.with_(theta_L=-3.0, n_schools=2)  # fierce via losses
        r = riley_rpbe(p, 2)
        family = [r] + list(semipooling_family(p, 2, "zero_fee", q_h=0.5))
        assert select_iis(family, p, 2) is r
        assert select_iis([r], p, 2) is r
        with pytest.raises(InvariantViolation):
            select_iis([], p, 2)


class TestDeviationAudit:
    def planted(self, sorting):
        prof = PolicyProfile.symmetric(
            Policy(fee=1.5, monitoring=StepMonitoringPolicy.uninformative()), 2
        )
        strat = PopulationStrategy(
            low=tuple(StrategyAtom(i, 0.0, 0.5) for i in range(2)),
            high=tuple(StrategyAtom(i, 0.0, 0.5) for i in range(2)),
        )
        wages = WageSchedule(offers={Signal(i, 0): 1.5 for i in range(2)})
        return EquilibriumOutcome(
            profile=prof,
            on_path=strat,
            wages=wages,
            profits=(0.75, 0.75),
            enrollment=(1.0, 1.0),
            employment=(1.0, 1.0),
            payoffs=(0.0, 0.0),
            label="riley",
        )

    def test_riley_certified_both_modes(self, sorting, screening):
        for params in (sorting, screening):
            out = riley_rpbe(params.with_(n_schools=2), 2)
            grid = DeviationGrid.for_profile(out.profile, params)
            assert deviation_audit(out, params, grid).max_gain <= 1e-9
            assert deviation_audit(out, params, grid, pessimistic=True).max_gain <= 1e-9

    def test_planted_profile_is_dominated(self, sorting):
        planted = self.planted(sorting)
        grid = DeviationGrid.for_profile(planted.profile, sorting)
        rep = deviation_audit(planted, sorting, grid)
        assert rep.max_gain >= 0.1
        assert rep.best.template in ("undercut_cutoff", "grid", "reveal_undercut")

    def test_semipooling_members_certified(self):
        params = MarketParams(
            theta_L=-1.0, theta_H=2.0, lam=0.5, cost=CostFamily.linear(2.0, 1.8), n_schools=2
        )
        for q in (0.7, 0.85):
            m = semipooling_family(params, 2, "zero_fee", q_h=q)[0]
            grid = DeviationGrid.for_profile(m.profile, params)
            assert deviation_audit(m, params, grid).max_gain <= 1e-9
            assert deviation_audit(m, params, grid, pessimistic=True).max_gain <= 1e-9

    def test_credit_outcomes_certified_within_cap(self, sorting, screening):
        """Deviations respect the fee cap; the capped monopolist cannot gain."""
        capped = screening.with_(credit_cap=1.0)
        out = credit_monopoly_rpbe(capped)
        grid = DeviationGrid.for_profile(out.profile, capped)
        assert deviation_audit(out, capped, grid).max_gain <= 1e-9
        fam = credit_monopoly_rpbe(sorting.with_(credit_cap=1.0))
        member = fam.zero_effort_member()
        grid2 = DeviationGrid.for_profile(member.profile, sorting.with_(credit_cap=1.0))
        assert deviation_audit(member, sorting.with_(credit_cap=1.0), grid2).max_gain <= 1e-9

    def test_own_policy_is_gainless(self, screening):
        out = riley_rpbe(screening.with_(n_schools=2), 2)
        grid = DeviationGrid.for_profile(out.profile, screening)
        rep = deviation_audit(out, screening, grid)
        e_r = riley_effort(screening)
        own = [
            e
            for e in rep.entries
            if e.fee == 0.0 and len(e.thresholds) == 1 and abs(e.thresholds[0] - e_r) < 2e-2
        ]
        assert own and all(abs(e.gain) <= 1e-9 for e in own)
