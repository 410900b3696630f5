import numpy as np
import pytest

from sigmarket import (
    CostFamily,
    DeviationGrid,
    InputError,
    MarketParams,
    Policy,
    PolicyProfile,
    Signal,
    StepMonitoringPolicy,
    SubgameEquilibrium,
    construct_epbe,
    mimic_frontier,
    reservation,
    verify_extended_d1,
    verify_pbe,
)

LIN = CostFamily.linear(2.0, 1.0)


def uninformative(fee):
    return Policy(fee=fee, monitoring=StepMonitoringPolicy.uninformative())


def cutoff(fee, threshold):
    return Policy(fee=fee, monitoring=StepMonitoringPolicy.cutoff(threshold))


class TestReservation:
    def test_examples(self):
        p = MarketParams(theta_L=1.0, theta_H=2.0, lam=0.5, cost=LIN, n_schools=2)
        prof = PolicyProfile.of(uninformative(0.3), uninformative(0.5))
        assert reservation(prof, p) == (0.3, pytest.approx(0.7))
        scr = p.with_(theta_L=-1.0)
        prof0 = PolicyProfile.of(uninformative(0.0), uninformative(0.0))
        assert reservation(prof0, scr) == (0.0, 0.0)
        prof2 = PolicyProfile.of(uninformative(2.0))
        assert reservation(prof2, p.with_(n_schools=1)) == (2.0, 0.0)


class TestMimicFrontier:
    def test_single_school_root(self, sorting):
        prof = PolicyProfile.of(uninformative(0.0))
        fr = mimic_frontier(prof, sorting)
        assert fr.u_low == 1.0
        assert fr.e_star[0] == pytest.approx(0.5, abs=1e-9)
        assert fr.marginal_effort == 0.0
        assert fr.high_signals == ()

    def test_two_school_partition(self, sorting):
        prof = PolicyProfile.of(cutoff(0.0, 0.4), cutoff(0.0, 0.6))
        fr = mimic_frontier(prof, sorting.with_(n_schools=2))
        assert fr.e_star == (pytest.approx(0.5), pytest.approx(0.5))
        assert fr.marginal_effort == 0.4
        assert fr.marginal_schools == (0,)
        assert fr.marginal_signals == (Signal(0, 1),)
        assert fr.high_signals == (Signal(1, 1),)
        assert set(fr.low_signals) == {Signal(0, 0), Signal(1, 0)}

    def test_priced_out_school_excluded(self, sorting):
        # school 1 charges more than theta_H minus the reservation payoff
        prof = PolicyProfile.of(uninformative(0.0), cutoff(1.5, 0.1))
        fr = mimic_frontier(prof, sorting.with_(n_schools=2))
        assert fr.e_star[1] == float("-inf")
        assert fr.marginal_schools == (0,)


class TestConstructEpbe:
    def test_monopoly_pooling_example(self, sorting):
        prof = PolicyProfile.of(uninformative(1.5))
        eq = construct_epbe(prof, sorting)
        assert eq.construction_tag == "semi_pooling"
        assert eq.strategy.enrollment("L", 0) == 1.0
        assert eq.strategy.enrollment("H", 0) == 1.0
        assert eq.wages.offer(Signal(0, 0)) == pytest.approx(1.5)
        assert eq.payoff_L == pytest.approx(0.0, abs=1e-9)
        assert eq.payoff_H == pytest.approx(0.0, abs=1e-9)

    def test_riley_at_school_example(self, sorting):
        # cutoff exactly at the low type's frontier: mixing weight drops to zero
        prof = PolicyProfile.of(cutoff(0.0, 0.5))
        eq = construct_epbe(prof, sorting)
        assert eq.construction_tag == "semi_pooling"
        low = {(a.school, a.effort): a.prob for a in eq.strategy.low}
        assert low == {(0, 0.0): 1.0}
        high = {(a.school, a.effort): a.prob for a in eq.strategy.high}
        assert high == {(0, 0.5): 1.0}
        assert eq.wages.offer(Signal(0, 1)) == pytest.approx(2.0)
        assert eq.wages.offer(Signal(0, 0)) == pytest.approx(1.0)

    def test_separating_example(self, sorting):
        prof = PolicyProfile.of(cutoff(0.0, 0.6))
        eq = construct_epbe(prof, sorting)
        assert eq.construction_tag == "separating"
        assert {(a.school, a.effort) for a in eq.strategy.high} == {(0, 0.6)}
        assert eq.payoff_H == pytest.approx(1.4)
        assert eq.payoff_L == pytest.approx(1.0)

    def test_fee_above_theta_h_rejected(self, sorting):
        prof = PolicyProfile.of(uninformative(2.5))
        with pytest.raises(InputError):
            construct_epbe(prof, sorting)

    def test_case1_tie_goes_to_pooling(self, sorting):
        # high signal exactly at the indifference premium: weak branch pools
        # gain = theta_H - u_low = 1; need C_H(s') - C_H(s*) + C_L(s*) = 1
        # with s* at 0: C_H(s') = 1 -> threshold t with t = 1.0
        prof = PolicyProfile.of(cutoff(0.0, 1.0))
        eq = construct_epbe(prof, sorting)
        assert eq.construction_tag == "semi_pooling"


def random_profile(rng, params):
    e_r = 2.0  # generous span
    policies = []
    for _ in range(params.n_schools):
        k = int(rng.integers(0, 3))
        ts = tuple(sorted(set(round(t, 6) for t in rng.uniform(0.05, 1.4 * e_r, size=k))))
        fee = float(rng.uniform(0.0, 0.9 * params.theta_H))
        policies.append(
            Policy(fee=fee, monitoring=StepMonitoringPolicy(thresholds=ts, messages=tuple(range(len(ts) + 1))))
        )
    return PolicyProfile.of(*policies)


def random_params(rng):
    theta_h = float(rng.uniform(0.8, 3.5))
    theta_l = float(rng.uniform(-2.0, theta_h - 0.3))
    lam = float(rng.uniform(0.15, 0.85))
    kap_h = float(rng.uniform(0.3, 1.8))
    kap_l = kap_h + float(rng.uniform(0.1, 1.6))
    n = int(rng.integers(1, 3))
    return MarketParams(theta_L=theta_l, theta_H=theta_h, lam=lam, cost=CostFamily.linear(kap_l, kap_h), n_schools=n)


class TestConstructInvariants:
    """Randomized regression corpus: internal consistency of the construction."""

    def test_corpus_consistency(self):
        rng = np.random.default_rng(91)
        for _ in range(60):
            params = random_params(rng)
            prof = random_profile(rng, params)
            eq = construct_epbe(prof, params)

            for t in ("L", "H"):
                assert sum(a.prob for a in eq.strategy.atoms(t)) == pytest.approx(1.0, abs=1e-9)

            # on-path wages are the Bayes posterior given the strategy
            mass_h = eq.strategy.signal_mass(prof, "H")
            mass_l = eq.strategy.signal_mass(prof, "L")
            for s in set(mass_h) | set(mass_l):
                r = params.lam * mass_h.get(s, 0.0)
                q = (1.0 - params.lam) * mass_l.get(s, 0.0)
                posterior = (r * params.theta_H + q * params.theta_L) / (r + q)
                income = eq.wages.income(s)
                assert income == pytest.approx(max(posterior, 0.0), abs=1e-8)

            # stored payoffs match recomputation from primitives
            for t in ("L", "H"):
                recomputed = 0.0
                for a in eq.strategy.atoms(t):
                    if a.school is None:
                        continue
                    s = prof.signal_of(a.school, a.effort)
                    recomputed += a.prob * (
                        eq.wages.income(s) - prof[a.school].fee - params.cost.cost(t, a.effort)
                    )
                assert recomputed == pytest.approx(eq.payoff(t), abs=1e-8)

            # ordering of payoffs and the reservation floor
            f_min = min(p.fee for p in prof)
            assert eq.payoff_L >= max(0.0, params.theta_L - f_min) - 1e-9
            assert eq.payoff_H >= eq.payoff_L - 1e-9

    def test_pooled_wage_interval(self):
        # w_bar lies in [max(theta_L, f_min), theta_H] whenever case 1 runs
        rng = np.random.default_rng(17)
        seen = 0
        for _ in range(80):
            params = random_params(rng)
            prof = random_profile(rng, params)
            eq = construct_epbe(prof, params)
            if eq.construction_tag != "semi_pooling":
                continue
            seen += 1
            fr = mimic_frontier(prof, params)
            w_bar = fr.cost_low_marginal + fr.u_low
            f_min = min(p.fee for p in prof)
            assert max(params.theta_L, f_min) - 1e-9 <= w_bar <= params.theta_H + 1e-9
        assert seen > 10

    def test_corpus_verifies(self):
        rng = np.random.default_rng(4242)
        for _ in range(40):
            params = random_params(rng)
            prof = random_profile(rng, params)
            eq = construct_epbe(prof, params)
            grid = DeviationGrid.for_profile(prof, params)
            assert verify_pbe(prof, eq, params, grid).passed
            assert verify_extended_d1(prof, eq, params, grid).passed


class TestSerialization:
    def test_equilibrium_round_trip(self, screening):
        prof = PolicyProfile.of(cutoff(0.0, 1.0), uninformative(0.2))
        eq = construct_epbe(prof, screening.with_(n_schools=2))
        back = SubgameEquilibrium.from_dict(eq.to_dict())
        assert back.to_dict() == eq.to_dict()
        assert back.payoff_H == eq.payoff_H
