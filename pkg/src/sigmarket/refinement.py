"""Equilibrium verification: PBE checks, the extended D1 refinement, policy
minimality, and an independent brute-force equilibrium enumerator.

The D1 logic works on closed-form wage intervals.  For an unsent signal s at
school i with minimum effort e, the wages that would make type t weakly
(resp. strictly) prefer deviating to s over its equilibrium payoff U(t) form
upper intervals inside the sequentially rational range [max(0, theta_L),
theta_H]:

    weak(t)   = { w : w >= U(t) + f_i + c(t, e) }
    strict(t) = { w : w >  U(t) + f_i + c(t, e) }

The refinement forbids positive belief on type t at s whenever weak(t) is a
strict subset of strict(t'), which for these intervals reduces to a guarded
lower-bound comparison (ties within tol never exclude anybody).

The enumerator is the correctness oracle for the constructive solver: it
never consults the construction, enumerating instead every candidate support
over band-minimum efforts (within a message band, any higher effort is
strictly dominated), solving mixing weights in closed form from the wage
identity, and keeping exactly the candidates that pass both verifiers.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import InputError, ResourceError
from .market import HIGH, LOW, DEFAULT_TOL, MarketParams, TypeLabel
from .monitoring import Policy, PolicyProfile, Signal, reduce_minimal
from .subgame import (
    OUTSIDE,
    BeliefSystem,
    PopulationStrategy,
    StrategyAtom,
    SubgameEquilibrium,
    WageSchedule,
)

_EDGE = 1e-9  # mixing weights this close to {0,1} duplicate a pure support


@dataclass(frozen=True)
class DeviationGrid:
    """Effort grid used to discretize student deviations.

    Must contain 0 and every policy threshold of the profile under test;
    wage_grid_resolution is reporting-only (verdicts are closed-form).
    """

    effort_grid: tuple[float, ...]
    wage_grid_resolution: float = 1e-3

    def __post_init__(self):
        if not self.effort_grid or self.effort_grid[0] != 0.0:
            raise InputError("effort grid must start at 0")
        if any(b <= a for a, b in zip(self.effort_grid, self.effort_grid[1:])):
            raise InputError("effort grid must be strictly ascending")
        if self.wage_grid_resolution <= 0:
            raise InputError("wage_grid_resolution must be positive")

    @classmethod
    def for_profile(
        cls,
        profile: PolicyProfile,
        params: MarketParams,
        n_points: int = 21,
        e_max: float | None = None,
        wage_grid_resolution: float = 1e-3,
    ) -> "DeviationGrid":
        """Evenly spaced grid over [0, e_max] plus every policy threshold.

        e_max defaults to a span comfortably covering all thresholds and the
        separating effort scale theta_H / kappa-ish implied by the cost family.
        """
        from .market import riley_effort

        thresholds = profile.thresholds()
        if e_max is None:
            scale = riley_effort(params)
            e_max = 1.25 * max([scale] + list(thresholds))
        if n_points < 2:
            raise InputError("n_points must be >= 2")
        pts = {0.0, float(e_max)}
        step = e_max / (n_points - 1)
        pts.update(round(k * step, 15) for k in range(n_points))
        pts.update(t for t in thresholds if t <= e_max)
        pts.update(t for t in thresholds if t > e_max)  # never drop a threshold
        grid = sorted(pts)
        dedup = [grid[0]]
        for x in grid[1:]:
            if x - dedup[-1] > 1e-12:
                dedup.append(x)
        return cls(effort_grid=tuple(dedup), wage_grid_resolution=wage_grid_resolution)

    def covers(self, profile: PolicyProfile, slack: float = 1e-12) -> bool:
        return all(
            any(abs(t - g) <= slack for g in self.effort_grid) for t in profile.thresholds()
        )

    @property
    def step(self) -> float:
        return min(b - a for a, b in zip(self.effort_grid, self.effort_grid[1:]))


@dataclass(frozen=True)
class WageInterval:
    """Upper interval of wages ending at theta_H."""

    lower: float
    closed: bool
    empty: bool

    def contains(self, w: float, tol: float = 0.0) -> bool:
        if self.empty:
            return False
        return w >= self.lower - tol if self.closed else w > self.lower + tol


@dataclass(frozen=True)
class D1WageSets:
    weak: WageInterval
    strict: WageInterval


@dataclass(frozen=True)
class Violation:
    kind: str
    signal: Signal | None
    gap: float
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "signal": None if self.signal is None else self.signal.key(),
            "gap": self.gap,
        }


@dataclass(frozen=True)
class VerificationReport:
    passed: bool
    violations: tuple[Violation, ...]

    def to_dict(self) -> dict:
        return {"passed": self.passed, "violations": [v.to_dict() for v in self.violations]}

    @classmethod
    def from_violations(cls, violations) -> "VerificationReport":
        vs = tuple(violations)
        return cls(passed=not vs, violations=vs)


def _wage_sets_from_threshold(t: float, params: MarketParams, tol: float) -> D1WageSets:
    lo = max(0.0, params.theta_L)
    hi = params.theta_H
    weak_empty = t > hi + tol
    strict_empty = t >= hi - tol
    weak = WageInterval(lower=max(t, lo), closed=True, empty=weak_empty)
    strict = WageInterval(lower=max(t, lo), closed=t < lo, empty=strict_empty)
    return D1WageSets(weak=weak, strict=strict)


def d1_wage_sets(
    profile: PolicyProfile,
    eq: SubgameEquilibrium,
    s: Signal,
    type_label: TypeLabel,
    params: MarketParams,
    tol: float = DEFAULT_TOL,
) -> D1WageSets:
    """Closed-form deviation-rationalizing wage sets for an unsent signal."""
    if s in eq.strategy.sent_signals(profile):
        raise InputError(f"signal {s.key()} is on-path; D1 sets apply to unsent signals")
    t = eq.payoff(type_label) + profile[s.school].fee + params.cost.cost(type_label, profile.min_effort(s))
    return _wage_sets_from_threshold(t, params, tol)


def strictly_included(weak: WageInterval, strict: WageInterval, tol: float = DEFAULT_TOL) -> bool:
    """weak ⊊ strict for upper intervals; ties within tol do not include."""
    if strict.empty:
        return False
    if weak.empty:
        return True
    return strict.lower < weak.lower - tol


def _check_inputs(profile: PolicyProfile, eq: SubgameEquilibrium, grid: DeviationGrid):
    if eq.profile.to_list() != profile.to_list():
        raise InputError("equilibrium was built for a different profile")
    if not grid.covers(profile):
        raise InputError("deviation grid must contain every policy threshold")


def _payoff(
    profile: PolicyProfile,
    eq: SubgameEquilibrium,
    params: MarketParams,
    type_label: TypeLabel,
    school,
    effort: float,
) -> float:
    if school is OUTSIDE:
        return 0.0
    s = profile.signal_of(school, effort)
    return eq.wages.income(s) - profile[school].fee - params.cost.cost(type_label, effort)


def verify_pbe(
    profile: PolicyProfile,
    eq: SubgameEquilibrium,
    params: MarketParams,
    grid: DeviationGrid,
    tol: float = DEFAULT_TOL,
) -> VerificationReport:
    """Mutual best response + wage/belief consistency + Bayes on path."""
    _check_inputs(profile, eq, grid)
    violations: list[Violation] = []

    for type_label in (LOW, HIGH):
        best = 0.0  # outside option
        for i in range(profile.n):
            for e in grid.effort_grid:
                best = max(best, _payoff(profile, eq, params, type_label, i, e))
        recomputed = 0.0
        for atom in eq.strategy.atoms(type_label):
            pay = _payoff(profile, eq, params, type_label, atom.school, atom.effort)
            recomputed += atom.prob * pay
            if pay < best - tol:
                sig = None if atom.school is OUTSIDE else profile.signal_of(atom.school, atom.effort)
                violations.append(
                    Violation("student_best_response", sig, best - pay, f"type {type_label}")
                )
        if abs(recomputed - eq.payoff(type_label)) > max(tol, 1e-9):
            violations.append(
                Violation(
                    "student_best_response",
                    None,
                    abs(recomputed - eq.payoff(type_label)),
                    f"stored payoff for type {type_label} off by recomputation",
                )
            )

    for s in profile.signals():
        mu = eq.beliefs.mu(s)
        if not -tol <= mu <= 1.0 + tol:
            violations.append(Violation("wage_belief_consistency", s, abs(mu - 0.5) - 0.5))
            continue
        posterior = mu * params.theta_H + (1.0 - mu) * params.theta_L
        offer = eq.wages.offer(s)
        if offer is None:
            if posterior > tol:
                violations.append(Violation("wage_belief_consistency", s, posterior))
        elif abs(offer - posterior) > tol:
            violations.append(Violation("wage_belief_consistency", s, abs(offer - posterior)))

    mass_high = eq.strategy.signal_mass(profile, HIGH)
    mass_low = eq.strategy.signal_mass(profile, LOW)
    for s in set(mass_high) | set(mass_low):
        r = params.lam * mass_high.get(s, 0.0)
        q = (1.0 - params.lam) * mass_low.get(s, 0.0)
        mu_hat = r / (r + q)
        if abs(eq.beliefs.mu(s) - mu_hat) > tol:
            violations.append(Violation("bayes_on_path", s, abs(eq.beliefs.mu(s) - mu_hat)))

    return VerificationReport.from_violations(violations)


def verify_extended_d1(
    profile: PolicyProfile,
    eq: SubgameEquilibrium,
    params: MarketParams,
    grid: DeviationGrid,
    tol: float = DEFAULT_TOL,
) -> VerificationReport:
    """Flag beliefs at unsent signals that put weight on a D1-excluded type."""
    _check_inputs(profile, eq, grid)
    violations: list[Violation] = []
    sent = eq.strategy.sent_signals(profile)
    for s in profile.signals():
        if s in sent:
            continue
        sets = {t: d1_wage_sets(profile, eq, s, t, params, tol) for t in (LOW, HIGH)}
        for excluded, other in ((LOW, HIGH), (HIGH, LOW)):
            if not strictly_included(sets[excluded].weak, sets[other].strict, tol):
                continue
            weight = eq.beliefs.mu(s) if excluded == HIGH else 1.0 - eq.beliefs.mu(s)
            if weight > tol:
                gap = sets[excluded].weak.lower - sets[other].strict.lower
                violations.append(
                    Violation("d1_belief", s, gap, f"belief puts {weight} on excluded type {excluded}")
                )
    return VerificationReport.from_violations(violations)


def _d1_belief_for_unsent(
    payoffs: dict[TypeLabel, float],
    fee: float,
    min_effort: float,
    params: MarketParams,
    tol: float,
) -> float:
    """Punishing belief at an unsent signal, respecting forced D1 exclusions."""
    sets = {}
    for t in (LOW, HIGH):
        thr = payoffs[t] + fee + params.cost.cost(t, min_effort)
        sets[t] = _wage_sets_from_threshold(thr, params, tol)
    if strictly_included(sets[LOW].weak, sets[HIGH].strict, tol):
        return 1.0
    return 0.0


def check_minimality(
    profile: PolicyProfile,
    eq: SubgameEquilibrium,
    params: MarketParams,
    grid: DeviationGrid | None = None,
    tol: float = DEFAULT_TOL,
) -> VerificationReport:
    """Flag schools whose unsent messages are strategically removable.

    A school fails when replacing its policy by the coarsest sent-agreeing
    one (reduce_minimal) still supports the same on-path outcome as a refined
    equilibrium of the reduced subgame.  When the merge would hand some type
    a profitable deviation (the usual reason an unsent band exists at all),
    the retained partition is necessary and the school passes.
    """
    violations: list[Violation] = []
    sent = eq.strategy.sent_signals(profile)
    for i, policy in enumerate(profile):
        sent_i = {s.message for s in sent if s.school == i}
        if not sent_i:
            # Unattended school: the base band stands in as the one kept message.
            sent_i = {policy.monitoring.message_of(0.0)}
        reduced = reduce_minimal(policy.monitoring, sent_i)
        if reduced == policy.monitoring:
            continue
        red_profile = profile.replace(i, Policy(fee=policy.fee, monitoring=reduced))
        red_eq = _remap_equilibrium(red_profile, eq, params, tol)
        red_grid = DeviationGrid.for_profile(
            red_profile,
            params,
            n_points=len(grid.effort_grid) if grid is not None else 21,
        )
        ok = (
            verify_pbe(red_profile, red_eq, params, red_grid, tol).passed
            and verify_extended_d1(red_profile, red_eq, params, red_grid, tol).passed
        )
        if ok:
            violations.append(
                Violation(
                    "minimality",
                    Signal(i, reduced.messages[0]),
                    float(len(policy.monitoring.messages) - len(reduced.messages)),
                    f"school {i} supports the same outcome with {len(reduced.messages)} messages",
                )
            )
    return VerificationReport.from_violations(violations)


def _remap_equilibrium(
    red_profile: PolicyProfile,
    eq: SubgameEquilibrium,
    params: MarketParams,
    tol: float,
) -> SubgameEquilibrium:
    """Carry an outcome onto a reduced profile: same play, same sent wages,
    Bayes beliefs on path, punishing D1-consistent beliefs off path."""
    strategy = eq.strategy
    payoffs = {LOW: eq.payoff_L, HIGH: eq.payoff_H}
    mass_high = strategy.signal_mass(red_profile, HIGH)
    mass_low = strategy.signal_mass(red_profile, LOW)
    beliefs: dict[Signal, float] = {}
    offers: dict[Signal, float | None] = {}
    for s in red_profile.signals():
        r = params.lam * mass_high.get(s, 0.0)
        q = (1.0 - params.lam) * mass_low.get(s, 0.0)
        if r + q > 0.0:
            mu = r / (r + q)
        else:
            mu = _d1_belief_for_unsent(
                payoffs, red_profile[s.school].fee, red_profile.min_effort(s), params, tol
            )
        beliefs[s] = mu
        posterior = mu * params.theta_H + (1.0 - mu) * params.theta_L
        offers[s] = posterior if posterior >= 0.0 else None
    return SubgameEquilibrium(
        profile=red_profile,
        strategy=strategy,
        wages=WageSchedule(offers=offers),
        beliefs=BeliefSystem(mu_high=beliefs),
        payoff_L=eq.payoff_L,
        payoff_H=eq.payoff_H,
        construction_tag=eq.construction_tag,
    )


# ---------------------------------------------------------------------------
# Brute-force oracle
# ---------------------------------------------------------------------------

_Action = tuple[object, float]  # (school index or OUTSIDE, effort)


def _candidate_actions(profile: PolicyProfile) -> list[_Action]:
    actions: list[_Action] = [(OUTSIDE, 0.0)]
    for i, policy in enumerate(profile):
        actions.extend((i, start) for start in policy.monitoring.band_starts())
    return actions


def _action_signal(profile: PolicyProfile, a: _Action) -> Signal | None:
    return None if a[0] is OUTSIDE else profile.signal_of(a[0], a[1])


def _posterior_income(r_mass: float, q_mass: float, params: MarketParams) -> float:
    w = (params.lam * r_mass * params.theta_H + (1.0 - params.lam) * q_mass * params.theta_L) / (
        params.lam * r_mass + (1.0 - params.lam) * q_mass
    )
    return max(w, 0.0)


def _ratio_for_wage(w: float, params: MarketParams) -> float | None:
    """(1-lam)Q / (lam R) ratio making the pooled posterior equal w."""
    if not params.theta_L < w < params.theta_H:
        return None
    return (params.theta_H - w) / (w - params.theta_L)


def _solve_weights(
    profile: PolicyProfile,
    params: MarketParams,
    sup_h: tuple[_Action, ...],
    sup_l: tuple[_Action, ...],
    tol: float,
) -> list[tuple[tuple[float, ...], tuple[float, ...]]]:
    """Mixing weights making both types indifferent across their supports.

    Closed-form throughout: an indifference condition either involves no
    pooled signal (a knife-edge equality check, weights then uniform) or pins
    the pooled wage, which the wage identity inverts into the weight.
    Knife-edge families (both types mixing through the same pooled signal)
    are emitted only at a deterministic symmetric representative.
    """
    sig_h = [_action_signal(profile, a) for a in sup_h]
    sig_l = [_action_signal(profile, a) for a in sup_l]
    if len(sup_h) == 2 and sig_h[0] == sig_h[1]:
        return []
    if len(sup_l) == 2 and sig_l[0] == sig_l[1]:
        return []
    shared = [s for s in sig_h if s is not None and s in sig_l]
    cf = params.cost

    def outlay(t: TypeLabel, a: _Action) -> float:
        if a[0] is OUTSIDE:
            return 0.0
        return profile[a[0]].fee + cf.cost(t, a[1])

    def known_income(s: Signal | None, for_h: bool) -> float:
        # income at a signal not pooled between the two types
        if s is None:
            return 0.0
        return params.theta_H if for_h else max(params.theta_L, 0.0)

    # -- at most one unknown -------------------------------------------------
    if len(sup_h) == 1 and len(sup_l) == 1:
        return [((1.0,), (1.0,))]

    if (len(sup_h) == 2) != (len(sup_l) == 2):
        mixer_is_h = len(sup_h) == 2
        sup_m, sig_m = (sup_h, sig_h) if mixer_is_h else (sup_l, sig_l)
        t_m: TypeLabel = HIGH if mixer_is_h else LOW
        pure_sig = sig_h[0] if not mixer_is_h else sig_l[0]
        pooled_idx = [k for k in range(2) if sig_m[k] is not None and sig_m[k] == pure_sig]
        if not pooled_idx:
            # both incomes known: pure equality check, weights free -> uniform
            pays = [known_income(sig_m[k], mixer_is_h) - outlay(t_m, sup_m[k]) for k in range(2)]
            if abs(pays[0] - pays[1]) > tol:
                return []
            w = (0.5, 0.5)
            return [(w, (1.0,)) if mixer_is_h else ((1.0,), w)]
        k = pooled_idx[0]
        other = 1 - k
        u_other = known_income(sig_m[other], mixer_is_h) - outlay(t_m, sup_m[other])
        target = u_other + outlay(t_m, sup_m[k])
        ratio = _ratio_for_wage(target, params)
        if ratio is None or target <= 0.0:
            return []
        if mixer_is_h:
            # pooled mass: R = p (weight on pooled action), Q = 1
            p = (1.0 - params.lam) / (params.lam * ratio)
        else:
            p = ratio * params.lam / (1.0 - params.lam)
        if not _EDGE < p < 1.0 - _EDGE:
            return []
        w2 = (p, 1.0 - p) if k == 0 else (1.0 - p, p)
        return [(w2, (1.0,)) if mixer_is_h else ((1.0,), w2)]

    # -- both mix --------------------------------------------------------------
    if not shared:
        for t_m, sup_m, for_h in ((HIGH, sup_h, True), (LOW, sup_l, False)):
            pays = [known_income(_action_signal(profile, a), for_h) - outlay(t_m, a) for a in sup_m]
            if abs(pays[0] - pays[1]) > tol:
                return []
        return [((0.5, 0.5), (0.5, 0.5))]
    if len(shared) == 1:
        s = shared[0]
        kh = sig_h.index(s)
        kl = sig_l.index(s)
        target_h = known_income(sig_h[1 - kh], True) - outlay(HIGH, sup_h[1 - kh]) + outlay(HIGH, sup_h[kh])
        target_l = known_income(sig_l[1 - kl], False) - outlay(LOW, sup_l[1 - kl]) + outlay(LOW, sup_l[kl])
        if abs(target_h - target_l) > tol:
            return []
        ratio = _ratio_for_wage(target_h, params)
        if ratio is None or target_h <= 0.0:
            return []
        # one ratio constraint, one degree of freedom: symmetric representative
        for r_weight in (0.5,):
            q_weight = ratio * params.lam * r_weight / (1.0 - params.lam)
            if _EDGE < q_weight < 1.0 - _EDGE:
                wh = (r_weight, 1.0 - r_weight) if kh == 0 else (1.0 - r_weight, r_weight)
                wl = (q_weight, 1.0 - q_weight) if kl == 0 else (1.0 - q_weight, q_weight)
                return [(wh, wl)]
        return []
    # two pooled signals: only the equal-mass symmetric member survives strict
    # decreasing differences (equal efforts, equal fees); try it and let the
    # verifier be the judge.
    wh, wl = (0.5, 0.5), (0.5, 0.5)
    incomes: dict[Signal, float] = {}
    for s in shared:
        r = wh[sig_h.index(s)]
        q = wl[sig_l.index(s)]
        incomes[s] = _posterior_income(r, q, params)
    for t_m, sup_m, sigs, for_h in ((HIGH, sup_h, sig_h, True), (LOW, sup_l, sig_l, False)):
        pays = []
        for k in range(2):
            inc = incomes.get(sigs[k], known_income(sigs[k], for_h)) if sigs[k] is not None else 0.0
            pays.append(inc - outlay(t_m, sup_m[k]))
        if abs(pays[0] - pays[1]) > tol:
            return []
    return [(wh, wl)]


def _assemble_candidate(
    profile: PolicyProfile,
    params: MarketParams,
    sup_h: tuple[_Action, ...],
    weights_h: tuple[float, ...],
    sup_l: tuple[_Action, ...],
    weights_l: tuple[float, ...],
    tol: float,
) -> SubgameEquilibrium | None:
    high = tuple(StrategyAtom(a[0], a[1], w) for a, w in zip(sup_h, weights_h))
    low = tuple(StrategyAtom(a[0], a[1], w) for a, w in zip(sup_l, weights_l))
    strategy = PopulationStrategy(low=low, high=high)
    mass_high = strategy.signal_mass(profile, HIGH)
    mass_low = strategy.signal_mass(profile, LOW)

    incomes: dict[Signal, float] = {}
    beliefs: dict[Signal, float] = {}
    offers: dict[Signal, float | None] = {}
    for s in set(mass_high) | set(mass_low):
        r = params.lam * mass_high.get(s, 0.0)
        q = (1.0 - params.lam) * mass_low.get(s, 0.0)
        mu = r / (r + q)
        posterior = mu * params.theta_H + (1.0 - mu) * params.theta_L
        beliefs[s] = mu
        offers[s] = posterior if posterior >= 0.0 else None
        incomes[s] = max(posterior, 0.0)

    def pay(t: TypeLabel, a: _Action) -> float:
        if a[0] is OUTSIDE:
            return 0.0
        s = _action_signal(profile, a)
        return incomes[s] - profile[a[0]].fee - params.cost.cost(t, a[1])

    payoffs: dict[TypeLabel, float] = {}
    for t, sup in ((LOW, sup_l), (HIGH, sup_h)):
        vals = [pay(t, a) for a in sup]
        if max(vals) - min(vals) > max(tol, 1e-9):
            return None
        payoffs[t] = vals[0]

    for s in profile.signals():
        if s in beliefs:
            continue
        mu = _d1_belief_for_unsent(payoffs, profile[s.school].fee, profile.min_effort(s), params, tol)
        posterior = mu * params.theta_H + (1.0 - mu) * params.theta_L
        beliefs[s] = mu
        offers[s] = posterior if posterior >= 0.0 else None

    pooled = any(s in mass_low for s in mass_high)
    return SubgameEquilibrium(
        profile=profile,
        strategy=strategy,
        wages=WageSchedule(offers=offers),
        beliefs=BeliefSystem(mu_high=beliefs),
        payoff_L=payoffs[LOW],
        payoff_H=payoffs[HIGH],
        construction_tag="semi_pooling" if pooled else "separating",
    )


def _outcome_signature(eq: SubgameEquilibrium, profile: PolicyProfile) -> tuple:
    def side(t: TypeLabel):
        atoms = sorted(
            (
                (-1 if a.school is OUTSIDE else a.school, round(a.effort, 9), round(a.prob, 9))
                for a in eq.strategy.atoms(t)
                if a.prob > 1e-9
            ),
        )
        return tuple(atoms)

    sent = sorted(eq.strategy.sent_signals(profile), key=lambda s: (s.school, s.message))
    wages = tuple(
        (s.school, s.message, None if eq.wages.offer(s) is None else round(eq.wages.offer(s), 9))
        for s in sent
    )
    return (side(LOW), side(HIGH), wages)


def brute_force_equilibria(
    profile: PolicyProfile,
    params: MarketParams,
    grids: DeviationGrid,
    support_cap: int = 2,
    tol: float = DEFAULT_TOL,
) -> list[SubgameEquilibrium]:
    """Enumerate refined subgame equilibria with small supports.

    Candidate actions are the outside option plus every (school, band-minimum
    effort) pair; supports hold at most `support_cap` (<= 2) actions per type
    (the outside option counts as one).  Output order is lexicographic in the
    candidate supports; outcome-equivalent duplicates are dropped.
    """
    if len(grids.effort_grid) > 25:
        raise ResourceError(
            f"effort grid has {len(grids.effort_grid)} points; the oracle caps at 25"
        )
    if support_cap > 2:
        raise InputError("support_cap beyond 2 actions per type is unsupported")
    if support_cap < 1:
        raise InputError("support_cap must be at least 1")
    if any(p.fee > params.theta_H for p in profile):
        return []
    actions = _candidate_actions(profile)
    idx_supports = [
        combo
        for size in range(1, support_cap + 1)
        for combo in itertools.combinations(range(len(actions)), size)
    ]
    results: list[SubgameEquilibrium] = []
    seen: set[tuple] = set()
    for combo_h in idx_supports:
        sup_h = tuple(actions[k] for k in combo_h)
        for combo_l in idx_supports:
            sup_l = tuple(actions[k] for k in combo_l)
            for weights_h, weights_l in _solve_weights(profile, params, sup_h, sup_l, tol):
                eq = _assemble_candidate(profile, params, sup_h, weights_h, sup_l, weights_l, tol)
                if eq is None:
                    continue
                if not verify_pbe(profile, eq, params, grids, tol).passed:
                    continue
                if not verify_extended_d1(profile, eq, params, grids, tol).passed:
                    continue
                sig = _outcome_signature(eq, profile)
                if sig in seen:
                    continue
                seen.add(sig)
                results.append(eq)
    return results


def outcome_equivalent(
    a: SubgameEquilibrium,
    b: SubgameEquilibrium,
    profile: PolicyProfile,
    share_tol: float = 1e-6,
    effort_tol: float = 1e-9,
) -> bool:
    """Same enrollment shares, effort supports, and on-path wages.

    Off-path beliefs (and hence off-path wages) are allowed to differ.
    """
    for t in (LOW, HIGH):
        for i in range(profile.n):
            if abs(a.strategy.enrollment(t, i) - b.strategy.enrollment(t, i)) > share_tol:
                return False
        atoms_a = sorted(
            ((x.school if x.school is not OUTSIDE else -1, x.effort, x.prob) for x in a.strategy.atoms(t) if x.prob > share_tol)
        )
        atoms_b = sorted(
            ((x.school if x.school is not OUTSIDE else -1, x.effort, x.prob) for x in b.strategy.atoms(t) if x.prob > share_tol)
        )
        if len(atoms_a) != len(atoms_b):
            return False
        for (sa, ea, pa), (sb, eb, pb) in zip(atoms_a, atoms_b):
            if sa != sb or abs(ea - eb) > effort_tol or abs(pa - pb) > share_tol:
                return False
    sent_a = a.strategy.sent_signals(profile)
    sent_b = b.strategy.sent_signals(profile)
    if sent_a != sent_b:
        return False
    for s in sent_a:
        wa, wb = a.wages.offer(s), b.wages.offer(s)
        if (wa is None) != (wb is None):
            return False
        if wa is not None and abs(wa - wb) > share_tol:
            return False
    return True
