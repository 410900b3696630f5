"""Full-game solvers: who designs what signal, at what fee, and who gains.

Closed-form solutions for the policy-design game on top of the subgame
machinery:

* a monopolist extracts the whole surplus with an uninformative policy
  (fee = mean productivity under sorting, fee = theta_H under screening);
* under competition the focal outcome is the cheapest separating one: zero
  fees, a single cutoff at the separating effort, high types earn the top
  wage; alongside it live semi-pooling outcomes where part of the high types
  hide in the crowd at a mixed wage;
* fee caps / credit constraints drag the monopolist into pooling with a
  calculable fraction of low types, and into whole families of equilibria
  when the cap is tight;
* a deviation audit replays school deviations (grid policies plus the
  undercut / surplus-extraction / reveal templates) against the canonical
  continuation play and certifies the absence of profitable ones.

Welfare is expected productivity of the employed minus effort burned; fees
and wages are transfers and cancel out of the total.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Literal

from .errors import InputError, InvariantViolation
from .market import (
    HIGH,
    LOW,
    DEFAULT_TOL,
    MarketParams,
    TypeLabel,
    expected_type,
    max_welfare,
    riley_effort,
)
from .monitoring import Policy, PolicyProfile, Signal, StepMonitoringPolicy
from .refinement import DeviationGrid, brute_force_equilibria
from .subgame import (
    OUTSIDE,
    BeliefSystem,
    PopulationStrategy,
    StrategyAtom,
    SubgameEquilibrium,
    WageSchedule,
    construct_epbe,
)

OutcomeLabel = Literal[
    "monopoly_sorting",
    "monopoly_screening",
    "monopoly_credit",
    "riley",
    "semipooling_zero_fee",
    "semipooling_with_fee",
    "credit_family",
]


@dataclass(frozen=True)
class EquilibriumOutcome:
    """An equilibrium of the full game, reduced to its observable outcome."""

    profile: PolicyProfile
    on_path: PopulationStrategy
    wages: WageSchedule
    profits: tuple[float, ...]
    enrollment: tuple[float, float]  # (low, high)
    employment: tuple[float, float]  # (low, high)
    payoffs: tuple[float, float]  # (U_L, U_H)
    label: str
    boundary: bool = False  # member sits on a weak-inequality family edge

    @property
    def fee(self) -> float:
        return self.profile[0].fee

    def payoff(self, type_label: TypeLabel) -> float:
        return self.payoffs[1] if type_label == HIGH else self.payoffs[0]

    def to_subgame(self, params: MarketParams, tag: str | None = None) -> SubgameEquilibrium:
        """View the outcome as a subgame bundle (beliefs recovered from wages)."""
        spread = params.theta_H - params.theta_L
        beliefs = {}
        for s, w in self.wages.offers.items():
            if w is None:
                beliefs[s] = 0.0
            else:
                beliefs[s] = min(max((w - params.theta_L) / spread, 0.0), 1.0)
        if tag is None:
            tag = "semi_pooling" if self.label.startswith(("semipooling", "monopoly_sorting", "monopoly_credit", "credit")) else "separating"
        return SubgameEquilibrium(
            profile=self.profile,
            strategy=self.on_path,
            wages=self.wages,
            beliefs=BeliefSystem(mu_high=beliefs),
            payoff_L=self.payoffs[0],
            payoff_H=self.payoffs[1],
            construction_tag=tag,
        )

    def to_dict(self) -> dict:
        return {
            "profile": self.profile.to_list(),
            "on_path": self.on_path.to_dict(),
            "wages": self.wages.to_dict(),
            "profits": list(self.profits),
            "enrollment": {"L": self.enrollment[0], "H": self.enrollment[1]},
            "employment": {"L": self.employment[0], "H": self.employment[1]},
            "payoffs": {"L": self.payoffs[0], "H": self.payoffs[1]},
            "label": self.label,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "EquilibriumOutcome":
        try:
            return cls(
                profile=PolicyProfile.from_list(data["profile"]),
                on_path=PopulationStrategy.from_dict(data["on_path"]),
                wages=WageSchedule.from_dict(data["wages"]),
                profits=tuple(float(x) for x in data["profits"]),
                enrollment=(float(data["enrollment"]["L"]), float(data["enrollment"]["H"])),
                employment=(float(data["employment"]["L"]), float(data["employment"]["H"])),
                payoffs=(float(data["payoffs"]["L"]), float(data["payoffs"]["H"])),
                label=str(data["label"]),
            )
        except KeyError as exc:
            raise InputError(f"outcome missing field {exc.args[0]!r}") from exc


def _assemble_outcome(
    profile: PolicyProfile,
    params: MarketParams,
    strategy: PopulationStrategy,
    wages: WageSchedule,
    payoffs: tuple[float, float],
    label: str,
    boundary: bool = False,
) -> EquilibriumOutcome:
    profits = []
    for i, policy in enumerate(profile):
        mass = params.lam * strategy.enrollment(HIGH, i) + (1.0 - params.lam) * strategy.enrollment(LOW, i)
        profits.append(policy.fee * mass)
    employment = []
    for t in (LOW, HIGH):
        employed = 0.0
        for a in strategy.atoms(t):
            if a.school is OUTSIDE:
                continue
            if wages.offer(profile.signal_of(a.school, a.effort)) is not None:
                employed += a.prob
        employment.append(employed)
    return EquilibriumOutcome(
        profile=profile,
        on_path=strategy,
        wages=wages,
        profits=tuple(profits),
        enrollment=(strategy.enrollment_total(LOW), strategy.enrollment_total(HIGH)),
        employment=(employment[0], employment[1]),
        payoffs=payoffs,
        label=label,
        boundary=boundary,
    )


def _offer(posterior: float) -> float | None:
    return posterior if posterior >= 0.0 else None


# ---------------------------------------------------------------------------
# Monopoly
# ---------------------------------------------------------------------------


def monopoly_rpbe(params: MarketParams, tol: float = DEFAULT_TOL) -> EquilibriumOutcome:
    """Unconstrained monopoly: uninformative policy, full surplus extraction.

    Sorting: fee = mean productivity, everyone enrolls at zero effort.
    Screening: fee = theta_H, only high types enroll.  Welfare is maximal in
    both cases and the school keeps all of it.
    """
    if params.n_schools != 1:
        raise InputError(f"monopoly solver needs n_schools == 1, got {params.n_schools}")
    mono = StepMonitoringPolicy.uninformative()
    sig = Signal(0, mono.messages[0])
    if params.is_sorting:
        fee = expected_type(params)
        profile = PolicyProfile.of(Policy(fee=fee, monitoring=mono))
        strategy = PopulationStrategy(
            low=(StrategyAtom(0, 0.0, 1.0),), high=(StrategyAtom(0, 0.0, 1.0),)
        )
        wages = WageSchedule(offers={sig: fee})
        return _assemble_outcome(profile, params, strategy, wages, (0.0, 0.0), "monopoly_sorting")
    fee = params.theta_H
    profile = PolicyProfile.of(Policy(fee=fee, monitoring=mono))
    strategy = PopulationStrategy(
        low=(StrategyAtom(OUTSIDE, 0.0, 1.0),), high=(StrategyAtom(0, 0.0, 1.0),)
    )
    wages = WageSchedule(offers={sig: params.theta_H})
    return _assemble_outcome(profile, params, strategy, wages, (0.0, 0.0), "monopoly_screening")


@dataclass(frozen=True)
class CreditFamily:
    """Equilibrium family under a binding fee cap K < mean productivity.

    Every member charges fee K, enrolls everybody, and earns profit K.  The
    members differ in how much effort gets burned:

    * the full-pooling branch pins all students at a cutoff effort
      e_l in [0, e_prime], paid the mean-productivity wage;
    * the partial-pooling branch lets high types split between the pooled
      effort and a higher threshold paid the top wage, with the pooled wage
      set by the mixing weight.

    e_prime solves K + c(L, e_prime) = mean productivity (the largest cutoff
    leaving low types willing to enroll); e_limit additionally respects the
    low types' option to drop to the below-cutoff wage, and coincides with
    e_prime whenever theta_L <= K.
    """

    params: MarketParams
    fee: float
    e_prime: float
    e_limit: float

    def zero_effort_member(self) -> EquilibriumOutcome:
        return self.pooling_member(0.0)

    def pooling_member(self, e_l: float, tol: float = DEFAULT_TOL) -> EquilibriumOutcome:
        """All students exert e_l for the mean wage; e_l in [0, e_limit]."""
        params = self.params
        if e_l < -tol or e_l > self.e_limit + tol:
            raise InputError(f"pooling cutoff {e_l} outside family range [0, {self.e_limit}]")
        e_l = max(e_l, 0.0)
        mean = expected_type(params)
        if e_l > 0:
            mon = StepMonitoringPolicy.cutoff(e_l, below=0, above=1)
            offers = {Signal(0, 0): _offer(params.theta_L), Signal(0, 1): mean}
            atom_effort = e_l
        else:
            mon = StepMonitoringPolicy.uninformative()
            offers = {Signal(0, 0): mean}
            atom_effort = 0.0
        profile = PolicyProfile.of(Policy(fee=self.fee, monitoring=mon))
        strategy = PopulationStrategy(
            low=(StrategyAtom(0, atom_effort, 1.0),), high=(StrategyAtom(0, atom_effort, 1.0),)
        )
        payoffs = (
            mean - self.fee - params.cost.cost(LOW, e_l),
            mean - self.fee - params.cost.cost(HIGH, e_l),
        )
        boundary = abs(e_l - self.e_limit) <= tol
        return _assemble_outcome(
            profile, params, strategy, WageSchedule(offers=offers), payoffs, "credit_family", boundary
        )

    def partial_member(self, e_l: float, q_h: float, tol: float = DEFAULT_TOL) -> EquilibriumOutcome | None:
        """High types mix between the pooled effort e_l and a top threshold.

        Pooled wage w_l follows from the mix; the top threshold e_h makes
        high types exactly indifferent.  Returns None when the member fails
        feasibility (low types must clear the fee-plus-effort outlay weakly).
        """
        params = self.params
        if not 0.0 < q_h < 1.0:
            raise InputError(f"q_h must lie strictly in (0, 1), got {q_h}")
        if e_l < 0:
            raise InputError(f"pooled effort must be nonnegative, got {e_l}")
        cf = params.cost
        w_l = _mixed_wage(q_h, params)
        slack = w_l - (self.fee + cf.cost(LOW, e_l))
        if slack < -tol:
            return None
        if params.is_sorting and w_l - cf.cost(LOW, e_l) < params.theta_L - tol:
            return None
        e_h = cf.inverse(HIGH, params.theta_H - w_l + cf.cost(HIGH, e_l), tol)
        if e_h <= e_l + tol:
            return None
        if e_l > 0:
            mon = StepMonitoringPolicy(thresholds=(e_l, e_h), messages=(0, 1, 2))
            low_sig, top_sig = Signal(0, 1), Signal(0, 2)
            offers = {Signal(0, 0): _offer(params.theta_L), low_sig: w_l, top_sig: params.theta_H}
        else:
            mon = StepMonitoringPolicy.cutoff(e_h, below=0, above=1)
            low_sig, top_sig = Signal(0, 0), Signal(0, 1)
            offers = {low_sig: w_l, top_sig: params.theta_H}
        profile = PolicyProfile.of(Policy(fee=self.fee, monitoring=mon))
        strategy = PopulationStrategy(
            low=(StrategyAtom(0, e_l, 1.0),),
            high=(StrategyAtom(0, e_l, q_h), StrategyAtom(0, e_h, 1.0 - q_h)),
        )
        payoffs = (
            w_l - self.fee - cf.cost(LOW, e_l),
            params.theta_H - self.fee - cf.cost(HIGH, e_h),
        )
        return _assemble_outcome(
            profile,
            params,
            strategy,
            WageSchedule(offers=offers),
            payoffs,
            "credit_family",
            boundary=abs(slack) <= tol,
        )

    def sample(self, num: int = 5) -> list[EquilibriumOutcome]:
        """Deterministic spread of members across both branches."""
        members = [self.zero_effort_member()]
        for k in range(1, num + 1):
            members.append(self.pooling_member(self.e_limit * k / num))
        for k in range(1, num):
            m = self.partial_member(0.0, k / num)
            if m is not None:
                members.append(m)
        return members


def credit_monopoly_rpbe(
    params: MarketParams, tol: float = DEFAULT_TOL
) -> EquilibriumOutcome | CreditFamily:
    """Monopoly under a fee cap K.

    Slack cap (K >= theta_H, or sorting with K >= mean) falls back to the
    unconstrained outcome.  Screening with K in [mean, theta_H) gives the
    unique capped-pooling outcome: fee K, every high type plus the fraction
    of low types that drags the pooled wage down to exactly K.  A tight cap
    (K < mean) yields the :class:`CreditFamily` continuum.
    """
    if params.n_schools != 1:
        raise InputError(f"credit monopoly solver needs n_schools == 1, got {params.n_schools}")
    if params.credit_cap is None:
        raise InputError("params.credit_cap must be set")
    cap = params.credit_cap
    if cap <= 0:
        raise InputError(f"credit cap must be positive, got {cap}")
    if cap >= params.theta_H:
        return monopoly_rpbe(params.with_(credit_cap=None), tol)
    mean = expected_type(params)
    if cap >= mean:
        if params.is_sorting:
            return monopoly_rpbe(params.with_(credit_cap=None), tol)
        alpha = params.lam * (params.theta_H - cap) / ((1.0 - params.lam) * (cap - params.theta_L))
        mono = StepMonitoringPolicy.uninformative()
        profile = PolicyProfile.of(Policy(fee=cap, monitoring=mono))
        sig = Signal(0, mono.messages[0])
        strategy = PopulationStrategy(
            low=(StrategyAtom(0, 0.0, alpha), StrategyAtom(OUTSIDE, 0.0, 1.0 - alpha)),
            high=(StrategyAtom(0, 0.0, 1.0),),
        )
        wages = WageSchedule(offers={sig: cap})
        return _assemble_outcome(profile, params, strategy, wages, (0.0, 0.0), "monopoly_credit")
    cf = params.cost
    e_prime = cf.inverse(LOW, mean - cap, tol)
    cap_eff = max(cap, params.theta_L, 0.0)
    e_limit = e_prime if cap_eff == cap else cf.inverse(LOW, mean - cap_eff, tol)
    return CreditFamily(params=params, fee=cap, e_prime=e_prime, e_limit=e_limit)


# ---------------------------------------------------------------------------
# Competition
# ---------------------------------------------------------------------------

FierceReason = Literal["n_exceeds_inv_lambda", "n_thetaL_exceeds_mean", "losses_dominate"]


@dataclass(frozen=True)
class FierceVerdict:
    fierce: bool
    reasons: tuple[str, ...]


def is_fierce(params: MarketParams, n: int) -> FierceVerdict:
    """Competition intensity test; any single condition suffices.

    (i) enough schools that grabbing all high types beats an equal split,
    (ii) low types alone are worth more than the pooled pie (sorting),
    (iii) low types are so destructive that pooled fees cannot stay positive
    (screening).  Conditions are evaluated literally regardless of regime.
    """
    if n < 2:
        raise InputError(f"fierceness is defined for n >= 2 schools, got {n}")
    reasons = []
    if n > 1.0 / params.lam:
        reasons.append("n_exceeds_inv_lambda")
    if n * params.theta_L > expected_type(params):
        reasons.append("n_thetaL_exceeds_mean")
    if -(n - 1) * params.theta_L >= params.theta_H:
        reasons.append("losses_dominate")
    return FierceVerdict(fierce=bool(reasons), reasons=tuple(reasons))


def riley_rpbe(params: MarketParams, n: int, tol: float = DEFAULT_TOL) -> EquilibriumOutcome:
    """Cheapest separating outcome under competition: zero fees everywhere.

    Each school posts a two-message cutoff at the separating effort; high
    types split evenly and earn theta_H; low types exert nothing (enrolled
    under sorting, outside under screening) and schools earn nothing.
    """
    if n < 2:
        raise InputError(f"competition solver needs n >= 2 schools, got {n}")
    e_r = riley_effort(params, tol)
    mon = StepMonitoringPolicy.cutoff(e_r, below=0, above=1)
    profile = PolicyProfile.symmetric(Policy(fee=0.0, monitoring=mon), n)
    share = 1.0 / n
    high = tuple(StrategyAtom(i, e_r, share) for i in range(n))
    if params.is_sorting:
        low = tuple(StrategyAtom(i, 0.0, share) for i in range(n))
        payoff_l = params.theta_L
    else:
        low = (StrategyAtom(OUTSIDE, 0.0, 1.0),)
        payoff_l = 0.0
    offers = {}
    for i in range(n):
        offers[Signal(i, 0)] = _offer(params.theta_L)
        offers[Signal(i, 1)] = params.theta_H
    strategy = PopulationStrategy(low=low, high=high)
    payoffs = (payoff_l, params.theta_H - params.cost.cost(HIGH, e_r))
    return _assemble_outcome(profile, params, strategy, WageSchedule(offers=offers), payoffs, "riley")


def _mixed_wage(q_h: float, params: MarketParams) -> float:
    """Wage of the pooled message when a fraction q_h of high types hides in it."""
    num = params.lam * q_h * params.theta_H + (1.0 - params.lam) * params.theta_L
    return num / (params.lam * q_h + 1.0 - params.lam)


def _q_h_for_wage(w_l: float, params: MarketParams) -> float:
    return (1.0 - params.lam) * (w_l - params.theta_L) / (params.lam * (params.theta_H - w_l))


@dataclass(frozen=True)
class BoundCertificate:
    """Why a requested family is empty, with the binding bound spelled out."""

    reason: str
    sup_pooled_wage: float
    required_pooled_wage: float


@dataclass(frozen=True)
class FamilyResult:
    """List-like container of family members plus an emptiness certificate."""

    members: tuple[EquilibriumOutcome, ...]
    certificate: BoundCertificate | None = None

    def __iter__(self) -> Iterator[EquilibriumOutcome]:
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __bool__(self) -> bool:
        return bool(self.members)

    def __getitem__(self, k: int) -> EquilibriumOutcome:
        return self.members[k]


def _semipooling_outcome(
    params: MarketParams,
    n: int,
    fee: float,
    e_l: float,
    e_h: float,
    q_h: float,
    w_l: float,
    label: str,
    tol: float,
    boundary: bool = False,
) -> EquilibriumOutcome:
    if e_l > 0:
        mon = StepMonitoringPolicy(thresholds=(e_l, e_h), messages=(0, 1, 2))
        mid_msg, top_msg = 1, 2
    else:
        mon = StepMonitoringPolicy.cutoff(e_h, below=0, above=1)
        mid_msg, top_msg = 0, 1
    profile = PolicyProfile.symmetric(Policy(fee=fee, monitoring=mon), n)
    share = 1.0 / n
    low = tuple(StrategyAtom(i, e_l, share) for i in range(n))
    high = tuple(
        atom
        for i in range(n)
        for atom in (StrategyAtom(i, e_l, q_h * share), StrategyAtom(i, e_h, (1.0 - q_h) * share))
    )
    offers = {}
    for i in range(n):
        if e_l > 0:
            offers[Signal(i, 0)] = _offer(params.theta_L)
        offers[Signal(i, mid_msg)] = w_l
        offers[Signal(i, top_msg)] = params.theta_H
    strategy = PopulationStrategy(low=low, high=high)
    cf = params.cost
    payoffs = (w_l - fee - cf.cost(LOW, e_l), params.theta_H - fee - cf.cost(HIGH, e_h))
    return _assemble_outcome(
        profile, params, strategy, WageSchedule(offers=offers), payoffs, label, boundary
    )


def semipooling_family(
    params: MarketParams,
    n: int,
    variant: Literal["zero_fee", "with_fee"],
    e_l: float | None = None,
    q_h: float | None = None,
    fee: float | None = None,
    tol: float = DEFAULT_TOL,
) -> FamilyResult:
    """Symmetric semi-pooling outcome for one value of the free parameter.

    zero_fee: the top threshold is pinned at the separating effort; given
    q_h the pooled wage follows from the mix and the pooled effort from the
    high types' indifference (or the inverse map, given e_l).  with_fee:
    additionally requires the posted fee to lie in the mild-competition fee
    set and low types to be squeezed to exactly their outside payoff.

    Returns an empty result (with a bound certificate when the emptiness is
    structural) if no member satisfies the feasibility filters: pooled wage
    strictly between max(theta_L, 0) and theta_H, mixing weight strictly
    interior, pooled effort below the top threshold, and full enrollment
    worthwhile for low types.
    """
    if n < 2:
        raise InputError(f"competition family needs n >= 2 schools, got {n}")
    if (e_l is None) == (q_h is None):
        raise InputError("provide exactly one of e_l, q_h as the free parameter")
    cf = params.cost
    e_r = riley_effort(params, tol)
    floor = max(params.theta_L, 0.0)

    if variant == "zero_fee":
        fee_val = 0.0
        if fee not in (None, 0.0):
            raise InputError("zero_fee variant does not take a fee")
        required = params.theta_H - cf.cost(HIGH, e_r)
        sup_w = expected_type(params)
        if required >= sup_w - tol:
            return FamilyResult(
                members=(),
                certificate=BoundCertificate(
                    reason="pooled wage is capped by mean productivity below the "
                    "high types' separating payoff",
                    sup_pooled_wage=sup_w,
                    required_pooled_wage=required,
                ),
            )
        if q_h is not None:
            if not 0.0 < q_h < 1.0:
                raise InputError(f"q_h must lie strictly in (0, 1), got {q_h}")
            w_l = _mixed_wage(q_h, params)
            budget = w_l - required
            if budget < -tol:
                return FamilyResult(members=())
            e_l_val = cf.inverse(HIGH, max(budget, 0.0), tol) if budget > tol else 0.0
            q_val = q_h
        else:
            if e_l < 0 or e_l >= e_r:
                raise InputError(f"e_l must lie in [0, riley effort), got {e_l}")
            e_l_val = e_l
            w_l = required + cf.cost(HIGH, e_l_val)
            if not params.theta_L < w_l < params.theta_H:
                return FamilyResult(members=())
            q_val = _q_h_for_wage(w_l, params)
        e_h_val = e_r
        label = "semipooling_zero_fee"
    elif variant == "with_fee":
        if fee is None or fee <= 0:
            raise InputError("with_fee variant needs a positive fee")
        verdict = is_fierce(params, n)
        if verdict.fierce:
            return FamilyResult(
                members=(),
                certificate=BoundCertificate(
                    reason="fierce competition forces zero fees; no positive-fee member exists",
                    sup_pooled_wage=expected_type(params),
                    required_pooled_wage=float("inf"),
                ),
            )
        if not mild_fee_set(params, n).contains(fee):
            return FamilyResult(members=())
        fee_val = fee
        if q_h is not None:
            if not 0.0 < q_h < 1.0:
                raise InputError(f"q_h must lie strictly in (0, 1), got {q_h}")
            w_l = _mixed_wage(q_h, params)
            budget = w_l - fee_val  # low types end exactly at zero payoff
            if budget < -tol:
                return FamilyResult(members=())
            e_l_val = cf.inverse(LOW, max(budget, 0.0), tol) if budget > tol else 0.0
            q_val = q_h
        else:
            if e_l < 0:
                raise InputError(f"e_l must be nonnegative, got {e_l}")
            e_l_val = e_l
            w_l = fee_val + cf.cost(LOW, e_l_val)
            if not params.theta_L < w_l < params.theta_H:
                return FamilyResult(members=())
            q_val = _q_h_for_wage(w_l, params)
        e_h_val = cf.inverse(HIGH, params.theta_H - w_l + cf.cost(HIGH, e_l_val), tol)
        label = "semipooling_with_fee"
    else:
        raise InputError(f"unknown variant {variant!r}")

    low_payoff = w_l - fee_val - cf.cost(LOW, e_l_val)
    checks = (
        floor + tol < w_l < params.theta_H - tol,
        tol < q_val < 1.0 - tol,
        0.0 <= e_l_val < e_h_val - tol,
        low_payoff >= max(0.0, params.theta_L - fee_val) - tol,
    )
    if not all(checks):
        return FamilyResult(members=())
    boundary = abs(low_payoff - max(0.0, params.theta_L - fee_val)) <= tol
    member = _semipooling_outcome(
        params, n, fee_val, e_l_val, e_h_val, q_val, w_l, label, tol, boundary
    )
    return FamilyResult(members=(member,))


@dataclass(frozen=True)
class FeeInterval:
    lo: float
    hi: float
    closed_lo: bool = True
    closed_hi: bool = False

    def contains(self, f: float, tol: float = 0.0) -> bool:
        above = f >= self.lo - tol if self.closed_lo else f > self.lo + tol
        below = f <= self.hi + tol if self.closed_hi else f < self.hi - tol
        return above and below

    @property
    def empty(self) -> bool:
        if self.lo > self.hi:
            return True
        return self.lo == self.hi and not (self.closed_lo and self.closed_hi)


@dataclass(frozen=True)
class FeeSet:
    """Union of isolated fee points and fee intervals."""

    points: tuple[float, ...] = ()
    intervals: tuple[FeeInterval, ...] = ()

    def contains(self, f: float, tol: float = 0.0) -> bool:
        if any(abs(f - p) <= tol for p in self.points):
            return True
        return any(iv.contains(f, tol) for iv in self.intervals)

    def to_dict(self) -> dict:
        return {
            "points": list(self.points),
            "intervals": [
                {"lo": iv.lo, "hi": iv.hi, "closed_lo": iv.closed_lo, "closed_hi": iv.closed_hi}
                for iv in self.intervals
            ],
        }


def mild_fee_set(params: MarketParams, n: int) -> FeeSet:
    """Fees sustainable in a symmetric equilibrium with n competing schools.

    Fierce competition collapses the set to {0}.  Otherwise, under sorting
    the set is {0} together with [n*theta_L, min(theta_H, mean/(lam*n)));
    under screening it is the closed interval from 0 to the per-school share
    of the pooled pie, max((theta_H + (n-1)*theta_L)/n, 0).
    """
    if is_fierce(params, n).fierce:
        return FeeSet(points=(0.0,))
    if params.is_sorting:
        lo = n * params.theta_L
        hi = min(params.theta_H, expected_type(params) / (params.lam * n))
        iv = FeeInterval(lo=lo, hi=hi, closed_lo=True, closed_hi=False)
        return FeeSet(points=(0.0,), intervals=(iv,) if not iv.empty else ())
    hi = max((params.theta_H + (n - 1) * params.theta_L) / n, 0.0)
    if hi == 0.0:
        return FeeSet(points=(0.0,))
    return FeeSet(points=(), intervals=(FeeInterval(lo=0.0, hi=hi, closed_lo=True, closed_hi=True),))


def select_iis(
    family: list[EquilibriumOutcome] | FamilyResult, params: MarketParams, n: int
) -> EquilibriumOutcome:
    """Selection rule for fierce competition: keep the separating outcome.

    Requiring non-enrollees' play to depend on a deviating school only
    through enrollment composition removes every semi-pooling member, so
    the separating (riley-labelled) member must be present.
    """
    members = list(family)
    for m in members:
        if m.label == "riley":
            return m
    raise InvariantViolation(
        "family has no separating member; the separating outcome always exists, "
        "so the caller assembled the family incorrectly"
    )


# ---------------------------------------------------------------------------
# Welfare
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WelfareReport:
    productivity_term: float
    effort_waste: float
    total: float
    student_surplus: tuple[float, float]  # population-weighted (low, high)
    school_profit_total: float
    max_welfare: float

    def to_dict(self) -> dict:
        return {
            "productivity_term": self.productivity_term,
            "effort_waste": self.effort_waste,
            "total": self.total,
            "student_surplus": {"L": self.student_surplus[0], "H": self.student_surplus[1]},
            "school_profit_total": self.school_profit_total,
            "max_welfare": self.max_welfare,
        }


def welfare(outcome: EquilibriumOutcome, params: MarketParams) -> WelfareReport:
    """Productivity of the employed minus effort burned; transfers cancel."""
    prod = (
        params.lam * params.theta_H * outcome.employment[1]
        + (1.0 - params.lam) * params.theta_L * outcome.employment[0]
    )
    waste = 0.0
    for t, weight in ((LOW, 1.0 - params.lam), (HIGH, params.lam)):
        waste += weight * sum(
            a.prob * params.cost.cost(t, a.effort) for a in outcome.on_path.atoms(t)
        )
    return WelfareReport(
        productivity_term=prod,
        effort_waste=waste,
        total=prod - waste,
        student_surplus=((1.0 - params.lam) * outcome.payoffs[0], params.lam * outcome.payoffs[1]),
        school_profit_total=sum(outcome.profits),
        max_welfare=max_welfare(params),
    )


# ---------------------------------------------------------------------------
# Deviation audit
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AuditEntry:
    school: int
    fee: float
    thresholds: tuple[float, ...]
    template: str  # "grid" or a named template
    gain: float
    mode: str  # "canonical" or "pessimistic"

    def to_dict(self) -> dict:
        return {
            "school": self.school,
            "fee": self.fee,
            "thresholds": list(self.thresholds),
            "template": self.template,
            "gain": self.gain,
            "mode": self.mode,
        }


@dataclass(frozen=True)
class AuditReport:
    max_gain: float
    best: AuditEntry | None
    entries: tuple[AuditEntry, ...]

    def to_dict(self) -> dict:
        return {
            "max_gain": self.max_gain,
            "best": None if self.best is None else self.best.to_dict(),
            "entries": [e.to_dict() for e in self.entries],
        }


def _audit_deviations(
    outcome: EquilibriumOutcome, params: MarketParams, grids: DeviationGrid, tol: float
) -> list[tuple[int, float, StepMonitoringPolicy, str]]:
    """Candidate (school, fee, policy, template) deviations, deduplicated."""
    profile = outcome.profile
    cf = params.cost
    eps = grids.step
    gap = cf.cost(LOW, eps) - cf.cost(HIGH, eps)
    if gap <= 0:
        raise InputError("cost family has no low-type disadvantage at the grid step")
    gamma = min(eps / 10.0, 0.5 * gap)
    f_min = min(p.fee for p in profile)
    fee_cap = params.theta_H if params.credit_cap is None else min(params.theta_H, params.credit_cap)
    positive = [e for e in grids.effort_grid if e > 0]
    fee_grid = sorted({round(k * fee_cap / 10.0, 12) for k in range(11)})
    cutoff_eps = StepMonitoringPolicy.cutoff(eps)
    stride = max(1, (len(positive) + 8) // 9)  # keep reveal policies oracle-sized
    reveal = StepMonitoringPolicy.informative_on_grid(
        [0.0] + positive[::stride] + ([positive[-1]] if positive[-1] not in positive[::stride] else [])
    )
    devs: list[tuple[int, float, StepMonitoringPolicy, str]] = []
    seen: set[tuple] = set()

    def add(school: int, fee: float, mon: StepMonitoringPolicy, template: str):
        fee = min(max(fee, 0.0), fee_cap)  # students cannot pay beyond the cap
        key = (school, round(fee, 12), mon.thresholds)
        if key in seen:
            return
        seen.add(key)
        devs.append((school, fee, mon, template))

    for i in range(profile.n):
        add(i, f_min - cf.cost(LOW, eps) - gamma, cutoff_eps, "undercut_cutoff")
        add(i, params.theta_H - cf.cost(HIGH, eps) - gamma, cutoff_eps, "extract_cutoff")
        add(i, gamma, reveal, "reveal_tiny_fee")
        add(i, f_min - gamma, reveal, "reveal_undercut")
        for fee in fee_grid:
            add(i, fee, StepMonitoringPolicy.uninformative(), "grid")
            for t in positive:
                add(i, fee, StepMonitoringPolicy.cutoff(t), "grid")
    return devs


def _deviator_profit(profile: PolicyProfile, params: MarketParams, school: int, eq) -> float:
    mass = params.lam * eq.strategy.enrollment(HIGH, school) + (1.0 - params.lam) * eq.strategy.enrollment(LOW, school)
    return profile[school].fee * mass


def deviation_audit(
    outcome: EquilibriumOutcome,
    params: MarketParams,
    grids: DeviationGrid,
    tol: float = DEFAULT_TOL,
    pessimistic: bool = False,
) -> AuditReport:
    """Max profit gain any school can grab by unilateral policy deviation.

    Each candidate deviation is answered by the canonical constructed
    continuation equilibrium; a gain <= tol certifies no profitable deviation
    at grid resolution.  In pessimistic mode, deviations that look profitable
    are re-answered by the deviator's *worst* enumerated continuation (the
    threat the equilibrium can legitimately lean on); the pruning is exact
    because the worst-case profit never exceeds the canonical one.
    """
    if not grids.covers(outcome.profile):
        raise InputError("deviation grid must contain every policy threshold of the outcome")
    base_profile = outcome.profile
    entries: list[AuditEntry] = []
    for school, fee, mon, template in _audit_deviations(outcome, params, grids, tol):
        attempt = base_profile.replace(school, Policy(fee=fee, monitoring=mon))
        eq = construct_epbe(attempt, params, tol)
        gain = _deviator_profit(attempt, params, school, eq) - outcome.profits[school]
        entries.append(AuditEntry(school, fee, mon.thresholds, template, gain, "canonical"))
    entries.sort(key=lambda e: (-e.gain, e.school, e.fee, e.thresholds))

    if not pessimistic:
        best = entries[0] if entries else None
        return AuditReport(
            max_gain=best.gain if best else 0.0, best=best, entries=tuple(entries)
        )

    best_gain = float("-inf")
    best_entry: AuditEntry | None = None
    pess_entries: list[AuditEntry] = []
    for entry in entries:
        if entry.gain <= max(best_gain, tol):
            # worst-case gain can only be lower than the canonical one
            pess_entries.append(entry)
            if entry.gain > best_gain:
                best_gain = entry.gain
                best_entry = entry
            continue
        attempt = base_profile.replace(
            entry.school, Policy(fee=entry.fee, monitoring=StepMonitoringPolicy(
                thresholds=entry.thresholds,
                messages=tuple(range(len(entry.thresholds) + 1)),
            ))
        )
        oracle_grid = DeviationGrid.for_profile(attempt, params, n_points=4)
        candidates = brute_force_equilibria(attempt, params, oracle_grid, support_cap=2, tol=tol)
        if candidates:
            worst = min(_deviator_profit(attempt, params, entry.school, eq) for eq in candidates)
            gain = worst - outcome.profits[entry.school]
        else:
            gain = entry.gain
        pess = AuditEntry(
            entry.school, entry.fee, entry.thresholds, entry.template, gain, "pessimistic"
        )
        pess_entries.append(pess)
        if gain > best_gain:
            best_gain = gain
            best_entry = pess
    pess_entries.sort(key=lambda e: (-e.gain, e.school, e.fee, e.thresholds))
    return AuditReport(max_gain=best_gain, best=best_entry, entries=tuple(pess_entries))


# ---------------------------------------------------------------------------
# Sweep rows
# ---------------------------------------------------------------------------

CSV_COLUMNS = (
    "theta_L",
    "theta_H",
    "lambda",
    "n_schools",
    "credit_cap",
    "cost_kind",
    "kappa_L",
    "kappa_H",
    "exponent",
    "label",
    "fee",
    "welfare_total",
    "waste",
    "profit",
    "U_L",
    "U_H",
)


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    if isinstance(x, int):
        return str(x)
    return format(float(x), ".12g")


def outcome_csv_row(outcome: EquilibriumOutcome, params: MarketParams) -> list[str]:
    rep = welfare(outcome, params)
    cf = params.cost
    return [
        _fmt(params.theta_L),
        _fmt(params.theta_H),
        _fmt(params.lam),
        _fmt(params.n_schools),
        _fmt(params.credit_cap),
        cf.kind,
        _fmt(cf.kappa_L if cf.kind != "tabulated" else None),
        _fmt(cf.kappa_H if cf.kind != "tabulated" else None),
        _fmt(cf.exponent if cf.kind == "power" else None),
        outcome.label,
        _fmt(outcome.fee),
        _fmt(rep.total),
        _fmt(rep.effort_waste),
        _fmt(rep.school_profit_total),
        _fmt(outcome.payoffs[0]),
        _fmt(outcome.payoffs[1]),
    ]
