"""Constructive equilibrium for the signaling subgame after policies are fixed.

Given any profile of fee/monitoring policies (all fees <= theta_H), an
equilibrium surviving the extended D1 refinement always exists, and this
module builds the canonical one.  The construction pivots on the "mimic
frontier": the most expensive signal a low type would still pay for if it
came with the top wage.

Geometry, per school i with fee f_i:

* reservation payoff  u_low = max(0, theta_L - f_min)  from enrolling at the
  cheapest school with zero effort, or staying out;
* e_star_i solves theta_H - c(L, e) - f_i = u_low: the largest effort a low
  type might rationally exert at i (schools priced out of even zero effort
  contribute nothing);
* each school's marginal signal is the message band containing e_star_i; the
  market-wide marginal effort is the largest band-bottom so reachable, and
  the marginal schools I* are the cheapest ones attaining it.

Signals then split into the marginal set S* (band bottom exactly at the
marginal effort, school in I*), the high set S*+ (band bottom strictly above)
and the low set S*- (everything else).  Two constructions follow:

* semi-pooling: if no high signal is worth its cost premium to the high type,
  high types enroll uniformly across I* at the marginal effort and low types
  mimic with the unique probability making the pooled wage consistent;
* separating: otherwise high types take the cheapest high signal and earn the
  top wage while low types fall back to the reservation play.

The returned bundle always passes the PBE and extended-D1 verifiers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

from .errors import InputError, InvariantViolation
from .market import HIGH, LOW, DEFAULT_TOL, MarketParams, TypeLabel, expected_type
from .monitoring import PolicyProfile, Signal

OUTSIDE = None  # destination sentinel for the outside option

Destination = int | None


@dataclass(frozen=True)
class StrategyAtom:
    """One support point: go to `school` (None = stay out), exert `effort`."""

    school: Destination
    effort: float
    prob: float

    def to_dict(self) -> dict:
        return {"school": self.school, "effort": self.effort, "prob": self.prob}


@dataclass(frozen=True)
class PopulationStrategy:
    """Finite-support play per type; probabilities sum to one per type."""

    low: tuple[StrategyAtom, ...]
    high: tuple[StrategyAtom, ...]

    def __post_init__(self):
        for label, atoms in (("low", self.low), ("high", self.high)):
            if not atoms:
                raise InputError(f"{label}-type strategy needs at least one atom")
            total = sum(a.prob for a in atoms)
            if abs(total - 1.0) > 1e-9:
                raise InputError(f"{label}-type probabilities sum to {total}, not 1")
            if any(a.prob < 0 for a in atoms):
                raise InputError(f"{label}-type probabilities must be nonnegative")
            if any(a.school is OUTSIDE and a.effort != 0.0 for a in atoms):
                raise InputError("outside-option atoms must carry zero effort")

    def atoms(self, type_label: TypeLabel) -> tuple[StrategyAtom, ...]:
        return self.high if type_label == HIGH else self.low

    def enrollment(self, type_label: TypeLabel, school: int) -> float:
        return sum(a.prob for a in self.atoms(type_label) if a.school == school)

    def enrollment_total(self, type_label: TypeLabel) -> float:
        return sum(a.prob for a in self.atoms(type_label) if a.school is not OUTSIDE)

    def signal_mass(self, profile: PolicyProfile, type_label: TypeLabel) -> dict[Signal, float]:
        out: dict[Signal, float] = {}
        for a in self.atoms(type_label):
            if a.school is OUTSIDE or a.prob == 0.0:
                continue
            s = profile.signal_of(a.school, a.effort)
            out[s] = out.get(s, 0.0) + a.prob
        return out

    def sent_signals(self, profile: PolicyProfile) -> set[Signal]:
        sent = set(self.signal_mass(profile, LOW))
        sent.update(self.signal_mass(profile, HIGH))
        return sent

    def to_dict(self) -> dict:
        return {
            "L": [a.to_dict() for a in self.low],
            "H": [a.to_dict() for a in self.high],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PopulationStrategy":
        def parse(entries):
            return tuple(
                StrategyAtom(
                    school=None if e["school"] is None else int(e["school"]),
                    effort=float(e["effort"]),
                    prob=float(e["prob"]),
                )
                for e in entries
            )

        try:
            return cls(low=parse(data["L"]), high=parse(data["H"]))
        except KeyError as exc:
            raise InputError(f"strategy missing field {exc.args[0]!r}") from exc


@dataclass(frozen=True)
class WageSchedule:
    """Total map signal -> wage offer; None means no offer is made."""

    offers: dict[Signal, float | None]

    def offer(self, s: Signal) -> float | None:
        if s not in self.offers:
            raise InputError(f"signal {s.key()} not covered by wage schedule")
        return self.offers[s]

    def income(self, s: Signal) -> float:
        """Wage income a student at signal s walks away with (0 if no offer)."""
        w = self.offer(s)
        return 0.0 if w is None else w

    def to_dict(self) -> dict:
        return {s.key(): w for s, w in sorted(self.offers.items(), key=lambda kv: (kv[0].school, kv[0].message))}

    @classmethod
    def from_dict(cls, data: dict) -> "WageSchedule":
        return cls(offers={Signal.from_key(k): (None if v is None else float(v)) for k, v in data.items()})


@dataclass(frozen=True)
class BeliefSystem:
    """Total map signal -> probability the sender is the high type."""

    mu_high: dict[Signal, float]

    def mu(self, s: Signal) -> float:
        if s not in self.mu_high:
            raise InputError(f"signal {s.key()} not covered by belief system")
        return self.mu_high[s]

    def expected_type(self, s: Signal, params: MarketParams) -> float:
        m = self.mu(s)
        return m * params.theta_H + (1.0 - m) * params.theta_L

    def to_dict(self) -> dict:
        return {s.key(): m for s, m in sorted(self.mu_high.items(), key=lambda kv: (kv[0].school, kv[0].message))}

    @classmethod
    def from_dict(cls, data: dict) -> "BeliefSystem":
        return cls(mu_high={Signal.from_key(k): float(v) for k, v in data.items()})


ConstructionTag = Literal["semi_pooling", "separating"]


@dataclass(frozen=True)
class SubgameEquilibrium:
    profile: PolicyProfile
    strategy: PopulationStrategy
    wages: WageSchedule
    beliefs: BeliefSystem
    payoff_L: float
    payoff_H: float
    construction_tag: str

    def payoff(self, type_label: TypeLabel) -> float:
        return self.payoff_H if type_label == HIGH else self.payoff_L

    def to_dict(self) -> dict:
        return {
            "profile": self.profile.to_list(),
            "strategy": self.strategy.to_dict(),
            "wages": self.wages.to_dict(),
            "beliefs": self.beliefs.to_dict(),
            "payoff_L": self.payoff_L,
            "payoff_H": self.payoff_H,
            "construction_tag": self.construction_tag,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SubgameEquilibrium":
        try:
            return cls(
                profile=PolicyProfile.from_list(data["profile"]),
                strategy=PopulationStrategy.from_dict(data["strategy"]),
                wages=WageSchedule.from_dict(data["wages"]),
                beliefs=BeliefSystem.from_dict(data["beliefs"]),
                payoff_L=float(data["payoff_L"]),
                payoff_H=float(data["payoff_H"]),
                construction_tag=str(data["construction_tag"]),
            )
        except KeyError as exc:
            raise InputError(f"equilibrium missing field {exc.args[0]!r}") from exc


def reservation(profile: PolicyProfile, params: MarketParams) -> tuple[float, float]:
    """Cheapest fee and the reservation payoff max(0, theta_L - f_min)."""
    f_min = min(p.fee for p in profile)
    return f_min, max(0.0, params.theta_L - f_min)


def _reservation_atoms(profile: PolicyProfile, params: MarketParams, weight: float) -> list[StrategyAtom]:
    """The reservation play: zero effort at the cheapest schools, or outside.

    Low types enroll when theta_L covers the cheapest fee (ties resolved
    toward enrolling, so the boundary theta_L == f_min stays in school).
    """
    f_min, _ = reservation(profile, params)
    if params.theta_L - f_min >= 0.0:
        cheapest = [i for i, p in enumerate(profile) if p.fee == f_min]
        share = weight / len(cheapest)
        return [StrategyAtom(i, 0.0, share) for i in cheapest]
    return [StrategyAtom(OUTSIDE, 0.0, weight)]


@dataclass(frozen=True)
class FrontierReport:
    """Signal geometry of a profile from the low type's viewpoint.

    e_star maps school -> maximal rationalizable low-type effort (-inf when
    the school cannot attract anyone even at the top wage).  marginal_effort
    is the band-bottom of the market-wide marginal signal; marginal_schools
    are the cheapest schools attaining it.
    """

    f_min: float
    u_low: float
    e_star: tuple[float, ...]
    marginal_effort: float
    marginal_schools: tuple[int, ...]
    marginal_signals: tuple[Signal, ...]
    high_signals: tuple[Signal, ...]
    low_signals: tuple[Signal, ...]
    cost_low_marginal: float
    cost_high_marginal: float


def mimic_frontier(profile: PolicyProfile, params: MarketParams, tol: float = DEFAULT_TOL) -> FrontierReport:
    """Partition a profile's signals into marginal / high / low sets."""
    f_min, u_low = reservation(profile, params)
    cf = params.cost
    e_star: list[float] = []
    band_bottom: list[float] = []  # minimum effort of each school's marginal band
    band_message: list[int | None] = []
    for policy in profile:
        budget = params.theta_H - policy.fee - u_low
        if budget < 0.0:
            e_star.append(float("-inf"))
            band_bottom.append(float("-inf"))
            band_message.append(None)
            continue
        e_i = cf.inverse(LOW, budget, tol) if budget > 0.0 else 0.0
        m_i = policy.monitoring.message_of(e_i)
        e_star.append(e_i)
        band_bottom.append(policy.monitoring.min_effort(m_i))
        band_message.append(m_i)
    marginal_effort = max(band_bottom)
    if marginal_effort == float("-inf"):
        raise InvariantViolation("no school can attract the low type at any wage")
    achievers = [i for i in range(profile.n) if band_bottom[i] >= marginal_effort - tol]
    best_fee = min(profile[i].fee for i in achievers)
    marginal_schools = tuple(i for i in achievers if profile[i].fee <= best_fee + tol)
    marginal_signals = tuple(Signal(i, band_message[i]) for i in marginal_schools)
    high: list[Signal] = []
    low: list[Signal] = []
    marginal = set(marginal_signals)
    for s in profile.signals():
        if s in marginal:
            continue
        e_s = profile.min_effort(s)
        if e_s > marginal_effort + tol:
            high.append(s)
        else:
            low.append(s)
    i0 = marginal_schools[0]
    return FrontierReport(
        f_min=f_min,
        u_low=u_low,
        e_star=tuple(e_star),
        marginal_effort=marginal_effort,
        marginal_schools=marginal_schools,
        marginal_signals=marginal_signals,
        high_signals=tuple(high),
        low_signals=tuple(low),
        cost_low_marginal=cf.cost(LOW, marginal_effort) + profile[i0].fee,
        cost_high_marginal=cf.cost(HIGH, marginal_effort) + profile[i0].fee,
    )


def _mixing_weight(w_bar: float, params: MarketParams, tol: float) -> tuple[float, float]:
    """Low-type mimic probability and pooled wage for an indifference wage w_bar.

    Solves lam*theta_H + q*(1-lam)*theta_L = w_bar * (lam + q*(1-lam)); the
    q <= 1 direction is exactly w_bar >= mean productivity.  When w_bar sits
    within tol of an endpoint (theta_H, or the mean), the weight snaps to the
    exact boundary and the wage to the Bayes-consistent value, so root-finding
    residue in w_bar never leaves spurious support atoms; the payoff error
    this introduces is bounded by the wage gap, hence by tol.
    """
    mean = expected_type(params)
    if w_bar >= params.theta_H - tol:
        return 0.0, params.theta_H
    if w_bar <= mean + tol:
        return 1.0, mean
    q = (params.lam * (params.theta_H - w_bar)) / ((1.0 - params.lam) * (w_bar - params.theta_L))
    return q, w_bar


def _offer(mu: float, params: MarketParams) -> float | None:
    """Competitive wage response to a belief: posterior mean, or no offer."""
    w = mu * params.theta_H + (1.0 - mu) * params.theta_L
    return w if w >= 0.0 else None


def construct_epbe(profile: PolicyProfile, params: MarketParams, tol: float = DEFAULT_TOL) -> SubgameEquilibrium:
    """Build the canonical refined equilibrium of the subgame after `profile`.

    Branches between the semi-pooling and separating constructions described
    in the module docstring.  Requires every fee <= theta_H.
    """
    for i, p in enumerate(profile):
        if p.fee > params.theta_H + tol:
            raise InputError(f"school {i} fee {p.fee} exceeds theta_H={params.theta_H}")
    fr = mimic_frontier(profile, params, tol)
    cf = params.cost
    mean = expected_type(params)

    def total_cost(type_label: TypeLabel, s: Signal) -> float:
        return cf.cost(type_label, profile.min_effort(s)) + profile[s.school].fee

    c_low_star = fr.cost_low_marginal
    c_high_star = fr.cost_high_marginal
    gain = params.theta_H - fr.u_low

    pooling = True
    for s in fr.high_signals:
        if gain > total_cost(HIGH, s) - c_high_star + c_low_star + tol:
            pooling = False
            break

    beliefs: dict[Signal, float] = {}
    if pooling:
        w_bar = c_low_star + fr.u_low
        q, pooled_wage = _mixing_weight(w_bar, params, tol)
        share = 1.0 / len(fr.marginal_schools)
        high_atoms = [StrategyAtom(i, fr.marginal_effort, share) for i in fr.marginal_schools]
        low_atoms: list[StrategyAtom] = []
        if q > 0.0:
            low_atoms.extend(StrategyAtom(i, fr.marginal_effort, q * share) for i in fr.marginal_schools)
        if q < 1.0:
            low_atoms.extend(_reservation_atoms(profile, params, 1.0 - q))
        mu_marginal = params.lam / (params.lam + (1.0 - params.lam) * q) if q > 0.0 else 1.0
        for s in fr.low_signals:
            beliefs[s] = 0.0
        for s in fr.marginal_signals:
            beliefs[s] = mu_marginal
        for s in fr.high_signals:
            beliefs[s] = 1.0
        # Wages follow beliefs except at the marginal signal, where the
        # construction pins max(w_bar, mean); the two agree by choice of q.
        offers = {s: _offer(beliefs[s], params) for s in profile.signals()}
        for s in fr.marginal_signals:
            offers[s] = pooled_wage
        payoff_H = pooled_wage - c_high_star
        payoff_L = pooled_wage - c_low_star if q >= 1.0 else fr.u_low
        tag = "semi_pooling"
    else:
        costs_high = {s: total_cost(HIGH, s) for s in fr.high_signals}
        cheapest = min(costs_high.values())
        winners = sorted(
            (s for s, c in costs_high.items() if c <= cheapest + tol),
            key=lambda s: (s.school, s.message),
        )
        share = 1.0 / len(winners)
        high_atoms = [StrategyAtom(s.school, profile.min_effort(s), share) for s in winners]
        low_atoms = _reservation_atoms(profile, params, 1.0)
        top_wage = set(fr.high_signals)  # the cheapest winners are all in here
        for s in profile.signals():
            beliefs[s] = 1.0 if s in top_wage else 0.0
        offers = {s: _offer(beliefs[s], params) for s in profile.signals()}
        payoff_H = params.theta_H - cheapest
        payoff_L = fr.u_low
        tag = "separating"

    return SubgameEquilibrium(
        profile=profile,
        strategy=PopulationStrategy(low=tuple(low_atoms), high=tuple(high_atoms)),
        wages=WageSchedule(offers=offers),
        beliefs=BeliefSystem(mu_high=beliefs),
        payoff_L=payoff_L,
        payoff_H=payoff_H,
        construction_tag=tag,
    )
