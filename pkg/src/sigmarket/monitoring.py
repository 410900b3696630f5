"""Monitoring policies: right-continuous step maps from effort to messages.

A school cannot show the market raw effort; it commits to a deterministic
monitoring map M and a fee.  Deterministic right-continuous step maps carry
all the strategic content here, so a policy is a strictly ascending threshold
list t_1 < ... < t_k and k+1 distinct message ids: M(e) = m_j on [t_j, t_{j+1})
with t_0 = 0 and m_k from t_k on.  k = 0 is the uninformative policy.

Message ids are opaque school-local ints; firms observe the school anyway, so
a signal is the pair (school, message).
"""

from __future__ import annotations

import bisect as _bisect
from dataclasses import dataclass

from .errors import InputError
from .market import CostFamily, TypeLabel


@dataclass(frozen=True)
class StepMonitoringPolicy:
    thresholds: tuple[float, ...]
    messages: tuple[int, ...]

    def __post_init__(self):
        if len(self.messages) != len(self.thresholds) + 1:
            raise InputError("need exactly one more message than thresholds")
        if len(set(self.messages)) != len(self.messages):
            raise InputError("messages must be pairwise distinct")
        if any(t <= 0 for t in self.thresholds):
            raise InputError("thresholds must be positive (the base segment starts at 0)")
        if any(b <= a for a, b in zip(self.thresholds, self.thresholds[1:])):
            raise InputError("thresholds must be strictly ascending")

    @classmethod
    def uninformative(cls, message: int = 0) -> "StepMonitoringPolicy":
        return cls(thresholds=(), messages=(message,))

    @classmethod
    def cutoff(cls, threshold: float, below: int = 0, above: int = 1) -> "StepMonitoringPolicy":
        return cls(thresholds=(threshold,), messages=(below, above))

    @classmethod
    def informative_on_grid(cls, grid) -> "StepMonitoringPolicy":
        """Perfectly informative up to grid resolution: one step per grid point.

        Emulates M(e) = e; grid points must be ascending and the first at 0
        (messages are the grid indices).
        """
        pts = tuple(float(e) for e in grid)
        if not pts or pts[0] != 0.0:
            raise InputError("informative grid must start at 0")
        return cls(thresholds=pts[1:], messages=tuple(range(len(pts))))

    def message_of(self, effort: float) -> int:
        """Message generated by an effort; right-continuous at thresholds."""
        if effort < 0:
            raise InputError(f"effort must be nonnegative, got {effort}")
        return self.messages[_bisect.bisect_right(self.thresholds, effort)]

    def min_effort(self, message: int) -> float:
        """Cheapest effort generating a message (0 for the base segment)."""
        try:
            j = self.messages.index(message)
        except ValueError:
            raise InputError(f"message {message!r} not in policy image") from None
        return 0.0 if j == 0 else self.thresholds[j - 1]

    def band_starts(self) -> tuple[float, ...]:
        return (0.0,) + self.thresholds

    def to_dict(self) -> dict:
        return {"thresholds": list(self.thresholds), "messages": list(self.messages)}

    @classmethod
    def from_dict(cls, data: dict) -> "StepMonitoringPolicy":
        try:
            return cls(
                thresholds=tuple(float(t) for t in data["thresholds"]),
                messages=tuple(int(m) for m in data["messages"]),
            )
        except KeyError as exc:
            raise InputError(f"monitoring policy missing field {exc.args[0]!r}") from exc


@dataclass(frozen=True)
class Policy:
    """A school's commitment: attendance fee plus monitoring map."""

    fee: float
    monitoring: StepMonitoringPolicy

    def __post_init__(self):
        if self.fee < 0:
            raise InputError(f"fee must be nonnegative, got {self.fee}")

    def to_dict(self) -> dict:
        return {"fee": self.fee, "monitoring": self.monitoring.to_dict()}

    @classmethod
    def from_dict(cls, data: dict) -> "Policy":
        try:
            return cls(fee=float(data["fee"]), monitoring=StepMonitoringPolicy.from_dict(data["monitoring"]))
        except KeyError as exc:
            raise InputError(f"policy missing field {exc.args[0]!r}") from exc


@dataclass(frozen=True)
class Signal:
    """A (school, message) pair; all the market ever observes about a student."""

    school: int
    message: int

    def key(self) -> str:
        return f"{self.school}:{self.message}"

    @classmethod
    def from_key(cls, key: str) -> "Signal":
        try:
            school, message = key.split(":")
            return cls(int(school), int(message))
        except ValueError as exc:
            raise InputError(f"bad signal key {key!r}") from exc


@dataclass(frozen=True)
class PolicyProfile:
    policies: tuple[Policy, ...]

    def __post_init__(self):
        if not self.policies:
            raise InputError("profile needs at least one school")

    @property
    def n(self) -> int:
        return len(self.policies)

    def __iter__(self):
        return iter(self.policies)

    def __getitem__(self, i: int) -> Policy:
        return self.policies[i]

    @classmethod
    def of(cls, *policies: Policy) -> "PolicyProfile":
        return cls(policies=tuple(policies))

    @classmethod
    def symmetric(cls, policy: Policy, n: int) -> "PolicyProfile":
        return cls(policies=(policy,) * n)

    def replace(self, school: int, policy: Policy) -> "PolicyProfile":
        if not 0 <= school < self.n:
            raise InputError(f"school index {school} out of range")
        ps = list(self.policies)
        ps[school] = policy
        return PolicyProfile(policies=tuple(ps))

    def signals(self) -> tuple[Signal, ...]:
        """Every signal any school can emit, in (school, band) order."""
        out = []
        for i, p in enumerate(self.policies):
            out.extend(Signal(i, m) for m in p.monitoring.messages)
        return tuple(out)

    def signal_of(self, school: int, effort: float) -> Signal:
        return Signal(school, self.policies[school].monitoring.message_of(effort))

    def min_effort(self, s: Signal) -> float:
        if not 0 <= s.school < self.n:
            raise InputError(f"signal {s} names an unknown school")
        return self.policies[s.school].monitoring.min_effort(s.message)

    def thresholds(self) -> tuple[float, ...]:
        """Sorted union of all schools' thresholds (deduplicated)."""
        seen = sorted({t for p in self.policies for t in p.monitoring.thresholds})
        return tuple(seen)

    def to_list(self) -> list:
        return [p.to_dict() for p in self.policies]

    @classmethod
    def from_list(cls, data) -> "PolicyProfile":
        if not isinstance(data, list) or not data:
            raise InputError("profile JSON must be a nonempty array of policies")
        return cls(policies=tuple(Policy.from_dict(d) for d in data))


def message_of(policy: StepMonitoringPolicy, effort: float) -> int:
    return policy.message_of(effort)


def min_effort(policy: StepMonitoringPolicy, message: int) -> float:
    return policy.min_effort(message)


def min_cost(profile: PolicyProfile, cf: CostFamily, type_label: TypeLabel, s: Signal) -> float:
    """Cheapest total outlay c(type, e_{i,m}) + f_i to emit a signal."""
    return cf.cost(type_label, profile.min_effort(s)) + profile[s.school].fee


def reduce_minimal(policy: StepMonitoringPolicy, sent_messages) -> StepMonitoringPolicy:
    """Coarsest step policy agreeing with `policy` on sent efforts.

    Every unsent band is absorbed by a sent neighbour: the immediate left
    neighbour when that band is sent, otherwise the nearest sent band to the
    right (falling back to the nearest sent band on the left when the unsent
    run reaches the top).  The result's image is exactly `sent_messages` and
    message_of is unchanged on every effort whose original message is sent.
    """
    sent = set(sent_messages)
    if not sent:
        raise InputError("sent message set must be nonempty")
    unknown = sent - set(policy.messages)
    if unknown:
        raise InputError(f"sent messages {sorted(unknown)} not in policy image")
    starts = policy.band_starts()
    msgs = policy.messages
    n = len(msgs)
    targets: list[int] = []
    for j, m in enumerate(msgs):
        if m in sent:
            targets.append(m)
            continue
        if j > 0 and msgs[j - 1] in sent:
            targets.append(msgs[j - 1])
            continue
        right = next((msgs[k] for k in range(j + 1, n) if msgs[k] in sent), None)
        if right is not None:
            targets.append(right)
        else:
            targets.append(next(msgs[k] for k in range(j - 1, -1, -1) if msgs[k] in sent))
    new_thresholds: list[float] = []
    new_messages: list[int] = [targets[0]]
    for j in range(1, n):
        if targets[j] != new_messages[-1]:
            new_thresholds.append(starts[j])
            new_messages.append(targets[j])
    return StepMonitoringPolicy(thresholds=tuple(new_thresholds), messages=tuple(new_messages))
