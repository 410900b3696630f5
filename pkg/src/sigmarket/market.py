"""Market primitives: types, effort-cost families, and scalar root finding.

A market is populated by a unit mass of students who are privately either
low- or high-productivity (theta_L may be negative, theta_H > 0), a fraction
``lam`` of them high.  Students can burn effort at a type-dependent cost; the
cost families here all satisfy, by construction or by explicit check, the
regularity the equilibrium analysis needs:

* c(type, 0) = 0, c strictly increasing and continuous in effort,
* the high type is (weakly) cheaper everywhere, and
* strict decreasing differences: the low-minus-high cost gap strictly grows
  with effort.

Two market regimes matter downstream: "sorting" (theta_L >= 0, every hire is
productive) and "screening" (theta_L < 0, hiring the low type destroys value).
The boundary theta_L = 0 counts as sorting.
"""

from __future__ import annotations

import bisect as _bisect
from dataclasses import dataclass, field
from typing import Literal

from .errors import InputError, NumericError, RangeError

TypeLabel = Literal["L", "H"]

LOW: TypeLabel = "L"
HIGH: TypeLabel = "H"

DEFAULT_TOL = 1e-9
_BISECTION_CAP = 200


@dataclass(frozen=True)
class CostFamily:
    """Parametric effort-cost function c(type, e).

    Kinds:
      linear    c(type, e) = kappa * e
      power     c(type, e) = kappa * e**exponent, exponent >= 1
      tabulated piecewise-linear interpolation between knots; efforts must
                start at 0 with cost 0 and be strictly increasing.

    The type label (not the productivity number) selects the slope, so
    negative theta_L never corrupts costs.  Constructors validate shape and
    monotonicity but deliberately allow kappa_H >= kappa_L so that
    :func:`check_decreasing_differences` has something to reject.
    """

    kind: Literal["linear", "power", "tabulated"]
    kappa_L: float = 0.0
    kappa_H: float = 0.0
    exponent: float = 1.0
    efforts: tuple[float, ...] = field(default=())
    cost_L: tuple[float, ...] = field(default=())
    cost_H: tuple[float, ...] = field(default=())

    def __post_init__(self):
        if self.kind in ("linear", "power"):
            if self.kappa_L <= 0 or self.kappa_H <= 0:
                raise InputError("cost slopes kappa_L, kappa_H must be positive")
            if self.kind == "power" and self.exponent < 1.0:
                raise InputError(f"power exponent must be >= 1, got {self.exponent}")
        elif self.kind == "tabulated":
            eff, cl, ch = self.efforts, self.cost_L, self.cost_H
            if len(eff) < 2 or len(cl) != len(eff) or len(ch) != len(eff):
                raise InputError("tabulated family needs matching effort/cost knots (>= 2)")
            if eff[0] != 0.0 or cl[0] != 0.0 or ch[0] != 0.0:
                raise InputError("tabulated family must start at (effort 0, cost 0)")
            if any(b <= a for a, b in zip(eff, eff[1:])):
                raise InputError("tabulated efforts must be strictly increasing")
            for name, col in (("cost_L", cl), ("cost_H", ch)):
                if any(b <= a for a, b in zip(col, col[1:])):
                    raise InputError(f"{name} must be strictly increasing in effort")
        else:
            raise InputError(f"unknown cost kind {self.kind!r}")

    @classmethod
    def linear(cls, kappa_L: float, kappa_H: float) -> "CostFamily":
        return cls(kind="linear", kappa_L=kappa_L, kappa_H=kappa_H)

    @classmethod
    def power(cls, kappa_L: float, kappa_H: float, exponent: float) -> "CostFamily":
        return cls(kind="power", kappa_L=kappa_L, kappa_H=kappa_H, exponent=exponent)

    @classmethod
    def tabulated(cls, efforts, cost_L, cost_H) -> "CostFamily":
        return cls(
            kind="tabulated",
            efforts=tuple(float(e) for e in efforts),
            cost_L=tuple(float(c) for c in cost_L),
            cost_H=tuple(float(c) for c in cost_H),
        )

    def _slope(self, type_label: TypeLabel) -> float:
        return self.kappa_H if type_label == HIGH else self.kappa_L

    def cost(self, type_label: TypeLabel, effort: float) -> float:
        """Effort cost c(type, e); exact for linear/power kinds."""
        if type_label not in (LOW, HIGH):
            raise InputError(f"type must be 'L' or 'H', got {type_label!r}")
        if effort < 0:
            raise InputError(f"effort must be nonnegative, got {effort}")
        if self.kind == "linear":
            return self._slope(type_label) * effort
        if self.kind == "power":
            return self._slope(type_label) * effort**self.exponent
        table = self.cost_H if type_label == HIGH else self.cost_L
        eff = self.efforts
        if effort > eff[-1]:
            raise RangeError(f"effort {effort} beyond tabulated range [0, {eff[-1]}]")
        j = _bisect.bisect_right(eff, effort) - 1
        if j >= len(eff) - 1:
            return table[-1]
        w = (effort - eff[j]) / (eff[j + 1] - eff[j])
        return table[j] + w * (table[j + 1] - table[j])

    def inverse(self, type_label: TypeLabel, target_cost: float, tol: float = DEFAULT_TOL) -> float:
        """Effort e with |c(type, e) - target_cost| <= tol.

        Doubling-bracket bisection; derivative-free and deterministic for any
        monotone continuous cost.  Returns 0 exactly when target_cost == 0.
        """
        if target_cost < 0:
            raise InputError(f"target cost must be nonnegative, got {target_cost}")
        if tol <= 0:
            raise InputError("tol must be positive")
        if target_cost == 0.0:
            return 0.0
        lo, hi = 0.0, 1.0
        if self.kind == "tabulated":
            if target_cost > (self.cost_H if type_label == HIGH else self.cost_L)[-1]:
                raise RangeError(f"target cost {target_cost} beyond tabulated range")
            hi = self.efforts[-1]
        else:
            for _ in range(_BISECTION_CAP):
                if self.cost(type_label, hi) >= target_cost:
                    break
                hi *= 2.0
            else:
                raise NumericError("could not bracket target cost", bracket=(lo, hi))
        for _ in range(_BISECTION_CAP):
            mid = 0.5 * (lo + hi)
            resid = self.cost(type_label, mid) - target_cost
            if abs(resid) <= tol:
                return mid
            if resid < 0:
                lo = mid
            else:
                hi = mid
        raise NumericError("bisection did not converge", bracket=(lo, hi))

    def to_dict(self) -> dict:
        if self.kind == "linear":
            return {"kind": "linear", "kappa_L": self.kappa_L, "kappa_H": self.kappa_H}
        if self.kind == "power":
            return {
                "kind": "power",
                "kappa_L": self.kappa_L,
                "kappa_H": self.kappa_H,
                "exponent": self.exponent,
            }
        return {
            "kind": "tabulated",
            "efforts": list(self.efforts),
            "cost_L": list(self.cost_L),
            "cost_H": list(self.cost_H),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CostFamily":
        try:
            kind = data["kind"]
            if kind == "linear":
                return cls.linear(data["kappa_L"], data["kappa_H"])
            if kind == "power":
                return cls.power(data["kappa_L"], data["kappa_H"], data["exponent"])
            if kind == "tabulated":
                return cls.tabulated(data["efforts"], data["cost_L"], data["cost_H"])
        except KeyError as exc:
            raise InputError(f"cost family missing field {exc.args[0]!r}") from exc
        raise InputError(f"unknown cost kind {data.get('kind')!r}")


@dataclass(frozen=True)
class MarketParams:
    """Primitives of one market instance.

    theta_L may be negative (screening); theta_H must be positive and exceed
    theta_L; lam is the population share of high types, strictly in (0, 1).
    credit_cap, when present, is the largest fee any student can pay.
    """

    theta_L: float
    theta_H: float
    lam: float
    cost: CostFamily
    n_schools: int = 1
    credit_cap: float | None = None

    def __post_init__(self):
        if self.theta_H <= 0:
            raise InputError(f"theta_H must be positive, got {self.theta_H}")
        if self.theta_H <= self.theta_L:
            raise InputError("theta_H must exceed theta_L")
        if not 0.0 < self.lam < 1.0:
            raise InputError(f"lam must lie strictly in (0, 1), got {self.lam}")
        if self.n_schools < 1:
            raise InputError(f"n_schools must be >= 1, got {self.n_schools}")
        if self.credit_cap is not None and self.credit_cap <= 0:
            raise InputError(f"credit_cap must be positive, got {self.credit_cap}")

    @property
    def is_sorting(self) -> bool:
        """Sorting regime: both types productive (boundary theta_L == 0 included)."""
        return self.theta_L >= 0.0

    def with_(self, **changes) -> "MarketParams":
        data = {
            "theta_L": self.theta_L,
            "theta_H": self.theta_H,
            "lam": self.lam,
            "cost": self.cost,
            "n_schools": self.n_schools,
            "credit_cap": self.credit_cap,
        }
        data.update(changes)
        return MarketParams(**data)

    def to_dict(self) -> dict:
        return {
            "theta_L": self.theta_L,
            "theta_H": self.theta_H,
            "lambda": self.lam,
            "n_schools": self.n_schools,
            "credit_cap": self.credit_cap,
            "cost": self.cost.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MarketParams":
        for key in ("theta_L", "theta_H", "lambda", "cost"):
            if key not in data:
                raise InputError(f"market params missing field {key!r}")
        return cls(
            theta_L=float(data["theta_L"]),
            theta_H=float(data["theta_H"]),
            lam=float(data["lambda"]),
            cost=CostFamily.from_dict(data["cost"]),
            n_schools=int(data.get("n_schools", 1)),
            credit_cap=None if data.get("credit_cap") is None else float(data["credit_cap"]),
        )


def expected_type(params: MarketParams) -> float:
    """Population-average productivity lam*theta_H + (1-lam)*theta_L."""
    return params.lam * params.theta_H + (1.0 - params.lam) * params.theta_L


def max_welfare(params: MarketParams) -> float:
    """Best attainable surplus: everyone productive works, nobody burns effort.

    Under sorting that is the full expected productivity; under screening only
    high types should be employed.
    """
    return expected_type(params) if params.is_sorting else params.lam * params.theta_H


def cost(cf: CostFamily, type_label: TypeLabel, effort: float) -> float:
    """Module-level alias for :meth:`CostFamily.cost`."""
    return cf.cost(type_label, effort)


def cost_inverse_effort(
    cf: CostFamily, type_label: TypeLabel, target_cost: float, tol: float = DEFAULT_TOL
) -> float:
    """Module-level alias for :meth:`CostFamily.inverse`."""
    return cf.inverse(type_label, target_cost, tol)


@dataclass(frozen=True)
class GapViolation:
    """One adjacent grid pair breaking the cost-gap regularity."""

    effort_lo: float
    effort_hi: float
    gap_lo: float
    gap_hi: float
    reason: Literal["nonincreasing_gap", "negative_gap"]


@dataclass(frozen=True)
class DecreasingDifferencesReport:
    passed: bool
    violations: tuple[GapViolation, ...]


def check_decreasing_differences(cf: CostFamily, grid) -> DecreasingDifferencesReport:
    """Validate strict decreasing differences of c on an effort grid.

    The low-minus-high cost gap must be nonnegative everywhere and strictly
    increasing between consecutive grid points.  An empty violation list is
    the pass condition.
    """
    pts = [float(e) for e in grid]
    if len(pts) < 2:
        raise InputError("grid needs at least 2 points")
    if any(e < 0 for e in pts):
        raise InputError("grid efforts must be nonnegative")
    if any(b <= a for a, b in zip(pts, pts[1:])):
        raise InputError("grid must be strictly ascending without duplicates")
    gaps = [cf.cost(LOW, e) - cf.cost(HIGH, e) for e in pts]
    violations: list[GapViolation] = []
    for (e0, g0), (e1, g1) in zip(zip(pts, gaps), zip(pts[1:], gaps[1:])):
        if g0 < 0 or g1 < 0:
            violations.append(GapViolation(e0, e1, g0, g1, "negative_gap"))
        elif g1 <= g0:
            violations.append(GapViolation(e0, e1, g0, g1, "nonincreasing_gap"))
    return DecreasingDifferencesReport(passed=not violations, violations=tuple(violations))


def riley_effort(params: MarketParams, tol: float = DEFAULT_TOL) -> float:
    """Cheapest fully separating effort.

    The unique e with c(L, e) = theta_H - max(theta_L, 0): the smallest effort
    a low type would never pay for even against the top wage, net of their
    fallback of being hired at their own productivity (or staying out).
    Positive because theta_H > max(theta_L, 0).
    """
    target = params.theta_H - max(params.theta_L, 0.0)
    return params.cost.inverse(LOW, target, tol)
