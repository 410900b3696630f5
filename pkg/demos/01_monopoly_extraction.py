"""A monopolist school captures the whole surplus without any effort burned.

Walks the two market regimes:

* sorting (both types productive): the school posts an uninformative policy
  and a fee equal to mean productivity - everyone enrolls, nobody studies,
  and the fee swallows the entire wage;
* screening (low type destructive): the fee jumps to the top wage itself, so
  only high types show up, again at zero effort.

In both cases welfare is at its ceiling and students keep nothing.
"""

from sigmarket import CostFamily, MarketParams, expected_type, monopoly_rpbe, welfare

COST = CostFamily.linear(kappa_L=2.0, kappa_H=1.0)


def show(params: MarketParams, title: str) -> None:
    out = monopoly_rpbe(params)
    rep = welfare(out, params)
    print(f"--- {title} (theta_L={params.theta_L}, theta_H={params.theta_H}) ---")
    print(f"posted fee            : {out.fee:.6g}")
    print(f"enrollment (L, H)     : {out.enrollment}")
    print(f"school profit         : {out.profits[0]:.6g}")
    print(f"student payoffs (L, H): {out.payoffs}")
    print(f"welfare               : {rep.total:.6g} (ceiling {rep.max_welfare:.6g})")
    print(f"effort burned         : {rep.effort_waste:.6g}")
    print()


def main() -> None:
    sorting = MarketParams(theta_L=1.0, theta_H=2.0, lam=0.5, cost=COST)
    show(sorting, "sorting: fee = mean productivity")
    print(f"(mean productivity is {expected_type(sorting):.6g})\n")
    screening = sorting.with_(theta_L=-1.0)
    show(screening, "screening: fee = top wage, low types stay out")


if __name__ == "__main__":
    main()
