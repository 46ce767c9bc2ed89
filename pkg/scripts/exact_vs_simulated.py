"""Compare exact UMVUE MSE to simulation over a (theta, x, n) grid and print z-scores."""

import argparse

from ndoppe.model import ModelSpec, cdf, pmf
from ndoppe.risk import MseStudyConfig, exact_mse_curves, mc_mse_study


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--thetas", default="0.1,0.3,0.5")
    ap.add_argument("--xs", default="0,2,5")
    ap.add_argument("--sizes", default="2,5,10,20")
    ap.add_argument("--reps", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()

    model = ModelSpec.ndl()
    sizes = tuple(int(s) for s in args.sizes.split(","))
    print(f"{'theta':>6} {'x':>3} {'target':>6} {'n':>4} {'exact':>12} {'simulated':>12} {'z':>6} {'bias z':>7}")
    for th in map(float, args.thetas.split(",")):
        for x in map(int, args.xs.split(",")):
            cfg = MseStudyConfig(model, th, x, sizes, args.reps, args.seed)
            sim = {(c.estimator, c.target): c for c in mc_mse_study(cfg)}
            exact = exact_mse_curves(cfg)
            for target, truth in (("PMF", pmf(x, th, model)), ("CDF", cdf(x, th, model))):
                for p, e in zip(sim[("UMVUE", target)].points, exact[target].points):
                    z = (p.mse - e.mse) / p.std_error if p.std_error else float("nan")
                    bz = (p.mean_estimate - truth) / p.mean_std_error if p.mean_std_error else float("nan")
                    print(f"{th:>6} {x:>3} {target:>6} {p.n:>4} {e.mse:>12.4e} {p.mse:>12.4e} {z:>6.2f} {bz:>7.2f}")


if __name__ == "__main__":
    main()
