"""Fit the NDL model to the bundled fire-count data and print both NLLs and the fit table."""

import argparse

from ndoppe.cli import bundled_dataset_path, cmd_fit
from ndoppe.model import ModelSpec


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--x-max", type=int, default=None)
    ap.add_argument("--csv", action="store_true", help="print the fit table as CSV instead of a summary")
    args = ap.parse_args()

    rep = cmd_fit(bundled_dataset_path(), ModelSpec.ndl(), x_max=args.x_max)
    if args.csv:
        print(rep.to_csv(), end="")
        return
    print(f"n = {rep.n}, t = {rep.t}, mean = {rep.mean:.6f}")
    print(f"theta_mle = {rep.theta_mle:.8f}")
    print(f"NLL (MLE plug-in) = {rep.nll_mle:.4f}")
    print(f"NLL (UMVUE)       = {rep.nll_umvue:.4f}")
    print(f"{'x':>3} {'obs':>8} {'mle_pmf':>10} {'umvue_pmf':>10} {'mle_cdf':>10} {'umvue_cdf':>10}")
    for row in rep.table:
        print(
            f"{row['x']:>3} {row['observed']:>8.4f} {row['mle_pmf']:>10.6f} {row['umvue_pmf']:>10.6f}"
            f" {row['mle_cdf']:>10.6f} {row['umvue_cdf']:>10.6f}"
        )


if __name__ == "__main__":
    main()
