"""Shell-mass decay of the truncated integral for a shape over a range of 2k.

Example: python scripts/shell_decay.py corpus/complete1d_n2.json --two-k 2 4 6 8 --samples 20000
"""

import argparse
import json

from tarry.exponents import load_polynomial
from tarry.quad import ShellConfig, classify_empirical


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("poly")
    ap.add_argument("--two-k", type=int, nargs="+", default=[2, 4, 6])
    ap.add_argument("--a-max", type=float, default=64.0)
    ap.add_argument("--shells", type=int, default=8)
    ap.add_argument("--samples", type=int, default=20_000)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--json", action="store_true", help="dump full reports instead of the table")
    args = ap.parse_args()

    p = load_polynomial(args.poly)
    cfg = ShellConfig(a_max=args.a_max, shells=args.shells, samples=args.samples, seed=args.seed)
    reports = [classify_empirical(p, tk, cfg) for tk in args.two_k]
    if args.json:
        print(json.dumps([r.to_dict() for r in reports], indent=2))
        return
    for rep in reports:
        masses = " ".join(f"{s.mass:.3e}" for s in rep.shells)
        ratios = " ".join(f"{r:.3f}" for r in rep.fit.ratios)
        print(f"2k={rep.two_k:<3} certified={rep.certified:<10} fit={rep.fit.classification:<12} "
              f"agreement={rep.agreement}")
        print(f"      masses: {masses}")
        print(f"      trailing ratios: {ratios}")


if __name__ == "__main__":
    main()
