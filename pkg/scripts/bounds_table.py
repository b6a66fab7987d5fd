"""Print the certified brackets for every corpus shape as a table."""

import argparse

from tarry.corpus import CROSSING_SHAPE, corpus
from tarry.criteria import convergence_report


def row(name, p):
    rep = convergence_report(p)
    div = max((2 * k for k, _ in rep.divergent), default=None)
    conv = rep.convergent
    high = "?" if rep.gamma_high is None else str(rep.gamma_high)
    return (f"{name:<16} r={p.r} N={p.N:<2} rho={rep.rho} q={rep.q:<2} v={rep.v_max} S={rep.S:<3} "
            f"low={str(rep.gamma_low):<6} high={high:<6} "
            f"div<= {div if div else '-':<3} conv>= {f'{conv.two_k} ({conv.tag})' if conv else '-'}"
            f"{'  CROSSING' if rep.threshold_conflict else ''}")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--with-crossing", action="store_true", help="also show the crossing-threshold shape")
    args = ap.parse_args()
    for name, p in corpus().items():
        print(row(name, p))
    if args.with_crossing:
        print(row("crossing_r3", CROSSING_SHAPE))


if __name__ == "__main__":
    main()
