"""Sweep the exact block checks on the two-variable grid and the Hessian identity."""

import argparse
import itertools
from collections import Counter

from tarry.lemmas import classify_blocks, verify_lemma1, verify_lemma2


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-max", type=int, default=12)
    ap.add_argument("--r-max", type=int, default=5)
    ap.add_argument("--k-max", type=int, default=4)
    ap.add_argument("--trials", type=int, default=1000)
    args = ap.parse_args()

    kinds, failures, tightest = Counter(), [], None
    for n in range(1, args.n_max + 1):
        for m in range(1, n + 1):
            if not verify_lemma1(n, m).passed:
                failures.append((n, m))
            for b in classify_blocks(n, m):
                kinds[b.kind] += 1
                if b.kind == "mixed3":
                    slack = b.det - b.bound
                    if tightest is None or slack < tightest[0]:
                        tightest = (slack, n, m, b.rows)
    print(f"grid m <= n <= {args.n_max}: failures {failures}; block kinds {dict(kinds)}")
    if tightest:
        print(f"smallest det - n(m-a) over mixed blocks: {tightest[0]} at n={tightest[1]}, m={tightest[2]}, rows {tightest[3]}")

    worst, count = (0.0, None), 0
    for r in range(2, args.r_max + 1):
        for kvec in itertools.product(range(1, args.k_max + 1), repeat=r):
            res = verify_lemma2(kvec, args.trials)
            count += 1
            if not res.passed:
                print(f"FAIL {kvec}: {res.to_dict()}")
            if res.max_relative_error > worst[0]:
                worst = (res.max_relative_error, kvec)
    print(f"Hessian identity: {count} exponent vectors, worst relative error {worst[0]:.2e} at {worst[1]}")


if __name__ == "__main__":
    main()
