#!/usr/bin/env python3
"""Sweep the general HN-type search for rank r*p bundles with maximal nu.

Prints each (g, p, r, d) whose survivors include a type with more than p
pieces or a type other than the F^*F_*G shape (r-rank pieces
E (x) omega^(p-i)), plus any case where testing every negative gap instead
of the first one would change a verdict.

    python scripts/explore_open_question.py --g 2 3 --p 2 3 --r 1 2 3 --d -2 2
"""

import argparse
import json

from fsl import hn
from fsl.numerics import CurveContext


def is_pushforward_shape(ctx, t, r):
    if len(t) != ctx.p or any(rk != r for rk in t.ranks):
        return False
    return all(x == 0 for x in hn.delta_sequence(ctx, t))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--g", type=int, nargs="+", default=[2, 3])
    ap.add_argument("--p", type=int, nargs="+", default=[2, 3])
    ap.add_argument("--r", type=int, nargs="+", default=[1, 2, 3])
    ap.add_argument("--d", type=int, nargs=2, default=[-2, 2], metavar=("LO", "HI"))
    ap.add_argument("--max-l", type=int, default=None, help="default: r*p")
    args = ap.parse_args()

    total = flagged = 0
    for g in args.g:
        for p in args.p:
            ctx = CurveContext(g, p)
            for r in args.r:
                for d in range(args.d[0], args.d[1] + 1):
                    rep = hn.search_report(ctx, r, d, args.max_l or r * p)
                    total += 1
                    long_types = [t for t in rep.survivors if len(t) > p]
                    odd = [t for t in rep.survivors if not is_pushforward_shape(ctx, t, r)]
                    if long_types or odd or rep.all_k_disagreements:
                        flagged += 1
                        print(json.dumps({
                            "g": g, "p": p, "r": r, "d": d,
                            "survivors": len(rep.survivors),
                            "more_than_p_pieces": [t.parts for t in long_types],
                            "not_pushforward_shape": [t.parts for t in odd],
                            "all_k_disagreements": [t.parts for t in rep.all_k_disagreements],
                        }))
    print(f"# {total} cases, {flagged} flagged")


if __name__ == "__main__":
    main()
