#!/usr/bin/env python3
"""Export exact average tables, one JSONL file per rank.

Each line holds a matrix, its rank and the exact value as "p/q".  Useful as
lookup tables for response-tensor calculations where the same averages recur.

Usage:
    python scripts/export_rank_tables.py --ranks 0..6 --outdir tables [--nonzero]
"""

import argparse
import json
import sys
import time
from pathlib import Path

from rotavg import ValueCache, format_rational
from rotavg.propositions import rank_table


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--ranks", default="0..6", help='range like "0..6" or a single rank')
    parser.add_argument("--outdir", default="tables")
    parser.add_argument("--nonzero", action="store_true", help="skip vanishing components")
    parser.add_argument("--canonical", action="store_true", help="one row per orbit")
    args = parser.parse_args()

    if ".." in args.ranks:
        lo, hi = (int(x) for x in args.ranks.split("..", 1))
    else:
        lo = hi = int(args.ranks)

    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    cache = ValueCache()
    for n in range(lo, hi + 1):
        t0 = time.perf_counter()
        path = outdir / f"rank{n:02d}.jsonl"
        count = 0
        with path.open("w", encoding="utf-8") as handle:
            for chi, value in rank_table(
                n, cache, nonzero=args.nonzero, canonical_only=args.canonical
            ):
                handle.write(
                    json.dumps(
                        {
                            "chi": chi.to_lists(),
                            "rank": n,
                            "value": format_rational(value),
                            "value_float": float(value),
                        }
                    )
                    + "\n"
                )
                count += 1
        print(f"rank {n}: {count} rows -> {path} ({time.perf_counter()-t0:.2f}s)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
