"""Compile, census, classify and synthesize the fixed corpus into an output directory.

    python scripts/run_corpus.py out/ --census-upto 16
"""

import argparse
import json
import time

from buchi.corpus import run_corpus


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("outdir")
    parser.add_argument("--census-upto", type=int, default=16)
    parser.add_argument("--quiet", action="store_true", help="do not print the summary")
    args = parser.parse_args()
    start = time.perf_counter()
    summary = run_corpus(args.outdir, census_upto=args.census_upto)
    if not args.quiet:
        print(json.dumps(summary, indent=2, sort_keys=True))
        print(f"done in {time.perf_counter() - start:.1f}s")


if __name__ == "__main__":
    main()
