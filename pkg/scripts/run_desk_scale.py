"""Compute (or refresh) the desk-scale feature datasets.

usage: python3 scripts/run_desk_scale.py [OUT_DIR] [--workers N]
"""
import argparse

from elaselect import desk


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("out_dir", nargs="?", default=None)
    p.add_argument("--workers", type=int, default=1)
    a = p.parse_args()
    for d, m, inst in desk.GROUPS:
        ds = desk.ensure(d, m, inst, a.out_dir, verbose=True, workers=a.workers)
        print(f"d={d} n={m * d}: {len(ds)} rows in "
              f"{desk.feature_file(a.out_dir or desk.default_dir(), d, m * d)}", flush=True)


if __name__ == "__main__":
    main()
