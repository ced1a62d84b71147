"""Random-state check of the four lower bounds under both delta variants.

    python3 scripts/fuzz_bounds.py --n 10000 --seed 1
"""

import argparse
import time

from eurcoh.fuzz import bound_fuzz
from eurcoh.infotheory import DELTA_VARIANTS

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description="Random-state check of the four lower bounds.")
    ap.add_argument("--n", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--product", action="store_true", help="separable pure states only")
    a = ap.parse_args()
    for variant in DELTA_VARIANTS:
        t0 = time.perf_counter()
        summary = bound_fuzz(a.n, a.seed, variant, product=a.product)
        print(f"== {variant} ({time.perf_counter() - t0:.1f} s)")
        print("\n".join(summary.lines()))
