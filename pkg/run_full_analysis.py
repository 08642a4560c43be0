# run_full_analysis.py
"""
Master script: runs every acceptance suite in sequence, from the extremal
families through sparsification and the Chernoff check, and writes one
CSV and one JSON summary per suite to the output directory.
"""

import sys
import os
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

# Add src to path
sys.path.insert(0, 'src')

from common import report
from common.config import default_seed, output_dir
from suites.run_suites import run_suite

PHASES = [
    ("PHASE 1: SET FAMILIES", ["extremal", "structural", "nrd"]),
    ("PHASE 2: COVERS AND PEELING", ["duality", "peel"]),
    ("PHASE 3: PUNCTURING", ["puncture"]),
    ("PHASE 4: SPARSIFICATION", ["sparsify", "lowerbound", "chernoff"]),
]


def run_phase(title, names, seed):
    print("\n" + "=" * 80)
    print(title)
    print("=" * 80)
    results = []
    for name in names:
        print(f"\nRunning suite '{name}'...")
        results.append(run_suite(name, seed=seed))
    return results


def main():
    """Run the complete suite pipeline"""

    print("=" * 80)
    print("MOONFLOWER TOOLKIT - FULL ACCEPTANCE RUN")
    print("=" * 80)

    seed = default_seed()
    print(f"\nSeed: {seed}" + (" (from MOONFLOWER_SEED)" if os.getenv("MOONFLOWER_SEED") else ""))
    print(f"Reports: {output_dir()}/")
    report.set_verbose(True)

    results = []
    try:
        for title, names in PHASES:
            results += run_phase(title, names, seed)

        print("\n" + "=" * 80)
        print("FULL RUN COMPLETE!")
        print("=" * 80)
        for r in results:
            print(f"  {r.name:<12} {'[OK]' if r.passed else 'FAILED'}  {len(r.table):>6} rows  {r.seconds:8.1f}s")

    except KeyboardInterrupt:
        print("\n\nRun interrupted by user.")
        return 130
    except Exception as e:
        print(f"\n\nERROR: {e}")
        import traceback
        traceback.print_exc()
        return 1

    return 0 if all(r.passed for r in results) else 1


if __name__ == "__main__":
    sys.exit(main())
