# run_lowerbound.py (in project root)
"""
Write the chain code for (n, k, epsilon) and optionally certify a sparsifier against it.

Usage:
    python run_lowerbound.py --n 8 --k 2 --epsilon 0.5 [--against sparsifier.json]
"""

import sys
from dotenv import load_dotenv

load_dotenv()
sys.path.insert(0, 'src')

from cli.commands import main


if __name__ == "__main__":
    sys.exit(main(["lowerbound"] + sys.argv[1:]))
