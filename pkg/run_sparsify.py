# run_sparsify.py (in project root)
"""
Build, verify and save an epsilon-sparsifier for a code file.

Usage:
    python run_sparsify.py data/code.txt --epsilon 0.2 [--seed S] [--retries R] [--out DIR]
"""

import sys
from dotenv import load_dotenv

load_dotenv()
sys.path.insert(0, 'src')

from cli.commands import main


if __name__ == "__main__":
    sys.exit(main(["sparsify"] + sys.argv[1:]))
