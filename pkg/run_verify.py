# run_verify.py (in project root)
"""
Check a sparsifier file against a code file; exits 1 when some codeword is off by more than epsilon.

Usage:
    python run_verify.py data/code.txt outputs/sparsify/sparsifier.json --epsilon 0.2
"""

import sys
from dotenv import load_dotenv

load_dotenv()
sys.path.insert(0, 'src')

from cli.commands import main


if __name__ == "__main__":
    sys.exit(main(["verify"] + sys.argv[1:]))
