# run_oracle.py (in project root)
"""
Brute-force ground truth (mf, nrd, phi, sparsifier) on a family or code file.

Usage:
    python run_oracle.py mf data/family.txt
"""

import sys
from dotenv import load_dotenv

load_dotenv()
sys.path.insert(0, 'src')

from cli.commands import main


if __name__ == "__main__":
    sys.exit(main(["oracle"] + sys.argv[1:]))
