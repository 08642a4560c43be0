# run_mf.py (in project root)
"""
Moonflower number MF(F) of a family file, with witness petals and family stats.

Usage:
    python run_mf.py data/family.txt [--greedy] [--budget N] [--format json]
"""

import sys
from dotenv import load_dotenv

load_dotenv()
sys.path.insert(0, 'src')

from cli.commands import main


if __name__ == "__main__":
    sys.exit(main(["mf"] + sys.argv[1:]))
