# run_suite.py (in project root)
"""
Run one acceptance suite, or all of them, writing CSV and JSON reports to outputs/.

Usage:
    python run_suite.py --suite duality [--trials 100] [--seed S]
"""

import sys
from dotenv import load_dotenv

load_dotenv()
sys.path.insert(0, 'src')

from cli.commands import main


if __name__ == "__main__":
    sys.exit(main(["suite"] + sys.argv[1:]))
