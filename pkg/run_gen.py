# run_gen.py (in project root)
"""
Generate lower-bound families, random families and random codes.

Usage:
    python run_gen.py lowerbound --k 4 --w 3 --out data/family_4_3.txt
"""

import sys
from dotenv import load_dotenv

load_dotenv()
sys.path.insert(0, 'src')

from cli.commands import main


if __name__ == "__main__":
    sys.exit(main(["gen"] + sys.argv[1:]))
