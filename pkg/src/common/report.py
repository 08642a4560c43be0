# src/common/report.py
"""
Console progress output: stage banners, step lines, [OK] and warning lines,
and tqdm progress bars that follow the same verbosity switch.
"""

from tqdm import tqdm

_VERBOSE = False


def set_verbose(flag):
    global _VERBOSE
    _VERBOSE = bool(flag)


def is_verbose():
    return _VERBOSE


def banner(title, width=80):
    if _VERBOSE:
        print("\n" + "=" * width)
        print(title.upper())
        print("=" * width)


def step(message):
    if _VERBOSE:
        print(f"\n{message}")


def detail(message):
    if _VERBOSE:
        print(f"  {message}")


def ok(message):
    if _VERBOSE:
        print(f"\n[OK] {message}")


def warn(message):
    if _VERBOSE:
        print(f"  ⚠ {message}")


def progress(iterable, desc=None, total=None):
    return tqdm(iterable, desc=desc, total=total, disable=not _VERBOSE, leave=False)
