"""Print exact unisolvence certificates for a range of elements.

One line per element: functional count, shape space dimension, the exact
determinant of the functional matrix, and the exact bubble integrals.
Exits 2 if any certificate fails.
"""

import argparse
import sys

from hmfem.reports import run_certify


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--m-max", type=int, default=8)
    parser.add_argument("--n-max", type=int, default=3)
    args = parser.parse_args()
    return 0 if run_certify(args.m_max, args.n_max) else 2


if __name__ == "__main__":
    sys.exit(main())
