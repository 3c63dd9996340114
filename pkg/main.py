"""Backward-compatible entry point.

Prefer `python -m narain_lab` or the `narain-lab` console script.
"""

import sys

from narain_lab.__main__ import main


if __name__ == "__main__":
    sys.exit(main())
