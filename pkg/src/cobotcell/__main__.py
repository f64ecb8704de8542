"""Allow `python -m cobotcell` as an alias for the console script."""

import sys

from cobotcell.cli import main

if __name__ == "__main__":
    sys.exit(main())
