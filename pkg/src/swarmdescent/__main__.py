"""Allow ``python -m swarmdescent`` as an alias for the console script."""

import sys

from swarmdescent.cli import main

if __name__ == "__main__":
    sys.exit(main())
