"""Allow ``python -m artifact`` as an alias for the ``zsum`` script."""

import sys

from .cli import main

if __name__ == "__main__":
    sys.exit(main())
