"""Module entry point so `python -m mbl` behaves like the `mbl` script."""
import sys

from .cli import main

if __name__ == "__main__":
    sys.exit(main())
