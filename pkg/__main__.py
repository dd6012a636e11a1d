#!/usr/bin/env python
"""
Entry point for matchstick.
This module delegates execution to the main() function in matchstick.cli.
"""

from matchstick.cli import main
import sys

if __name__ == "__main__":
    sys.exit(main())
