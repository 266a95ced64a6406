#!/usr/bin/env python3
"""Command-line entry point: python main.py mass|check|boost|catalog ..."""
import sys

from alh.cli import main

if __name__ == "__main__":
    sys.exit(main())
