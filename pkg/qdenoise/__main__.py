"""
Main entry point for qdenoise.
"""
import sys

from qdenoise.cli import main

if __name__ == "__main__":
    sys.exit(main())
