#!/usr/bin/env python3
"""
Main entry point for the re-uploading classifier trainer
"""

import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

from src.cli.app import main  # noqa: E402

if __name__ == "__main__":
    sys.exit(main())
