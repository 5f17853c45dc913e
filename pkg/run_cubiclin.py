#!/usr/bin/env python3
"""
cubiclin - Main entry point

This script runs the cubiclin CLI from a source checkout.
"""

import sys
from cubiclin.main import main

if __name__ == "__main__":
    sys.exit(main())
