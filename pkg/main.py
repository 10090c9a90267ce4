#!/usr/bin/env python
"""
Wrapper script for running from a checkout.
Calls the CLI entry point from the package.
"""

import sys
from historical_record_linker.cli import main

if __name__ == '__main__':
    sys.exit(main())
