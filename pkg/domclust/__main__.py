"""Run the command line interface with ``python -m domclust``."""
import sys

from domclust.cli import main

sys.exit(main())
