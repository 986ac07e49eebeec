"""Entry point for ``python -m dimkit``."""

import sys

from .cli import main

sys.exit(main())
