"""``python -m crwburgers``."""

import sys

from .cli import main

sys.exit(main())
