"""``python -m radiocov``."""

from radiocov.cli import main

raise SystemExit(main())
