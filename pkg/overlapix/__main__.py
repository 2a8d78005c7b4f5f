"""Entry point for ``python -m overlapix``."""

from overlapix.main import main

raise SystemExit(main())
