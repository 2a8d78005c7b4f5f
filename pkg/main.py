"""Entry point for running the command line directly."""

from overlapix.main import main

if __name__ == "__main__":
    raise SystemExit(main())
