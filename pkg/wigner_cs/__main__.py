"""Entry point for ``python -m wigner_cs``."""

from wigner_cs.cli import main

if __name__ == "__main__":
    raise SystemExit(main())
