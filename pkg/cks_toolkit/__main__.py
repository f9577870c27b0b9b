"""``python -m cks_toolkit``."""
from cks_toolkit.cli import main

if __name__ == "__main__":
    main()
