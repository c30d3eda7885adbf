"""
Entry point for running the package as a module.

Usage:
    python -m cpcause cause pens.cp pens.story --cause prof --effect nopens
"""

from .cli import main

if __name__ == "__main__":
    main()
