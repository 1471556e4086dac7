"""
Allows running the package as a module.
Example: python -m orbitlab --manifest experiments/classify.toml
"""

from orbitlab.core.cli import main

if __name__ == "__main__":
    main()
