"""
softpairs - numerical toolkit for soft projection pairs.
"""

__version__ = "1.0.0"
__description__ = (
    "Relation checks, integer classes, certified homotopies and lattice Chern numbers for soft projection pairs"
)
