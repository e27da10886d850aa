"""
Dense Hermitian linear algebra, soft pairs, homotopies and matrix fields.
"""
