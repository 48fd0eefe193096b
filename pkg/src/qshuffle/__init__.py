"""q-shuffle algebras, S-matrix determinants and constants."""
