# Meixner-Pollaczek spectral toolkit: weights, orthogonal bases, expansions and checks
__version__ = "1.0.0"
