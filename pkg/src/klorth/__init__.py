"""Index-integral moments, orthogonal polynomial families and identity checks
for the Macdonald function of imaginary order."""

__version__ = "0.1.0"
