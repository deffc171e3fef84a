"""orbitfit: virtual placement and quantitative fit comparison of preformed
orbital plates against a mirrored-orbit reconstruction."""

__version__ = "0.1.0"
