"""Mercer spectra and ridge-regression risk experiments for inner-product
and Hermite kernels on anisotropic power-law Gaussian data."""

__version__ = "0.1.0"
