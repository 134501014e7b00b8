"""High-order shock-capturing reconstruction with limiter-filtered stencil
selection, a 1D/2D compressible Euler solver, a modified-wavenumber analyzer,
and a benchmark harness."""

__version__ = "0.1.0"
