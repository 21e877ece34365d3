"""Zero-Hopf averaging, Lyapunov-Schmidt reduction and stability tools for
the Rössler family."""

__version__ = "0.1.0"
