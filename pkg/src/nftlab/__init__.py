"""Fast forward and inverse nonlinear Fourier transforms for the
focusing Zakharov-Shabat problem."""

__version__ = "0.1.0"
