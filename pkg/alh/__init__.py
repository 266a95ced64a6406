"""Mass and energy-momentum of asymptotically locally hyperbolic metrics."""

__version__ = "0.3.1"
