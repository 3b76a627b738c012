"""Conductive-boundary scattering in 2D and Landweber direct sampling imaging."""

__version__ = "0.1.0"
