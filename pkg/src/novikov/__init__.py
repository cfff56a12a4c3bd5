"""Numerical laboratory for u_t - u_txx = 4uu_x + 2u_x^2 + 2uu_xx - 6u_xu_xx - 2uu_xxx."""

from .jets import Field, FieldHistory, Jet3, SpaceGrid, eq_residual

__all__ = ["Field", "FieldHistory", "Jet3", "SpaceGrid", "eq_residual"]
__version__ = "0.1.0"
