"""Gaussian-process dynamics learning with chance-constrained MPC."""

from .backend import BACKEND
from .kernels import KernelParams

__all__ = ["BACKEND", "KernelParams"]
__version__ = "0.1.0"
