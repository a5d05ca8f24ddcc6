"""ADAPT-QAOA for MaxCut and the TFIM with Clifford-point and low-rank
stabilizer approximations, entirely on classical hardware."""

__version__ = "0.1.0"

from .kernels import BACKEND as KERNEL_BACKEND  # noqa: F401
