"""Uncertainty principles for the Fourier and short-time Fourier transforms on
finite Abelian groups: exact transforms, Gabor matrices, support bounds, minor-rank
enumeration, support-pair feasibility and sparse recovery."""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"

from .groups import (  # noqa: E402
    FiniteAbelianGroup,
    Signal,
    dft_matrix,
    fourier,
    inverse_fourier,
    rihaczek,
    symplectic_fourier,
)
from .gabor import frame_bounds, gabor_matrix, istft, stft  # noqa: E402

__all__ = [
    "FiniteAbelianGroup",
    "Signal",
    "dft_matrix",
    "fourier",
    "inverse_fourier",
    "rihaczek",
    "symplectic_fourier",
    "gabor_matrix",
    "stft",
    "istft",
    "frame_bounds",
    "__version__",
]
