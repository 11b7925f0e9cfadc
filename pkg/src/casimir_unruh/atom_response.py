"""Two-level atom response functions for the ground state.

Convention: ``H = (gap/2) sigma_3`` so that ``gap`` is the level splitting and
the coupling operator ``sigma_2`` oscillates at ``gap``.  The ground state is
the ``sigma_3 = -1`` eigenvector.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .core import ConfigError

SIGMA_2 = np.array([[0.0, -1j], [1j, 0.0]])
SIGMA_3 = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
_STATES = {
    "ground": np.array([0.0, 1.0], dtype=complex),
    "excited": np.array([1.0, 0.0], dtype=complex),
}


@dataclass(frozen=True)
class AtomicResponse:
    gap: float
    state: str = "ground"

    def __post_init__(self):
        if not self.gap > 0:
            raise ConfigError(f"gap must be > 0, got {self.gap!r}")
        if self.state not in _STATES:
            raise ConfigError(f"unknown state {self.state!r}")

    def susceptibility(self, u):
        sign = 1.0 if self.state == "ground" else -1.0
        return sign * atomic_susceptibility(u, self.gap)

    def symmetric_correlation(self, u):
        return atomic_symmetric_correlation(u, self.gap)


def atomic_susceptibility(u, gap):
    """Ground-state ``chi(u) = (1/2) <g|[sigma_2(u), sigma_2(0)]|g>``.

    Equals ``-i sin(gap * u)``; odd in ``u`` and purely imaginary.
    """
    return -1j * np.sin(gap * np.asarray(u, dtype=float))


def atomic_symmetric_correlation(u, gap):
    """Ground-state ``C(u) = (1/2) <g|{sigma_2(u), sigma_2(0)}|g> = cos(gap * u)``."""
    return np.cos(gap * np.asarray(u, dtype=float))


def heisenberg_oracle(u: float, gap: float, state: str = "ground") -> tuple[complex, float]:
    """Evaluate ``(chi, C)`` by evolving ``sigma_2`` with the 2x2 matrix exponential."""
    psi = _STATES[state]
    h = 0.5 * gap * SIGMA_3
    ev = linalg.expm(1j * h * u)
    s_u = ev @ SIGMA_2 @ ev.conj().T
    comm = s_u @ SIGMA_2 - SIGMA_2 @ s_u
    anti = s_u @ SIGMA_2 + SIGMA_2 @ s_u
    chi = 0.5 * (psi.conj() @ comm @ psi)
    corr = 0.5 * (psi.conj() @ anti @ psi)
    return complex(chi), float(corr.real)


def response_convolution(s, gap):
    """``K(s) = int_0^s sin(gap u) sin(gap (s - u)) du``.

    The two atomic sine responses joined by a fixed total delay collapse to
    this kernel, ``(sin(gap s)/gap - s cos(gap s)) / 2``.  Series for small
    ``gap * s`` avoids cancellation (``K ~ gap^2 s^3 / 6``).
    """
    s = np.asarray(s, dtype=float)
    x = gap * s
    small = np.abs(x) < 1e-2
    xs = np.where(small, 1.0, x)
    direct = 0.5 * (np.sin(xs) - xs * np.cos(xs)) / gap
    series = x**3 / 6.0 * (1.0 - x**2 / 10.0 + x**4 / 280.0 - x**6 / 15120.0) / gap
    return np.where(small, series, direct)


def response_spectrum(w, gap):
    """Fourier weight of one atomic response, ``gap / (gap^2 - w^2)``."""
    w = np.asarray(w)
    return gap / (gap**2 - w**2)
