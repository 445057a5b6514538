"""Penaliser, diffusivity and flux family driving the repulsive evolution.

The base penaliser on [0, 1] is

    psi(s) = a * ((s - 1)**(2n) - 1),      a > 0, n in {1, 2, ...},

extended to all of R by evenness in s and by period 2.  Its flux
(pairwise interaction force) is

    flux(s) = a * n * (s - 1)**(2n - 1)    for s in (0, 2),

extended oddly and 2-periodically, with jump discontinuities at the even
integers.  Evaluation folds the argument into the base interval instead of
branching piecewise, so the symmetries hold by construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Penaliser",
    "psi",
    "flux",
    "dflux",
    "flux_lipschitz_tight",
    "flux_lipschitz_coarse",
]


@dataclass(frozen=True)
class Penaliser:
    """Amplitude/exponent pair selecting one member of the family."""

    a: float = 1.0
    n: int = 1

    def __post_init__(self) -> None:
        if not self.a > 0:
            raise ValueError(f"penaliser amplitude must be positive, got a={self.a}")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"penaliser exponent must be a positive integer, got n={self.n}")
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "n", int(self.n))


def _scalar_or_array(s, out):
    if np.ndim(s) == 0:
        return float(out)
    return out


def psi(p: Penaliser, s) -> float | np.ndarray:
    """Penaliser value at squared argument, psi(s) = Psi(s^2).

    Total on R: the argument is folded by evenness and 2-periodicity into
    [0, 1] before the base polynomial is applied.
    """
    arr = np.asarray(s, dtype=float)
    r = np.abs(arr) % 2.0
    r = np.minimum(r, 2.0 - r)
    out = p.a * ((r - 1.0) ** (2 * p.n) - 1.0)
    return _scalar_or_array(s, out)


def flux(p: Penaliser, s) -> float | np.ndarray:
    """Interaction force flux(s) = Psi'(s^2) * s, odd and 2-periodic.

    At the jump points (even integers) the odd-symmetry midpoint 0 is
    returned; the evolution never evaluates there because coinciding
    positions are excluded from the difference sums.
    """
    arr = np.asarray(s, dtype=float)
    sign = np.sign(arr)
    r = np.abs(arr) % 2.0
    mag = p.a * p.n * (r - 1.0) ** (2 * p.n - 1)
    out = np.where(r == 0.0, 0.0, sign * mag)
    return _scalar_or_array(s, out)


def dflux(p: Penaliser, s) -> float | np.ndarray:
    """Derivative of the flux on the folded base interval (0, 2).

    Raises ValueError at even integers, where the flux jumps.
    """
    arr = np.asarray(s, dtype=float)
    r = np.abs(arr) % 2.0
    if np.any(r == 0.0):
        raise ValueError("flux derivative undefined at even integers (jump points)")
    out = p.a * p.n * (2 * p.n - 1) * (r - 1.0) ** (2 * p.n - 2)
    return _scalar_or_array(s, out)


def flux_lipschitz_tight(p: Penaliser) -> float:
    """Supremum of |flux'| over the open base interval (0, 2): a*n*(2n-1)."""
    return p.a * p.n * (2 * p.n - 1)


def flux_lipschitz_coarse(p: Penaliser) -> float:
    """Conservative flux Lipschitz constant a*n*(2n-1)*2**(2n-2).

    Exceeds the tight constant for n >= 2; exposed because the
    well-posedness analysis of the time-continuous evolution is stated
    with this value.  Step-size bounds use the tight constant.
    """
    return p.a * p.n * (2 * p.n - 1) * 2.0 ** (2 * p.n - 2)
