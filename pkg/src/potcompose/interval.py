"""Open intervals with independently finite or infinite endpoints."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Interval:
    """Open interval ``(lo, hi)``; either endpoint may be infinite.

    Besides the plain bounds, an interval knows a *compactified* coordinate
    ``u`` used for graded grids: finite intervals keep ``u = x``, a half line
    ``(a, inf)`` uses ``u = tanh(x - a)``, ``(-inf, b)`` uses
    ``u = tanh(x - b)`` and the whole line uses ``u = tanh(x)``.
    """

    lo: float
    hi: float

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if math.isnan(lo) or math.isnan(hi) or not lo < hi:
            raise ValueError(f"interval needs lo < hi, got ({lo}, {hi})")
        if lo == math.inf or hi == -math.inf:
            raise ValueError(f"invalid interval ({lo}, {hi})")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def lo_finite(self) -> bool:
        return math.isfinite(self.lo)

    @property
    def hi_finite(self) -> bool:
        return math.isfinite(self.hi)

    @property
    def finite(self) -> bool:
        return self.lo_finite and self.hi_finite

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def contains(self, x) -> bool:
        x = np.asarray(x)
        return bool(np.all((x > self.lo) & (x < self.hi)))

    # -- compactified coordinate ------------------------------------------

    def _shift(self) -> float:
        if self.finite:
            return 0.0
        if self.lo_finite:
            return self.lo
        if self.hi_finite:
            return self.hi
        return 0.0

    @property
    def comp_bounds(self) -> tuple[float, float]:
        if self.finite:
            return self.lo, self.hi
        return (0.0 if self.lo_finite else -1.0), (0.0 if self.hi_finite else 1.0)

    def to_comp(self, x):
        if self.finite:
            return np.asarray(x, dtype=float)
        return np.tanh(np.asarray(x, dtype=float) - self._shift())

    def from_comp(self, u):
        if self.finite:
            return np.asarray(u, dtype=float)
        return np.arctanh(np.asarray(u, dtype=float)) + self._shift()

    def reference_point(self) -> float:
        """A representative interior point, used to anchor probes."""
        if self.finite:
            return 0.5 * (self.lo + self.hi)
        if self.lo_finite:
            return self.lo + 1.0
        if self.hi_finite:
            return self.hi - 1.0
        return 0.0

    def __str__(self):
        return f"({self.lo:g}, {self.hi:g})"
