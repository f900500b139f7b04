"""Distributions of the largest and smallest observation in a multiple-outlier model.

``n1`` observations follow ``F1(λ1 x)`` and ``n2`` follow ``F2(λ2 x)``, all
sharing one Archimedean generator ψ.  The maximum couples the CDFs and the
minimum couples the survival functions:

    F_max(x) = ψ(n1 φ(F1(λ1 x)) + n2 φ(F2(λ2 x)))
    S_min(x) = ψ(n1 φ(S1(λ1 x)) + n2 φ(S2(λ2 x)))

Everything is evaluated from ``s_i = -ln u_i`` so tails neither underflow
nor lose digits next to 1.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from .baselines import Baseline
from .copula import S_MAX, Generator
from .errors import EvaluationError, InvalidInput
from .numerics import DEFAULT_GRID_COUNT, Grid, Spacing, invert_monotone, make_grid

TAIL_PROB = 1e-4
_EDGE_NUDGE = 1e-9


class Extreme(enum.Enum):
    MAX = "max"
    MIN = "min"


def _log1mexp(a):
    a = np.asarray(a, dtype=float)
    with np.errstate(all="ignore"):
        return np.where(a > -math.log(2.0), np.log(-np.expm1(a)), np.log1p(-np.exp(a)))


@dataclass(frozen=True)
class MultipleOutlierModel:
    """One sample of ``count1 + count2`` dependent scale-model observations."""

    generator: Generator
    baseline1: Baseline
    baseline2: Baseline
    scale1: float
    scale2: float
    count1: int
    count2: int
    extreme: Extreme = Extreme.MAX

    def __post_init__(self):
        if not isinstance(self.generator, Generator):
            raise InvalidInput("generator must be a Generator")
        if not (isinstance(self.baseline1, Baseline) and isinstance(self.baseline2, Baseline)):
            raise InvalidInput("baselines must be Baseline instances")
        for name in ("scale1", "scale2"):
            v = float(getattr(self, name))
            if not math.isfinite(v) or v <= 0:
                raise InvalidInput(f"{name} must be positive, got {v!r}")
            object.__setattr__(self, name, v)
        for name in ("count1", "count2"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise InvalidInput(f"{name} must be an integer >= 1, got {v!r}")
            object.__setattr__(self, name, int(v))
        object.__setattr__(self, "extreme", Extreme(self.extreme))

    @property
    def scales(self) -> tuple[float, float]:
        return (self.scale1, self.scale2)

    @property
    def counts(self) -> tuple[int, int]:
        return (self.count1, self.count2)

    @property
    def log_scales(self) -> tuple[float, float]:
        """``(ln λ1, ln λ2)``."""
        return (math.log(self.scale1), math.log(self.scale2))

    @property
    def size(self) -> int:
        return self.count1 + self.count2

    def with_counts(self, n1: int, n2: int) -> "MultipleOutlierModel":
        return replace(self, count1=n1, count2=n2)

    def with_scales(self, l1: float, l2: float) -> "MultipleOutlierModel":
        return replace(self, scale1=l1, scale2=l2)

    def distribution(self) -> "ExtremeDistribution":
        return ExtremeDistribution(self)

    def describe(self) -> str:
        return (f"{self.extreme.value} of {self.generator.describe()}; "
                f"{self.count1} x {self.baseline1.describe()} at scale {self.scale1:g}, "
                f"{self.count2} x {self.baseline2.describe()} at scale {self.scale2:g}")


@dataclass(frozen=True, eq=False)
class ExtremeDistribution:
    """CDF, survival, density, hazards and quantiles of the model's extreme."""

    model: MultipleOutlierModel

    def __post_init__(self):
        m = self.model
        object.__setattr__(self, "_parts", (m.baseline1.scaled(m.scale1),
                                            m.baseline2.scaled(m.scale2)))

    @property
    def components(self) -> tuple[Baseline, Baseline]:
        return self._parts

    @property
    def is_max(self) -> bool:
        return self.model.extreme is Extreme.MAX

    # core ------------------------------------------------------------------
    def _s(self, x):
        """``-ln u_i`` for each component (CDFs for MAX, SFs for MIN)."""
        method = "log_cdf" if self.is_max else "log_sf"
        return [-np.asarray(getattr(b, method)(x), dtype=float) for b in self._parts]

    def _log_main(self, x):
        """``ln F_max`` (MAX) or ``ln S_min`` (MIN) with the cap policy."""
        g = self.model.generator
        s1, s2 = self._s(x)
        with np.errstate(all="ignore"):
            z = self.model.count1 * g.phi_neglog(s1) + self.model.count2 * g.phi_neglog(s2)
            out = np.asarray(g.log_psi(z), dtype=float)
        capped = (s1 >= S_MAX) | (s2 >= S_MAX)
        return np.where(capped, -np.inf, out)

    def _rate(self, x):
        """``a(z) Σ n_i q_i / a(w_i)``: the MAX reversed hazard or MIN hazard."""
        g = self.model.generator
        s = self._s(x)
        method = "rev_hazard" if self.is_max else "hazard"
        counts = self.model.counts
        with np.errstate(all="ignore"):
            w = [np.asarray(g.phi_neglog(si), dtype=float) for si in s]
            z = counts[0] * w[0] + counts[1] * w[1]
            total = np.zeros_like(z)
            for n, si, wi, b in zip(counts, s, w, self._parts):
                q = np.asarray(getattr(b, method)(np.asarray(x, dtype=float)), dtype=float)
                term = n * q / np.asarray(g.dlog_psi(wi), dtype=float)
                total = total + np.where(si == 0, 0.0, term)
            out = np.asarray(g.dlog_psi(z), dtype=float) * total
        capped = (s[0] >= S_MAX) | (s[1] >= S_MAX)
        return np.where(capped | ~np.isfinite(out), np.nan, out)

    @staticmethod
    def _ret(x, values, name=None):
        if np.ndim(x) == 0:
            v = float(values)
            if name is not None and math.isnan(v):
                raise EvaluationError(f"{name} undefined at x={float(x)!r}")
            return v
        return values

    # public ----------------------------------------------------------------
    def log_cdf(self, x):
        main = self._log_main(x)
        return self._ret(x, main if self.is_max else _log1mexp(main))

    def log_sf(self, x):
        main = self._log_main(x)
        return self._ret(x, _log1mexp(main) if self.is_max else main)

    def cdf(self, x):
        main = self._log_main(x)
        with np.errstate(all="ignore"):
            return self._ret(x, np.exp(main) if self.is_max else -np.expm1(main))

    def sf(self, x):
        main = self._log_main(x)
        with np.errstate(all="ignore"):
            return self._ret(x, -np.expm1(main) if self.is_max else np.exp(main))

    def rev_hazard(self, x):
        """``f / F``; closed form for MAX, ``h S / F`` for MIN."""
        if self.is_max:
            return self._ret(x, self._rate(x), "reversed hazard")
        with np.errstate(all="ignore"):
            out = self._rate(x) * np.exp(self.log_sf(x) - self.log_cdf(x))
        return self._ret(x, np.where(np.isfinite(out), out, np.nan), "reversed hazard")

    def hazard(self, x):
        """``f / S``; closed form for MIN, ``r~ F / S`` for MAX."""
        if not self.is_max:
            return self._ret(x, self._rate(x), "hazard")
        with np.errstate(all="ignore"):
            out = self._rate(x) * np.exp(self.log_cdf(x) - self.log_sf(x))
        return self._ret(x, np.where(np.isfinite(out), out, np.nan), "hazard")

    def pdf(self, x):
        """Density from the closed-form (reversed) hazard, clamped at 0."""
        with np.errstate(all="ignore"):
            if self.is_max:
                out = self._rate(x) * np.exp(self.log_cdf(x))
            else:
                out = self._rate(x) * np.exp(self.log_sf(x))
        return self._ret(x, np.maximum(out, 0.0), "pdf")

    def support(self) -> tuple[float, float]:
        (l1, h1), (l2, h2) = (b.support() for b in self._parts)
        if self.is_max:
            return max(l1, l2), max(h1, h2)
        return min(l1, l2), min(h1, h2)

    def _brackets(self, p, lower_tail: bool):
        """Fréchet-bound brackets for the ``p``-quantile (or inverse SF)."""
        n = self.model.size
        b1, b2 = self._parts
        if lower_tail:
            u = p
            if self.is_max:
                lo = np.maximum(b1.quantile(u), b2.quantile(u))
                hi = np.maximum(b1.isf((1 - u) / n), b2.isf((1 - u) / n))
            else:
                lo = np.minimum(b1.quantile(u / n), b2.quantile(u / n))
                hi = np.minimum(b1.quantile(u), b2.quantile(u))
        else:
            v = p
            if self.is_max:
                lo = np.maximum(b1.isf(v), b2.isf(v))
                hi = np.maximum(b1.isf(v / n), b2.isf(v / n))
            else:
                lo = np.minimum(b1.quantile((1 - v) / n), b2.quantile((1 - v) / n))
                hi = np.minimum(b1.isf(v), b2.isf(v))
        return np.asarray(lo, dtype=float), np.asarray(hi, dtype=float)

    def _solve(self, p, lower_tail: bool):
        arr = np.asarray(p, dtype=float)
        flat = arr.ravel()
        if np.any(~((flat > 0) & (flat < 1))):
            raise InvalidInput("probabilities must lie in (0, 1)")
        cdf_prob = flat if lower_tail else 1.0 - flat
        lo, hi = self._brackets(flat, lower_tail)
        out = np.empty_like(flat)
        # the smaller of the two tail probabilities is solved in log space
        left = cdf_prob <= 0.5
        if left.any():
            target = np.log(flat[left]) if lower_tail else np.log1p(-flat[left])
            out[left] = invert_monotone(self.log_cdf, target, lo[left], hi[left],
                                        increasing=True)
        if (~left).any():
            target = np.log1p(-flat[~left]) if lower_tail else np.log(flat[~left])
            out[~left] = invert_monotone(self.log_sf, target, lo[~left], hi[~left],
                                         increasing=False)
        out = out.reshape(arr.shape)
        return float(out) if arr.ndim == 0 else out

    def quantile(self, u):
        """``x`` with ``F(x) = u`` for ``u`` in (0, 1)."""
        return self._solve(u, lower_tail=True)

    def isf(self, v):
        """``x`` with ``S(x) = v`` for ``v`` in (0, 1)."""
        return self._solve(v, lower_tail=False)

    def default_grid(self, count: int = DEFAULT_GRID_COUNT) -> Grid:
        lo, hi = float(self.quantile(TAIL_PROB)), float(self.isf(TAIL_PROB))
        slo, shi = self.support()
        lo = max(lo, slo * (1 + _EDGE_NUDGE))
        hi = min(hi, shi * (1 - _EDGE_NUDGE))
        return make_grid(lo, hi, count, Spacing.LOG)

    def mean(self) -> float:
        """``∫ Q(t) dt`` over (0, 1); see :func:`orders.lorenz_curve`."""
        from .orders import quantile_integral
        return quantile_integral(self)


def _require(m: MultipleOutlierModel, extreme: Extreme):
    if m.extreme is not extreme:
        raise InvalidInput(f"model describes the {m.extreme.value}, not the {extreme.value}")
    return m.distribution()


def max_cdf(m: MultipleOutlierModel, x):
    return _require(m, Extreme.MAX).cdf(x)


def min_sf(m: MultipleOutlierModel, x):
    return _require(m, Extreme.MIN).sf(x)


def max_rev_hazard(m: MultipleOutlierModel, x):
    return _require(m, Extreme.MAX).rev_hazard(x)


def min_hazard(m: MultipleOutlierModel, x):
    return _require(m, Extreme.MIN).hazard(x)


def pdf(d: ExtremeDistribution, x):
    return d.pdf(x)


def quantile(d: ExtremeDistribution, u):
    return d.quantile(u)
