"""Closed boundary curves in parameter space, given as truncated Fourier series."""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from sweepchi.core.errors import SceneValidationError
from sweepchi.models.schemas import BoundarySpec, FourierSpec, Orientation

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class FourierSeries:
    """mean + slope*tau + sum_k (cos[k-1] cos(k tau) + sin[k-1] sin(k tau))."""

    mean: float = 0.0
    cos: tuple[float, ...] = ()
    sin: tuple[float, ...] = ()
    slope: float = 0.0

    def derivatives(self, tau) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Value and first two derivatives at ``tau``."""
        tau = np.asarray(tau, dtype=float)
        order = max(len(self.cos), len(self.sin))
        value = self.mean + self.slope * tau
        first = np.full_like(tau, self.slope)
        second = np.zeros_like(tau)
        if order == 0:
            return value, first, second
        a = np.zeros(order)
        b = np.zeros(order)
        a[: len(self.cos)] = self.cos
        b[: len(self.sin)] = self.sin
        k = np.arange(1, order + 1, dtype=float)
        angle = tau[..., None] * k
        c, s = np.cos(angle), np.sin(angle)
        value = value + (c * a + s * b).sum(axis=-1)
        first = first + (k * (b * c - a * s)).sum(axis=-1)
        second = second - (k * k * (a * c + b * s)).sum(axis=-1)
        return value, first, second


@dataclass(frozen=True)
class BoundaryCurve:
    """A closed curve tau -> (s(tau), t(tau)), tau in [0, 2*pi).

    ``winding`` counts how often the curve wraps each periodic parameter
    direction. The lifted curve satisfies q(tau + 2*pi) = q(tau) + shift.
    """

    s: FourierSeries
    t: FourierSeries
    winding: tuple[int, int] = (0, 0)
    reversed: bool = False

    @classmethod
    def circle(cls, center, radius: float, clockwise: bool = False) -> BoundaryCurve:
        return cls(
            s=FourierSeries(mean=float(center[0]), cos=(float(radius),)),
            t=FourierSeries(mean=float(center[1]), sin=(float(radius),)),
            reversed=clockwise,
        )

    @classmethod
    def coordinate_loop(
        cls, level: float, period: float, start: float = 0.0, decreasing: bool = False
    ) -> BoundaryCurve:
        """The line t = level, wound once around a periodic s direction."""
        return cls(
            s=FourierSeries(mean=start, slope=period / TWO_PI),
            t=FourierSeries(mean=level),
            winding=(1, 0),
            reversed=decreasing,
        )

    @classmethod
    def from_spec(cls, spec: BoundarySpec, periods: tuple[float, float]) -> BoundaryCurve:
        series = []
        for axis, (coeffs, winding, period) in enumerate(
            zip((spec.s, spec.t), spec.winding, periods, strict=True)
        ):
            if winding and not period:
                raise SceneValidationError(
                    "winding on a non-periodic direction", f"axis {'st'[axis]} winds {winding} times"
                )
            series.append(
                FourierSeries(
                    mean=coeffs.mean,
                    cos=tuple(coeffs.cos),
                    sin=tuple(coeffs.sin),
                    slope=winding * period / TWO_PI,
                )
            )
        return cls(
            s=series[0],
            t=series[1],
            winding=tuple(spec.winding),
            reversed=spec.orientation is Orientation.REVERSED,
        )

    def to_spec(self) -> BoundarySpec:
        return BoundarySpec(
            s=FourierSpec(mean=self.s.mean, cos=list(self.s.cos), sin=list(self.s.sin)),
            t=FourierSpec(mean=self.t.mean, cos=list(self.t.cos), sin=list(self.t.sin)),
            winding=self.winding,
            orientation=Orientation.REVERSED if self.reversed else Orientation.FORWARD,
        )

    @property
    def shift(self) -> np.ndarray:
        """Lifted displacement q(2*pi) - q(0)."""
        sign = -1.0 if self.reversed else 1.0
        return sign * TWO_PI * np.array([self.s.slope, self.t.slope])

    def jet(self, tau) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """q, q', q'' with a trailing axis of size 2."""
        tau = np.asarray(tau, dtype=float)
        sign = -1.0 if self.reversed else 1.0
        arg = sign * tau
        s, ds, dds = self.s.derivatives(arg)
        t, dt, ddt = self.t.derivatives(arg)
        return (
            np.stack([s, t], axis=-1),
            sign * np.stack([ds, dt], axis=-1),
            np.stack([dds, ddt], axis=-1),
        )

    def points(self, tau) -> np.ndarray:
        return self.jet(tau)[0]

    def lifted_samples(self, count: int) -> tuple[np.ndarray, np.ndarray]:
        """``count + 1`` samples over [0, 2*pi]; the last one closes the loop."""
        tau = TWO_PI * np.arange(count + 1) / count
        q = self.points(tau)
        q[-1] = q[0] + self.shift
        return tau, q


def periodic_roots(
    f: Callable[[np.ndarray], np.ndarray],
    count: int,
    flat_scale: float | None = None,
    flat_tol: float = 1e-10,
) -> np.ndarray | None:
    """Zeros of a 2*pi-periodic function by sign-change bracketing and Brent polish.

    Returns None when ``f`` is numerically zero over the whole period, which
    means its zeros are not isolated.
    """
    tau = TWO_PI * np.arange(count) / count
    values = f(tau)
    scale = flat_scale if flat_scale is not None else 1.0
    if np.max(np.abs(values)) <= flat_tol * scale:
        return None
    side = values >= 0
    brackets = np.nonzero(side != np.roll(side, -1))[0]
    step = TWO_PI / count

    def scalar(x: float) -> float:
        return float(f(np.array([x]))[0])

    roots = []
    for i in brackets:
        a, b = tau[i], tau[i] + step
        fa, fb = scalar(a), scalar(b)
        if fa == 0.0:
            root = a
        elif fb == 0.0:
            root = b
        elif fa * fb > 0:
            # the vectorized and scalar evaluations disagree in the last bit
            root = a if abs(fa) < abs(fb) else b
        else:
            root = brentq(scalar, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
        roots.append(root % TWO_PI)
    return np.array(roots, dtype=float)
