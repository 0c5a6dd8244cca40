"""Radial kinetic equilibria f0(|p|) and radial perturbation profiles.

An :class:`Equilibrium` bundles f0, its analytic radial derivative, and two
closed-form tail moments that the spectral transforms consume:

* ``tail_kernel_moment(P)``  = int_P^inf (1 + p^2) (-f0'(p)) dp
* mass normalization is fixed to 4 pi int p^2 f0 dp = 1.

Carrying f0' analytically matters: the dispersion integrands weight (-f0')
directly and numerical differentiation would dominate their error budget.
The thermal equilibrium is evaluated with an exponent-shifted scaled Bessel
factor so temperatures down to 1e-4 neither overflow nor underflow.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import special as _sp

from .relkin import bessel_k2_scaled

__all__ = [
    "Equilibrium",
    "PerturbationProfile",
    "juttner",
    "compact_decreasing",
    "gaussian_profile",
    "thermal_profile",
]


@dataclass(frozen=True)
class Equilibrium:
    """Spherically symmetric, decreasing momentum distribution.

    ``value`` and ``derivative`` accept scalars or numpy arrays of |p|.
    ``support_bound`` is inf for rapidly decaying families.
    ``p_scale`` hints where the momentum integrand mass sits (quadrature map).
    """

    value: Callable
    derivative: Callable
    support_bound: float
    label: str
    p_scale: float = 1.0
    theta: Optional[float] = None
    tail_kernel_moment: Optional[Callable] = None


@dataclass(frozen=True)
class PerturbationProfile:
    """Real radial profile of the transformed initial datum at one mode.

    ``tail_weighted_moment(P)`` = int_P^inf p sqrt(1+p^2) h(p) dp, closed
    form where available (it is the envelope of the source transform).
    """

    value: Callable
    label: str
    p_scale: float = 1.0
    tail_weighted_moment: Optional[Callable] = None


def juttner(theta: float) -> Equilibrium:
    """Relativistic thermal equilibrium at temperature theta = k_B T.

    f0(p) = exp(-sqrt(1+p^2)/theta) / (4 pi theta K_2(1/theta)), which has
    unit total mass.  Internally the equivalent exponent-shifted form
    exp((1 - sqrt(1+p^2))/theta) / (4 pi theta e^{1/theta} K_2(1/theta))
    is used so that small theta stays in range.
    """
    theta = float(theta)
    if theta <= 0:
        raise ValueError(f"temperature must be positive, got {theta}")
    if theta < 1e-3:
        warnings.warn(
            f"theta={theta:g} is deep in the cold regime; values rely on the "
            "scaled-Bessel evaluation", stacklevel=2)
    norm = 1.0 / (4.0 * math.pi * theta * bessel_k2_scaled(1.0 / theta))

    def value(p):
        p = np.asarray(p, dtype=float)
        u = np.hypot(1.0, p)
        out = norm * np.exp((1.0 - u) / theta)
        return out if out.ndim else float(out)

    def derivative(p):
        p = np.asarray(p, dtype=float)
        u = np.hypot(1.0, p)
        out = -(p / (theta * u)) * norm * np.exp((1.0 - u) / theta)
        return out if out.ndim else float(out)

    def tail_kernel_moment(P):
        # int_P^inf (1+p^2)(-f0') dp = (norm_shifted) e^{(1-U)/theta}
        #   * (U^2 + 2 theta U + 2 theta^2),  U = sqrt(1+P^2).
        P = np.asarray(P, dtype=float)
        u = np.hypot(1.0, P)
        out = norm * np.exp((1.0 - u) / theta) * (u * u + 2.0 * theta * u
                                                  + 2.0 * theta * theta)
        return out if out.ndim else float(out)

    return Equilibrium(
        value=value,
        derivative=derivative,
        support_bound=math.inf,
        label=f"juttner(theta={theta:g})",
        p_scale=math.sqrt(2.0 * theta) + 2.0 * theta,
        theta=theta,
        tail_kernel_moment=tail_kernel_moment,
    )


def compact_decreasing(P: float) -> Equilibrium:
    """C^1 bump equilibrium c (1 - (p/P)^2)^4 on [0, P], unit mass.

    The normalization is exact: c = 3465 / (512 pi P^3).
    """
    P = float(P)
    if P <= 0:
        raise ValueError(f"support bound must be positive, got {P}")
    c = 3465.0 / (512.0 * math.pi * P**3)

    def value(p):
        p = np.asarray(p, dtype=float)
        w = np.clip(1.0 - (p / P) ** 2, 0.0, None)
        out = c * w**4
        return out if out.ndim else float(out)

    def derivative(p):
        p = np.asarray(p, dtype=float)
        w = np.clip(1.0 - (p / P) ** 2, 0.0, None)
        out = -8.0 * c * (p / P**2) * w**3
        return out if out.ndim else float(out)

    def tail_kernel_moment(x):
        # int_x^P (1+p^2)(-f0') dp = c [(1+P^2) w^4 - (4/5) P^2 w^5],
        # w = 1 - (x/P)^2.
        x = np.asarray(x, dtype=float)
        w = np.clip(1.0 - (x / P) ** 2, 0.0, None)
        out = c * ((1.0 + P * P) * w**4 - 0.8 * P * P * w**5)
        return out if out.ndim else float(out)

    return Equilibrium(
        value=value,
        derivative=derivative,
        support_bound=P,
        label=f"compact(P={P:g})",
        p_scale=0.5 * P,
        tail_kernel_moment=tail_kernel_moment,
    )


def gaussian_profile(width: float, amp: float) -> PerturbationProfile:
    """h(p) = amp * exp(-(p/width)^2)."""
    width = float(width)
    amp = float(amp)
    if width <= 0:
        raise ValueError(f"width must be positive, got {width}")

    def value(p):
        p = np.asarray(p, dtype=float)
        out = amp * np.exp(-((p / width) ** 2))
        return out if out.ndim else float(out)

    def tail_weighted_moment(P):
        # int_P^inf p sqrt(1+p^2) e^{-p^2/w^2} dp, via u = sqrt(1+p^2):
        #   e^{-P^2/w^2} [ (w^2/2) U + (sqrt(pi) w^3 / 4) erfcx(U/w) ],
        # U = sqrt(1+P^2); erfcx keeps the e^{1/w^2} factor in range.
        P = np.asarray(P, dtype=float)
        u = np.hypot(1.0, P)
        out = amp * np.exp(-((P / width) ** 2)) * (
            0.5 * width**2 * u
            + 0.25 * math.sqrt(math.pi) * width**3 * _sp.erfcx(u / width))
        return out if out.ndim else float(out)

    return PerturbationProfile(
        value=value,
        label=f"gaussian(width={width:g}, amp={amp:g})",
        p_scale=width,
        tail_weighted_moment=tail_weighted_moment,
    )


def thermal_profile(theta: float, amp: float = 1.0) -> PerturbationProfile:
    """h(p) = amp * exp((1 - sqrt(1+p^2))/theta): a thermal-shaped bump.

    Shares the momentum-edge flatness class of the thermal equilibrium, so a
    mode seeded with it decays at the equilibrium's own stretched rate rather
    than the faster rate a Gaussian seed imposes.
    """
    theta = float(theta)
    amp = float(amp)
    if theta <= 0:
        raise ValueError(f"theta must be positive, got {theta}")

    def value(p):
        p = np.asarray(p, dtype=float)
        u = np.hypot(1.0, p)
        out = amp * np.exp((1.0 - u) / theta)
        return out if out.ndim else float(out)

    def tail_weighted_moment(P):
        # Same u-substitution as the thermal tail moment.
        P = np.asarray(P, dtype=float)
        u = np.hypot(1.0, P)
        out = amp * theta * np.exp((1.0 - u) / theta) * (
            u * u + 2.0 * theta * u + 2.0 * theta * theta)
        return out if out.ndim else float(out)

    return PerturbationProfile(
        value=value,
        label=f"thermal(theta={theta:g}, amp={amp:g})",
        p_scale=math.sqrt(2.0 * theta) + 2.0 * theta,
        tail_weighted_moment=tail_weighted_moment,
    )
