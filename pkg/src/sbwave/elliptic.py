"""Complete elliptic integrals and Jacobi elliptic functions.

Everything here is computed from scratch with the arithmetic-geometric-mean
(AGM) iteration and its descending Landen transform; there is no dependency
on library special functions.  The modulus convention is k (not the
parameter m = k^2), restricted to 0 <= k < 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

# AGM terminates when |a_n - b_n| < _AGM_RTOL * a_n; quadratic convergence
# makes ~8 iterations enough for any k in [0, 1).
_AGM_RTOL = 1e-16
_AGM_MAXITER = 64

# below this k^2 the descending Landen scale is replaced by trigonometric
# expansions (truncation error O(k^4) < machine epsilon)
_SMALL_K2 = 1e-8


@dataclass(frozen=True)
class EllipticModulus:
    """Elliptic modulus k with k^2 and the complement k'^2 stored separately.

    Keeping k2 avoids cancellation near k = 0, and keeping kp2 = 1 - k^2
    keeps the k -> 1 end of the cnoidal branch (where k'^2 can be far
    below machine epsilon relative to 1) fully resolved.
    """

    k: float
    k2: float
    kp2: float

    @classmethod
    def from_k(cls, k: float) -> "EllipticModulus":
        k = float(k)
        if not 0.0 <= k < 1.0:
            raise DomainError(f"modulus must satisfy 0 <= k < 1, got {k}")
        return cls(k, k * k, (1.0 - k) * (1.0 + k))

    @classmethod
    def from_k2(cls, k2: float) -> "EllipticModulus":
        k2 = float(k2)
        if not 0.0 <= k2 < 1.0:
            raise DomainError(f"squared modulus must satisfy 0 <= k2 < 1, got {k2}")
        return cls(math.sqrt(k2), k2, 1.0 - k2)

    @classmethod
    def from_complement_sq(cls, kp2: float) -> "EllipticModulus":
        """Build from k'^2 = 1 - k^2; required accuracy path near k = 1."""
        kp2 = float(kp2)
        if not 0.0 < kp2 <= 1.0:
            raise DomainError(f"complement squared must satisfy 0 < k'^2 <= 1, got {kp2}")
        k2 = 1.0 - kp2
        return cls(math.sqrt(k2), k2, kp2)

    @property
    def complement(self) -> float:
        """k' = sqrt(1 - k^2)."""
        return math.sqrt(self.kp2)


@dataclass(frozen=True)
class EllipticPair:
    """Complete elliptic integrals of the first (K) and second (E) kind."""

    K: float
    E: float


def _as_modulus(k) -> EllipticModulus:
    if isinstance(k, EllipticModulus):
        return k
    return EllipticModulus.from_k(k)


def agm_scale(mod: EllipticModulus):
    """Run the AGM iteration from (1, k').

    Returns (a_final, a_list, c_list) where a_list/c_list hold the
    arithmetic means and half-differences of every completed stage
    (c_0 = k included).
    """
    a, b, c = 1.0, mod.complement, mod.k
    a_list, c_list = [a], [c]
    for _ in range(_AGM_MAXITER):
        if abs(a - b) < _AGM_RTOL * a:
            break
        a, b, c = 0.5 * (a + b), math.sqrt(a * b), 0.5 * (a - b)
        a_list.append(a)
        c_list.append(c)
    return a, a_list, c_list


def complete_elliptic(k) -> EllipticPair:
    """Complete elliptic integrals K(k), E(k) by AGM.

    K(k) = int_0^1 dt / sqrt((1-t^2)(1-k^2 t^2)) and E(k) the analogous
    integral with the square root moved to the numerator.  Relative error
    is at the level of the AGM limit (a few ulp).

    Raises DomainError for k outside [0, 1).
    """
    mod = _as_modulus(k)
    a_inf, _, c_list = agm_scale(mod)
    big_k = math.pi / (2.0 * a_inf)
    csum = sum(2.0 ** (n - 1) * c * c for n, c in enumerate(c_list))
    return EllipticPair(K=big_k, E=big_k * (1.0 - csum))


def jacobi(x, k):
    """Jacobi elliptic functions sn, cn, dn at argument x.

    Uses the descending-Landen backward recurrence on the AGM scale; for
    k^2 below 1e-8 it switches to the small-modulus trigonometric
    expansions (error O(k^4), below double precision at the switch point).

    Parameters
    ----------
    x : float or ndarray, finite
    k : modulus, 0 <= k < 1

    Returns
    -------
    (sn, cn, dn) with the shape of x.
    """
    mod = _as_modulus(k)
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise DomainError("jacobi argument must be finite")
    scalar = x.ndim == 0
    x = np.atleast_1d(x)

    if mod.k2 < _SMALL_K2:
        sn, cn, dn = _jacobi_small_k(x, mod.k2)
    else:
        sn, cn, dn = _jacobi_agm(x, mod.kp2)

    if scalar:
        return float(sn[0]), float(cn[0]), float(dn[0])
    return sn, cn, dn


def _jacobi_small_k(x, k2):
    # sn = sin x - (k^2/4)(x - sin x cos x) cos x + O(k^4), and the
    # matching corrections for cn, dn (trigonometric limit k -> 0)
    s, c = np.sin(x), np.cos(x)
    corr = 0.25 * k2 * (x - s * c)
    sn = s - corr * c
    cn = c + corr * s
    dn = 1.0 - 0.5 * k2 * s * s
    return sn, cn, dn


def _jacobi_agm(x, kp2):
    # descending Landen ladder; emc carries the complementary parameter
    emc = kp2
    a = 1.0
    em, en = [], []
    for _ in range(_AGM_MAXITER):
        em.append(a)
        emc = math.sqrt(emc)
        en.append(emc)
        c = 0.5 * (a + emc)
        if abs(a - emc) <= _AGM_RTOL * a:
            break
        emc = a * emc
        a = c

    u = c * x
    sn = np.sin(u)
    cn = np.cos(u)
    dn = np.ones_like(u)

    nonzero = sn != 0.0
    if np.any(nonzero):
        snz = sn[nonzero]
        a_arr = cn[nonzero] / snz
        c_arr = a_arr * c
        dnz = np.ones_like(snz)
        for i in range(len(em) - 1, -1, -1):
            b = em[i]
            a_arr = c_arr * a_arr
            c_arr = dnz * c_arr
            dnz = (en[i] + a_arr) / (b + a_arr)
            a_arr = c_arr / b
        amp = 1.0 / np.sqrt(c_arr * c_arr + 1.0)
        sn_out = np.where(snz < 0.0, -amp, amp)
        sn[nonzero] = sn_out
        cn[nonzero] = c_arr * sn_out
        dn[nonzero] = dnz
    return sn, cn, dn


def legendre_residual(k) -> float:
    """E(k) K(k') + E(k') K(k) - K(k) K(k') - pi/2 (zero analytically)."""
    mod = _as_modulus(k)
    pair = complete_elliptic(mod)
    pair_c = complete_elliptic(EllipticModulus.from_k2(mod.kp2))
    return pair.E * pair_c.K + pair_c.E * pair.K - pair.K * pair_c.K - 0.5 * math.pi
