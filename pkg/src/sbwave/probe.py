"""Discrete (n, tau) modulation-lattice norms and bilinear-estimate probes.

Functions on the lattice Z x (h*Z) carry the weighted norms

    S space:  || <tau + n^2>^b <n>^s F ||
    B space:  || <|tau| - gamma(n)>^b <n>^s F ||,   gamma(n) = (2 pi / L)^2 sqrt(n^2 + n^4),

with <a> = 1 + |a| and the tau integral discretized as h * sum.  The
default spatial period is 2*pi, where gamma(n) = sqrt(n^2 + n^4).

The probes here never claim to verify an inequality: the reported ratios
are empirical lower bounds on operator norms, and the slope experiments
reproduce the known sharpness exponents of the product estimates by
least-squares fits of log ratio against log N.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, signal

from .errors import DomainError, TruncationError

TWO_PI = 2.0 * math.pi

#: default tau-grid spacing; the characteristic profiles have width 2
DEFAULT_H = 0.05

#: fraction of total mass allowed on the lattice boundary before a norm
#: computation is declared truncated
BOUNDARY_TOL = 1e-10


def angle_weight(a):
    """<a> = 1 + |a|."""
    return 1.0 + np.abs(a)


def gamma_symbol(n, L: float = TWO_PI):
    """The long-wave dispersion weight gamma_L(n) = (2 pi / L)^2 sqrt(n^2 + n^4)."""
    n = np.asarray(n, dtype=float)
    return (TWO_PI / L) ** 2 * np.sqrt(n**2 + n**4)


@dataclass(frozen=True)
class ModulationWeights:
    """Sobolev/modulation indices bundled with the weight conventions."""

    s: float
    b: float
    k: float = 0.0
    a: float = 0.0
    L: float = TWO_PI

    def sigma_s(self, n, tau):
        return tau + np.asarray(n, dtype=float) ** 2

    def sigma_b(self, n, tau):
        return np.abs(tau) - gamma_symbol(n, self.L)


@dataclass(frozen=True)
class LatticeFunction:
    """A finitely supported function on the (n, tau) lattice.

    values[i, j] is the value at integer wavenumber n_min + i and time
    frequency tau0 + j*h; the tau grid is uniform with spacing h.
    """

    n_min: int
    tau0: float
    h: float
    values: np.ndarray

    @property
    def n_values(self) -> np.ndarray:
        return self.n_min + np.arange(self.values.shape[0])

    @property
    def tau_values(self) -> np.ndarray:
        return self.tau0 + self.h * np.arange(self.values.shape[1])

    @classmethod
    def zeros(cls, n_max: int, tau_max: float, h: float = DEFAULT_H) -> "LatticeFunction":
        m = int(round(tau_max / h))
        return cls(
            n_min=-n_max,
            tau0=-m * h,
            h=h,
            values=np.zeros((2 * n_max + 1, 2 * m + 1), dtype=complex),
        )

    @classmethod
    def random(cls, seed: int, n_max: int = 8, tau_max: float = 8.0,
               h: float = DEFAULT_H, pad: float = 2.0) -> "LatticeFunction":
        """Complex Gaussian entries on |n| <= n_max, |tau| <= tau_max.

        The window keeps a zero guard ring (one wavenumber and `pad` in
        tau) so boundary mass unambiguously signals clipped support.
        """
        rng = np.random.default_rng(seed)
        out = cls.zeros(n_max + 1, tau_max + pad, h)
        inside = np.abs(out.tau_values) <= tau_max + 1e-12
        block = rng.standard_normal((2 * n_max + 1, int(inside.sum())))
        block = block + 1j * rng.standard_normal(block.shape)
        out.values[1:-1, inside] = block
        return out

    def l2_norm(self) -> float:
        return float(math.sqrt(self.h * np.sum(np.abs(self.values) ** 2)))


def chi_sequence(n0: int, tau_center: float, h: float = DEFAULT_H) -> LatticeFunction:
    """A single-wavenumber sequence with the box profile chi([-1, 1]) rescaled.

    The profile is the characteristic function of [tau_center - 2,
    tau_center + 2] (i.e. chi((tau - tau_center)/2)), the building block
    of the sharpness sequences; a zero guard ring pads the window.
    """
    m = int(math.ceil(2.0 / h)) + 4
    tau = tau_center + h * np.arange(-m, m + 1)
    profile = (np.abs((tau - tau_center) / 2.0) <= 1.0).astype(complex)
    vals = np.zeros((3, len(tau)), dtype=complex)
    vals[1, :] = profile
    return LatticeFunction(n_min=n0 - 1, tau0=float(tau[0]), h=h, values=vals)


def x_norm(f: LatticeFunction, space: str, s: float, b: float,
           L: float = TWO_PI, b_weight: str = "gamma") -> float:
    """Weighted lattice norm sqrt(h * sum <modulation>^{2b} <n>^{2s} |f|^2).

    space "S" uses the modulation tau + n^2; space "B" uses
    |tau| - gamma(n) (or |tau| - n^2 when b_weight="parabola").  Raises
    TruncationError when more than BOUNDARY_TOL of the squared mass sits
    on the outermost rows or columns.
    """
    if space not in ("S", "B"):
        raise DomainError(f"space must be 'S' or 'B', got {space!r}")
    total = np.sum(np.abs(f.values) ** 2)
    if total > 0:
        edge = (
            np.sum(np.abs(f.values[0, :]) ** 2)
            + np.sum(np.abs(f.values[-1, :]) ** 2)
            + np.sum(np.abs(f.values[:, 0]) ** 2)
            + np.sum(np.abs(f.values[:, -1]) ** 2)
        )
        if edge > BOUNDARY_TOL * total:
            raise TruncationError(
                f"boundary mass fraction {edge / total:.3e} exceeds {BOUNDARY_TOL:.0e}"
            )
    n = f.n_values[:, None].astype(float)
    tau = f.tau_values[None, :]
    if space == "S":
        mod = tau + n**2
    elif b_weight == "parabola":
        mod = np.abs(tau) - n**2
    else:
        mod = np.abs(tau) - gamma_symbol(n, L)
    w = angle_weight(mod) ** (2.0 * b) * angle_weight(n) ** (2.0 * s)
    return float(math.sqrt(f.h * np.sum(w * np.abs(f.values) ** 2)))


def weighted(f: LatticeFunction, space: str, s: float, b: float,
             L: float = TWO_PI, b_weight: str = "gamma") -> LatticeFunction:
    """Divide f pointwise by <modulation>^b <n>^s (build u from its weighted transform)."""
    n = f.n_values[:, None].astype(float)
    tau = f.tau_values[None, :]
    if space == "S":
        mod = tau + n**2
    elif b_weight == "parabola":
        mod = np.abs(tau) - n**2
    else:
        mod = np.abs(tau) - gamma_symbol(n, L)
    w = angle_weight(mod) ** b * angle_weight(n) ** s
    return LatticeFunction(f.n_min, f.tau0, f.h, f.values / w)


def convolve(f: LatticeFunction, g: LatticeFunction) -> LatticeFunction:
    """The (n, tau) convolution sum_{n1} int f(n1, tau1) g(n - n1, tau - tau1) dtau1."""
    if abs(f.h - g.h) > 1e-15:
        raise DomainError("convolution requires matching tau spacing")
    vals = signal.fftconvolve(f.values, g.values) * f.h
    return LatticeFunction(
        n_min=f.n_min + g.n_min,
        tau0=f.tau0 + g.tau0,
        h=f.h,
        values=vals,
    )


def conjugate_flip(f: LatticeFunction) -> LatticeFunction:
    """conj(f(-n, -tau)), the transform of the complex conjugate."""
    vals = np.conj(f.values[::-1, ::-1])
    n_max = f.n_min + f.values.shape[0] - 1
    tau_max = f.tau0 + f.h * (f.values.shape[1] - 1)
    return LatticeFunction(n_min=-n_max, tau0=-tau_max, h=f.h, values=vals)


# ---------------------------------------------------------------------------
# calculus-lemma spot checks


def lemma33_sup(x_max: float, y_max: float, n_points: int):
    """Grid extrema of (1 + |x - y|) / (1 + |x - sqrt(y^2 + y)|) over x, y >= 0."""
    if x_max <= 0 or y_max <= 0:
        raise DomainError("ranges must be positive")
    x = np.linspace(0.0, x_max, n_points)[:, None]
    y = np.linspace(0.0, y_max, n_points)[None, :]
    ratio = (1.0 + np.abs(x - y)) / (1.0 + np.abs(x - np.sqrt(y**2 + y)))
    return float(ratio.max()), float(ratio.min())


@dataclass(frozen=True)
class Lemma32Report:
    gamma: float
    sup_value: float
    tail_fraction: float
    saturated: bool
    n1_max: int


def lemma32_sup(gamma: float, n_grid: int, tau_samples: int, N1_max: int,
                allow_subcritical: bool = False, tau_max: float = 100.0) -> Lemma32Report:
    """Max over sampled (n, tau) of sum_{|n1| <= N1_max} (1 + |tau +- n1(n - n1)|)^{-gamma}.

    The reported tail fraction compares the sum at N1_max against the sum
    at N1_max/2 for the maximizing sample; below 1% the truncation counts
    as saturated.  gamma <= 1/2 violates the summability hypothesis and
    raises DomainError unless allow_subcritical=True (used to demonstrate
    the divergence; such reports come back with saturated=False).
    """
    if gamma <= 0.5 and not allow_subcritical:
        raise DomainError(f"the sum requires gamma > 1/2, got {gamma} "
                          "(pass allow_subcritical=True to probe divergence)")
    n1 = np.arange(-N1_max, N1_max + 1, dtype=float)
    inner = np.abs(n1) <= N1_max // 2
    if n_grid < 1:
        ns = np.array([0])
    else:
        ns = np.unique(np.concatenate([[0], np.round(
            np.geomspace(1, n_grid, num=min(5, n_grid))).astype(int)]))
    taus = np.linspace(-tau_max, tau_max, tau_samples)
    best = (-1.0, 1.0)
    for n in ns:
        for tau in taus:
            for sign in (1.0, -1.0):
                terms = (1.0 + np.abs(tau + sign * n1 * (n - n1))) ** (-gamma)
                full = float(terms.sum())
                if full > best[0]:
                    half = float(terms[inner].sum())
                    best = (full, (full - half) / full)
    sup_value, tail = best
    return Lemma32Report(
        gamma=gamma,
        sup_value=sup_value,
        tail_fraction=tail,
        saturated=bool(tail < 0.01),
        n1_max=N1_max,
    )


def lemma31_check(p: float, q: float, alphas, betas):
    """Plateau constants sup LHS(alpha, beta) * <alpha - beta>^r, r = min(p, q, p+q-1).

    LHS is the line integral of <x - alpha>^{-p} <x - beta>^{-q},
    computed by adaptive quadrature on (-inf, alpha], [alpha, beta],
    [beta, inf).  Requires p, q > 0 and p + q > 1.
    """
    if p <= 0 or q <= 0:
        raise DomainError("p and q must be positive")
    if p + q <= 1:
        raise DomainError(f"integrability requires p + q > 1, got {p + q}")
    r = min(p, q, p + q - 1.0)

    def lhs(alpha, beta):
        f = lambda x: (1.0 + abs(x - alpha)) ** (-p) * (1.0 + abs(x - beta)) ** (-q)
        lo, hi = min(alpha, beta), max(alpha, beta)
        total = 0.0
        total += integrate.quad(f, -np.inf, lo, limit=200)[0]
        if hi > lo:
            total += integrate.quad(f, lo, hi, limit=200)[0]
        total += integrate.quad(f, hi, np.inf, limit=200)[0]
        return total

    rows = []
    for alpha in alphas:
        for beta in betas:
            c = lhs(alpha, beta) * angle_weight(alpha - beta) ** r
            rows.append((float(alpha), float(beta), float(c)))
    return max(c for _, _, c in rows), rows


# ---------------------------------------------------------------------------
# sharpness-exponent experiments


_CASE_PREDICTION = {
    "i": lambda k, s: k - s,
    "ii": lambda k, s: -(k + s),
    "iii": lambda k, s: s - k,
}


@dataclass(frozen=True)
class SlopeReport:
    case: str
    k: float
    s: float
    a: float
    b: float
    N_list: tuple
    ratios: tuple
    slope: float
    r_squared: float
    predicted: float

    def to_dict(self) -> dict:
        return {
            "case": self.case,
            "indices": {"k": self.k, "s": self.s, "a": self.a, "b": self.b},
            "N_list": list(self.N_list),
            "ratios": list(self.ratios),
            "slope": self.slope,
            "r_squared": self.r_squared,
            "predicted": self.predicted,
        }


def _ratio_for_case(case, k, s, a, b, N, h):
    if case == "i":
        # u concentrated at n = 0 on the S parabola, v at n = N near the B surface
        fu = chi_sequence(0, 0.0, h)
        fv = chi_sequence(N, -float(N) ** 2, h)
        u = weighted(fu, "S", k, b)
        v = weighted(fv, "B", s, b)
        prod = convolve(u, v)
        num = x_norm(prod, "S", k, -a)
    elif case == "ii":
        fu = chi_sequence(-N, -float(N) ** 2, h)
        fv = chi_sequence(N, float(N) ** 2, h)
        u = weighted(fu, "S", k, b)
        v = weighted(fv, "B", s, b)
        prod = convolve(u, v)
        num = x_norm(prod, "S", k, -a)
    elif case == "iii":
        # product u1 * conj(u2); the flipped factor carries the tau - n^2 weight
        fu = chi_sequence(N, -float(N) ** 2, h)
        fv = chi_sequence(0, 0.0, h)
        u1 = weighted(fu, "S", k, b)
        n_h = fv.n_values[:, None].astype(float)
        tau_h = fv.tau_values[None, :]
        wflip = angle_weight(tau_h - n_h**2) ** b * angle_weight(n_h) ** k
        u2f = LatticeFunction(fv.n_min, fv.tau0, fv.h, fv.values / wflip)
        prod = convolve(u1, u2f)
        num = x_norm(prod, "B", s, -a)
    else:
        raise DomainError(f"case must be 'i', 'ii' or 'iii', got {case!r}")
    return num / (fu.l2_norm() * fv.l2_norm())


def counterexample_slope(case: str, k: float, s: float, a: float = 0.3,
                         b: float = 0.6, N_list=(8, 16, 32, 64, 128),
                         h: float = DEFAULT_H) -> SlopeReport:
    """Least-squares slope of log R(N) against log N for the sharpness sequences.

    R(N) = ||product||_target / (||f_N|| ||g_N||) with the product
    computed as an exact wavenumber sum times a tau-grid convolution.
    The predicted exponents are k - s (case i), -(k + s) (case ii) and
    s - k (case iii).
    """
    N_list = tuple(int(N) for N in N_list)
    if len(N_list) < 4 or any(b2 <= a2 for a2, b2 in zip(N_list, N_list[1:])):
        raise DomainError("N_list must be increasing with at least 4 entries")
    if not 0.25 < a < 0.5:
        raise DomainError(f"a must lie in (1/4, 1/2), got {a}")
    if b <= 0.5:
        raise DomainError(f"b must exceed 1/2, got {b}")
    ratios = [_ratio_for_case(case, k, s, a, b, N, h) for N in N_list]
    lN = np.log(np.asarray(N_list, dtype=float))
    lR = np.log(np.asarray(ratios))
    A = np.vstack([lN, np.ones_like(lN)]).T
    coef, *_ = np.linalg.lstsq(A, lR, rcond=None)
    fit = A @ coef
    ss_res = float(np.sum((lR - fit) ** 2))
    ss_tot = float(np.sum((lR - lR.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return SlopeReport(
        case=case, k=k, s=s, a=a, b=b,
        N_list=N_list,
        ratios=tuple(float(r) for r in ratios),
        slope=float(coef[0]),
        r_squared=r2,
        predicted=float(_CASE_PREDICTION[case](k, s)),
    )


@dataclass(frozen=True)
class RatioReport:
    s: float
    a: float
    b: float
    n_trials: int
    seed: int
    max_ratio_sv: float
    max_ratio_ss: float

    @property
    def max_ratio(self) -> float:
        return max(self.max_ratio_sv, self.max_ratio_ss)


def bilinear_ratio_sample(s: float, a: float, b: float, n_trials: int,
                          seed: int, n_max: int = 8, tau_max: float = 8.0,
                          h: float = DEFAULT_H) -> RatioReport:
    """Empirical lower bounds on the product-estimate constants.

    For seeded random compactly supported u, v the two ratios are

        ||u v||_{S(s,-a)} / (||u||_{S(s,b)} ||v||_{B(s,b)})      (S x B -> S)
        ||u1 conj(u2)||_{B(s,-a)} / (||u1||_{S(s,b)} ||u2||_{S(s,b)})

    and the maxima over trials are reported.  Finite, refinement-stable
    values fail to falsify the estimates; nothing more is claimed.
    """
    if s < 0:
        raise DomainError(f"s must be nonnegative, got {s}")
    if not (0.25 < a < 0.5 < b):
        raise DomainError(f"need 1/4 < a < 1/2 < b, got a={a}, b={b}")
    best_sv = 0.0
    best_ss = 0.0
    for trial in range(n_trials):
        u = LatticeFunction.random(seed * 100003 + 2 * trial, n_max, tau_max, h)
        v = LatticeFunction.random(seed * 100003 + 2 * trial + 1, n_max, tau_max, h)
        ru = x_norm(u, "S", s, b)
        rv = x_norm(v, "B", s, b)
        prod = convolve(u, v)
        best_sv = max(best_sv, x_norm(prod, "S", s, -a) / (ru * rv))
        rv_s = x_norm(v, "S", s, b)
        prod2 = convolve(u, conjugate_flip(v))
        best_ss = max(best_ss, x_norm(prod2, "B", s, -a) / (ru * rv_s))
    return RatioReport(
        s=s, a=a, b=b, n_trials=n_trials, seed=seed,
        max_ratio_sv=float(best_sv), max_ratio_ss=float(best_ss),
    )
