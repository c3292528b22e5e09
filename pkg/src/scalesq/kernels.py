"""Cancellation kernels and averaging profiles with paired evaluators.

Every kernel carries a spatial evaluator, a Fourier evaluator under the
convention fhat(xi) = integral f(x) exp(-2 pi i x.xi) dx, and enough decay
metadata for the condition checkers.  The Fourier side is authoritative for
kernels with singular or slowly decaying spatial parts; spatial evaluators
for those are quadrature-backed diagnostics.

The zoo:

* haar: sgn(x) on [-1, 1]; hat is -2 pi i xi sinc(xi)^2.
* gm:a: alpha |1-|x||^(alpha-1) sgn(x) on (-1, 1), the profile whose
  square function is the generalized Marcinkiewicz integral; hat by
  Gauss-Jacobi quadrature graded at the endpoint singularity.
* poisson-q[:d]: t-derivative of the Poisson kernel at t=1, with the
  normalization gamma((d+1)/2) / pi^((d+1)/2); hat is -2 pi |xi| e^(-2 pi |xi|).
* ball (averaging profile): normalized indicator of the unit ball.
* riesz-diff:a:profile[:d]: riesz_core - profile * riesz_core where
  riesz_core has hat (2 pi |xi|)^(-a); hat is (2 pi |xi|)^(-a)(1 - profilehat).
* sgn-diff:profile: sgn - sgn * profile; hat is -i (1 - profilehat)/(pi xi).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.special import j1 as _bessel_j1
from scipy.special import roots_jacobi, roots_legendre

_GJ_NODE_CAP = 6144
_MOMENT_TOL = 1e-9


class MomentClassError(ValueError):
    """Averaging profile fails the moment conditions required at this order."""


# ---------------------------------------------------------------------------
# quadrature helpers

@lru_cache(maxsize=512)
def _jacobi_unit_rule(alpha: float, n: int):
    """Nodes and weights for integral_0^1 alpha (1-s)^(alpha-1) g(s) ds.

    Weights absorb the density, so they sum to 1 exactly.
    """
    x, w = roots_jacobi(n, alpha - 1.0, 0.0)
    s = (x + 1.0) / 2.0
    return s, alpha * 2.0 ** (-alpha) * w


@lru_cache(maxsize=512)
def _power_unit_rule(exponent: float, n: int):
    """Nodes and weights for integral_0^1 s^exponent g(s) ds, exponent > -1."""
    x, w = roots_jacobi(n, 0.0, exponent)
    s = (x + 1.0) / 2.0
    return s, 2.0 ** (-exponent - 1.0) * w


@lru_cache(maxsize=64)
def _legendre_unit_rule(n: int):
    x, w = roots_legendre(n)
    return (x + 1.0) / 2.0, w / 2.0


def _oscillation_nodes(eta: float) -> int:
    """Gauss rule size resolving sin(2 pi eta s) on the unit interval."""
    return int(min(_GJ_NODE_CAP, math.ceil(2.0 * max(eta, 1.0)) + 32))


def _binned_oscillatory_sum(eta, node_rule: Callable, weight_fn: Callable):
    """sum_i W_i weight_fn(s_i, eta) evaluated with an eta-adaptive rule.

    eta is any real array; frequencies are grouped by octave of |eta| so
    each group shares one quadrature rule.  node_rule(n) -> (s, W).
    """
    eta = np.asarray(eta, dtype=float)
    flat = eta.ravel()
    out = np.zeros(flat.shape, dtype=np.complex128)
    mag = np.abs(flat)
    bins = np.ceil(np.log2(np.maximum(mag, 1.0))).astype(int)
    for b in np.unique(bins):
        sel = np.nonzero(bins == b)[0]
        n = _oscillation_nodes(2.0**b)
        s, W = node_rule(n)
        chunk = max(1, 8_000_000 // n)
        for lo in range(0, sel.size, chunk):
            idx = sel[lo : lo + chunk]
            out[idx] = np.einsum("i,ij->j", W.astype(complex), weight_fn(s[:, None], flat[idx][None, :]))
    return out.reshape(eta.shape)


# ---------------------------------------------------------------------------
# kernel and profile containers

@dataclass(frozen=True)
class Kernel:
    """A convolution kernel with spatial and Fourier evaluators.

    Evaluators take `dim` coordinate arrays (broadcastable together) and
    return the broadcast result.  `support_radius` is inf for kernels with
    unbounded support.  `cancellation_order` is the largest M such that all
    moments of multi-degree <= M vanish (and converge absolutely).

    Decay metadata, all optional:

    * spatial_tail_exponent q: |psi(x)| <= C |x|^-q for large |x|.
    * fourier_tail_exponent delta: |psihat(xi)| <= C |xi|^-delta at infinity.
    * fourier_origin_exponent eps: |psihat(xi)| <= C |xi|^eps near 0.
    * edge_singularity (r, e): |psi| ~ (r - |x|)^e as |x| -> r inside the
      support, e < 0 meaning an integrable blow-up.
    """

    dim: int
    name: str
    spatial: Callable | None
    fourier: Callable
    fourier_mode: str  # "closed_form" or "quadrature"
    support_radius: float
    cancellation_order: int
    spatial_tail_exponent: float | None = None
    fourier_tail_exponent: float | None = None
    fourier_origin_exponent: float | None = None
    edge_singularity: tuple[float, float] | None = None
    radial: bool = False

    def fourier_at_scale(self, t: float, *coords):
        """Fourier transform of the L1-normalized dilate, psihat(t xi)."""
        return self.fourier(*(t * np.asarray(c, dtype=float) for c in coords))

    def reflect_conjugate(self) -> "Kernel":
        """Kernel x -> conj(psi(-x)); its hat is conj(psihat)."""
        spatial = None
        if self.spatial is not None:
            base = self.spatial
            spatial = lambda *cs: np.conj(base(*(-np.asarray(c, dtype=float) for c in cs)))
        base_hat = self.fourier
        return replace(
            self,
            name=self.name + "~",
            spatial=spatial,
            fourier=lambda *cs: np.conj(base_hat(*cs)),
        )


@dataclass(frozen=True)
class AveragingProfile:
    """Unit-mass bump used for local averages f * profile_t.

    `max_order` is the supremum of orders alpha for which the profile
    satisfies the moment conditions (unit mass; vanishing moments of degrees
    1..floor(alpha) when alpha >= 1).  `moment` optionally returns exact
    mixed moments for a degree tuple; profiles without it are integrated
    numerically over `support_box`.
    """

    kernel: Kernel
    support_box: tuple[tuple[float, float], ...]
    max_order: float
    moment: Callable | None = None

    @property
    def dim(self) -> int:
        return self.kernel.dim

    @property
    def name(self) -> str:
        return self.kernel.name

    @property
    def fourier(self) -> Callable:
        return self.kernel.fourier

    @property
    def spatial(self) -> Callable:
        return self.kernel.spatial


@dataclass(frozen=True)
class MomentClassReport:
    order: float
    ok: bool
    unit_mass_error: float
    moments: dict[tuple[int, ...], float]
    tol: float = _MOMENT_TOL

    def failures(self) -> list[str]:
        out = []
        if self.unit_mass_error >= self.tol:
            out.append(f"total mass differs from 1 by {self.unit_mass_error:.3e}")
        for gamma, val in self.moments.items():
            if abs(val) >= self.tol:
                out.append(f"moment {gamma} = {val:.3e} does not vanish")
        return out


def _numeric_moment(profile: AveragingProfile, gamma: tuple[int, ...]) -> float:
    nodes = 160
    s, w = _legendre_unit_rule(nodes)
    axes, weights = [], []
    for lo, hi in profile.support_box:
        axes.append(lo + (hi - lo) * s)
        weights.append((hi - lo) * w)
    if profile.dim == 1:
        vals = profile.spatial(axes[0]) * axes[0] ** gamma[0]
        return float(np.real(np.sum(weights[0] * vals)))
    X = axes[0][:, None]
    Y = axes[1][None, :]
    vals = profile.spatial(X, Y) * X ** gamma[0] * Y ** gamma[1]
    return float(np.real(weights[0] @ vals @ weights[1]))


def _degree_tuples(dim: int, degree: int) -> list[tuple[int, ...]]:
    if dim == 1:
        return [(degree,)]
    return [(degree - b, b) for b in range(degree + 1)]


def moment_class_check(profile: AveragingProfile, alpha: float) -> MomentClassReport:
    """Check membership of the profile in the order-alpha moment class.

    Requires unit total mass, and for alpha >= 1 vanishing moments of all
    degrees 1..floor(alpha).  Values are exact when the profile supplies a
    moment function, otherwise Gauss-Legendre over the support box.
    """
    if alpha <= 0:
        raise ValueError(f"order must be positive, got {alpha}")
    mom = profile.moment if profile.moment is not None else (
        lambda gamma: _numeric_moment(profile, gamma)
    )
    zero = (0,) * profile.dim
    mass_err = abs(mom(zero) - 1.0)
    moments: dict[tuple[int, ...], float] = {}
    if alpha >= 1.0:
        for degree in range(1, int(math.floor(alpha)) + 1):
            for gamma in _degree_tuples(profile.dim, degree):
                moments[gamma] = mom(gamma)
    ok = mass_err < _MOMENT_TOL and all(abs(v) < _MOMENT_TOL for v in moments.values())
    return MomentClassReport(order=alpha, ok=ok, unit_mass_error=mass_err, moments=moments)


def _require_moment_class(profile: AveragingProfile, alpha: float, context: str) -> None:
    report = moment_class_check(profile, alpha)
    if not report.ok:
        raise MomentClassError(
            f"{context}: profile '{profile.name}' fails the order-{alpha} "
            f"moment conditions: " + "; ".join(report.failures())
        )


# ---------------------------------------------------------------------------
# the kernel zoo

def haar_kernel() -> Kernel:
    """Odd square wave sgn(x) on [-1, 1]."""

    def spatial(x):
        x = np.asarray(x, dtype=float)
        return np.where(np.abs(x) <= 1.0, np.sign(x), 0.0).astype(complex)

    def fourier(xi):
        xi = np.asarray(xi, dtype=float)
        return -2j * np.pi * xi * np.sinc(xi) ** 2

    return Kernel(
        dim=1,
        name="haar",
        spatial=spatial,
        fourier=fourier,
        fourier_mode="closed_form",
        support_radius=1.0,
        cancellation_order=0,
        fourier_tail_exponent=1.0,
        fourier_origin_exponent=1.0,
    )


def marcinkiewicz_kernel(alpha: float) -> Kernel:
    """Graded odd profile alpha |1-|x||^(alpha-1) sgn(x) on (-1, 1).

    Its square function is the generalized Marcinkiewicz integral of order
    alpha; alpha = 1 recovers the Haar kernel.  The Fourier evaluator uses
    Gauss-Jacobi rules that absorb the endpoint weight, with node counts
    growing linearly in |xi| to resolve the oscillation.
    """
    if alpha <= 0:
        raise ValueError(f"order must be positive, got {alpha}")

    def spatial(x):
        x = np.asarray(x, dtype=float)
        ax = np.abs(x)
        out = np.zeros(ax.shape, dtype=complex)
        inside = ax < 1.0
        with np.errstate(divide="ignore"):
            vals = alpha * (1.0 - ax[inside]) ** (alpha - 1.0)
        out[inside] = vals * np.sign(x[inside])
        return out

    def fourier(xi):
        rule = lambda n: _jacobi_unit_rule(alpha, n)
        return -2j * _binned_oscillatory_sum(
            xi, rule, lambda s, e: np.sin(2.0 * np.pi * s * e)
        )

    edge = (1.0, alpha - 1.0) if alpha != 1.0 else None
    return Kernel(
        dim=1,
        name=f"gm:{alpha:g}",
        spatial=spatial,
        fourier=fourier,
        fourier_mode="quadrature",
        support_radius=1.0,
        cancellation_order=0,
        fourier_tail_exponent=min(alpha, 1.0),
        fourier_origin_exponent=1.0,
        edge_singularity=edge,
    )


def poisson_derivative_kernel(dim: int = 1) -> Kernel:
    """t-derivative at t=1 of the Poisson kernel c_d t / (|x|^2 + t^2)^((d+1)/2).

    The normalization c_d = gamma((d+1)/2) / pi^((d+1)/2) makes the Poisson
    kernel a unit-mass approximate identity, so the hat is exactly
    -2 pi |xi| exp(-2 pi |xi|).
    """
    if dim not in (1, 2):
        raise ValueError(f"dim must be 1 or 2, got {dim}")
    c = math.gamma((dim + 1) / 2.0) / math.pi ** ((dim + 1) / 2.0)

    def spatial(*coords):
        r2 = sum(np.asarray(x, dtype=float) ** 2 for x in coords)
        return (c * (r2 - dim) / (r2 + 1.0) ** ((dim + 3) / 2.0)).astype(complex)

    def fourier(*coords):
        rho = np.sqrt(sum(np.asarray(x, dtype=float) ** 2 for x in coords))
        return (-2.0 * np.pi * rho * np.exp(-2.0 * np.pi * rho)).astype(complex)

    return Kernel(
        dim=dim,
        name="poisson-q" if dim == 1 else f"poisson-q:{dim}",
        spatial=spatial,
        fourier=fourier,
        fourier_mode="closed_form",
        support_radius=math.inf,
        cancellation_order=1,
        spatial_tail_exponent=float(dim + 1),
        fourier_tail_exponent=2.0,  # any polynomial rate; 2 is a safe tag
        fourier_origin_exponent=1.0,
        radial=True,
    )


def _disk_moment(gamma: tuple[int, ...]) -> float:
    a, b = gamma
    if a % 2 or b % 2:
        return 0.0
    a2, b2 = a // 2, b // 2
    angular = 2.0 * math.gamma(a2 + 0.5) * math.gamma(b2 + 0.5) / math.gamma(a2 + b2 + 1.0)
    return angular / ((a + b + 2.0) * math.pi)


def ball_average_profile(dim: int = 1) -> AveragingProfile:
    """Normalized indicator of the unit ball; unit mass, even, order < 2."""
    if dim not in (1, 2):
        raise ValueError(f"dim must be 1 or 2, got {dim}")
    if dim == 1:
        def spatial(x):
            x = np.asarray(x, dtype=float)
            return np.where(np.abs(x) <= 1.0, 0.5, 0.0).astype(complex)

        def fourier(xi):
            return np.sinc(2.0 * np.asarray(xi, dtype=float)).astype(complex)

        def moment(gamma):
            (k,) = gamma
            return 0.0 if k % 2 else 1.0 / (k + 1.0)
    else:
        def spatial(x, y):
            r2 = np.asarray(x, dtype=float) ** 2 + np.asarray(y, dtype=float) ** 2
            return np.where(r2 <= 1.0, 1.0 / math.pi, 0.0).astype(complex)

        def fourier(x, y):
            rho = np.sqrt(np.asarray(x, dtype=float) ** 2 + np.asarray(y, dtype=float) ** 2)
            out = np.ones(rho.shape, dtype=complex)
            nz = rho > 1e-12
            out[nz] = _bessel_j1(2.0 * np.pi * rho[nz]) / (np.pi * rho[nz])
            return out

        moment = _disk_moment

    kern = Kernel(
        dim=dim,
        name="ball" if dim == 1 else f"ball:{dim}",
        spatial=spatial,
        fourier=fourier,
        fourier_mode="closed_form",
        support_radius=1.0,
        cancellation_order=-1,
        fourier_tail_exponent=(dim + 1.0) / 2.0,
        radial=True,
    )
    return AveragingProfile(
        kernel=kern,
        support_box=((-1.0, 1.0),) * dim,
        max_order=2.0,
        moment=moment,
    )


def riesz_constant(alpha: float, dim: int) -> float:
    """Normalization of the kernel |x|^(alpha-dim) whose hat is (2 pi |xi|)^-alpha."""
    return math.gamma((dim - alpha) / 2.0) / (
        math.pi ** (dim / 2.0) * 2.0**alpha * math.gamma(alpha / 2.0)
    )


def _smoothed_riesz_core(profile: AveragingProfile, alpha: float, coords):
    """(profile * riesz_core)(x) by polar quadrature around the singularity."""
    dim = profile.dim
    tau = riesz_constant(alpha, dim)
    pts = [np.asarray(c, dtype=float) for c in coords]
    shape = np.broadcast_shapes(*(p.shape for p in pts))
    pts = [np.broadcast_to(p, shape).ravel() for p in pts]
    r_out = np.sqrt(sum(p**2 for p in pts))
    reach = float(np.max(r_out)) + 1.5
    n_rad = 160
    s, w = _power_unit_rule(alpha - 1.0, n_rad)  # weight s^(alpha-1) on [0,1]
    rho = reach * s
    w_rad = reach**alpha * w  # absorbs rho^(alpha-1) d rho
    out = np.zeros(r_out.shape)
    if dim == 1:
        x = pts[0][None, :]
        vals = np.real(profile.spatial(x + rho[:, None]) + profile.spatial(x - rho[:, None]))
        out = tau * np.einsum("i,ij->j", w_rad, vals)
    else:
        n_ang = 96
        theta = (np.arange(n_ang) + 0.5) * (2.0 * np.pi / n_ang)
        ct, st = np.cos(theta), np.sin(theta)
        x, y = pts
        for i in range(n_rad):
            px = x[None, :] + rho[i] * ct[:, None]
            py = y[None, :] + rho[i] * st[:, None]
            ang = np.real(profile.spatial(px, py)).mean(axis=0)
            out += w_rad[i] * ang
        out *= tau * 2.0 * np.pi
    return out.reshape(shape)


def riesz_difference_kernel(alpha: float, profile: AveragingProfile) -> Kernel:
    """Difference of the fractional kernel and its profile average.

    hat(xi) = (2 pi |xi|)^(-alpha) (1 - profilehat(xi)), which vanishes at
    the origin like |xi|^(floor(alpha)+1-alpha) and decays like |xi|^-alpha.
    Requires 0 < alpha < dim and profile in the order-alpha moment class.
    The spatial evaluator is a quadrature diagnostic; the Fourier side is
    authoritative.
    """
    dim = profile.dim
    if not (0.0 < alpha < dim):
        raise ValueError(f"need 0 < alpha < dim = {dim}, got alpha = {alpha}")
    _require_moment_class(profile, alpha, "riesz_difference_kernel")
    tau = riesz_constant(alpha, dim)
    profile_hat = profile.fourier

    def fourier(*coords):
        rho = np.sqrt(sum(np.asarray(c, dtype=float) ** 2 for c in coords))
        hat = np.asarray(profile_hat(*coords), dtype=complex)
        out = np.zeros(rho.shape, dtype=complex)
        nz = rho > 1e-300
        out[nz] = (2.0 * np.pi * rho[nz]) ** (-alpha) * (1.0 - hat[nz])
        return out

    def spatial(*coords):
        r = np.sqrt(sum(np.asarray(c, dtype=float) ** 2 for c in coords))
        with np.errstate(divide="ignore"):
            core = tau * np.where(r > 0, r, np.nan) ** (alpha - dim)
        return (core - _smoothed_riesz_core(profile, alpha, coords)).astype(complex)

    frac = math.floor(alpha) + 1.0 - alpha
    return Kernel(
        dim=dim,
        name=f"riesz-diff:{alpha:g}:{profile.name}",
        spatial=spatial,
        fourier=fourier,
        fourier_mode="closed_form" if profile.kernel.fourier_mode == "closed_form" else "quadrature",
        support_radius=math.inf,
        cancellation_order=0,
        spatial_tail_exponent=dim + math.floor(alpha) + 1.0 - alpha,
        fourier_tail_exponent=alpha,
        fourier_origin_exponent=frac,
        radial=True,
    )


def sgn_difference_kernel(profile: AveragingProfile) -> Kernel:
    """sgn - sgn * profile in one dimension; hat is -i (1 - profilehat)/(pi xi).

    Requires a profile in the order-1 moment class (unit mass, vanishing
    first moment), which makes the hat O(|xi|) at the origin.
    """
    if profile.dim != 1:
        raise ValueError("sgn_difference_kernel is one-dimensional")
    _require_moment_class(profile, 1.0, "sgn_difference_kernel")
    profile_hat = profile.fourier
    (lo, hi) = profile.support_box[0]
    prof_spatial = profile.spatial

    def fourier(xi):
        xi = np.asarray(xi, dtype=float)
        hat = np.asarray(profile_hat(xi), dtype=complex)
        out = np.zeros(xi.shape, dtype=complex)
        nz = np.abs(xi) > 1e-300
        out[nz] = -1j * (1.0 - hat[nz]) / (np.pi * xi[nz])
        return out

    s, w = _legendre_unit_rule(256)

    def spatial(x):
        x = np.asarray(x, dtype=float)
        flat = np.atleast_1d(x).ravel()
        upper = np.clip(flat, lo, hi)
        # cdf(x) = integral_lo^x profile
        nodes = lo + np.outer(s, upper - lo)
        cdf = np.einsum("i,ij->j", w, np.real(prof_spatial(nodes))) * (upper - lo)
        vals = np.sign(flat) - (2.0 * cdf - 1.0)
        vals[flat > hi] = np.sign(flat[flat > hi]) - 1.0
        vals[flat < lo] = np.sign(flat[flat < lo]) + 1.0
        return vals.reshape(np.shape(x)).astype(complex)

    radius = max(abs(lo), abs(hi))
    return Kernel(
        dim=1,
        name=f"sgn-diff:{profile.name}",
        spatial=spatial,
        fourier=fourier,
        fourier_mode=profile.kernel.fourier_mode,
        support_radius=radius,
        cancellation_order=0,
        fourier_tail_exponent=1.0,
        fourier_origin_exponent=1.0,
    )


def band_indicator_kernel(lo: float, hi: float) -> Kernel:
    """Fourier-side surrogate with hat = indicator of lo <= |xi| <= hi.

    A diagnostic counterexample: its dyadic dilates miss frequencies when
    hi/lo < 2, so the non-degeneracy gate must reject it.  No spatial
    evaluator is provided.
    """
    if not (0 < lo < hi):
        raise ValueError(f"need 0 < lo < hi, got ({lo}, {hi})")

    def fourier(xi):
        a = np.abs(np.asarray(xi, dtype=float))
        return ((a >= lo) & (a <= hi)).astype(complex)

    return Kernel(
        dim=1,
        name=f"band:{lo:g}:{hi:g}",
        spatial=None,
        fourier=fourier,
        fourier_mode="closed_form",
        support_radius=math.inf,
        cancellation_order=0,
    )


# ---------------------------------------------------------------------------
# registry

def profile_from_id(pid: str, dim: int = 1) -> AveragingProfile:
    if pid == "ball":
        return ball_average_profile(dim)
    raise ValueError(f"unknown averaging profile id '{pid}' (known: ball)")


def kernel_from_id(kid: str) -> Kernel:
    """Build a kernel from a registry id.

    Forms: "haar", "gm:ALPHA", "poisson-q[:DIM]", "riesz-diff:ALPHA:PROFILE[:DIM]",
    "sgn-diff:PROFILE", "band:LO:HI".
    """
    parts = kid.split(":")
    head, rest = parts[0], parts[1:]

    def num(token: str, cast):
        try:
            return cast(token)
        except ValueError:
            raise ValueError(f"malformed kernel id '{kid}': bad component '{token}'") from None

    if head == "haar" and not rest:
        return haar_kernel()
    if head == "gm" and len(rest) == 1:
        return marcinkiewicz_kernel(num(rest[0], float))
    if head == "poisson-q" and len(rest) <= 1:
        return poisson_derivative_kernel(num(rest[0], int) if rest else 1)
    if head == "riesz-diff" and len(rest) in (2, 3):
        dim = num(rest[2], int) if len(rest) == 3 else 1
        return riesz_difference_kernel(num(rest[0], float), profile_from_id(rest[1], dim))
    if head == "sgn-diff" and len(rest) == 1:
        return sgn_difference_kernel(profile_from_id(rest[0], 1))
    if head == "band" and len(rest) == 2:
        return band_indicator_kernel(num(rest[0], float), num(rest[1], float))
    raise ValueError(
        f"unknown kernel id '{kid}' (forms: haar, gm:A, poisson-q[:D], "
        f"riesz-diff:A:PROFILE[:D], sgn-diff:PROFILE, band:LO:HI)"
    )
