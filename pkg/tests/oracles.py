"""Reference routes for the tests, independent of the library's machinery.

Everything here goes through direct DFT sums, scipy adaptive quadrature,
or closed forms worked out by hand, never through the package's spectral
helpers.  Slow is fine; these run on small grids.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import integrate

from scalesq import SampledField, SpectralField


# ---------------------------------------------------------------------------
# direct transforms

def slow_transform(f: SampledField) -> SpectralField:
    """O(N^2) DFT matrix applied axis by axis."""
    g = f.geometry
    x = g.spatial_axis()
    xi = g.frequency_axis()
    M = np.exp(-2j * np.pi * np.outer(xi, x)) * g.spacing
    if g.dim == 1:
        coeffs = M @ f.values
    else:
        coeffs = M @ f.values @ M.T
    return SpectralField(g, coeffs)


# ---------------------------------------------------------------------------
# kernel transforms by adaptive quadrature

def odd_compact_hat(spatial, radius: float, xi: float, limit: int = 400) -> complex:
    """hat of a real odd kernel supported in [-radius, radius]."""
    if xi == 0.0:
        return 0.0j
    val, _ = integrate.quad(
        lambda r: float(np.real(spatial(np.array([r]))[0])),
        0.0,
        radius,
        weight="sin",
        wvar=2.0 * math.pi * xi,
        limit=limit,
    )
    return -2j * val


def gm_hat_quad(alpha: float, xi: float) -> complex:
    """hat of alpha (1-|x|)^(alpha-1) sgn(x) on (-1,1), edge moved to 0.

    After v = 1 - u the oscillation splits into cos/sin pieces against the
    algebraic weight v^(alpha-1), which QUADPACK's oscillatory rule accepts.
    """
    if xi == 0.0:
        return 0.0j
    w = 2.0 * math.pi * xi

    def weight_fn(v: float) -> float:
        return v ** (alpha - 1.0) if v > 0.0 else 0.0

    c, _ = integrate.quad(weight_fn, 0.0, 1.0, weight="cos", wvar=w, limit=400)
    s, _ = integrate.quad(weight_fn, 0.0, 1.0, weight="sin", wvar=w, limit=400)
    return -2j * alpha * (math.sin(w) * c - math.cos(w) * s)


def poisson_hat_quad(xi: float) -> complex:
    """hat of the even kernel (1/pi)(x^2-1)/(1+x^2)^2 via a cosine transform."""
    c = 1.0 / math.pi

    def psi(r: float) -> float:
        return c * (r * r - 1.0) / (1.0 + r * r) ** 2

    if xi == 0.0:
        val, _ = integrate.quad(psi, 0.0, np.inf, limit=400)
        return complex(2.0 * val)
    val, _ = integrate.quad(
        psi, 0.0, np.inf, weight="cos", wvar=2.0 * math.pi * xi, limit=400
    )
    return complex(2.0 * val)


def disk_hat_dblquad(rho: float) -> float:
    """Transform of the unit-disk average at radius rho, by direct 2-D quadrature."""

    def upper(x: float) -> float:
        return math.sqrt(max(0.0, 1.0 - x * x))

    val, _ = integrate.dblquad(
        lambda y, x: math.cos(2.0 * math.pi * rho * x) / math.pi,
        -1.0,
        1.0,
        lambda x: -upper(x),
        upper,
        epsabs=1e-12,
    )
    return val


# ---------------------------------------------------------------------------
# closed forms

def haar_hat_closed(xi):
    xi = np.asarray(xi, dtype=float)
    out = np.zeros(xi.shape, dtype=complex)
    nz = xi != 0
    out[nz] = -2j * np.sin(np.pi * xi[nz]) ** 2 / (np.pi * xi[nz])
    return out


def ball_hat_1d_closed(xi):
    xi = np.asarray(xi, dtype=float)
    out = np.ones(xi.shape, dtype=complex)
    nz = xi != 0
    out[nz] = np.sin(2.0 * np.pi * xi[nz]) / (2.0 * np.pi * xi[nz])
    return out


def gm_local_power_closed(alpha: float, u: float) -> float:
    """integral over |x|<1 of |alpha (1-|x|)^(alpha-1)|^u, by hand."""
    denom = u * (alpha - 1.0) + 1.0
    if denom <= 0:
        return math.inf
    return 2.0 * alpha**u / denom


def gm_tail_weight_closed(alpha: float, u: float) -> float:
    """Same integral as gm_local_power_closed via the substitution v = 1-r."""
    return gm_local_power_closed(alpha, u)


def haar_hormander_closed(x: float, y: float) -> float:
    """Shift energy of the square wave: the integrand is 1 exactly between
    the two support edges 1 and 1/(1-y/x), zero elsewhere."""
    rho = y / x
    if rho == 0.0:
        return 0.0
    return abs((1.0 - rho) ** -2 - 1.0) / (2.0 * x * x)


def scan_ratio_alpha1_closed(rho: float, same_sign: bool) -> float:
    """R(x, y) at grading 1 depends only on rho = |y/x| and the sign pairing."""
    if same_sign:
        return (2.0 - rho) / (2.0 * (1.0 - rho) ** 2)
    return (2.0 + rho) / (2.0 * (1.0 + rho) ** 2)


def poisson_majorant_l1_closed() -> float:
    """||H||_1 for the Poisson t-derivative, using the exact antiderivative
    of (r^2-1)/(1+r^2)^2, which is -r/(1+r^2).

    |psi| falls from 1/pi at 0 to zero at r = 1, then peaks at r = sqrt(3)
    with value 1/(8 pi) before decaying; the majorant is flat at that peak
    value between the matching radius r0 < 1 and sqrt(3).
    """
    c = 1.0 / math.pi
    peak = c / 8.0
    # solve (1 - r^2)/(1 + r^2)^2 = 1/8 for r in (0, 1)
    roots = np.roots([1.0, 0.0, 2.0 + 8.0, 0.0, 1.0 - 8.0])
    r0 = min(
        float(r.real)
        for r in roots
        if abs(r.imag) < 1e-12 and 0.0 < r.real < 1.0
    )
    inner = c * r0 / (1.0 + r0 * r0)  # integral of |psi| on [0, r0]
    flat = (math.sqrt(3.0) - r0) * peak
    tail = c * math.sqrt(3.0) / (1.0 + 3.0)  # integral of psi on [sqrt(3), inf)
    return 2.0 * (inner + flat + tail)


def poisson_tail_moment_quad(eps: float) -> float:
    c = 1.0 / math.pi
    val, _ = integrate.quad(
        lambda r: c * (r * r - 1.0) / (1.0 + r * r) ** 2 * r**eps,
        1.0,
        np.inf,
        limit=400,
    )
    return 2.0 * val


def poisson_local_power_quad(u: float) -> float:
    c = 1.0 / math.pi
    val, _ = integrate.quad(
        lambda r: (c * (1.0 - r * r) / (1.0 + r * r) ** 2) ** u, 0.0, 1.0, limit=200
    )
    return 2.0 * val


def hormander_quad(kernel, x: float, y: float) -> float:
    """Adaptive-quadrature route for the shift energy of a compact kernel."""
    s = 1.0 if x > 0 else -1.0
    stretch = 1.0 - y / x
    R = kernel.support_radius

    def integrand(u: float) -> float:
        a = np.real(kernel.spatial(np.array([s * u * stretch])))[0]
        b = np.real(kernel.spatial(np.array([s * u])))[0]
        return u * abs(a - b) ** 2

    top = R / min(1.0, stretch)
    pts = sorted(p for p in (R, R / stretch) if 0.0 < p < top)
    val, _ = integrate.quad(integrand, 0.0, top, points=pts, limit=800)
    return val / (x * x)


# ---------------------------------------------------------------------------
# physical-space scale averages

def _interp_periodic(f: SampledField, positions: np.ndarray) -> np.ndarray:
    """Periodic cubic-spline interpolation of a 1-D field."""
    from scipy.interpolate import CubicSpline

    g = f.geometry
    x = g.spatial_axis()
    period = 2.0 * g.half_length
    xx = np.append(x, x[0] + period)
    vv = np.append(f.values, f.values[0])
    spline = CubicSpline(xx, vv, bc_type="periodic")
    wrapped = np.mod(positions - x[0], period) + x[0]
    return spline(wrapped)


def sided_average_physical(
    f: SampledField, alpha: float, t: float, n_s: int = 4001
) -> np.ndarray:
    """S_t at grading alpha by the substitution s = (1 - u/t)^alpha.

    The substitution flattens the endpoint weight exactly, leaving a plain
    trapezoid over s in [0, 1]; accuracy is then set by the smoothness of
    the field, not the grading.
    """
    g = f.geometry
    x = g.spatial_axis()
    s = np.linspace(0.0, 1.0, n_s)
    u = t * (1.0 - s ** (1.0 / alpha))
    h = s[1] - s[0]
    acc = np.zeros(g.shape, dtype=complex)
    for i, ui in enumerate(u):
        w = h if 0 < i < n_s - 1 else h / 2.0
        acc += w * (_interp_periodic(f, x - ui) - _interp_periodic(f, x + ui))
    return acc


def moving_average_physical(f: SampledField, t: float, upsample: int = 8) -> np.ndarray:
    """(f * ball_t)(x) = (F(x+t) - F(x-t)) / (2t) with F a cumulative trapezoid.

    Requires a mean-zero field so the antiderivative of the periodic
    extension is itself periodic.  The field is upsampled by linear
    interpolation first so the cumulative integral resolves scales below
    the grid spacing.
    """
    g = f.geometry
    x = g.spatial_axis()
    fine = np.linspace(-g.half_length, g.half_length, upsample * g.n_samples + 1)
    vals = _interp_periodic(f, fine)
    F = integrate.cumulative_trapezoid(vals, fine, initial=0.0)
    drift = (F[-1] - F[0]) / (fine[-1] - fine[0])  # residual mean after sampling
    F = F - drift * (fine - fine[0])

    def F_at(pos: np.ndarray) -> np.ndarray:
        period = 2.0 * g.half_length
        wrapped = np.mod(pos + g.half_length, period) - g.half_length
        re = np.interp(wrapped, fine, F.real)
        im = np.interp(wrapped, fine, F.imag)
        return re + 1j * im

    return (F_at(x + t) - F_at(x - t)) / (2.0 * t)
