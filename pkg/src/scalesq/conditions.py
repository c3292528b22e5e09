"""Checkers for the integrability, decay, and nondegeneracy hypotheses
placed on square-function kernels, plus the scale-shift energy scan.

Divergent quantities come back as math.inf, never as exceptions: blowing
up is a finding about the kernel, not a failure of the computation.
Everything here consumes the kernels' declared metadata (tail exponents,
edge singularities) to decide convergence before integrating, so the
numeric answers carry analytic justification.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi

from .grid import LogTimeGrid
from .kernels import Kernel, _legendre_unit_rule, marcinkiewicz_kernel

_ANGLES = 64


@lru_cache(maxsize=256)
def _jacobi_pair(n: int, exponent: float):
    return roots_jacobi(n, exponent, 0.0)


def _require_spatial(kernel: Kernel, what: str) -> None:
    if kernel.spatial is None:
        raise ValueError(f"{what}: kernel '{kernel.name}' has no spatial evaluator")


def _angular_power_sum(kernel: Kernel, r: np.ndarray, power: float) -> np.ndarray:
    """integral over the sphere of |psi(r omega)|^power, as a function of r.

    One-dimensional 'spheres' are the two points {-r, r}; in two dimensions
    the angular average is taken over a midpoint grid and scaled by 2 pi.
    """
    r = np.asarray(r, dtype=float)
    if kernel.dim == 1:
        return np.abs(kernel.spatial(r)) ** power + np.abs(kernel.spatial(-r)) ** power
    if kernel.radial:
        return 2.0 * np.pi * np.abs(kernel.spatial(r, np.zeros_like(r))) ** power
    theta = (np.arange(_ANGLES) + 0.5) * (2.0 * np.pi / _ANGLES)
    vals = np.abs(
        kernel.spatial(np.outer(r, np.cos(theta)), np.outer(r, np.sin(theta)))
    ) ** power
    return 2.0 * np.pi * vals.mean(axis=1)


def _radial_abs_max(kernel: Kernel, r: np.ndarray) -> np.ndarray:
    """sup over the sphere of |psi(r omega)|."""
    r = np.asarray(r, dtype=float)
    if kernel.dim == 1:
        return np.maximum(np.abs(kernel.spatial(r)), np.abs(kernel.spatial(-r)))
    if kernel.radial:
        return np.abs(kernel.spatial(r, np.zeros_like(r)))
    theta = (np.arange(_ANGLES) + 0.5) * (2.0 * np.pi / _ANGLES)
    vals = np.abs(kernel.spatial(np.outer(r, np.cos(theta)), np.outer(r, np.sin(theta))))
    return vals.max(axis=1)


def _octave_panels(lo: float, hi: float) -> list[tuple[float, float]]:
    edges = [lo]
    while edges[-1] * 2.0 < hi:
        edges.append(edges[-1] * 2.0)
    edges.append(hi)
    return list(zip(edges[:-1], edges[1:]))


def tail_moment_integral(kernel: Kernel, eps: float) -> float:
    """integral over |x| > 1 of |psi(x)| |x|^eps.

    Zero for kernels supported in the unit ball.  For unbounded supports
    the declared spatial tail exponent decides convergence; divergent
    cases return inf.  Convergent tails are integrated out to a cutoff
    with a fitted power-law remainder.
    """
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    _require_spatial(kernel, "tail_moment_integral")
    n = kernel.dim
    R = kernel.support_radius
    if R <= 1.0:
        return 0.0
    if math.isinf(R):
        q = kernel.spatial_tail_exponent
        if q is None:
            raise ValueError(
                f"kernel '{kernel.name}' has unbounded support and no tail exponent metadata"
            )
        if eps >= q - n:
            return math.inf
        cutoff = 4096.0
    else:
        q = None
        cutoff = R
    s, w = _legendre_unit_rule(48)
    total = 0.0
    for a, b in _octave_panels(1.0, cutoff):
        r = a + (b - a) * s
        total += (b - a) * float(
            np.sum(w * r ** (eps + n - 1) * _angular_power_sum(kernel, r, 1.0))
        )
    if q is not None:
        # remainder under the fitted power law A(r) ~ A(cutoff) (cutoff/r)^q
        a_cut = float(_angular_power_sum(kernel, np.asarray([cutoff]), 1.0)[0])
        total += a_cut * cutoff ** (eps + n) / (q - n - eps)
    return total


def _origin_exponent_probe(kernel: Kernel) -> float | None:
    """Fitted s with |psi| ~ r^-s near the origin, or None when bounded."""
    radii = np.geomspace(1e-4, 1e-2, 9)
    mags = _radial_abs_max(kernel, radii)
    if np.any(mags <= 0):
        return None
    slope = np.polyfit(np.log(radii), np.log(mags), 1)[0]
    return -float(slope) if slope < -0.05 else None


def local_power_integral(kernel: Kernel, u: float) -> float:
    """integral over |x| < 1 of |psi(x)|^u for u > 1; inf when divergent.

    Divergence is decided from the edge-singularity metadata (exponent e:
    the integral blows up when u e <= -1) and from a probed origin
    exponent.  Edge singularities are absorbed into Gauss-Jacobi weights,
    so graded profiles integrate exactly.
    """
    if u <= 1:
        raise ValueError(f"exponent must exceed 1, got {u}")
    _require_spatial(kernel, "local_power_integral")
    n = kernel.dim
    s_origin = _origin_exponent_probe(kernel)
    if s_origin is not None and u * s_origin >= n - 1e-9:
        return math.inf
    edge = kernel.edge_singularity
    if edge is not None and edge[1] < 0 and u * edge[1] <= -1.0 + 1e-12:
        return math.inf
    top = min(1.0, kernel.support_radius)

    def panel(a: float, b: float, end_exp: float) -> float:
        # integral_a^b (b-r)^end_exp g(r) dr with g evaluated explicitly
        if end_exp != 0.0:
            x, wj = roots_jacobi(96, end_exp, 0.0)
            r = a + (b - a) * (x + 1.0) / 2.0
            scale = ((b - a) / 2.0) ** (end_exp + 1.0)
            dens = _angular_power_sum(kernel, r, u) / (b - r) ** end_exp
            return scale * float(np.sum(wj * r ** (n - 1) * dens))
        sl, wl = _legendre_unit_rule(96)
        r = a + (b - a) * sl
        return (b - a) * float(
            np.sum(wl * r ** (n - 1) * _angular_power_sum(kernel, r, u))
        )

    # origin grading: pull out r^(-u s) against the surface factor
    lo = 0.0
    total = 0.0
    if s_origin is not None:
        x, wj = roots_jacobi(96, 0.0, n - 1.0 - u * s_origin)
        b0 = top / 2.0
        r = b0 * (x + 1.0) / 2.0
        scale = (b0 / 2.0) ** (n - u * s_origin)
        dens = _angular_power_sum(kernel, r, u) * r ** (u * s_origin)
        total += scale * float(np.sum(wj * dens))
        lo = b0
    if edge is not None and lo < edge[0] <= top:
        total += panel(lo, edge[0], u * edge[1])
        lo = edge[0]
    if lo < top:
        total += panel(lo, top, 0.0)
    return total


def radial_majorant_l1(kernel: Kernel, n_samples: int = 200_000) -> float:
    """L1 norm of the radial envelope sup over |y| >= |x| of |psi(y)|.

    Midpoint sampling of the radial maximum followed by a running suffix
    maximum; kernels with an interior blow-up have an infinite envelope on
    a set of positive measure and report inf directly.
    """
    _require_spatial(kernel, "radial_majorant_l1")
    n = kernel.dim
    edge = kernel.edge_singularity
    if edge is not None and edge[1] < 0:
        return math.inf
    s_origin = _origin_exponent_probe(kernel)
    if s_origin is not None and s_origin >= n - 1e-9:
        return math.inf
    R = kernel.support_radius
    if math.isinf(R):
        q = kernel.spatial_tail_exponent
        if q is None:
            raise ValueError(
                f"kernel '{kernel.name}' has unbounded support and no tail exponent metadata"
            )
        if q <= n:
            return math.inf
        reach = 1024.0
    else:
        q = None
        reach = R
    dr = reach / n_samples
    r = (np.arange(n_samples) + 0.5) * dr
    env = np.maximum.accumulate(_radial_abs_max(kernel, r)[::-1])[::-1]
    surface = 2.0 if n == 1 else 2.0 * np.pi * r
    total = float(np.sum(env * surface) * dr)
    if q is not None:
        c = float(_radial_abs_max(kernel, np.asarray([reach]))[0]) * reach**q
        if n == 1:
            total += 2.0 * c * reach ** (1.0 - q) / (q - 1.0)
        else:
            total += 2.0 * np.pi * c * reach ** (2.0 - q) / (q - 2.0)
    return total


# ---------------------------------------------------------------------------
# Fourier-side checks

@dataclass(frozen=True)
class DecayReport:
    exponent: float
    c_est: float
    c_doubled: float
    passed: bool

    def as_dict(self) -> dict:
        return {
            "exponent": self.exponent,
            "c_est": self.c_est,
            "c_doubled": self.c_doubled,
            "pass": self.passed,
        }


def _directions(dim: int, count: int = 8) -> list[tuple[float, ...]]:
    if dim == 1:
        return [(1.0,), (-1.0,)]
    theta = (np.arange(count) + 0.5) * (2.0 * np.pi / count)
    return [(math.cos(t), math.sin(t)) for t in theta]


def _max_scaled_modulus(kernel: Kernel, delta: float, xi_max: float, per_octave: int) -> float:
    """max over 1 <= |xi| <= xi_max of |psihat(xi)| |xi|^delta, with a local
    linear refinement around the coarse argmax so oscillation peaks are hit."""
    count = max(2, int(round(per_octave * math.log2(xi_max))) + 1)
    radii = np.geomspace(1.0, xi_max, count)
    best = 0.0
    for direc in _directions(kernel.dim):
        mags = np.abs(kernel.fourier(*(radii * d for d in direc)))
        scaled = mags * radii**delta
        i = int(np.argmax(scaled))
        lo = radii[max(i - 1, 0)]
        hi = radii[min(i + 1, radii.size - 1)]
        fine = np.linspace(lo, hi, 400)
        fmag = np.abs(kernel.fourier(*(fine * d for d in direc)))
        best = max(best, float(np.max(fmag * fine**delta)))
    return best


def fourier_decay_check(
    kernel: Kernel, delta: float, xi_max: float = 256.0, per_octave: int = 256
) -> DecayReport:
    """Estimate C in |psihat(xi)| <= C |xi|^-delta over |xi| in [1, xi_max].

    Passes when the estimate is stable within 10 percent under doubling of
    the frequency ceiling; a symbol without the claimed decay keeps
    growing and fails.
    """
    if delta <= 0:
        raise ValueError(f"decay exponent must be positive, got {delta}")
    c1 = _max_scaled_modulus(kernel, delta, xi_max, per_octave)
    c2 = _max_scaled_modulus(kernel, delta, 2.0 * xi_max, per_octave)
    passed = abs(c2 - c1) <= 0.1 * max(c1, 1e-300)
    return DecayReport(exponent=delta, c_est=c1, c_doubled=c2, passed=passed)


@dataclass(frozen=True)
class NondegeneracyReport:
    mode: str
    min_value: float
    passed: bool
    worst_direction: tuple[float, ...]

    def as_dict(self) -> dict:
        return {
            "mode": self.mode,
            "min_value": self.min_value,
            "pass": self.passed,
            "worst_direction": list(self.worst_direction),
        }


def nondegeneracy_check(kernel: Kernel, mode: str = "continuous") -> NondegeneracyReport:
    """Scan for directions (or annulus frequencies) the scale family misses.

    continuous: for each direction, sup of |psihat(t e)| over a dense log
    grid of t; dyadic: for each frequency in the annulus 1 <= |xi| <= 2,
    sup over integer dyadic dilates.  Passes when the worst sup exceeds
    1e-8.
    """
    if mode == "continuous":
        ts = np.geomspace(1e-3, 1e3, 64 * 20)
        worst = (math.inf, (0.0,) * kernel.dim)
        for direc in _directions(kernel.dim, count=32):
            sup = float(np.max(np.abs(kernel.fourier(*(ts * d for d in direc)))))
            if sup < worst[0]:
                worst = (sup, direc)
        min_value, direction = worst
    elif mode == "dyadic":
        if kernel.dim == 1:
            base = np.linspace(1.0, 2.0, 129)
            points = [(x,) for x in base] + [(-x,) for x in base]
        else:
            rads = np.linspace(1.0, 2.0, 17)
            angles = (np.arange(32) + 0.5) * (2.0 * np.pi / 32)
            points = [
                (r * math.cos(t), r * math.sin(t)) for r in rads for t in angles
            ]
        scales = 2.0 ** np.arange(-12, 13).astype(float)
        worst = (math.inf, (0.0,) * kernel.dim)
        for pt in points:
            sup = float(
                np.max(np.abs(kernel.fourier(*(scales * c for c in pt))))
            )
            if sup < worst[0]:
                worst = (sup, pt)
        min_value, direction = worst
    else:
        raise ValueError(f"mode must be 'continuous' or 'dyadic', got '{mode}'")
    return NondegeneracyReport(
        mode=mode,
        min_value=min_value,
        passed=min_value > 1e-8,
        worst_direction=tuple(float(c) for c in direction),
    )


# ---------------------------------------------------------------------------
# the scale-shift energy and its scan

def _end_weighted_rule(a: float, b: float, end_exp: float, n: int):
    """Nodes/weights for integral_a^b (b-u)^end_exp g(u) du."""
    if end_exp == 0.0:
        s, w = _legendre_unit_rule(n)
        return a + (b - a) * s, (b - a) * w
    x, w = _jacobi_pair(n, end_exp)
    u = a + (b - a) * (x + 1.0) / 2.0
    return u, ((b - a) / 2.0) ** (end_exp + 1.0) * w


def hormander_energy(
    kernel: Kernel, x: float, y: float, tg: LogTimeGrid | None = None
) -> float:
    """integral over t of |psi_t(x - y) - psi_t(x)|^2 dt/t for a 1-D kernel.

    Computed after substituting u = |x|/t, which turns the integral into
    x^-2 integral_0^inf u |psi(s u (1 - y/x)) - psi(s u)|^2 du with
    s = sgn(x).  Quadrature panels are split at every point where either
    argument crosses the kernel's support edge, and edge singularities are
    absorbed into Jacobi weights term by term (the squared singular term,
    the cross term, and the smooth term carry different exponents).

    Requires |y| < |x| / 2.  Infinite when the edge blow-up is too strong
    to be square integrable (exponent <= -1/2).
    """
    if kernel.dim != 1:
        raise ValueError("hormander_energy is one-dimensional")
    _require_spatial(kernel, "hormander_energy")
    if not abs(y) < abs(x) / 2.0:
        raise ValueError(f"need |y| < |x|/2, got x = {x}, y = {y}")
    if y == 0.0:
        return 0.0
    nn = 64 if tg is None else max(16, 4 * tg.nodes_per_octave)
    s = 1.0 if x > 0 else -1.0
    rho = y / x
    stretch = 1.0 - rho  # argument ratio; in (1/2, 3/2)

    def f_plain(u: np.ndarray) -> np.ndarray:
        return np.real(kernel.spatial(s * u))

    def f_shift(u: np.ndarray) -> np.ndarray:
        return np.real(kernel.spatial(s * stretch * u))

    R = kernel.support_radius
    if math.isinf(R):
        cut = 64.0 / min(1.0, stretch)
        total = 0.0
        for a, b in _octave_panels(1e-6, cut):
            u, w = _end_weighted_rule(a, b, 0.0, nn)
            total += float(np.sum(w * u * (f_shift(u) - f_plain(u)) ** 2))
        # leading panel near zero: difference vanishes quadratically there
        u, w = _end_weighted_rule(0.0, 1e-6, 0.0, nn)
        total += float(np.sum(w * u * (f_shift(u) - f_plain(u)) ** 2))
        return total / x**2

    edge = kernel.edge_singularity
    e = edge[1] if edge is not None else 0.0
    if e <= -0.5:
        return math.inf
    crossings = {R, R / stretch}
    if edge is not None:
        crossings |= {edge[0], edge[0] / stretch}
    top = max(R, R / stretch)
    edges = sorted({0.0} | {c for c in crossings if 0.0 < c <= top * (1.0 + 1e-12)})
    if edges[-1] < top:
        edges.append(top)

    sing_plain = edge[0] if edge is not None else None  # u where psi(s u) is singular
    sing_shift = edge[0] / stretch if edge is not None else None

    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        kind = None
        if sing_plain is not None and math.isclose(b, sing_plain, rel_tol=1e-12):
            kind = "plain"
        elif sing_shift is not None and math.isclose(b, sing_shift, rel_tol=1e-12):
            kind = "shift"
        if kind is None or e == 0.0:
            u, w = _end_weighted_rule(a, b, 0.0, nn)
            total += float(np.sum(w * u * (f_shift(u) - f_plain(u)) ** 2))
            continue
        sing, smooth = (f_plain, f_shift) if kind == "plain" else (f_shift, f_plain)
        # |sing - smooth|^2 split into three terms with matched grading
        u2, w2 = _end_weighted_rule(a, b, 2.0 * e, nn)
        total += float(np.sum(w2 * u2 * (sing(u2) / (b - u2) ** e) ** 2))
        u1, w1 = _end_weighted_rule(a, b, e, nn)
        total += float(np.sum(w1 * u1 * (-2.0) * smooth(u1) * sing(u1) / (b - u1) ** e))
        u0, w0 = _end_weighted_rule(a, b, 0.0, nn)
        total += float(np.sum(w0 * u0 * smooth(u0) ** 2))
    return total / x**2


@dataclass(frozen=True)
class ScanReport:
    alpha: float
    max_ratio: float
    argmax: tuple[float, float]
    refinement_delta: float
    passed: bool

    def as_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "max_ratio": self.max_ratio,
            "argmax": list(self.argmax),
            "refinement_delta": self.refinement_delta,
            "pass": self.passed,
        }


def _scan_max(
    kernel: Kernel, alpha: float, j_step: float, m_step: float, nodes_per_octave: int
) -> tuple[float, tuple[float, float]]:
    tg = LogTimeGrid(1e-2, 1e2, nodes_per_octave)
    exps = np.arange(-2.0, 2.0 + 1e-9, j_step)
    ms = np.arange(2.0, 12.0 + 1e-9, m_step)
    best = (-math.inf, (0.0, 0.0))
    for sx in (1.0, -1.0):
        for ex in exps:
            xx = sx * 2.0**ex
            for sy in (1.0, -1.0):
                for m in ms:
                    yy = sy * 2.0**-m * abs(xx)
                    L = hormander_energy(kernel, xx, yy, tg)
                    ratio = L * abs(xx) ** (1.0 + 2.0 * alpha) / abs(yy) ** (2.0 * alpha - 1.0)
                    if ratio > best[0]:
                        best = (float(ratio), (float(xx), float(yy)))
    return best


def marcinkiewicz_estimate_scan(alpha: float, refine: bool = True) -> ScanReport:
    """Scan R(x, y) = energy * |x|^(1+2 alpha) / |y|^(2 alpha - 1) over a
    geometric (x, y) grid covering all four sign quadrants.

    The grid is x = +/- 2^(j/4) for j in [-8, 8] and y = +/- 2^-m x for
    m in [2, 12], respecting the exact scale law of the energy.  The
    refinement pass doubles both grid densities and the quadrature order;
    the scan passes when the maximum is finite and moves by at most 5
    percent.
    """
    if not 0.5 < alpha < 1.5:
        raise ValueError(f"alpha must lie in (0.5, 1.5), got {alpha}")
    kernel = marcinkiewicz_kernel(alpha)
    coarse, arg = _scan_max(kernel, alpha, 0.25, 1.0, 16)
    if not refine:
        return ScanReport(alpha, coarse, arg, math.nan, math.isfinite(coarse))
    fine, arg_fine = _scan_max(kernel, alpha, 0.125, 0.5, 32)
    delta = (fine - coarse) / coarse if coarse != 0 else math.inf
    passed = bool(math.isfinite(fine) and abs(delta) <= 0.05)
    return ScanReport(alpha, fine, arg_fine, float(delta), passed)


# ---------------------------------------------------------------------------
# aggregate report for the CLI

def _flag(value: float) -> dict:
    if math.isinf(value):
        return {"value": None, "divergent": True}
    return {"value": value, "divergent": False}


def condition_summary(kernel: Kernel) -> dict:
    """Every checker this module offers, run with standard parameters."""
    out: dict = {"kernel": kernel.name, "dim": kernel.dim}
    zero = (np.zeros(1),) * kernel.dim
    out["cancellation_modulus"] = float(np.abs(kernel.fourier(*zero))[0])
    if kernel.spatial is not None:
        out["tail_moment"] = {"eps": 0.5, **_flag(tail_moment_integral(kernel, 0.5))}
        out["local_power"] = {
            f"u={u:g}": _flag(local_power_integral(kernel, u)) for u in (2.0, 4.0)
        }
        out["majorant_l1"] = _flag(radial_majorant_l1(kernel))
    else:
        out["spatial_checks"] = "skipped: no spatial evaluator"
    delta = kernel.fourier_tail_exponent if kernel.fourier_tail_exponent else 0.5
    out["fourier_decay"] = fourier_decay_check(kernel, delta).as_dict()
    out["nondegeneracy"] = {
        mode: nondegeneracy_check(kernel, mode).as_dict()
        for mode in ("continuous", "dyadic")
    }
    return out
