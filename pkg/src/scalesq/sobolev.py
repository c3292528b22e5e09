"""Potential operators and the square functions that characterize
smoothness of fractional order.

The smoothing-difference square functions compare a field with its local
averages across scales, weighting scale t by t^(-alpha); their finiteness
is the working criterion for membership in a smoothness class of order
alpha.  The dyadic potential difference is the same object driven by the
smoothed Riesz-difference kernel, which makes several identities exact in
spectral arithmetic rather than approximate.  `equivalence_experiment`
measures how far the norm comparisons are from equalities on a fixed
family of test fields.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import (
    DyadicRange,
    Geometry,
    LogTimeGrid,
    SampledField,
    bump_field,
    forward_transform,
    gaussian_field,
    l2_norm,
    mean_subtract,
    modulated_gaussian_field,
)
from .kernels import AveragingProfile, _require_moment_class, riesz_difference_kernel
from .multiplier import apply_multiplier, bessel_symbol, riesz_symbol
from .squarefn import _layer_inverse, dyadic_g_function
from .weights import Weight, constant_weight, weighted_norm


def _require_mean_zero(f: SampledField, what: str) -> None:
    """Operators with a homogeneous symbol are only faithful off the zero
    frequency; reject fields carrying mean mass instead of zeroing it."""
    dc = abs(forward_transform(f).coefficients[f.geometry.dc_index])
    scale = max(l2_norm(f), 1e-300)
    if dc > 1e-9 * scale:
        raise ValueError(
            f"{what} requires a mean-zero field: |fhat(0)| = {dc:.3e} "
            f"exceeds 1e-9 * l2 norm; subtract the mean first"
        )


def riesz_potential(f: SampledField, order: float) -> SampledField:
    """Fractional integration of the given order (negative differentiates).

    The symbol is (2 pi |xi|)^(-order) away from xi = 0 and the zero
    frequency carries no meaning, hence the mean-zero gate.
    """
    if order == 0:
        raise ValueError("order must be nonzero")
    _require_mean_zero(f, "riesz_potential")
    return apply_multiplier(riesz_symbol(order), f)


def bessel_potential(f: SampledField, order: float) -> SampledField:
    """Inhomogeneous smoothing of the given order; any real order is legal,
    negative orders invert positive ones exactly on the grid."""
    return apply_multiplier(bessel_symbol(order), f)


def _difference_multipliers(profile: AveragingProfile, geom: Geometry, scales) -> list:
    grids = geom.frequency_grids()
    return [
        np.broadcast_to(1.0 - profile.fourier(*(t * g for g in grids)), geom.shape)
        for t in scales
    ]


def smoothing_difference_function(
    f: SampledField, order: float, profile: AveragingProfile, tg: LogTimeGrid
) -> SampledField:
    """Square function of f - Phi_t * f with scale weight t^(-order).

    The averaging profile must reproduce polynomials up to degree
    floor(order), otherwise the differences cannot see order `order`
    smoothness and the result is meaningless; that gate raises.
    """
    if order <= 0:
        raise ValueError(f"order must be positive, got {order}")
    if profile.dim != f.geometry.dim:
        raise ValueError(
            f"profile '{profile.name}' has dim {profile.dim}, field has dim {f.geometry.dim}"
        )
    _require_moment_class(profile, order, "smoothing_difference_function")
    geom = f.geometry
    F = forward_transform(f).coefficients
    acc = np.zeros(geom.shape)
    mults = _difference_multipliers(profile, geom, tg.nodes)
    for t, mult in zip(tg.nodes, mults):
        acc += t ** (-2.0 * order) * np.abs(_layer_inverse(geom, mult * F)) ** 2
    return SampledField(geom, np.sqrt(tg.weight * acc).astype(complex))


def dyadic_smoothing_difference(
    f: SampledField, order: float, profile: AveragingProfile, kr: DyadicRange
) -> SampledField:
    """Dyadic-scale version: (sum_k 2^(-2 k order) |f - Phi_{2^k} * f|^2)^(1/2)."""
    if order <= 0:
        raise ValueError(f"order must be positive, got {order}")
    if profile.dim != f.geometry.dim:
        raise ValueError(
            f"profile '{profile.name}' has dim {profile.dim}, field has dim {f.geometry.dim}"
        )
    _require_moment_class(profile, order, "dyadic_smoothing_difference")
    geom = f.geometry
    F = forward_transform(f).coefficients
    acc = np.zeros(geom.shape)
    mults = _difference_multipliers(profile, geom, kr.scales)
    for k, mult in zip(kr.exponents, mults):
        acc += 4.0 ** (-float(k) * order) * np.abs(_layer_inverse(geom, mult * F)) ** 2
    return SampledField(geom, np.sqrt(acc).astype(complex))


def potential_smoothing_function(
    f: SampledField,
    order: float,
    profile: AveragingProfile,
    tg: LogTimeGrid,
    route: str = "compose",
) -> SampledField:
    """Smoothing differences of the fractional integral of f.

    route="compose" literally chains riesz_potential into
    smoothing_difference_function; route="layered" builds each layer from
    the combined symbol t^(-order) (2 pi |xi|)^(-order) (1 - Phihat(t xi))
    in one pass.  The two differ only by transform round-off.
    """
    if route == "compose":
        return smoothing_difference_function(riesz_potential(f, order), order, profile, tg)
    if route != "layered":
        raise ValueError(f"unknown route '{route}'")
    if order <= 0:
        raise ValueError(f"order must be positive, got {order}")
    _require_moment_class(profile, order, "potential_smoothing_function")
    _require_mean_zero(f, "potential_smoothing_function")
    geom = f.geometry
    F = forward_transform(f).coefficients
    grids = geom.frequency_grids()
    rho = np.sqrt(sum(np.asarray(g, dtype=float) ** 2 for g in grids))
    rho = np.broadcast_to(rho, geom.shape)
    riesz = np.zeros(geom.shape)
    nz = rho > 0
    riesz[nz] = (2.0 * np.pi * rho[nz]) ** (-order)
    acc = np.zeros(geom.shape)
    for t, mult in zip(tg.nodes, _difference_multipliers(profile, geom, tg.nodes)):
        layer = _layer_inverse(geom, t ** (-order) * mult * riesz * F)
        acc += np.abs(layer) ** 2
    return SampledField(geom, np.sqrt(tg.weight * acc).astype(complex))


def dyadic_potential_difference(
    f: SampledField, order: float, profile: AveragingProfile, kr: DyadicRange
) -> SampledField:
    """Dyadic square function of the Riesz-difference kernel.

    Identical, frequency by frequency, to dyadic_smoothing_difference
    applied to the fractional integral of f; implemented through the
    kernel so that the identity is a theorem about the code, not a
    numerical coincidence.
    """
    _require_mean_zero(f, "dyadic_potential_difference")
    kernel = riesz_difference_kernel(order, profile)
    return dyadic_g_function(f, kernel, kr)


def sobolev_norm(
    f: SampledField, order: float, p: float = 2.0, weight: Weight | None = None
) -> float:
    """Weighted norm of the field whose smoothing of the given order is f.

    Inverts the inhomogeneous smoothing on the grid; orders so large that
    the inverse symbol leaves floating-point range are rejected rather
    than silently overflowed.
    """
    if order < 0:
        raise ValueError(f"order must be nonnegative, got {order}")
    geom = f.geometry
    xi_max = math.sqrt(geom.dim) * geom.n_samples / (4.0 * geom.half_length)
    top = (order / 2.0) * math.log10(1.0 + 4.0 * math.pi**2 * xi_max**2)
    if top > 100.0:
        raise ValueError(
            f"inverse smoothing symbol reaches 1e{top:.0f} at the grid edge; "
            "order too large for this grid's dynamic range"
        )
    if weight is None:
        weight = constant_weight()
    rough = bessel_potential(f, -order)
    return weighted_norm(rough, p, weight)


# ---------------------------------------------------------------------------
# test family and equivalence experiments

@dataclass(frozen=True)
class TestFamily:
    __test__ = False  # not a pytest class despite the name

    geometry: Geometry
    seed: int
    members: tuple[SampledField, ...]
    labels: tuple[str, ...]

    def __post_init__(self):
        if len(self.members) != len(self.labels):
            raise ValueError("members and labels length mismatch")
        if not self.members:
            raise ValueError("family is empty")


def default_test_family(geom: Geometry, seed: int = 0) -> TestFamily:
    """Twenty mean-zero fields spanning low through high frequency content.

    Ten Gaussians (five widths, two centers), five modulated Gaussians,
    five smooth bumps.  The seed jitters centers and amplitudes so that
    distinct seeds give distinct but statistically matched families; all
    shapes stay well inside the box to keep wraparound negligible.
    """
    rng = np.random.default_rng(seed)
    L = geom.half_length
    unit = L / 32.0
    members: list[SampledField] = []
    labels: list[str] = []

    def jitter() -> tuple[float, ...]:
        return tuple(rng.uniform(-L / 40.0, L / 40.0, size=geom.dim))

    def add(label: str, f: SampledField) -> None:
        amp = rng.uniform(0.5, 2.0)
        members.append(mean_subtract(SampledField(geom, amp * f.values)))
        labels.append(label)

    widths = [0.35, 0.55, 0.9, 1.4, 2.2]
    for base_center in (-L / 16.0, L / 16.0):
        for w in widths:
            center = tuple(base_center + d for d in jitter())
            add(f"gauss:w{w:g}:c{base_center:g}", gaussian_field(geom, w * unit, center))

    mod_width = 1.2 * unit
    for m in (16, 32, 64, 128, 256):
        freq = m / (2.0 * L)
        add(f"modgauss:f{freq:g}", modulated_gaussian_field(geom, freq, mod_width, jitter()))

    for w in (2.0, 3.0, 4.0, 5.0, 6.0):
        add(f"bump:w{w:g}", bump_field(geom, w * unit, jitter()))

    return TestFamily(geom, seed, tuple(members), tuple(labels))


@dataclass(frozen=True)
class RatioReport:
    """Outcome of an equivalence experiment: one norm ratio per member."""

    operator: str
    p: float
    weight: str
    members: int
    ratios: tuple[float, ...]
    skipped: tuple[str, ...]
    min_ratio: float
    max_ratio: float
    spread: float

    def as_dict(self) -> dict:
        return {
            "operator": self.operator,
            "p": self.p,
            "weight": self.weight,
            "members": self.members,
            "ratios": list(self.ratios),
            "skipped": list(self.skipped),
            "min": self.min_ratio,
            "max": self.max_ratio,
            "spread": self.spread,
        }


def equivalence_experiment(
    family: TestFamily, ratio_fn, operator: str, p: float, weight_label: str
) -> RatioReport:
    """Evaluate ratio_fn on every member; zero denominators skip the member."""
    ratios: list[float] = []
    skipped: list[str] = []
    for f, label in zip(family.members, family.labels):
        r = ratio_fn(f)
        if r is None:
            skipped.append(label)
        else:
            ratios.append(float(r))
    if not ratios:
        raise ValueError("every family member was skipped")
    lo, hi = min(ratios), max(ratios)
    return RatioReport(
        operator=operator,
        p=p,
        weight=weight_label,
        members=len(family.members),
        ratios=tuple(ratios),
        skipped=tuple(skipped),
        min_ratio=lo,
        max_ratio=hi,
        spread=hi / lo if lo > 0 else float("inf"),
    )


def square_function_ratio(kernel, tg: LogTimeGrid, p: float, weight: Weight):
    """ratio_fn: weighted norm of the continuous square function over that of f."""
    from .squarefn import g_function

    def ratio(f: SampledField):
        denom = weighted_norm(f, p, weight)
        if denom == 0:
            return None
        return weighted_norm(g_function(f, kernel, tg), p, weight) / denom

    return ratio


def dyadic_square_ratio(kernel, kr: DyadicRange, p: float, weight: Weight):
    def ratio(f: SampledField):
        denom = weighted_norm(f, p, weight)
        if denom == 0:
            return None
        return weighted_norm(dyadic_g_function(f, kernel, kr), p, weight) / denom

    return ratio


def sobolev_equivalence_ratio(
    order: float, profile: AveragingProfile, kr: DyadicRange, p: float, weight: Weight
):
    """ratio_fn for the three-norm comparison: smooth g, then ask whether
    the smoothing-difference norm plus the smoothed norm returns ||g||."""

    def ratio(g: SampledField):
        denom = weighted_norm(g, p, weight)
        if denom == 0:
            return None
        smoothed = bessel_potential(g, order)
        diff = dyadic_smoothing_difference(smoothed, order, profile, kr)
        return (weighted_norm(diff, p, weight) + weighted_norm(smoothed, p, weight)) / denom

    return ratio
