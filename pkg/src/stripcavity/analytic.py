"""Closed-form cavity results: absorptance models, optimal thicknesses,
matched input impedances, and the quarter-wave-transformer view.

All expressions here assume a thin absorbing wire layer, lossless dielectrics
near quarter-wave thickness, and (where a metal mirror enters) an extinction
far larger than its real index. The exact engine in :mod:`stripcavity.tmm`
carries none of these approximations and acts as the oracle the formulas are
checked against.

Every function takes a :class:`CavityContext` bundling the effective wire
permittivity, the relevant refractive indices, and the vacuum wavelength.
Signs follow the package convention: Im(eps_w) <= 0 and Im(n_m) <= 0, so the
leading terms -4*Im(eps_w)*... are positive.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

__all__ = [
    "CavityContext",
    "OptimumPoint",
    "QwtResult",
    "ValidityWarning",
    "detuning_from_thickness",
    "thickness_from_detuning",
    "combine_dsc_detunings",
    "max_absorptance",
    "max_absorptance_detuned",
    "absorptance_ssc",
    "absorptance_mlc",
    "wire_optimum_ssc",
    "wire_optimum_mlc",
    "absorptance_ssc_dielectric",
    "dielectric_optimum_ssc",
    "absorptance_dsc",
    "wire_optimum_dsc",
    "absorptance_dsc_dielectric",
    "dielectric_optimum_dsc",
    "mlc_reflection",
    "analytic_input_impedance",
    "qwt_relations",
]


class ValidityWarning(UserWarning):
    """An input strains the approximations behind a closed-form expression."""


# Thin-wire assumption strains once the wire approaches this wavelength fraction.
_WIRE_FRACTION = 1.0 / 50.0
# Quarter-wave detuning (rad) beyond which the linearised spacer matrix drifts.
_DETUNING_LIMIT = 0.5


@dataclass(frozen=True)
class CavityContext:
    """Inputs shared by the closed-form expressions.

    eps_w is the effective wire-layer permittivity; n_c is the single-spacer
    index, n_c1/n_c2 the lower/upper (or reflector pair) indices, and n_m the
    complex mirror index (None means the ideal-mirror limit). n_o only enters
    the finite-period reflector formula.
    """

    eps_w: complex
    n_i: float = 1.0
    n_c: float | None = None
    n_c1: float | None = None
    n_c2: float | None = None
    n_m: complex | None = None
    n_o: float = 1.0
    wavelength_nm: float = 1550.0

    def __post_init__(self) -> None:
        if self.n_i <= 0:
            raise ValueError(f"input index must be > 0, got {self.n_i}")
        if self.wavelength_nm <= 0:
            raise ValueError(f"wavelength must be > 0 nm, got {self.wavelength_nm}")
        for label, value in (("n_c", self.n_c), ("n_c1", self.n_c1), ("n_c2", self.n_c2)):
            if value is not None and value <= 0:
                raise ValueError(f"{label} must be > 0, got {value}")
        if self.eps_w.imag > 0:
            raise ValueError("Im(eps_w) must be <= 0 under the package sign convention")
        if self.n_m is not None and complex(self.n_m).imag > 0:
            raise ValueError("Im(n_m) must be <= 0 under the package sign convention")

    @property
    def k0(self) -> float:
        return 2.0 * math.pi / self.wavelength_nm

    @property
    def eta_i(self) -> float:
        return 1.0 / self.n_i


@dataclass(frozen=True)
class OptimumPoint:
    """A closed-form optimum: thickness, peak absorptance, and (when the
    optimum is phrased as a quarter-wave detuning) the detuning in radians."""

    d_opt_nm: float
    A_opt: float
    dphi: float | None = None


@dataclass(frozen=True)
class QwtResult:
    """Quarter-wave-transformer view of the layer below the wire."""

    eta_qwt: complex
    n_qwt: float
    d_w_implied_nm: float


def _warn_wire(d_w: float, wavelength_nm: float) -> None:
    if d_w > wavelength_nm * _WIRE_FRACTION:
        warnings.warn(
            f"wire thickness {d_w:.3g} nm exceeds {wavelength_nm * _WIRE_FRACTION:.3g} nm; "
            "the thin-wire expansion is strained",
            ValidityWarning,
            stacklevel=3,
        )


def _warn_detuning(dphi: float) -> None:
    if abs(dphi) > _DETUNING_LIMIT:
        warnings.warn(
            f"detuning {dphi:.3g} rad exceeds {_DETUNING_LIMIT} rad; "
            "the linearised spacer matrix is strained",
            ValidityWarning,
            stacklevel=3,
        )


def detuning_from_thickness(d_nm: float, n: float, wavelength_nm: float) -> float:
    """Phase detuning of a layer from exact quarter-wave: k0*n*d - pi/2."""
    return 2.0 * math.pi / wavelength_nm * n * d_nm - 0.5 * math.pi


def thickness_from_detuning(dphi: float, n: float, wavelength_nm: float) -> float:
    """Inverse of :func:`detuning_from_thickness`."""
    return (0.5 * math.pi + dphi) * wavelength_nm / (2.0 * math.pi * n)


def combine_dsc_detunings(dphi_c1: float, dphi_c2: float, ctx: CavityContext) -> float:
    """Single detuning that the double-side cavity responds to:
    dphi_c1 + (n_c2/n_c1)*dphi_c2. Trades preserving it leave A unchanged."""
    _need(ctx, "n_c1", "n_c2")
    return dphi_c1 + (ctx.n_c2 / ctx.n_c1) * dphi_c2


def _need(ctx: CavityContext, *fields: str) -> None:
    for name in fields:
        if getattr(ctx, name) is None:
            raise ValueError(f"context is missing {name}")


def max_absorptance(eps_w: complex) -> float:
    """Peak absorptance over wire thickness: 2*Im(eps)/(Im(eps) - |eps|).

    The same expression holds for the single-side, double-side, and
    multi-layer cavities; only the optimum thickness differs.
    """
    mag = abs(eps_w)
    if mag == 0:
        raise ValueError("wire permittivity must be nonzero")
    return 2.0 * eps_w.imag / (eps_w.imag - mag)


def max_absorptance_detuned(eps_w: complex) -> float:
    """Peak of the mirror-detuning absorptance family at its matched point:
    -4*Im(eps)/(|eps|*(1 - Im(eps)/|eps|)**2). Shared by the single- and
    double-side spacer optima."""
    mag = abs(eps_w)
    if mag == 0:
        raise ValueError("wire permittivity must be nonzero")
    ratio = eps_w.imag / mag
    return -4.0 * eps_w.imag / (mag * (1.0 - ratio) ** 2)


def absorptance_ssc(d_w: float, ctx: CavityContext) -> float:
    """Absorptance of the single-side cavity vs wire thickness (ideal mirror,
    quarter-wave spacer). Depends only on n_i, eps_w, and d_w."""
    _warn_wire(d_w, ctx.wavelength_nm)
    k0 = ctx.k0
    e = ctx.eps_w
    num = -4.0 * k0 * e.imag * ctx.n_i * d_w
    den = (ctx.n_i - k0 * e.imag * d_w) ** 2 + (k0 * e.real * d_w) ** 2
    return num / den


# The reflector-backed cavity obeys the same wire-thickness law once the
# period count is large enough for transmission to vanish.
absorptance_mlc = absorptance_ssc


def wire_optimum_ssc(ctx: CavityContext) -> OptimumPoint:
    """Wire thickness maximising the single-side cavity absorptance:
    d = n_i/(k0*|eps_w|)."""
    mag = abs(ctx.eps_w)
    if mag == 0:
        raise ValueError("wire permittivity must be nonzero")
    return OptimumPoint(ctx.n_i / (ctx.k0 * mag), max_absorptance(ctx.eps_w))


wire_optimum_mlc = wire_optimum_ssc


def absorptance_ssc_dielectric(dphi_c: float, ctx: CavityContext) -> float:
    """Single-side absorptance vs spacer detuning, wire fixed at its optimum.

    The mirror enters through Im(n_m)/|n_m|**2; passing n_m = None takes the
    ideal-mirror limit where that term vanishes.
    """
    _need(ctx, "n_c")
    _warn_detuning(dphi_c)
    e = ctx.eps_w
    mag = abs(e)
    mirror = 0.0
    if ctx.n_m is not None:
        n_m = complex(ctx.n_m)
        mirror = ctx.n_c**2 * n_m.imag / (abs(n_m) ** 2 * ctx.n_i)
    bracket = e.real / mag - mirror + dphi_c * ctx.n_c / ctx.n_i
    return (-4.0 * e.imag / mag) / ((1.0 - e.imag / mag) ** 2 + bracket**2)


def _mirror_phase_shift(ctx: CavityContext) -> float:
    """Detuning contribution of a real metal mirror, zero in the ideal limit."""
    if ctx.n_m is None:
        return 0.0
    n_m = complex(ctx.n_m)
    return n_m.imag / (abs(n_m) ** 2)


def dielectric_optimum_ssc(ctx: CavityContext) -> OptimumPoint:
    """Spacer thickness maximising the single-side absorptance.

    The optimum sits below quarter-wave: the wire's Re(eps) and the mirror's
    penetration both shave the required phase. dphi is computed first and the
    thickness derived from it, so this and the detuning family cannot drift
    apart.
    """
    _need(ctx, "n_c")
    e = ctx.eps_w
    mag = abs(e)
    if mag == 0:
        raise ValueError("wire permittivity must be nonzero")
    dphi = -ctx.n_i * e.real / (ctx.n_c * mag) + ctx.n_c * _mirror_phase_shift(ctx)
    d_opt = thickness_from_detuning(dphi, ctx.n_c, ctx.wavelength_nm)
    return OptimumPoint(d_opt, max_absorptance_detuned(e), dphi)


def absorptance_dsc(d_w: float, ctx: CavityContext) -> float:
    """Absorptance of the double-side cavity vs wire thickness (ideal mirror,
    quarter-wave dielectrics). The lower dielectric rescales the optimum."""
    _need(ctx, "n_c1")
    _warn_wire(d_w, ctx.wavelength_nm)
    e = ctx.eps_w
    u = ctx.k0 * ctx.n_i * d_w / ctx.n_c1**2
    return -4.0 * u * e.imag / ((u * e.imag - 1.0) ** 2 + (u * e.real) ** 2)


def wire_optimum_dsc(ctx: CavityContext) -> OptimumPoint:
    """Wire thickness maximising the double-side cavity absorptance:
    d = n_c1**2/(k0*n_i*|eps_w|)."""
    _need(ctx, "n_c1")
    mag = abs(ctx.eps_w)
    if mag == 0:
        raise ValueError("wire permittivity must be nonzero")
    d_opt = ctx.n_c1**2 / (ctx.k0 * ctx.n_i * mag)
    return OptimumPoint(d_opt, max_absorptance(ctx.eps_w))


def absorptance_dsc_dielectric(dphi_dsc: float, ctx: CavityContext) -> float:
    """Double-side absorptance vs the combined detuning of both dielectrics,
    wire fixed at its optimum. See :func:`combine_dsc_detunings`."""
    _need(ctx, "n_c1", "n_c2")
    _warn_detuning(dphi_dsc)
    e = ctx.eps_w
    mag = abs(e)
    mirror = 0.0
    if ctx.n_m is not None:
        n_m = complex(ctx.n_m)
        mirror = ctx.n_c2**2 * ctx.n_i * n_m.imag / (ctx.n_c1**2 * abs(n_m) ** 2)
    bracket = e.real / mag + dphi_dsc * ctx.n_i / ctx.n_c1 - mirror
    return (-4.0 * e.imag / mag) / ((1.0 - e.imag / mag) ** 2 + bracket**2)


def dielectric_optimum_dsc(ctx: CavityContext) -> OptimumPoint:
    """Combined detuning maximising the double-side absorptance, and the upper
    dielectric thickness realising it when the lower layer stays at exact
    quarter-wave."""
    _need(ctx, "n_c1", "n_c2")
    e = ctx.eps_w
    mag = abs(e)
    if mag == 0:
        raise ValueError("wire permittivity must be nonzero")
    dphi_dsc = -ctx.n_c1 * e.real / (ctx.n_i * mag) + (
        ctx.n_c2**2 / ctx.n_c1
    ) * _mirror_phase_shift(ctx)
    dphi_c2 = (ctx.n_c1 / ctx.n_c2) * dphi_dsc
    d_c2 = thickness_from_detuning(dphi_c2, ctx.n_c2, ctx.wavelength_nm)
    return OptimumPoint(d_c2, max_absorptance_detuned(e), dphi_dsc)


def mlc_reflection(d_w: float, periods: int, ctx: CavityContext) -> tuple[complex, complex]:
    """Reflection off the reflector-backed cavity: (finite-period value,
    large-period limit).

    Both use the thin-wire layer matrix; the finite-period value keeps the
    full reflector algebra while the limit drops the decaying diagonal. They
    are returned together so convergence in the period count stays testable.
    """
    _need(ctx, "n_c1", "n_c2")
    if ctx.n_c1 >= ctx.n_c2:
        raise ValueError(
            "the layer adjacent to the wire must have the smaller refractive index "
            f"(n_c1 = {ctx.n_c1} >= n_c2 = {ctx.n_c2})"
        )
    if periods < 1:
        raise ValueError(f"period count must be >= 1, got {periods}")
    if d_w <= 0:
        raise ValueError(f"wire thickness must be > 0 nm, got {d_w}")
    _warn_wire(d_w, ctx.wavelength_nm)

    k0 = ctx.k0
    e = ctx.eps_w
    eta_i = 1.0 / ctx.n_i
    eta_o = 1.0 / ctx.n_o
    # One quarter-wave pair is diag(-eta_c1/eta_c2, -eta_c2/eta_c1); the
    # N-period chain raises each entry to the Nth power.
    a = (-ctx.n_c2 / ctx.n_c1) ** periods
    b = (-ctx.n_c1 / ctx.n_c2) ** periods
    f11 = a
    f12 = b * 1j * k0 * d_w          # eta_w * gamma_w * d_w = i*k0*d_w
    f21 = a * 1j * k0 * e * d_w      # gamma_w * d_w / eta_w = i*k0*eps_w*d_w
    f22 = b
    den = f11 * eta_o + f12 + f21 * eta_i * eta_o + f22 * eta_i
    num = f11 * eta_o + f12 - f21 * eta_i * eta_o - f22 * eta_i
    r_full = num / den

    x = 1j * k0 * e * d_w / ctx.n_i
    r_limit = (1.0 - x) / (1.0 + x)
    return r_full, r_limit


def analytic_input_impedance(cavity: str, d_w: float, ctx: CavityContext) -> complex:
    """Input impedance of a cavity with an ideal mirror (large period count
    for the reflector type), in the thin-wire limit.

    Single-side and reflector cavities present 1/(i*k0*eps_w*d_w); the
    double-side cavity presents i*k0*eps_w*d_w/n_c1**2. At the optimal wire
    thickness each has modulus equal to the input-medium impedance.
    """
    if d_w <= 0:
        raise ValueError(f"wire thickness must be > 0 nm, got {d_w}")
    if cavity in ("ssc", "mlc"):
        return 1.0 / (1j * ctx.k0 * ctx.eps_w * d_w)
    if cavity == "dsc":
        _need(ctx, "n_c1")
        return 1j * ctx.k0 * ctx.eps_w * d_w / ctx.n_c1**2
    raise ValueError(f"unknown cavity type {cavity!r}")


def qwt_relations(ctx: CavityContext, d_w: float) -> QwtResult:
    """Quarter-wave-transformer reading of the layer below the wire.

    The wire plus ideal mirror presents 1/(i*k0*eps_w*d_w); matching that to
    the input medium needs a quarter-wave layer of impedance
    sqrt(eta_i/(k0*eps_w*d_w)). n_qwt is the index realising |eta_qwt|, and
    d_w_implied inverts the relation: choosing n_qwt = n_c1 reproduces the
    double-side wire optimum.
    """
    if d_w <= 0:
        raise ValueError(f"wire thickness must be > 0 nm, got {d_w}")
    eta_qwt = cmath.sqrt(ctx.eta_i / (ctx.k0 * ctx.eps_w * d_w))
    n_qwt = 1.0 / abs(eta_qwt)
    d_w_implied = n_qwt**2 / (ctx.k0 * ctx.n_i * abs(ctx.eps_w))
    return QwtResult(eta_qwt, n_qwt, d_w_implied)
