"""Boundary traces on the two line segments, two independent ways.

Segments sit at the origin: the `plus` segment is the ray at angle phi0 with
normal nu = (-sin phi0, cos phi0), the `minus` segment is the positive x1
axis with the sector-outward normal nu = (0, -1).  The latter choice is what
makes the minus-side trace series the exact negative of the plus-side ones
at phi0 = 0 for every nu-dependent trace, and is pinned by a regression
test (it is also the outward normal of the sector used by the CGO
integrals, so the Green identity bookkeeping stays sign-free).

Each trace kind is available as
  * a direct evaluation assembled from the field/gradient series
    (`traction_direct`, or `trace_direct` for all six kinds), and
  * the radial Fourier-Bessel trace series (`trace_series`), driven by a
    small term table per kind; the same table feeds `trace_power_series`,
    which extracts exact linear functionals of {a_m, b_m} per power of r
    for the constraint assembler.

Note the traction series table fixes one sign in the shear channel of the
upstream plus-side traction display; the dual-path equality test is the
authority for every term here.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from lamewave import specfun
from lamewave.field import (
    FourierCoefficients,
    LameMedium,
    PolarPoint,
    evaluate_field,
    evaluate_gradient,
)

__all__ = [
    "LineSegment",
    "ImpedanceSeries",
    "BoundaryCondition",
    "KINDS",
    "traction_direct",
    "traction_at",
    "trace_direct",
    "trace_series",
    "trace_power_series",
]

E1 = np.array([1.0, 1.0j])
E2 = np.array([1.0, -1.0j])


@dataclass(frozen=True)
class LineSegment:
    """Segment {r (cos angle, sin angle): 0 <= r <= length} with its frame."""

    angle: float
    length: float
    orientation: str  # "plus" | "minus"

    def __post_init__(self):
        if self.length <= 0:
            raise ValueError("segment length must be positive")
        if self.orientation not in ("plus", "minus"):
            raise ValueError(f"unknown orientation {self.orientation!r}")
        if self.orientation == "minus" and self.angle != 0.0:
            raise ValueError("minus segment is pinned to angle 0")

    @classmethod
    def plus(cls, phi0: float, length: float) -> "LineSegment":
        if not 0.0 < phi0 <= 2.0 * math.pi:
            raise ValueError(f"plus segment angle must lie in (0, 2*pi], got {phi0}")
        return cls(angle=phi0, length=length, orientation="plus")

    @classmethod
    def minus(cls, length: float) -> "LineSegment":
        return cls(angle=0.0, length=length, orientation="minus")

    @property
    def nu(self) -> np.ndarray:
        if self.orientation == "minus":
            return np.array([0.0, -1.0])
        return np.array([-math.sin(self.angle), math.cos(self.angle)])

    @property
    def tau(self) -> np.ndarray:
        n = self.nu
        return np.array([-n[1], n[0]])

    def point(self, r: float) -> PolarPoint:
        phi = self.angle if self.angle <= math.pi else self.angle - 2.0 * math.pi
        return PolarPoint(r, phi)

    def to_json(self) -> dict:
        return {"angle": self.angle, "length": self.length, "orientation": self.orientation}

    @classmethod
    def from_json(cls, doc: dict) -> "LineSegment":
        return cls(doc["angle"], doc["length"], doc["orientation"])


@dataclass(frozen=True)
class ImpedanceSeries:
    """Impedance eta(r) = eta0 + sum_j higher[j-1] r^j, nonzero constant part."""

    eta0: complex
    higher: tuple = ()
    radius: float = 1.0

    def __post_init__(self):
        if self.eta0 == 0:
            raise ValueError("impedance constant part must be nonzero")
        object.__setattr__(self, "higher", tuple(complex(c) for c in self.higher))
        if self.radius <= 0:
            raise ValueError("validity radius must be positive")
        if any(not np.isfinite([c.real, c.imag]).all() for c in self.higher):
            raise ValueError("impedance coefficients must be finite")

    @classmethod
    def constant(cls, eta0: complex) -> "ImpedanceSeries":
        return cls(complex(eta0))

    def coefficient(self, j: int) -> complex:
        if j == 0:
            return complex(self.eta0)
        if j - 1 < len(self.higher):
            return self.higher[j - 1]
        return 0.0

    def __call__(self, r) -> complex:
        val = complex(self.eta0) * np.ones_like(np.asarray(r, dtype=complex))
        for j, c in enumerate(self.higher, start=1):
            val = val + c * np.asarray(r) ** j
        return val if np.ndim(r) else complex(val)

    def to_json(self) -> dict:
        return {
            "eta0": [self.eta0.real, self.eta0.imag],
            "higher": [[c.real, c.imag] for c in self.higher],
            "radius": self.radius,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "ImpedanceSeries":
        return cls(
            complex(*doc["eta0"]),
            tuple(complex(*p) for p in doc.get("higher", [])),
            doc.get("radius", 1.0),
        )


KINDS = (
    "traction_free",       # B1
    "rigid",               # B2
    "soft_clamped",        # B3
    "simply_supported",    # B4
    "impedance",           # B5 = B1 + eta B2
    "generalized_impedance",  # B6 = B3 + eta B4
)

_IMPEDANCE_PAIRS = {"impedance": ("traction_free", "rigid"),
                    "generalized_impedance": ("soft_clamped", "simply_supported")}


@dataclass(frozen=True)
class BoundaryCondition:
    kind: str
    impedance: ImpedanceSeries | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown boundary kind {self.kind!r}")
        if self.kind in _IMPEDANCE_PAIRS and self.impedance is None:
            raise ValueError(f"kind {self.kind!r} requires an impedance series")

    def to_json(self) -> dict:
        doc = {"kind": self.kind}
        if self.impedance is not None:
            doc["impedance"] = self.impedance.to_json()
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "BoundaryCondition":
        imp = doc.get("impedance")
        return cls(doc["kind"], ImpedanceSeries.from_json(imp) if imp else None)


# ----------------------------------------------------------------------------
# term tables
#
# Each base kind maps to two scalar components; a component is a list of
# (channel, shift, beta, coeff) where the m-th term of the series is
#     coeff(m, medium) * J_{m+shift}(k_beta r) * exp(i (m + phase_shift) angle)
# with channel picking a_m or b_m.  The minus segment reuses the plus table
# with the angle at 0 and a per-component sign (the normal flip).
# ----------------------------------------------------------------------------

def _tf_terms(med):
    kp2, ks2, mu, lm = med.k_p**2, med.k_s**2, med.mu, med.lam
    return (
        # e1 component, phase m-1
        [("a", -2, "p", 0.5j * kp2 * mu), ("a", 0, "p", 0.5j * kp2 * (lm + mu)),
         ("b", -2, "s", -0.5 * ks2 * mu)],
        # e2 component, phase m+1
        [("a", 0, "p", -0.5j * kp2 * (lm + mu)), ("a", 2, "p", -0.5j * kp2 * mu),
         ("b", 2, "s", -0.5 * ks2 * mu)],
    )


def _rigid_terms(med):
    kp, ks = med.k_p, med.k_s
    return (
        [("a", -1, "p", 0.5 * kp), ("b", -1, "s", 0.5j * ks)],
        [("a", 1, "p", -0.5 * kp), ("b", 1, "s", 0.5j * ks)],
    )


def _soft_terms(med):
    kp, ks, mu = med.k_p, med.k_s, med.mu
    kp2, ks2 = kp * kp, ks * ks
    return (
        # nu . u, phase m
        [("a", -1, "p", 0.5j * kp), ("a", 1, "p", 0.5j * kp),
         ("b", -1, "s", -0.5 * ks), ("b", 1, "s", 0.5 * ks)],
        # tau . T_nu u, phase m
        [("a", -2, "p", -0.5j * kp2 * mu), ("a", 2, "p", 0.5j * kp2 * mu),
         ("b", -2, "s", 0.5 * ks2 * mu), ("b", 2, "s", 0.5 * ks2 * mu)],
    )


def _simply_terms(med):
    kp, ks, mu, lm = med.k_p, med.k_s, med.mu, med.lam
    kp2, ks2 = kp * kp, ks * ks
    return (
        # tau . u, phase m
        [("a", -1, "p", -0.5 * kp), ("a", 1, "p", 0.5 * kp),
         ("b", -1, "s", -0.5j * ks), ("b", 1, "s", -0.5j * ks)],
        # nu . T_nu u, phase m
        [("a", -2, "p", -0.5 * kp2 * mu), ("a", 0, "p", -kp2 * (lm + mu)),
         ("a", 2, "p", -0.5 * kp2 * mu),
         ("b", -2, "s", -0.5j * ks2 * mu), ("b", 2, "s", 0.5j * ks2 * mu)],
    )


_BASE_TERMS = {
    "traction_free": _tf_terms,
    "rigid": _rigid_terms,
    "soft_clamped": _soft_terms,
    "simply_supported": _simply_terms,
}

# angular phase offset per component: vector kinds split along e1/e2 with
# phases m -/+ 1, scalar kinds carry phase m on both components
_PHASE_OFFSETS = {
    "traction_free": (-1, 1),
    "rigid": (-1, 1),
    "soft_clamped": (0, 0),
    "simply_supported": (0, 0),
}

# sign of each component when the segment is the minus one (normal (0,-1))
_MINUS_SIGNS = {
    "traction_free": (-1.0, -1.0),
    "rigid": (1.0, 1.0),
    "soft_clamped": (-1.0, 1.0),
    "simply_supported": (-1.0, 1.0),
}


def _component_sum(medium, coeffs, segment, kind, r):
    """Evaluate the two scalar series components of a base kind at radius r."""
    M = coeffs.truncation_order
    terms = _BASE_TERMS[kind](medium)
    offsets = _PHASE_OFFSETS[kind]
    signs = _MINUS_SIGNS[kind] if segment.orientation == "minus" else (1.0, 1.0)
    jp = specfun.bessel_j_orders(np.asarray(medium.k_p * r), M + 2)
    js = specfun.bessel_j_orders(np.asarray(medium.k_s * r), M + 2)

    def J(beta, n):
        tab = jp if beta == "p" else js
        if n < 0:
            return -tab[-n] if (-n) % 2 else tab[-n]
        return tab[n]

    out = []
    for comp, (termlist, off, sgn) in enumerate(zip(terms, offsets, signs)):
        total = 0.0 + 0.0j
        for m in range(M + 1):
            phase = np.exp(1j * (m + off) * segment.angle)
            for channel, shift, beta, coeff in termlist:
                c = coeffs.a[m] if channel == "a" else coeffs.b[m]
                total += sgn * coeff * c * phase * J(beta, m + shift)
        out.append(total)
    return np.array(out)


def _vectorize(kind, comps):
    """Vector kinds carry e1/e2 scalar components; rebuild the 2-vector."""
    if kind in ("traction_free", "rigid"):
        return comps[0] * E1 + comps[1] * E2
    return comps


def trace_series(medium, coeffs, segment, condition: BoundaryCondition, r: float) -> np.ndarray:
    """The radial trace series of the requested kind, as a complex 2-vector.

    Vector traces (B1, B2, B5) come back in Cartesian components; the mixed
    scalar traces return (nu.u, tau.T_nu u) for B3, (tau.u, nu.T_nu u) for
    B4 and their eta-combination for B6.
    """
    if not 0.0 <= r <= segment.length:
        raise ValueError(f"radius {r} outside segment of length {segment.length}")
    kind = condition.kind
    if kind in _IMPEDANCE_PAIRS:
        base, partner = _IMPEDANCE_PAIRS[kind]
        if r > condition.impedance.radius:
            raise ValueError("radius outside impedance series validity interval")
        eta = condition.impedance(r)
        lead = _vectorize(base, _component_sum(medium, coeffs, segment, base, r))
        part = _vectorize(partner, _component_sum(medium, coeffs, segment, partner, r))
        return lead + eta * part
    return _vectorize(kind, _component_sum(medium, coeffs, segment, kind, r))


def traction_at(medium, coeffs, p: PolarPoint, nu: np.ndarray) -> np.ndarray:
    """T_nu u = 2 mu d_nu u + lam nu div(u) + mu tau (d2 u1 - d1 u2)."""
    G = evaluate_gradient(medium, coeffs, p)
    tau = np.array([-nu[1], nu[0]])
    div = G[0, 0] + G[1, 1]
    rot = G[0, 1] - G[1, 0]
    return 2.0 * medium.mu * (G @ nu) + medium.lam * div * nu + medium.mu * rot * tau


def traction_direct(medium, coeffs, segment: LineSegment, r: float) -> np.ndarray:
    """Traction on the segment from direct differentiation of the field."""
    if not 0.0 <= r <= segment.length:
        raise ValueError(f"radius {r} outside segment of length {segment.length}")
    return traction_at(medium, coeffs, segment.point(r), segment.nu)


def trace_direct(medium, coeffs, segment, condition: BoundaryCondition, r: float) -> np.ndarray:
    """Same contract as trace_series but assembled from field/gradient values."""
    kind = condition.kind
    p = segment.point(r)
    nu, tau = segment.nu, segment.tau
    if kind == "rigid":
        return evaluate_field(medium, coeffs, p)
    if kind == "traction_free":
        return traction_direct(medium, coeffs, segment, r)
    if kind == "soft_clamped":
        u = evaluate_field(medium, coeffs, p)
        t = traction_direct(medium, coeffs, segment, r)
        return np.array([nu @ u, tau @ t])
    if kind == "simply_supported":
        u = evaluate_field(medium, coeffs, p)
        t = traction_direct(medium, coeffs, segment, r)
        return np.array([tau @ u, nu @ t])
    base, partner = _IMPEDANCE_PAIRS[kind]
    eta = condition.impedance(r)
    lead = trace_direct(medium, coeffs, segment, BoundaryCondition(base), r)
    part = trace_direct(medium, coeffs, segment, BoundaryCondition(partner), r)
    return lead + eta * part


# ----------------------------------------------------------------------------
# exact power-series rows
# ----------------------------------------------------------------------------

def _series_coeff_exact(n: int, k: int) -> Fraction:
    """Exact coefficient of r^k in J_n(k_beta r) without the k_beta^k factor."""
    an = abs(n)
    if k < an or (k - an) % 2:
        return Fraction(0)
    c = specfun.bessel_series_coefficient(an, (k - an) // 2)
    if n < 0 and an % 2:
        c = -c
    return c


def _base_rows(medium, segment, kind, N, M):
    """Rows (k, component) -> coefficient vector over (a_0..a_M, b_0..b_M)."""
    terms = _BASE_TERMS[kind](medium)
    offsets = _PHASE_OFFSETS[kind]
    signs = _MINUS_SIGNS[kind] if segment.orientation == "minus" else (1.0, 1.0)
    kval = {"p": medium.k_p, "s": medium.k_s}
    rows = np.zeros((N + 1, 2, 2 * (M + 1)), dtype=complex)
    for comp, (termlist, off, sgn) in enumerate(zip(terms, offsets, signs)):
        for m in range(M + 1):
            phase = np.exp(1j * (m + off) * segment.angle)
            for channel, shift, beta, coeff in termlist:
                col = m if channel == "a" else (M + 1 + m)
                n = m + shift
                lead = sgn * coeff * phase
                k = abs(n)
                while k <= N:
                    frac = _series_coeff_exact(n, k)
                    rows[k, comp, col] += lead * float(frac) * kval[beta] ** k
                    k += 2
    return rows


def trace_power_series(medium, segment, condition: BoundaryCondition, N: int, M: int):
    """Exact linear functionals of the coefficients per power of r.

    Returns an array of shape (N+1, 2, 2(M+1)): entry [k, c] is the row
    sending (a_0..a_M, b_0..b_M) to the coefficient of r^k in trace
    component c.  Impedance kinds include the Cauchy product of the eta
    series against the partner trace.
    """
    if N > 2 * M:
        raise ValueError(f"truncation inconsistency: N={N} > 2M={2 * M}")
    kind = condition.kind
    if kind in _IMPEDANCE_PAIRS:
        base, partner = _IMPEDANCE_PAIRS[kind]
        rows = _base_rows(medium, segment, base, N, M)
        prows = _base_rows(medium, segment, partner, N, M)
        out = rows.copy()
        for k in range(N + 1):
            for j in range(k + 1):
                eta_j = condition.impedance.coefficient(j)
                if eta_j != 0:
                    out[k] += eta_j * prows[k - j]
        return out
    return _base_rows(medium, segment, kind, N, M)
