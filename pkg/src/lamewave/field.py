"""Lame medium, truncated radial-wave coefficients, and field evaluation.

The displacement is represented through two coefficient families {a_m} and
{b_m}: the a-channel is the gradient of a compressional Bessel potential,
the b-channel the curl of a shear one,

    u = grad( sum_m a_m J_m(k_p r) e^{i m phi} )
      + curl( sum_m b_m J_m(k_s r) e^{i m phi} ),      m = 0..M,

which expands into the e1/e2 form used throughout this package with
e1 = (1, i)^T, e2 = (1, -i)^T.  Gradients come from the closed polar
derivative series (no finite differences, exact at r = 0); the PDE residual
deliberately goes the other way, via second differences, so it is an
independent check that the expansion really solves
mu Lap(u) + (lam+mu) grad(div u) + kappa u = 0.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from lamewave import specfun

__all__ = [
    "LameMedium",
    "DEFAULT_MEDIUM",
    "FourierCoefficients",
    "PolarPoint",
    "evaluate_field",
    "evaluate_gradient",
    "pde_residual",
    "point_conditions",
    "PointConditions",
]


@dataclass(frozen=True)
class LameMedium:
    """Lame constants (lam, mu) and eigenvalue kappa with derived wavenumbers."""

    lam: float
    mu: float
    kappa: float

    def __post_init__(self):
        if not (self.mu > 0 and self.lam + self.mu > 0):
            raise ValueError(
                f"strong convexity violated: mu={self.mu}, lam+mu={self.lam + self.mu}"
            )
        if not self.kappa > 0:
            raise ValueError(f"eigenvalue must be positive, got kappa={self.kappa}")

    @property
    def k_p(self) -> float:
        return math.sqrt(self.kappa / (self.lam + 2.0 * self.mu))

    @property
    def k_s(self) -> float:
        return math.sqrt(self.kappa / self.mu)

    @property
    def omega(self) -> float:
        return math.sqrt(self.kappa)

    def to_json(self) -> dict:
        return {
            "lambda": self.lam,
            "mu": self.mu,
            "kappa": self.kappa,
            "k_p": self.k_p,
            "k_s": self.k_s,
            "omega": self.omega,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "LameMedium":
        med = cls(lam=doc["lambda"], mu=doc["mu"], kappa=doc["kappa"])
        for key, val in (("k_p", med.k_p), ("k_s", med.k_s), ("omega", med.omega)):
            if key in doc and abs(doc[key] - val) > 1e-12 * (1.0 + abs(val)):
                raise ValueError(f"inconsistent derived field {key!r} in medium document")
        return med


DEFAULT_MEDIUM = LameMedium(lam=2.0, mu=1.0, kappa=1.0)


def _c2pair(z: complex) -> list:
    return [float(np.real(z)), float(np.imag(z))]


def _pair2c(p) -> complex:
    return complex(p[0], p[1])


@dataclass(frozen=True)
class FourierCoefficients:
    """Coefficient vectors a_0..a_M and b_0..b_M of a truncated expansion."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=complex)
        b = np.asarray(self.b, dtype=complex)
        if a.ndim != 1 or a.shape != b.shape:
            raise ValueError("a and b must be 1-d arrays of equal length")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def truncation_order(self) -> int:
        return len(self.a) - 1

    @classmethod
    def zero(cls, order: int) -> "FourierCoefficients":
        return cls(np.zeros(order + 1, complex), np.zeros(order + 1, complex))

    @classmethod
    def random(cls, order: int, rng: np.random.Generator) -> "FourierCoefficients":
        shape = (2, order + 1)
        re, im = rng.standard_normal(shape), rng.standard_normal(shape)
        return cls(re[0] + 1j * im[0], re[1] + 1j * im[1])

    def scaled(self, c: complex) -> "FourierCoefficients":
        return FourierCoefficients(c * self.a, c * self.b)

    def __add__(self, other: "FourierCoefficients") -> "FourierCoefficients":
        return FourierCoefficients(self.a + other.a, self.b + other.b)

    def to_json(self) -> dict:
        return {
            "truncation_order": self.truncation_order,
            "a": [_c2pair(z) for z in self.a],
            "b": [_c2pair(z) for z in self.b],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "FourierCoefficients":
        coeffs = cls(
            np.array([_pair2c(p) for p in doc["a"]]),
            np.array([_pair2c(p) for p in doc["b"]]),
        )
        if doc.get("truncation_order", coeffs.truncation_order) != coeffs.truncation_order:
            raise ValueError("truncation_order inconsistent with coefficient lengths")
        return coeffs

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


@dataclass(frozen=True)
class PolarPoint:
    """Point r(cos phi, sin phi) with phi on the principal branch (-pi, pi]."""

    r: float
    phi: float

    def __post_init__(self):
        if self.r < 0:
            raise ValueError(f"radius must be nonnegative, got {self.r}")
        if not (-math.pi < self.phi <= math.pi + 1e-15):
            raise ValueError(f"phi={self.phi} outside principal branch (-pi, pi]")

    @classmethod
    def from_cartesian(cls, x1: float, x2: float) -> "PolarPoint":
        return cls(math.hypot(x1, x2), math.atan2(x2, x1))

    def to_cartesian(self) -> np.ndarray:
        return np.array([self.r * math.cos(self.phi), self.r * math.sin(self.phi)])


def _orders(t, n_max):
    """J_{-2}..J_{n_max}(t) as a dict-like array indexed by order+2."""
    j = specfun.bessel_j_orders(t, n_max)
    # prepend J_{-1} = -J_1 and J_{-2} = J_2
    return np.concatenate([j[2:3], -j[1:2], j], axis=0)


def evaluate_field(medium: LameMedium, coeffs: FourierCoefficients, p: PolarPoint) -> np.ndarray:
    """Displacement u(x) at a polar point, as a complex 2-vector."""
    u1, u2 = _evaluate_field_arrays(medium, coeffs, np.asarray(p.r), np.asarray(p.phi))
    return np.array([complex(u1), complex(u2)])


def _evaluate_field_arrays(medium, coeffs, r, phi):
    """Vectorized field evaluation over broadcast arrays r, phi."""
    M = coeffs.truncation_order
    kp, ks = medium.k_p, medium.k_s
    jp = _orders(kp * r, M + 1)   # index n+2 holds J_n
    js = _orders(ks * r, M + 1)
    m = np.arange(M + 1).reshape((M + 1,) + (1,) * np.ndim(r))
    a = coeffs.a.reshape(m.shape)
    b = coeffs.b.reshape(m.shape)
    ph_lo = np.exp(1j * (m - 1) * phi)
    ph_hi = np.exp(1j * (m + 1) * phi)
    # e1/e2 scalar components summed over m
    e1c = np.sum((0.5 * kp * a * jp[1 : M + 2] + 0.5j * ks * b * js[1 : M + 2]) * ph_lo, axis=0)
    e2c = np.sum((-0.5 * kp * a * jp[3 : M + 4] + 0.5j * ks * b * js[3 : M + 4]) * ph_hi, axis=0)
    return e1c + e2c, 1j * (e1c - e2c)


def evaluate_gradient(
    medium: LameMedium, coeffs: FourierCoefficients, p: PolarPoint
) -> np.ndarray:
    """Gradient matrix with entries [i, j] = d u_i / d x_j, valid at r = 0 too.

    Uses the closed polar-derivative series of the expansion; the angular
    part enters only through n J_n(kr)/r = k (J_{n-1} + J_{n+1})(kr) / 2,
    so no 1/r factor survives and the origin needs no special casing.
    """
    M = coeffs.truncation_order
    kp, ks = medium.k_p, medium.k_s
    r, phi = p.r, p.phi
    jp = _orders(np.asarray(kp * r), M + 2)
    js = _orders(np.asarray(ks * r), M + 2)
    m = np.arange(M + 1)
    a, b = coeffs.a, coeffs.b
    ph_lo = np.exp(1j * (m - 1) * phi)
    ph_hi = np.exp(1j * (m + 1) * phi)

    def J(tab, shift):
        return tab[m + shift + 2]

    kp2, ks2 = kp * kp, ks * ks
    # radial derivatives of u1, u2
    du1_dr = np.sum(
        0.25 * kp2 * a * (ph_lo * J(jp, -2) - (ph_lo + ph_hi) * J(jp, 0) + ph_hi * J(jp, 2))
        + 0.25j * ks2 * b * (ph_lo * J(js, -2) - (ph_lo - ph_hi) * J(js, 0) - ph_hi * J(js, 2))
    )
    du2_dr = np.sum(
        0.25j * kp2 * a * (ph_lo * J(jp, -2) - (ph_lo - ph_hi) * J(jp, 0) - ph_hi * J(jp, 2))
        + 0.25 * ks2 * b * (-ph_lo * J(js, -2) + (ph_lo + ph_hi) * J(js, 0) - ph_hi * J(js, 2))
    )
    # (1/r) d/dphi, with the 1/r absorbed through n J_n(kr)/r
    du1_dphi_r = np.sum(
        0.25j * kp2 * a * (ph_lo * (J(jp, -2) + J(jp, 0)) - ph_hi * (J(jp, 0) + J(jp, 2)))
        - 0.25 * ks2 * b * (ph_lo * (J(js, -2) + J(js, 0)) + ph_hi * (J(js, 0) + J(js, 2)))
    )
    du2_dphi_r = np.sum(
        -0.25 * kp2 * a * (ph_lo * (J(jp, -2) + J(jp, 0)) + ph_hi * (J(jp, 0) + J(jp, 2)))
        - 0.25j * ks2 * b * (ph_lo * (J(js, -2) + J(js, 0)) - ph_hi * (J(js, 0) + J(js, 2)))
    )
    c, s = math.cos(phi), math.sin(phi)
    d1u1 = c * du1_dr - s * du1_dphi_r
    d2u1 = s * du1_dr + c * du1_dphi_r
    d1u2 = c * du2_dr - s * du2_dphi_r
    d2u2 = s * du2_dr + c * du2_dphi_r
    return np.array([[d1u1, d2u1], [d1u2, d2u2]])


def pde_residual(
    medium: LameMedium,
    coeffs: FourierCoefficients,
    p: PolarPoint,
    step: float = 1e-3,
) -> np.ndarray:
    """mu Lap(u) + (lam+mu) grad(div u) + kappa u via second differences.

    Independent of the gradient series on purpose: a small residual
    certifies that the represented field really is an eigenfunction.
    """
    x0 = p.to_cartesian()

    def u(dx, dy):
        q = PolarPoint.from_cartesian(x0[0] + dx, x0[1] + dy)
        return evaluate_field(medium, coeffs, q)

    h = step
    u0 = u(0.0, 0.0)
    uxx = (u(h, 0) - 2 * u0 + u(-h, 0)) / h**2
    uyy = (u(0, h) - 2 * u0 + u(0, -h)) / h**2
    uxy = (u(h, h) - u(h, -h) - u(-h, h) + u(-h, -h)) / (4 * h**2)
    lap = uxx + uyy
    grad_div = np.array([uxx[0] + uxy[1], uxy[0] + uyy[1]])
    lam, mu, kappa = medium.lam, medium.mu, medium.kappa
    return mu * lap + (lam + mu) * grad_div + kappa * u0


@dataclass(frozen=True)
class PointConditions:
    u_at_origin: np.ndarray
    nu_grad_nu: complex
    tau_grad_nu: complex


def point_conditions(
    medium: LameMedium, coeffs: FourierCoefficients, phi0: float
) -> PointConditions:
    """Origin values u(0), nu^T grad(u) nu and tau^T grad(u) nu in closed form.

    The two gradient scalars are the r^0 coefficients of the corresponding
    trace series on the ray at angle phi0 (normal (-sin phi0, cos phi0)):

        nu^T grad(u) nu |0  = -(1/4) [2 k_p^2 a_0 + e^{2 i phi0}(k_p^2 a_2 + i k_s^2 b_2)]
        tau^T grad(u) nu |0 = -(i/4) [2 i k_s^2 b_0 + e^{2 i phi0}(k_p^2 a_2 + i k_s^2 b_2)]

    The overall -1/4 / -i/4 normalization is a convention of this artifact
    (it makes the scalars equal the honest directional derivatives, which is
    what the gradient-based regression test checks).
    """
    if coeffs.truncation_order < 2:
        raise ValueError("point conditions need coefficients up to order 2")
    kp2 = medium.k_p**2
    ks2 = medium.k_s**2
    a, b = coeffs.a, coeffs.b
    e2 = np.exp(2j * phi0)
    u0 = (0.5 * medium.k_p * a[1] + 0.5j * medium.k_s * b[1]) * np.array([1.0, 1.0j])
    group = e2 * (kp2 * a[2] + 1j * ks2 * b[2])
    nu_grad_nu = -0.25 * (2.0 * kp2 * a[0] + group)
    tau_grad_nu = -0.25j * (2.0j * ks2 * b[0] + group)
    return PointConditions(u_at_origin=u0, nu_grad_nu=nu_grad_nu, tau_grad_nu=tau_grad_nu)
