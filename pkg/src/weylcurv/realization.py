"""Realizing curvature models by polynomial jets at the origin of ``R^n``.

Every jet is a truncated Taylor expansion stored by its derivatives at 0:

* metric ``g_ij(x) = h_ij + L[a,i,j] x^a + 1/2 Q[a,b,i,j] x^a x^b``, where
  ``L[a] = d_a g(0)`` and ``Q[a,b] = d_a d_b g(0)`` (degree <= 2);
* one-form ``phi_i(x) = phi0[i] + M[l,i] x^l`` with ``M[l,i] = d_l phi_i(0)``;
* connection ``Gamma_ijk(x) = G0[i,j,k] + C[a,i,j,k] x^a`` where
  ``Gamma_ijk = h_km Gamma_ij^m`` is lowered with the constant metric ``h``.

A connection at the origin needs nothing beyond degree 1, and the metric
nothing beyond degree 2, so all products are truncated accordingly.

Sign and scale of the two realization ansätze were fixed by calibrating
against :func:`curvature_at_origin`; see ``ANSATZ_CONSTANTS``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .curvature import CurvatureModel, alt_ricci, higa_decompose, require_class
from .errors import DimensionError, ShapeError
from .tensor_core import (
    FLOAT_TOL,
    InnerProduct,
    alternate_pair,
    check_square,
    freeze,
    is_exact,
    max_abs,
    permute,
    scale,
    zeros,
)

# G(k,l,i,j) = c1 (A(k,i,l,j) + A(l,i,k,j)) and C(i,j,k,l) = c2 (A(i,j,k,l) + A(i,k,j,l))
RIEMANN_ANSATZ = Fraction(1, 3)
AFFINE_ANSATZ = Fraction(1, 3)
ANSATZ_CONSTANTS = {"riemann": RIEMANN_ANSATZ, "affine": AFFINE_ANSATZ}

KINDS = ("weyl", "riemann", "affine")


def _ro(arr):
    return freeze(np.array(arr, dtype=arr.dtype, copy=True))


def _check(arr, shape, name):
    if arr.shape != shape:
        raise DimensionError(f"{name} has shape {arr.shape}, expected {shape}")


@dataclass(frozen=True)
class MetricJet:
    h: InnerProduct
    quad: np.ndarray = field(repr=False)
    linear: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        n = self.h.dim
        if self.linear is None:
            object.__setattr__(self, "linear", zeros((n,) * 3, self.h.exact))
        _check(self.quad, (n,) * 4, "metric quad")
        _check(self.linear, (n,) * 3, "metric linear")
        object.__setattr__(self, "quad", _ro(self.quad))
        object.__setattr__(self, "linear", _ro(self.linear))
        if max_abs(self.quad - permute(self.quad, "bacd")) or max_abs(
            self.quad - permute(self.quad, "abdc")
        ) or max_abs(self.linear - permute(self.linear, "acb")):
            raise ShapeError("metric jet coefficients must be symmetric")

    @property
    def dim(self) -> int:
        return self.h.dim

    @classmethod
    def flat(cls, h: InnerProduct) -> "MetricJet":
        return cls(h, zeros((h.dim,) * 4, h.exact))

    def poly(self):
        return [self.h.matrix, self.linear, self.quad]


@dataclass(frozen=True)
class OneFormJet:
    linear: np.ndarray = field(repr=False)
    const: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        n = check_square(self.linear, 2)
        if self.const is None:
            object.__setattr__(self, "const", zeros((n,), is_exact(self.linear)))
        _check(self.const, (n,), "one-form constant")
        object.__setattr__(self, "linear", _ro(self.linear))
        object.__setattr__(self, "const", _ro(self.const))

    @property
    def dim(self) -> int:
        return self.linear.shape[0]

    @classmethod
    def zero(cls, n: int, exact: bool = True) -> "OneFormJet":
        return cls(zeros((n, n), exact))

    def poly(self):
        return [self.const, self.linear]


@dataclass(frozen=True)
class ConnectionJet:
    linear: np.ndarray = field(repr=False)
    const: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        n = self.linear.shape[0]
        _check(self.linear, (n,) * 4, "connection linear")
        if self.const is None:
            object.__setattr__(self, "const", zeros((n,) * 3, is_exact(self.linear)))
        _check(self.const, (n,) * 3, "connection constant")
        object.__setattr__(self, "linear", _ro(self.linear))
        object.__setattr__(self, "const", _ro(self.const))

    @property
    def dim(self) -> int:
        return self.linear.shape[0]

    def __add__(self, other: "ConnectionJet") -> "ConnectionJet":
        return ConnectionJet(self.linear + other.linear, self.const + other.const)

    def __eq__(self, other):
        if not isinstance(other, ConnectionJet):
            return NotImplemented
        return _same(self.linear, other.linear) and _same(self.const, other.const)

    __hash__ = None


@dataclass(frozen=True)
class GaugeFunction:
    """``f(x) = linear . x + 1/2 x^T quad x`` with ``f(0) = 0``."""

    linear: np.ndarray
    quad: np.ndarray

    def __post_init__(self):
        n = self.linear.shape[0]
        _check(self.quad, (n, n), "gauge quad")
        if max_abs(self.quad - self.quad.T):
            raise ShapeError("gauge quadratic part must be symmetric")

    @property
    def dim(self) -> int:
        return self.linear.shape[0]

    @classmethod
    def zero(cls, n: int) -> "GaugeFunction":
        return cls(zeros((n,)), zeros((n, n)))


@dataclass(frozen=True)
class WeylJet:
    """A (metric, one-form, connection) jet claiming to realize ``model``.

    ``kind`` is ``"weyl"``, ``"riemann"`` (one-form zero) or ``"affine"``
    (only the connection is meaningful; ``metric`` is the flat background
    used to lower indices).
    """

    metric: MetricJet
    phi: OneFormJet
    conn: ConnectionJet
    model: CurvatureModel | None = None
    kind: str = "weyl"

    def __post_init__(self):
        n = self.metric.dim
        if self.phi.dim != n or self.conn.dim != n or (self.model and self.model.dim != n):
            raise DimensionError("jet components have different dimensions")
        if self.kind not in KINDS:
            raise ValueError(f"unknown jet kind {self.kind!r}")

    @property
    def dim(self) -> int:
        return self.metric.dim

    @classmethod
    def from_structure(cls, metric: MetricJet, phi: OneFormJet, model=None, kind="weyl"):
        """Build the jet whose connection is the Weyl connection of ``(g, phi)``."""
        conn = levi_civita_christoffels(metric) + weyl_alpha(phi, metric)
        return cls(metric, phi, conn, model, kind)


def _same(a, b) -> bool:
    return a.shape == b.shape and not max_abs(a - b)


# -- truncated polynomial arithmetic -----------------------------------------
# A polynomial is a list [p0, p1, ...]; p1 carries one leading derivative axis,
# p2 two. ``spec`` is an einsum over the value axes only.


def _poly_mul(p, q, spec, degree):
    lhs, out = spec.split("->")
    ps, qs = lhs.split(",")

    def term(x, xd, y, yd):
        return np.einsum(f"{xd}{ps},{yd}{qs}->{xd}{yd}{out}", x, y)

    r = [term(p[0], "", q[0], "")]
    if degree >= 1:
        r.append(term(p[1], "Y", q[0], "") + term(p[0], "", q[1], "Y"))
    if degree >= 2:
        cross = term(p[1], "Y", q[1], "Z")
        r.append(
            term(p[2], "YZ", q[0], "")
            + term(p[0], "", q[2], "YZ")
            + cross
            + np.swapaxes(cross, 0, 1)
        )
    return r


def _inverse_metric_poly(metric: MetricJet):
    inv = metric.h.inverse
    return [inv, -np.einsum("im,amn,nj->aij", inv, metric.linear, inv)]


def _christoffel_first_kind(dg):
    """``1/2 (d_i g_jl + d_j g_il - d_l g_ij)`` from ``dg[c, i, j] = d_c g_ij``."""
    return scale(dg + permute(dg, "jil") - permute(dg, "lij"), 1, 2)


def levi_civita_christoffels(m: MetricJet) -> ConnectionJet:
    """Levi-Civita connection of a metric jet, through degree 1.

    For a metric with vanishing first derivatives this is simply
    ``C[a,i,j,k] = 1/2 (Q[a,i,j,k] + Q[a,j,i,k] - Q[a,k,i,j])``.
    """
    first = [_christoffel_first_kind(m.linear), np.stack(
        [_christoffel_first_kind(m.quad[a]) for a in range(m.dim)])]
    upper = _poly_mul(_inverse_metric_poly(m), first, "ml,ijl->ijm", 1)
    lowered = [np.einsum("km,...ijm->...ijk", m.h.matrix, c) for c in upper]
    return ConnectionJet(lowered[1], lowered[0])


def weyl_alpha(phi: OneFormJet, m: MetricJet) -> ConnectionJet:
    """Weyl correction ``alpha_ijk = phi_i g_jk + phi_j g_ik - phi_k g_ij``.

    The last term is ``g_ij xi_k`` with ``xi`` the dual of ``phi``; raising
    and re-lowering uses the jet expansion of ``g^{-1}``, which reduces to
    ``h`` whenever the metric has no linear part.
    """
    if phi.dim != m.dim:
        raise DimensionError("one-form and metric have different dimensions")
    eps = m.h.matrix
    p = phi.poly()
    xi_up = _poly_mul(_inverse_metric_poly(m), p, "mk,k->m", 1)
    xi = [np.einsum("km,...m->...k", eps, c) for c in xi_up]
    g_xi = _poly_mul(m.poly()[:2], xi, "ij,k->ijk", 1)
    parts = []
    for deg in range(2):
        lead = "a" if deg else ""
        c = (
            np.einsum(f"{lead}i,jk->{lead}ijk", p[deg], eps)
            + np.einsum(f"{lead}j,ik->{lead}ijk", p[deg], eps)
            - g_xi[deg]
        )
        parts.append(c)
    return ConnectionJet(parts[1], parts[0])


def curvature_at_origin(c: ConnectionJet, h: InnerProduct) -> np.ndarray:
    """``R_ijkl(0) = d_i G_jkl - d_j G_ikl + h^{rs}(G_irl G_jks - G_jrl G_iks)``."""
    g0 = c.const
    quadratic = np.einsum("rs,irl,jks->ijkl", h.inverse, g0, g0)
    return c.linear - permute(c.linear, "jikl") + quadratic - permute(quadratic, "jikl")


def torsion_residual(c: ConnectionJet):
    return max(max_abs(c.linear - permute(c.linear, "ajik")), max_abs(c.const - permute(c.const, "jik")))


def dphi(phi: OneFormJet) -> np.ndarray:
    """``(d phi)(j,k) = 1/2 (d_j phi_k - d_k phi_j)``."""
    return alternate_pair(phi.linear)


def compatibility_polynomial(jet: WeylJet):
    """Coefficients (degree 0 and 1) of ``g_{jk;i} + 2 phi_i g_jk``."""
    m = jet.metric
    g = m.poly()
    dg = [m.linear, m.quad]
    upper = [np.einsum("mk,...ijk->...ijm", m.h.inverse, c) for c in (jet.conn.const, jet.conn.linear)]
    gamma_g = _poly_mul(upper, g, "ijm,mk->ijk", 1)
    phi_g = _poly_mul(jet.phi.poly(), g, "i,jk->ijk", 1)
    out = []
    for deg in range(2):
        t = gamma_g[deg]
        swapped = np.swapaxes(t, -1, -2)
        out.append(dg[deg] - t - swapped + 2 * phi_g[deg])
    return out


def compatibility_residual(jet: WeylJet):
    """Largest coefficient of ``nabla g + 2 phi (x) g`` through degree 1."""
    return max(max_abs(t) for t in compatibility_polynomial(jet))


# -- realization ---------------------------------------------------------------


def riemann_realize(A1: np.ndarray, h: InnerProduct, coefficient=RIEMANN_ANSATZ) -> MetricJet:
    """Metric jet whose Levi-Civita curvature at 0 is the algebraic tensor ``A1``."""
    require_class(A1, h, "A")
    quad = np.einsum("aibj->abij", A1) + np.einsum("biaj->abij", A1)
    return MetricJet(h, quad * coefficient)


def affine_realize(A: np.ndarray, h: InnerProduct, coefficient=AFFINE_ANSATZ) -> ConnectionJet:
    """Torsion-free connection jet with curvature ``A`` at 0, for ``A`` in ``R(V)``."""
    require_class(A, h, "R")
    return ConnectionJet((A + permute(A, "ikjl")) * coefficient)


def weyl_realize(model: CurvatureModel) -> WeylJet:
    """Weyl jet realizing a Weyl curvature model.

    The algebraic part of the Higa splitting is carried by the metric, the
    ``sigma(psi)`` part by the one-form ``phi_i = psi_li x^l``.
    """
    A1, psi = higa_decompose(model)
    metric = riemann_realize(A1, model.h)
    return WeylJet.from_structure(metric, OneFormJet(psi), model, "weyl")


def realize(model: CurvatureModel, target: str = "weyl") -> WeylJet:
    if target == "weyl":
        return weyl_realize(model)
    if target == "riemann":
        metric = riemann_realize(model.A, model.h)
        return WeylJet.from_structure(metric, OneFormJet.zero(model.dim, model.h.exact), model, "riemann")
    if target == "affine":
        conn = affine_realize(model.A, model.h)
        return WeylJet(MetricJet.flat(model.h), OneFormJet.zero(model.dim, model.h.exact), conn,
                       model, "affine")
    raise ValueError(f"unknown realization target {target!r}")


@dataclass(frozen=True)
class RealizationReport:
    curvature_at_origin: np.ndarray = field(repr=False)
    target: np.ndarray = field(repr=False)
    max_abs_difference: object
    metric_difference: object
    compatibility_max: object
    torsion_max: object
    dphi_check: object
    success: bool


def _vanishes(x, exact) -> bool:
    return x is None or (x == 0 if exact else x <= FLOAT_TOL)


def verify_realization(jet: WeylJet) -> RealizationReport:
    """Check a jet against its model; failures are reported, never raised.

    For ``"affine"`` jets only curvature and torsion are checked; the
    compatibility and ``d phi`` entries are ``None``.
    """
    if jet.model is None:
        raise ValueError("jet carries no model to verify against")
    h = jet.model.h
    R0 = curvature_at_origin(jet.conn, jet.metric.h)
    diff = max_abs(R0 - jet.model.A)
    metric_diff = max_abs(jet.metric.h.matrix - h.matrix)
    torsion = torsion_residual(jet.conn)
    if jet.kind == "affine":
        compat = dphi_check = None
    else:
        compat = compatibility_residual(jet)
        dphi_check = max_abs(dphi(jet.phi) + scale(alt_ricci(R0, h), 1, jet.dim))
    exact = h.exact
    success = all(_vanishes(x, exact) for x in (diff, metric_diff, torsion, compat, dphi_check))
    return RealizationReport(R0, jet.model.A, diff, metric_diff, compat, torsion, dphi_check, success)


# -- gauge transformations -----------------------------------------------------


def gauge_transform(jet: WeylJet, f: GaugeFunction) -> WeylJet:
    """Apply ``(g, phi) -> (e^{2f} g, phi - df)``; the connection is unchanged.

    ``e^{2f}`` is expanded as ``1 + 2f + 2f^2`` and only the degree <= 2 part
    is kept.
    """
    n = jet.dim
    if f.dim != n:
        raise DimensionError(f"gauge function has dimension {f.dim}, jet has {n}")
    a, H = f.linear, f.quad
    one = np.array(1, dtype=object if jet.metric.h.exact else float)
    factor = [one, 2 * a, 2 * H + 4 * np.einsum("a,b->ab", a, a)]
    g = _poly_mul(factor, jet.metric.poly(), ",ij->ij", 2)
    metric = MetricJet(jet.metric.h, g[2], g[1])
    phi = OneFormJet(jet.phi.linear - H, jet.phi.const - a)
    return WeylJet(metric, phi, jet.conn, jet.model, jet.kind)
