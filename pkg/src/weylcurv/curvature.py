"""Curvature symmetry classes, Ricci contractions and the Higa splitting.

Residuals are keyed by short labels that also appear in report documents:

=====  ===============================================================
label  identity
=====  ===============================================================
1.b    ``A(x,y,z,w) + A(y,x,z,w) = 0``
1.c    ``A(x,y,z,w) + A(y,z,x,w) + A(z,x,y,w) = 0``
1.d    ``A(x,y,z,w) + A(x,y,w,z) = (2/n) (Ric(y,x) - Ric(x,y)) h(z,w)``
1.e    ``A(x,y,z,w) + A(x,y,w,z) = 0``
1.f    ``A(x,y,z,w) = A(z,w,x,y)``
=====  ===============================================================

``R(V)`` (generalized curvature tensors) is cut out by 1.b and 1.c, ``W(V)``
(Weyl curvature tensors) adds 1.d and ``A(V)`` (algebraic curvature tensors)
adds 1.e, which forces 1.f.

Every ``W(V)`` tensor splits uniquely as ``A1 + sigma(psi)`` with ``A1``
algebraic and ``psi = -(1/n) alt_ricci(A)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import NamedTuple

import numpy as np

from .errors import ClassError, DimensionError
from .tensor_core import (
    InnerProduct,
    alternate_pair,
    as_exact,
    argmax_abs,
    check_square,
    check_two_form,
    contract,
    fast_ints,
    freeze,
    from_integer_form,
    integer_form,
    is_exact,
    is_zero,
    max_abs,
    permute,
    scale,
    symmetrize_pair,
)

EQUATIONS = ("1.b", "1.c", "1.d", "1.e", "1.f")
CLASSES = ("R", "W", "A")


# -- symmetry residuals -------------------------------------------------------


def residual_antisym12(A: np.ndarray) -> np.ndarray:
    """``A(i,j,k,l) + A(j,i,k,l)``."""
    return A + permute(A, "jikl")


def residual_bianchi(A: np.ndarray) -> np.ndarray:
    """Cyclic sum over the first three slots."""
    return A + permute(A, "jkil") + permute(A, "kijl")


def residual_pair_antisym34(A: np.ndarray) -> np.ndarray:
    """``A(i,j,k,l) + A(i,j,l,k)``, twice :func:`symmetrize_last`."""
    return A + permute(A, "ijlk")


def residual_interchange(A: np.ndarray) -> np.ndarray:
    """``A(i,j,k,l) - A(k,l,i,j)``."""
    return A - permute(A, "klij")


def residual_weyl(A: np.ndarray, h: InnerProduct) -> np.ndarray:
    n = check_square(A, 4, h.dim)
    rho = ricci(A, h)
    rhs = np.einsum("ij,kl->ijkl", rho.T - rho, h.matrix)
    return residual_pair_antisym34(A) - scale(rhs, 2, n)


def symmetrize_last(A: np.ndarray) -> np.ndarray:
    return scale(residual_pair_antisym34(A), 1, 2)


def conjugate(A: np.ndarray) -> np.ndarray:
    """``A*(i,j,k,l) = -A(i,j,l,k)``."""
    return -permute(A, "ijlk")


# -- contractions -------------------------------------------------------------


def ricci(A: np.ndarray, h: InnerProduct) -> np.ndarray:
    """``rho(j,k) = h^{il} A(i,j,k,l)``."""
    return contract(A, h, 1, 4)


def ricci_star(A: np.ndarray, h: InnerProduct) -> np.ndarray:
    """``rho*(j,k) = h^{il} A(j,i,l,k)``.

    For orthonormal ``h`` this is the basis sum ``sum_i A(x, e_i, e_i, y)``
    weighted by ``h^{ii}``, which keeps it basis independent in indefinite
    signature.
    """
    return contract(A, h, 2, 3)


def alt_ricci(A: np.ndarray, h: InnerProduct) -> np.ndarray:
    return alternate_pair(ricci(A, h))


def sym_ricci(A: np.ndarray, h: InnerProduct) -> np.ndarray:
    return symmetrize_pair(ricci(A, h))


def sigma(psi: np.ndarray, h: InnerProduct) -> np.ndarray:
    """Embed a two-form into ``W(V)``::

        2 psi(x,y) h(z,w) + psi(x,z) h(y,w) - psi(y,z) h(x,w)
          - psi(x,w) h(y,z) + psi(y,w) h(x,z)
    """
    check_two_form(psi, h.dim)
    exact = is_exact(psi) and h.exact
    if exact:
        psi, dp, p_max = integer_form(psi)
        g, dg, g_max = integer_form(h.matrix)
        psi, g = (fast_ints(x, 6 * p_max * g_max) for x in (psi, g))
    else:
        g = h.matrix
    out = (
        2 * np.einsum("ij,kl->ijkl", psi, g)
        + np.einsum("ik,jl->ijkl", psi, g)
        - np.einsum("jk,il->ijkl", psi, g)
        - np.einsum("il,jk->ijkl", psi, g)
        + np.einsum("jl,ik->ijkl", psi, g)
    )
    return from_integer_form(out, dp * dg) if exact else out


def conjugate_bianchi_residual_closed_form(psi: np.ndarray, h: InnerProduct) -> np.ndarray:
    """Bianchi residual of ``conjugate(sigma(psi))`` in closed form::

        -4 [psi(x,y) h(w,z) + psi(y,z) h(w,x) + psi(z,x) h(w,y)]
    """
    check_two_form(psi, h.dim)
    g = h.matrix
    total = (
        np.einsum("ij,lk->ijkl", psi, g)
        + np.einsum("jk,li->ijkl", psi, g)
        + np.einsum("ki,lj->ijkl", psi, g)
    )
    return -4 * total


# -- classification -----------------------------------------------------------


class Membership(NamedTuple):
    in_R: bool
    in_W: bool
    in_A: bool

    @property
    def finest(self) -> str | None:
        if self.in_A:
            return "A"
        if self.in_W:
            return "W"
        if self.in_R:
            return "R"
        return None


@dataclass(frozen=True)
class SymmetryReport:
    """Largest absolute entry of each residual, keyed by equation label."""

    residuals: dict
    membership: Membership
    violated: str | None
    violated_at: tuple[int, ...] | None = None

    @property
    def in_R(self) -> bool:
        return self.membership.in_R

    @property
    def in_W(self) -> bool:
        return self.membership.in_W

    @property
    def in_A(self) -> bool:
        return self.membership.in_A


def _exact_residual_tensors(A: np.ndarray, h: InnerProduct):
    """Integer-scaled residuals: ``{label: (ints, denominator)}``.

    Same formulas as the public residual functions, evaluated on ``D * A``
    so the inner loops never touch ``Fraction``.
    """
    n = h.dim
    Ai, d, a_max = integer_form(A)
    Hm, dm, hm_max = integer_form(h.matrix)
    Hi, di, hi_max = integer_form(h.inverse)
    bound = 4 * n * n * hi_max * a_max * hm_max + 2 * n * di * dm * a_max + 3 * a_max
    Ai, Hm, Hi = (fast_ints(x, bound) for x in (Ai, Hm, Hi))
    pair = residual_pair_antisym34(Ai)
    rho = np.einsum("il,ijkl->jk", Hi, Ai)
    weyl = n * di * dm * pair - 2 * np.einsum("ij,kl->ijkl", rho.T - rho, Hm)
    return {
        "1.b": (residual_antisym12(Ai), d),
        "1.c": (residual_bianchi(Ai), d),
        "1.d": (weyl, n * di * dm * d),
        "1.e": (pair, d),
        "1.f": (residual_interchange(Ai), d),
    }


def symmetry_report(A: np.ndarray, h: InnerProduct, tol: float | None = None) -> SymmetryReport:
    """Evaluate every residual label on ``A``.

    In exact mode membership means exact vanishing; float arrays are compared
    against ``tol`` (default ``FLOAT_TOL``).
    """
    check_square(A, 4, h.dim)
    if is_exact(A) and h.exact and tol is None:
        scaled = _exact_residual_tensors(A, h)
        tensors = {k: t for k, (t, _) in scaled.items()}
        maxima = {k: Fraction(int(np.max(np.abs(t))), den) for k, (t, den) in scaled.items()}
        zero = {k: m == 0 for k, m in maxima.items()}
    else:
        tensors = {
            "1.b": residual_antisym12(A),
            "1.c": residual_bianchi(A),
            "1.d": residual_weyl(A, h),
            "1.e": residual_pair_antisym34(A),
            "1.f": residual_interchange(A),
        }
        maxima = {k: max_abs(t) for k, t in tensors.items()}
        zero = {k: is_zero(t, tol) for k, t in tensors.items()}
    in_R = zero["1.b"] and zero["1.c"]
    membership = Membership(in_R, in_R and zero["1.d"], in_R and zero["1.e"])
    violated = next((label for label in EQUATIONS[:4] if not zero[label]), None)
    at = argmax_abs(tensors[violated]) if violated else None
    return SymmetryReport(
        residuals=maxima,
        membership=membership,
        violated=violated,
        violated_at=tuple(i + 1 for i in at) if at else None,
    )


def classify(A: np.ndarray, h: InnerProduct, tol: float | None = None) -> Membership:
    return symmetry_report(A, h, tol).membership


def require_class(A: np.ndarray, h: InnerProduct, cls: str) -> SymmetryReport:
    """Raise :class:`ClassError` naming the first violated identity."""
    report = symmetry_report(A, h)
    needed = {"R": ("1.b", "1.c"), "W": ("1.b", "1.c", "1.d"), "A": ("1.b", "1.c", "1.e")}[cls]
    ok = {"R": report.in_R, "W": report.in_W, "A": report.in_A}[cls]
    if not ok:
        eq = next(label for label in needed if report.residuals[label] != 0)
        raise ClassError(f"tensor is not in class {cls}: identity {eq} fails", eq)
    return report


@dataclass(frozen=True)
class CurvatureModel:
    """A curvature model ``(V, h, A)``."""

    h: InnerProduct
    A: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.A.ndim != 4 or self.A.shape != (self.h.dim,) * 4:
            raise DimensionError(f"A has shape {self.A.shape}, metric has dimension {self.h.dim}")
        if self.A.flags.writeable:
            object.__setattr__(self, "A", freeze(self.A.copy()))

    @property
    def dim(self) -> int:
        return self.h.dim

    @cached_property
    def report(self) -> SymmetryReport:
        return symmetry_report(self.A, self.h)

    @property
    def membership(self) -> Membership:
        return self.report.membership


def higa_decompose(model: CurvatureModel) -> tuple[np.ndarray, np.ndarray]:
    """Split a Weyl curvature tensor as ``A = A1 + sigma(psi)``.

    Returns ``(A1, psi)`` with ``A1`` algebraic and ``psi = -(1/n) alt_ricci(A)``.
    """
    require_class(model.A, model.h, "W")
    psi = scale(alt_ricci(model.A, model.h), -1, model.dim)
    return model.A - sigma(psi, model.h), psi


def is_einstein_weyl(model: CurvatureModel):
    """Return ``(True, c)`` if ``sym_ricci(A) == c h``, else ``(False, None)``."""
    s = sym_ricci(model.A, model.h)
    trace = np.einsum("ij,ij->", model.h.inverse, s)
    c = Fraction(trace) / model.dim if is_exact(s) else float(trace) / model.dim
    if is_zero(s - c * model.h.matrix):
        return True, c
    return False, None


# -- generators ---------------------------------------------------------------


def _bianchi_project(T: np.ndarray) -> np.ndarray:
    return T - scale(residual_bianchi(T), 1, 3)


def random_two_form(n: int, seed) -> np.ndarray:
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    raw = rng.integers(-4, 5, size=(n, n))
    return as_exact(np.triu(raw, 1) - np.triu(raw, 1).T)


def random_in_class(cls: str, n: int, h: InnerProduct, seed: int) -> np.ndarray:
    """Deterministic random element of ``R``, ``W``, ``A`` or a two-form.

    Raw integer entries in ``[-4, 4]`` are pushed into the class by
    (anti)symmetrization and the Bianchi projector
    ``B(T) = T - (1/3) cyclic(T)``; the result is re-checked with
    :func:`classify` before it is returned.
    """
    if n != h.dim:
        raise DimensionError(f"n = {n} does not match metric dimension {h.dim}")
    rng = np.random.default_rng(seed)
    if cls == "two_form":
        return random_two_form(n, rng)
    if cls not in CLASSES:
        raise ValueError(f"unknown class {cls!r}")
    T = as_exact(rng.integers(-4, 5, size=(n,) * 4))
    T = T - permute(T, "jikl")
    if cls in ("A", "W"):
        T = T - permute(T, "ijlk")
        T = T + permute(T, "klij")
    T = _bianchi_project(T)
    if cls == "W":
        T = T + sigma(random_two_form(n, rng), h)
    got = classify(T, h)
    if not {"R": got.in_R, "W": got.in_W, "A": got.in_A}[cls]:
        raise AssertionError(f"generator produced a tensor outside class {cls}")
    return T
