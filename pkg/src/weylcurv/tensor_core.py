"""Dense multilinear algebra over exact rationals.

Tensors are plain ``numpy`` arrays. In exact mode the dtype is ``object`` and
every entry is an ``int`` or a ``fractions.Fraction``; in float mode the dtype
is ``float64`` and zero tests use :data:`FLOAT_TOL`. Index order is C order,
so ``A[i, j, k, l]`` is the component on ``(e_i, e_j, e_k, e_l)`` with
0-based indices. User-facing text (reports, documents) is 1-based.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import numpy as np

from .errors import DegeneracyError, DimensionError, ShapeError

FLOAT_TOL = 1e-10
MAX_DIM = 16


def freeze(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


def is_exact(t: np.ndarray) -> bool:
    return t.dtype == object


def as_exact(values) -> np.ndarray:
    """Copy ``values`` into an object array of ints/Fractions.

    Floats are refused: an exact tensor must never silently pick up a
    rounded entry.
    """
    arr = np.array(values, dtype=object)
    out = np.empty(arr.shape, dtype=object)
    for idx, x in np.ndenumerate(arr):
        if isinstance(x, np.integer):
            x = int(x)
        elif isinstance(x, bool) or not isinstance(x, Rational):
            raise TypeError(f"entry {x!r} is not an exact rational")
        elif isinstance(x, Fraction) and x.denominator == 1:
            x = x.numerator
        out[idx] = x
    return out


def as_float(t: np.ndarray) -> np.ndarray:
    return np.asarray(t, dtype=float)


def zeros(shape, exact: bool = True) -> np.ndarray:
    if exact:
        out = np.empty(shape, dtype=object)
        out.fill(0)
        return out
    return np.zeros(shape)


def scale(t: np.ndarray, numerator: int, denominator: int = 1) -> np.ndarray:
    """Multiply by ``numerator/denominator`` without leaving exact mode."""
    if is_exact(t):
        if denominator == 1:
            return t * numerator
        return t * Fraction(numerator, denominator)
    return t * (numerator / denominator)


def max_abs(t: np.ndarray):
    if t.size == 0:
        return 0
    if is_exact(t):
        return max(abs(x) for x in t.flat)
    return float(np.max(np.abs(t)))


def is_zero(t: np.ndarray, tol: float | None = None) -> bool:
    """Exact zero test for object arrays, ``<= tol`` for float arrays."""
    if is_exact(t) and tol is None:
        return all(x == 0 for x in t.flat)
    return max_abs(t) <= (FLOAT_TOL if tol is None else tol)


def argmax_abs(t: np.ndarray) -> tuple[int, ...]:
    flat = [abs(x) for x in t.flat]
    return tuple(int(i) for i in np.unravel_index(flat.index(max(flat)), t.shape))


def permute(t: np.ndarray, source: str) -> np.ndarray:
    """Reorder slots: ``permute(A, "jkil")[i, j, k, l] == A[j, k, i, l]``."""
    target = "".join(sorted(source))
    return np.einsum(f"{source}->{target}", t)


def check_square(t: np.ndarray, rank: int, dim: int | None = None) -> int:
    if t.ndim != rank or len(set(t.shape)) != 1:
        raise ShapeError(f"expected a rank-{rank} tensor with equal extents, got shape {t.shape}")
    n = t.shape[0]
    if dim is not None and n != dim:
        raise DimensionError(f"tensor has dimension {n}, expected {dim}")
    return n


# -- integer kernels ----------------------------------------------------------
# Exact tensors are scaled by the lcm of their denominators. Linear residuals
# then run on int64 arrays when a caller-supplied bound rules out overflow,
# otherwise on object arrays of Python ints. Both paths are exact.

INT64_SAFE = 2**62
FAST_KERNELS = True


def integer_form(t: np.ndarray) -> tuple[np.ndarray, int, int]:
    """Return ``(ints, denominator, max_abs_int)`` with ``t == ints / denominator``."""
    d = 1
    for x in t.flat:
        if type(x) is not int:
            d = math.lcm(d, x.denominator)
    if d == 1:
        ints = t
    else:
        ints = np.empty(t.shape, dtype=object)
        for idx, x in np.ndenumerate(t):
            ints[idx] = int(x * d)
    bound = max((abs(x) for x in ints.flat), default=0)
    return ints, d, bound


def fast_ints(ints: np.ndarray, bound: int) -> np.ndarray:
    """Downcast an object array of ints to int64 when ``bound`` allows it."""
    if FAST_KERNELS and bound < INT64_SAFE:
        return ints.astype(np.int64)
    return ints


def from_integer_form(ints: np.ndarray, denominator: int) -> np.ndarray:
    """Inverse of :func:`integer_form`: exact entries ``ints / denominator``."""
    out = np.empty(ints.shape, dtype=object)
    for idx, x in np.ndenumerate(ints):
        q = Fraction(int(x), denominator)
        out[idx] = q.numerator if q.denominator == 1 else q
    return out


# -- exact elimination ------------------------------------------------------


def _integer_scaled(m: np.ndarray) -> tuple[list[list[int]], int]:
    """Return (B, d) with B integral and m == B / d."""
    d = 1
    for x in m.flat:
        d = math.lcm(d, Fraction(x).denominator)
    return [[int(Fraction(x) * d) for x in row] for row in m], d


def exact_inverse(m: np.ndarray) -> np.ndarray:
    """Inverse of a rational matrix by fraction-free Gauss-Jordan elimination.

    All intermediate entries are integer minors of the scaled input, so every
    division in the update rule is exact.
    """
    n = m.shape[0]
    b, d = _integer_scaled(m)
    rows = [row + [int(i == r) for i in range(n)] for r, row in enumerate(b)]
    prev = 1
    for k in range(n):
        pivot = next((r for r in range(k, n) if rows[r][k] != 0), None)
        if pivot is None:
            raise DegeneracyError("matrix is singular")
        rows[k], rows[pivot] = rows[pivot], rows[k]
        pk = rows[k]
        akk = pk[k]
        for i in range(n):
            if i == k:
                continue
            ri = rows[i]
            aik = ri[k]
            rows[i] = [(akk * ri[j] - aik * pk[j]) // prev for j in range(2 * n)]
        prev = akk
    det = rows[0][0]
    assert all(rows[i][i] == det for i in range(n))
    out = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            q = Fraction(rows[i][n + j] * d, det)
            out[i, j] = q.numerator if q.denominator == 1 else q
    return out


def exact_signature(m: np.ndarray) -> tuple[int, int, int]:
    """(positive, negative, zero) counts via congruence diagonalisation."""
    n = m.shape[0]
    a = [[Fraction(x) for x in row] for row in m]
    pos = neg = 0
    for k in range(n):
        if a[k][k] == 0:
            r = next((r for r in range(k + 1, n) if a[r][r] != 0), None)
            if r is not None:
                a[k], a[r] = a[r], a[k]
                for row in a:
                    row[k], row[r] = row[r], row[k]
            else:
                r = next((r for r in range(k + 1, n) if a[k][r] != 0), None)
                if r is None:
                    continue
                # e_k -> e_k + e_r turns the zero pivot into 2 a[k][r]
                for c in range(n):
                    a[k][c] += a[r][c]
                for row in a:
                    row[k] += row[r]
        p = a[k][k]
        for i in range(k + 1, n):
            f = a[i][k] / p
            if f:
                for c in range(k, n):
                    a[i][c] -= f * a[k][c]
                for row in a:
                    row[i] -= f * row[k]
        if p > 0:
            pos += 1
        else:
            neg += 1
    return pos, neg, n - pos - neg


@dataclass(frozen=True)
class InnerProduct:
    """Nondegenerate symmetric bilinear form ``h`` on ``V = R^n``.

    ``matrix[i, j]`` is ``h(e_i, e_j)`` and ``inverse`` its matrix inverse,
    used for every contraction.
    """

    matrix: np.ndarray
    inverse: np.ndarray
    signature: tuple[int, int]

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def exact(self) -> bool:
        return is_exact(self.matrix)

    @classmethod
    def from_signature(cls, p: int, q: int) -> "InnerProduct":
        if p < 0 or q < 0 or p + q < 2:
            raise DimensionError(f"signature ({p}, {q}) needs p, q >= 0 and p + q >= 2")
        if p + q > MAX_DIM:
            raise DimensionError(f"dimension {p + q} exceeds the cap of {MAX_DIM}")
        m = zeros((p + q, p + q))
        for i in range(p + q):
            m[i, i] = 1 if i < p else -1
        return cls(freeze(m), freeze(m.copy()), (p, q))

    @classmethod
    def from_matrix(cls, m) -> "InnerProduct":
        arr = np.asarray(m)
        exact = arr.dtype == object or np.issubdtype(arr.dtype, np.integer)
        arr = as_exact(arr) if exact else as_float(arr)
        n = check_square(arr, 2)
        if n < 2 or n > MAX_DIM:
            raise DimensionError(f"dimension {n} outside [2, {MAX_DIM}]")
        if not is_zero(arr - arr.T):
            raise ShapeError("inner product matrix is not symmetric")
        if exact:
            inv = exact_inverse(arr)
            p, q, _ = exact_signature(arr)
        else:
            eig = np.linalg.eigvalsh(arr)
            if np.min(np.abs(eig)) <= FLOAT_TOL:
                raise DegeneracyError("matrix is singular")
            inv = np.linalg.inv(arr)
            p, q = int(np.sum(eig > 0)), int(np.sum(eig < 0))
        return cls(freeze(arr), freeze(inv), (p, q))

    def to_float(self) -> "InnerProduct":
        return InnerProduct(freeze(as_float(self.matrix)), freeze(as_float(self.inverse)),
                            self.signature)


def contract(t: np.ndarray, h: InnerProduct, slot_a: int, slot_b: int) -> np.ndarray:
    """Contract two slots (1-based) of a rank-4 tensor against ``h^{-1}``.

    The surviving slots keep their relative order.
    """
    check_square(t, 4, h.dim)
    if slot_a == slot_b or not {slot_a, slot_b} <= {1, 2, 3, 4}:
        raise ValueError(f"invalid slot pair ({slot_a}, {slot_b})")
    letters = ["a", "b", "c", "d"]
    letters[slot_a - 1] = "p"
    letters[slot_b - 1] = "q"
    rest = "".join(x for x in letters if x not in "pq")
    return np.einsum(f"pq,{''.join(letters)}->{rest}", h.inverse, t)


def alternate_pair(t: np.ndarray) -> np.ndarray:
    """``(t - t^T) / 2``; the one alternation convention used everywhere."""
    check_square(t, 2)
    return scale(t - t.T, 1, 2)


def symmetrize_pair(t: np.ndarray) -> np.ndarray:
    check_square(t, 2)
    return scale(t + t.T, 1, 2)


def check_two_form(psi: np.ndarray, dim: int | None = None) -> int:
    n = check_square(psi, 2, dim)
    if not is_zero(psi + psi.T):
        raise ShapeError("two-form is not antisymmetric")
    return n
