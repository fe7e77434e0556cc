"""Bivariate truncated Taylor (jet) arithmetic in two parameters (u, v).

A jet of order K stores coefficients c[i, j] of (u-u0)^i (v-v0)^j for
i + j <= K, i.e. the (i,j) partial derivative divided by i! j!.  Coefficient
arrays carry the two jet axes last; any leading axes are batch axes, so a
whole evaluation grid is one jet.  All arithmetic is exact truncated Taylor
calculus (no stepping, no rounding beyond float64), which is what keeps the
downstream geometric residuals at the 1e-10 level.

Binary operations truncate to the smaller order of the operands; derivatives
lower the order by one.
"""

from __future__ import annotations

import math

import numpy as np

# The envelope-mode connection pipeline consumes five derivative orders of
# the lift (second envelope is third-order data, differentiated twice more).
MAX_ORDER = 5


class JetDomainError(ValueError):
    """Elementary function evaluated outside its domain at the base point."""


def _triangle_mask(order: int) -> np.ndarray:
    i, j = np.indices((order + 1, order + 1))
    return (i + j) <= order


_MASKS = {k: _triangle_mask(k) for k in range(MAX_ORDER + 1)}


def jtruncate(coeffs: np.ndarray, order: int) -> np.ndarray:
    """Truncate raw coefficients to the given order (copies)."""
    out = coeffs[..., : order + 1, : order + 1].copy()
    out[..., ~_MASKS[order]] = 0.0
    return out


def jmul(a: np.ndarray, b: np.ndarray, order: int) -> np.ndarray:
    """Truncated product of raw coefficient arrays (broadcasts leading axes)."""
    k = order + 1
    shape = np.broadcast_shapes(a.shape[:-2], b.shape[:-2]) + (k, k)
    out = np.zeros(shape, dtype=np.result_type(a.dtype, b.dtype))
    for i in range(k):
        for j in range(k - i):
            blk = a[..., i : i + 1, j : j + 1]
            if not np.any(blk):
                continue
            out[..., i:, j:] += blk * b[..., : k - i, : k - j]
    out[..., ~_MASKS[order]] = 0.0
    return out


def jdu(a: np.ndarray) -> np.ndarray:
    """Raw coefficients of the u-derivative (order drops by one)."""
    k = a.shape[-1] - 1
    i = np.arange(1, k + 1)
    return a[..., 1:, :k] * i[:, None]


def jdv(a: np.ndarray) -> np.ndarray:
    k = a.shape[-1] - 1
    j = np.arange(1, k + 1)
    return a[..., :k, 1:] * j[None, :]


def _compose_series(dcoeffs: list, h: np.ndarray, order: int) -> np.ndarray:
    """sum_k dcoeffs[k] * h^k truncated, where h has zero constant term.

    dcoeffs[k] are arrays broadcastable against the batch (the k-th Taylor
    coefficient of the outer function at the base value).
    """
    k1 = order + 1
    out = np.zeros(np.broadcast_shapes(np.shape(dcoeffs[0]), h.shape[:-2]) + (k1, k1),
                   dtype=np.result_type(h.dtype, np.asarray(dcoeffs[0]).dtype))
    out[..., 0, 0] = dcoeffs[0]
    hpow = None
    for k in range(1, order + 1):
        hpow = h if k == 1 else jmul(hpow, h, order)
        out += np.asarray(dcoeffs[k])[..., None, None] * hpow
    return out


def jrecip(b: np.ndarray, order: int) -> np.ndarray:
    """Raw coefficients of 1/b.  Requires nonzero constant term."""
    b0 = b[..., 0, 0]
    t = b.copy()
    t[..., 0, 0] = 0.0
    t = t / b0[..., None, None]
    dcoeffs = [(-1.0) ** k / b0 for k in range(order + 1)]
    return _compose_series(dcoeffs, t, order)


# Derivative tables for elementary functions: given the base value x0,
# return [f(x0), f'(x0)/1!, f''(x0)/2!, ...] up to the requested order.

def _cyclic_table(f0, f1, f2, f3):
    def table(x0, order):
        vals = [f0(x0), f1(x0), f2(x0), f3(x0)]
        return [vals[k % 4] / math.factorial(k) for k in range(order + 1)]

    return table


_ELEMENTARY = {
    "sin": _cyclic_table(np.sin, np.cos, lambda x: -np.sin(x), lambda x: -np.cos(x)),
    "cos": _cyclic_table(np.cos, lambda x: -np.sin(x), lambda x: -np.cos(x), np.sin),
    "sinh": lambda x0, order: [
        (np.sinh(x0) if k % 2 == 0 else np.cosh(x0)) / math.factorial(k)
        for k in range(order + 1)
    ],
    "cosh": lambda x0, order: [
        (np.cosh(x0) if k % 2 == 0 else np.sinh(x0)) / math.factorial(k)
        for k in range(order + 1)
    ],
    "exp": lambda x0, order: [np.exp(x0) / math.factorial(k) for k in range(order + 1)],
}


def _log_table(x0, order):
    out = [np.log(x0)]
    for k in range(1, order + 1):
        out.append((-1.0) ** (k - 1) / (k * x0**k))
    return out


def _pow_table(x0, r, order):
    out = []
    coeff = 1.0
    for k in range(order + 1):
        out.append(coeff * x0 ** (r - k))
        coeff *= (r - k) / (k + 1)
    return out


class Jet:
    """Scalar-valued bivariate jet (possibly a batch of them)."""

    __slots__ = ("coeffs", "order", "base")

    def __init__(self, coeffs: np.ndarray, base=(0.0, 0.0), *, copy: bool = False):
        coeffs = np.array(coeffs, copy=copy) if copy else np.asarray(coeffs)
        order = coeffs.shape[-1] - 1
        if coeffs.shape[-2] != coeffs.shape[-1] or order > MAX_ORDER:
            raise ValueError(f"bad coefficient shape {coeffs.shape}")
        self.coeffs = coeffs
        self.order = order
        self.base = base

    # constructors -------------------------------------------------------
    @classmethod
    def constant(cls, value, order: int, base=(0.0, 0.0), batch=()) -> "Jet":
        value = np.asarray(value)
        c = np.zeros(batch + value.shape + (order + 1, order + 1), dtype=np.result_type(value, float))
        c[..., 0, 0] = value
        return cls(c, base)

    @classmethod
    def variable_u(cls, order: int, base=(0.0, 0.0)) -> "Jet":
        u0 = np.asarray(base[0], dtype=float)
        c = np.zeros(u0.shape + (order + 1, order + 1))
        c[..., 0, 0] = u0
        if order >= 1:
            c[..., 1, 0] = 1.0
        return cls(c, base)

    @classmethod
    def variable_v(cls, order: int, base=(0.0, 0.0)) -> "Jet":
        v0 = np.asarray(base[1], dtype=float)
        c = np.zeros(v0.shape + (order + 1, order + 1))
        c[..., 0, 0] = v0
        if order >= 1:
            c[..., 0, 1] = 1.0
        return cls(c, base)

    # basic access --------------------------------------------------------
    def value(self):
        return self.coeffs[..., 0, 0]

    def partial(self, i: int, j: int):
        """The true partial derivative value: i! j! c[i, j]."""
        if i + j > self.order:
            raise ValueError(f"partial ({i},{j}) exceeds jet order {self.order}")
        return self.coeffs[..., i, j] * (math.factorial(i) * math.factorial(j))

    def truncate(self, order: int) -> "Jet":
        if order > self.order:
            raise ValueError("cannot truncate upward")
        return Jet(jtruncate(self.coeffs, order), self.base)

    def du(self) -> "Jet":
        return Jet(jdu(self.coeffs), self.base)

    def dv(self) -> "Jet":
        return Jet(jdv(self.coeffs), self.base)

    def conj(self) -> "Jet":
        return Jet(np.conj(self.coeffs), self.base)

    @property
    def real(self) -> "Jet":
        return Jet(np.real(self.coeffs), self.base)

    @property
    def imag(self) -> "Jet":
        return Jet(np.imag(self.coeffs), self.base)

    # arithmetic ----------------------------------------------------------
    def _coerce(self, other, order):
        if isinstance(other, Jet):
            return jtruncate(other.coeffs, order) if other.order != order else other.coeffs
        c = np.zeros(np.shape(other) + (order + 1, order + 1),
                     dtype=np.result_type(np.asarray(other).dtype, float))
        c[..., 0, 0] = other
        return c

    def _pair(self, other):
        if isinstance(other, Jet):
            order = min(self.order, other.order)
            a = jtruncate(self.coeffs, order) if self.order != order else self.coeffs
            return a, self._coerce(other, order), order
        return self.coeffs, self._coerce(other, self.order), self.order

    def __add__(self, other):
        a, b, order = self._pair(other)
        return Jet(a + b, self.base)

    __radd__ = __add__

    def __sub__(self, other):
        a, b, order = self._pair(other)
        return Jet(a - b, self.base)

    def __rsub__(self, other):
        a, b, order = self._pair(other)
        return Jet(b - a, self.base)

    def __neg__(self):
        return Jet(-self.coeffs, self.base)

    def __mul__(self, other):
        if isinstance(other, Jet):
            order = min(self.order, other.order)
            return Jet(jmul(self.coeffs, other.coeffs, order), self.base)
        return Jet(self.coeffs * np.asarray(other)[..., None, None], self.base)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            order = min(self.order, other.order)
            b0 = np.asarray(other.coeffs[..., 0, 0])
            if np.any(np.abs(b0) < 1e-300):
                raise ZeroDivisionError("division by jet with vanishing constant term")
            inv = jrecip(jtruncate(other.coeffs, order), order)
            return Jet(jmul(jtruncate(self.coeffs, order), inv, order), self.base)
        return Jet(self.coeffs / np.asarray(other)[..., None, None], self.base)

    def __rtruediv__(self, other):
        b0 = np.asarray(self.coeffs[..., 0, 0])
        if np.any(np.abs(b0) < 1e-300):
            raise ZeroDivisionError("division by jet with vanishing constant term")
        inv = Jet(jrecip(self.coeffs, self.order), self.base)
        return inv * other


def jet_arith(a: Jet, b: Jet, op: str) -> Jet:
    """Dispatch form of the four arithmetic operations."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown op {op!r}")


def jet_elementary(a: Jet, fn: str, exponent: float | None = None) -> Jet:
    """Compose an elementary function with a jet via its Taylor series.

    fn is one of sin, cos, sinh, cosh, exp, log, sqrt, pow_const; pow_const
    takes the real constant ``exponent``.
    """
    x0 = np.asarray(a.coeffs[..., 0, 0])
    if np.iscomplexobj(x0) and fn in ("log", "sqrt", "pow_const"):
        raise JetDomainError(f"{fn} of a complex jet is not supported")
    if fn == "log":
        if np.any(x0 <= 0):
            raise JetDomainError("log requires a positive constant term")
        table = _log_table(x0, a.order)
    elif fn == "sqrt":
        if np.any(x0 <= 0):
            raise JetDomainError("sqrt requires a positive constant term")
        table = _pow_table(x0, 0.5, a.order)
    elif fn == "pow_const":
        if exponent is None:
            raise ValueError("pow_const needs an exponent")
        if exponent != int(exponent) and np.any(x0 <= 0):
            raise JetDomainError("fractional power requires a positive constant term")
        if exponent < 0 and np.any(np.abs(x0) < 1e-300):
            raise JetDomainError("negative power of a jet with zero constant term")
        table = _pow_table(x0, float(exponent), a.order)
    elif fn in _ELEMENTARY:
        table = _ELEMENTARY[fn](x0, a.order)
    else:
        raise ValueError(f"unknown elementary function {fn!r}")
    h = a.coeffs.copy()
    h[..., 0, 0] = 0.0
    return Jet(_compose_series(table, h, a.order), a.base)


class VecJet:
    """Vector of jets sharing order and base point; components on axis -3."""

    __slots__ = ("coeffs", "order", "base")

    def __init__(self, coeffs: np.ndarray, base=(0.0, 0.0)):
        coeffs = np.asarray(coeffs)
        if coeffs.ndim < 3 or coeffs.shape[-2] != coeffs.shape[-1]:
            raise ValueError(f"bad VecJet shape {coeffs.shape}")
        self.coeffs = coeffs
        self.order = coeffs.shape[-1] - 1
        self.base = base

    @classmethod
    def from_jets(cls, jets: list[Jet]) -> "VecJet":
        order = min(j.order for j in jets)
        stacked = np.stack([jtruncate(j.coeffs, order) for j in jets], axis=-3)
        return cls(stacked, jets[0].base)

    @classmethod
    def constant(cls, vec, order: int, base=(0.0, 0.0), batch=()) -> "VecJet":
        vec = np.asarray(vec)
        c = np.zeros(batch + vec.shape + (order + 1, order + 1),
                     dtype=np.result_type(vec, float))
        c[..., 0, 0] = vec
        return cls(c, base)

    @property
    def dim(self) -> int:
        return self.coeffs.shape[-3]

    def component(self, i: int) -> Jet:
        return Jet(self.coeffs[..., i, :, :], self.base)

    def value(self):
        return self.coeffs[..., 0, 0]

    def partial(self, i: int, j: int):
        if i + j > self.order:
            raise ValueError(f"partial ({i},{j}) exceeds jet order {self.order}")
        return self.coeffs[..., i, j] * (math.factorial(i) * math.factorial(j))

    def truncate(self, order: int) -> "VecJet":
        return VecJet(jtruncate(self.coeffs, order), self.base)

    def du(self) -> "VecJet":
        return VecJet(jdu(self.coeffs), self.base)

    def dv(self) -> "VecJet":
        return VecJet(jdv(self.coeffs), self.base)

    def conj(self) -> "VecJet":
        return VecJet(np.conj(self.coeffs), self.base)

    @property
    def real(self) -> "VecJet":
        return VecJet(np.real(self.coeffs), self.base)

    def inner(self, other: "VecJet", metric_diag: np.ndarray) -> Jet:
        """Bilinear ambient pairing; returns a scalar jet."""
        order = min(self.order, other.order)
        a = jtruncate(self.coeffs, order)
        b = jtruncate(other.coeffs, order)
        prod = jmul(a, b, order)
        g = np.asarray(metric_diag)[:, None, None]
        return Jet((prod * g).sum(axis=-3), self.base)

    def smul(self, s: Jet | float) -> "VecJet":
        """Scale by a scalar jet (or plain number)."""
        if isinstance(s, Jet):
            order = min(self.order, s.order)
            return VecJet(
                jmul(jtruncate(self.coeffs, order), jtruncate(s.coeffs, order)[..., None, :, :], order),
                self.base,
            )
        return VecJet(self.coeffs * np.asarray(s)[..., None, None, None], self.base)

    def __add__(self, other: "VecJet") -> "VecJet":
        order = min(self.order, other.order)
        return VecJet(jtruncate(self.coeffs, order) + jtruncate(other.coeffs, order), self.base)

    def __sub__(self, other: "VecJet") -> "VecJet":
        order = min(self.order, other.order)
        return VecJet(jtruncate(self.coeffs, order) - jtruncate(other.coeffs, order), self.base)

    def __neg__(self) -> "VecJet":
        return VecJet(-self.coeffs, self.base)

    def directional(self, cu, cv) -> "VecJet":
        """cu * d/du + cv * d/dv applied once (constant coefficients)."""
        return VecJet(cu * jdu(self.coeffs) + cv * jdv(self.coeffs), self.base)

    def matvec(self, mat: np.ndarray) -> "VecJet":
        """Apply a constant matrix to the vector of jets."""
        return VecJet(np.einsum("ij,...jkl->...ikl", mat, self.coeffs), self.base)


class MatJet:
    """Matrix of jets (endomorphism-valued field); matrix axes -4, -3."""

    __slots__ = ("coeffs", "order", "base")

    def __init__(self, coeffs: np.ndarray, base=(0.0, 0.0)):
        coeffs = np.asarray(coeffs)
        self.coeffs = coeffs
        self.order = coeffs.shape[-1] - 1
        self.base = base

    @classmethod
    def outer(cls, a: VecJet, b: VecJet) -> "MatJet":
        """Outer product a b^T of vector jets."""
        order = min(a.order, b.order)
        ac = jtruncate(a.coeffs, order)[..., :, None, :, :]
        bc = jtruncate(b.coeffs, order)[..., None, :, :, :]
        return cls(jmul(ac, bc, order), a.base)

    @classmethod
    def constant(cls, mat: np.ndarray, order: int, base=(0.0, 0.0)) -> "MatJet":
        mat = np.asarray(mat)
        c = np.zeros(mat.shape + (order + 1, order + 1), dtype=np.result_type(mat, float))
        c[..., 0, 0] = mat
        return cls(c, base)

    def value(self):
        return self.coeffs[..., 0, 0]

    def truncate(self, order: int) -> "MatJet":
        return MatJet(jtruncate(self.coeffs, order), self.base)

    def du(self) -> "MatJet":
        return MatJet(jdu(self.coeffs), self.base)

    def dv(self) -> "MatJet":
        return MatJet(jdv(self.coeffs), self.base)

    def directional(self, cu, cv) -> "MatJet":
        return MatJet(cu * jdu(self.coeffs) + cv * jdv(self.coeffs), self.base)

    def __add__(self, other):
        order = min(self.order, other.order)
        return MatJet(jtruncate(self.coeffs, order) + jtruncate(other.coeffs, order), self.base)

    def __sub__(self, other):
        order = min(self.order, other.order)
        return MatJet(jtruncate(self.coeffs, order) - jtruncate(other.coeffs, order), self.base)

    def __neg__(self):
        return MatJet(-self.coeffs, self.base)

    def scale(self, s) -> "MatJet":
        if isinstance(s, Jet):
            order = min(self.order, s.order)
            return MatJet(
                jmul(jtruncate(self.coeffs, order),
                     jtruncate(s.coeffs, order)[..., None, None, :, :], order),
                self.base,
            )
        return MatJet(self.coeffs * s, self.base)

    def matmul(self, other: "MatJet") -> "MatJet":
        order = min(self.order, other.order)
        k = order + 1
        a = jtruncate(self.coeffs, order)
        b = jtruncate(other.coeffs, order)
        shape = np.broadcast_shapes(a.shape[:-4], b.shape[:-4])
        n, m = a.shape[-4], b.shape[-3]
        out = np.zeros(shape + (n, m, k, k), dtype=np.result_type(a.dtype, b.dtype))
        for i in range(k):
            for j in range(k - i):
                blk = a[..., i, j]
                out[..., i:, j:] += np.einsum(
                    "...nq,...qmab->...nmab", blk, b[..., : k - i, : k - j]
                )
        out[..., ~_MASKS[order]] = 0.0
        return MatJet(out, self.base)

    def apply(self, vec: VecJet) -> VecJet:
        """Matrix jet applied to a vector jet."""
        order = min(self.order, vec.order)
        k = order + 1
        a = jtruncate(self.coeffs, order)
        b = jtruncate(vec.coeffs, order)
        shape = np.broadcast_shapes(a.shape[:-4], b.shape[:-3])
        out = np.zeros(shape + (a.shape[-4], k, k), dtype=np.result_type(a.dtype, b.dtype))
        for i in range(k):
            for j in range(k - i):
                blk = a[..., i, j]
                out[..., i:, j:] += np.einsum(
                    "...nq,...qab->...nab", blk, b[..., : k - i, : k - j]
                )
        out[..., ~_MASKS[order]] = 0.0
        return VecJet(out, self.base)

    def commutator(self, other: "MatJet") -> "MatJet":
        return self.matmul(other) - other.matmul(self)


def jet_solve(a_rows: list[list[Jet]], rhs: list) -> list:
    """Solve a small linear system with scalar-jet entries by Gaussian
    elimination.

    Pivoting is by the batch-minimum magnitude of the constant term, so the
    pivot choice is uniform across the batch (keeps frames jet-smooth across
    a chart).  rhs entries may be Jet or VecJet.
    """
    n = len(a_rows)
    a = [row[:] for row in a_rows]
    b = list(rhs)
    perm = list(range(n))
    for col in range(n):
        scores = []
        for r in range(col, n):
            mag = np.abs(np.asarray(a[r][col].coeffs[..., 0, 0]))
            scores.append(mag.min() if mag.ndim else float(mag))
        piv = col + int(np.argmax(scores))
        a[col], a[piv] = a[piv], a[col]
        b[col], b[piv] = b[piv], b[col]
        perm[col], perm[piv] = perm[piv], perm[col]
        pivot = a[col][col]
        for r in range(col + 1, n):
            factor = a[r][col] / pivot
            for c in range(col + 1, n):
                a[r][c] = a[r][c] - factor * a[col][c]
            if isinstance(b[r], VecJet):
                b[r] = b[r] - b[col].smul(factor)
            else:
                b[r] = b[r] - factor * b[col]
    x: list = [None] * n
    for row in range(n - 1, -1, -1):
        acc = b[row]
        for c in range(row + 1, n):
            if isinstance(acc, VecJet):
                acc = acc - x[c].smul(a[row][c])
            else:
                acc = acc - a[row][c] * x[c]
        if isinstance(acc, VecJet):
            x[row] = _vec_div(acc, a[row][row])
        else:
            x[row] = acc / a[row][row]
    return x


def _vec_div(vec: VecJet, s: Jet) -> VecJet:
    order = min(vec.order, s.order)
    inv = Jet(jrecip(jtruncate(s.coeffs, order), order), s.base)
    return vec.smul(inv)
