"""Finitely supported complex sequences on the integers.

Sequences are stored densely as a window ``[start, end]`` plus the
coefficient array for that window.  All arithmetic here is direct
summation; the only transform-based code is the grid quadrature used to
evaluate trigonometric polynomial norms, and it is always cross-checked
against the direct path where an exact answer exists.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

# Coefficients at or below this magnitude are dropped when trimming the
# window ends.  Stored values are never rounded.
TRIM_EPS = 1e-300

# Default cap on the width of an input window.
WINDOW_CAP = 4096

# Grid size floor for non-polynomial quadratures (L^p norms with p not even).
LP_GRID_MIN = 1 << 16


class NormConsistencyError(ArithmeticError):
    """The convolution and grid evaluations of a norm disagree."""


def _check_index(n: int) -> int:
    if not -sys.maxsize <= n <= sys.maxsize:
        raise OverflowError(f"index {n} outside the platform index range")
    return n


@dataclass(frozen=True, eq=False)
class SeqZ:
    """A finitely supported complex sequence ``n -> x(n)`` on the integers.

    ``coeffs[k]`` is the value at index ``start + k``.  The window is trimmed
    on construction so the first and last stored values are nonzero; the
    zero sequence is the empty window with ``start == 0``.
    """

    start: int
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=np.complex128).reshape(-1)
        nz = np.flatnonzero(np.abs(c) > TRIM_EPS)
        if nz.size == 0:
            start, c = 0, np.zeros(0, dtype=np.complex128)
        else:
            start = int(self.start) + int(nz[0])
            c = c[nz[0]:nz[-1] + 1].copy()
            _check_index(start)
            _check_index(start + c.size - 1)
        c.setflags(write=False)
        object.__setattr__(self, "start", start)
        object.__setattr__(self, "coeffs", c)

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls) -> "SeqZ":
        return cls(0, [])

    @classmethod
    def delta(cls, n: int, value: complex = 1.0) -> "SeqZ":
        return cls(n, [value])

    @classmethod
    def from_mapping(cls, values: Mapping[int, complex]) -> "SeqZ":
        """Build a sequence from ``{index: value}``; missing indices are zero."""
        if not values:
            return cls.zero()
        lo, hi = min(values), max(values)
        c = np.zeros(hi - lo + 1, dtype=np.complex128)
        for n, v in values.items():
            c[n - lo] = v
        return cls(lo, c)

    @classmethod
    def on_indices(cls, indices: Iterable[int], values: Iterable[complex]) -> "SeqZ":
        return cls.from_mapping(dict(zip(indices, values)))

    # -- basic views ------------------------------------------------------

    @property
    def end(self) -> int:
        """Index of the last stored coefficient (``start - 1`` when empty)."""
        return self.start + self.coeffs.size - 1

    @property
    def width(self) -> int:
        return self.coeffs.size

    @property
    def is_zero(self) -> bool:
        return self.coeffs.size == 0

    @property
    def is_real(self) -> bool:
        return not np.any(self.coeffs.imag)

    def indices(self) -> range:
        return range(self.start, self.end + 1)

    def __getitem__(self, n: int) -> complex:
        k = n - self.start
        if 0 <= k < self.coeffs.size:
            return complex(self.coeffs[k])
        return 0j

    def values(self, lo: int, hi: int) -> np.ndarray:
        """Dense copy of the coefficients on ``[lo, hi]`` (zero-padded)."""
        out = np.zeros(hi - lo + 1, dtype=np.complex128)
        a, b = max(lo, self.start), min(hi, self.end)
        if a <= b:
            out[a - lo:b - lo + 1] = self.coeffs[a - self.start:b - self.start + 1]
        return out

    def support(self, eps: float = 0.0) -> list[int]:
        """Indices where ``|x(n)| > eps * max|x|``."""
        if self.is_zero:
            return []
        mag = np.abs(self.coeffs)
        return [self.start + int(k) for k in np.flatnonzero(mag > eps * mag.max())]

    def max_abs(self) -> float:
        return float(np.abs(self.coeffs).max()) if self.coeffs.size else 0.0

    def as_dict(self) -> dict[int, complex]:
        return {n: complex(v) for n, v in zip(self.indices(), self.coeffs) if v != 0}

    # -- arithmetic -------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, SeqZ):
            return NotImplemented
        return self.start == other.start and np.array_equal(self.coeffs, other.coeffs)

    __hash__ = None

    def __add__(self, other: "SeqZ") -> "SeqZ":
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        lo, hi = min(self.start, other.start), max(self.end, other.end)
        return SeqZ(lo, self.values(lo, hi) + other.values(lo, hi))

    def __neg__(self) -> "SeqZ":
        return SeqZ(self.start, -self.coeffs)

    def __sub__(self, other: "SeqZ") -> "SeqZ":
        return self + (-other)

    def __mul__(self, scalar: complex) -> "SeqZ":
        return SeqZ(self.start, self.coeffs * scalar)

    __rmul__ = __mul__

    def __truediv__(self, scalar: complex) -> "SeqZ":
        return SeqZ(self.start, self.coeffs / scalar)

    def abs(self) -> "SeqZ":
        return SeqZ(self.start, np.abs(self.coeffs))

    def real(self) -> "SeqZ":
        return SeqZ(self.start, self.coeffs.real)

    def shift(self, k: int) -> "SeqZ":
        return SeqZ(self.start + k, self.coeffs)

    def modulate(self, alpha: float) -> "SeqZ":
        """``n -> x(n) * exp(i alpha n)``."""
        return SeqZ(self.start, self.coeffs * np.exp(1j * alpha * np.array(self.indices())))

    def max_diff(self, other: "SeqZ") -> float:
        """Sup-norm distance, index-wise over the union of windows."""
        return (self - other).max_abs()

    def __repr__(self) -> str:
        if self.is_zero:
            return "SeqZ(zero)"
        vals = ", ".join(_fmt(v) for v in self.coeffs)
        return f"SeqZ(start={self.start}, [{vals}])"


def _fmt(v: complex) -> str:
    if v.imag == 0:
        return f"{v.real:.6g}"
    return f"{v.real:.6g}{v.imag:+.6g}j"


# -- convolution algebra -------------------------------------------------


def _antidiagonal_fsum(mats: list[np.ndarray]) -> list[float]:
    # Each matrix is outer(x, y[::-1]); anti-diagonal k of outer(x, y) is
    # diagonal offset ly-1-k.  Terms of all matrices are summed together.
    lx, ly = mats[0].shape
    if len(mats) == 1:
        return [math.fsum(np.diagonal(mats[0], ly - 1 - k)) for k in range(lx + ly - 1)]
    return [math.fsum(np.concatenate([np.diagonal(m, ly - 1 - k) for m in mats]))
            for k in range(lx + ly - 1)]


def convolve(x: SeqZ, y: SeqZ) -> SeqZ:
    """Direct convolution ``(x*y)(n) = sum_m x(m) y(n-m)``.

    Every output coefficient is an exactly rounded sum (``math.fsum``) of the
    rounded products, so cancellations in long convolution chains do not
    accumulate.
    """
    if x.is_zero or y.is_zero:
        return SeqZ.zero()
    start = _check_index(x.start + y.start)
    _check_index(x.end + y.end)
    xr, xi = x.coeffs.real, x.coeffs.imag
    yr, yi = y.coeffs.real[::-1], y.coeffs.imag[::-1]
    re_terms = [np.outer(xr, yr)]
    im_terms = []
    if np.any(xi) and np.any(yi):
        re_terms.append(-np.outer(xi, yi))
    if np.any(yi):
        im_terms.append(np.outer(xr, yi))
    if np.any(xi):
        im_terms.append(np.outer(xi, yr))
    out = np.array(_antidiagonal_fsum(re_terms), dtype=np.complex128)
    if im_terms:
        out += 1j * np.array(_antidiagonal_fsum(im_terms))
    return SeqZ(start, out)


def involute(x: SeqZ) -> SeqZ:
    """``n -> conj(x(-n))``, the coefficients of the conjugate function."""
    if x.is_zero:
        return x
    return SeqZ(-x.end, np.conj(x.coeffs[::-1]))


def conv_power(x: SeqZ, m: int) -> SeqZ:
    """``m``-fold convolution of ``x`` with itself; ``x^{*0}`` is the unit delta."""
    if m < 0:
        raise ValueError("convolution power must be nonnegative")
    out = SeqZ.delta(0)
    for _ in range(m):
        out = convolve(out, x)
    return out


def autocorrelation(x: SeqZ) -> SeqZ:
    """``x~ * x``; the coefficients of ``|X|^2``."""
    return convolve(involute(x), x)


def majorant_coeffs(b: SeqZ, j: int) -> SeqZ:
    """``(b * b~)^{*(j-1)} * b``, the coefficients of ``|B|^{2j-2} B``.

    For real nonnegative ``b`` the result is real up to round-off and only the
    real part is returned.
    """
    if j < 1:
        raise ValueError("order j must be a positive integer")
    out = convolve(conv_power(convolve(b, involute(b)), j - 1), b)
    if b.is_real:
        out = out.real()
    return out


# -- 2j-norm functional ---------------------------------------------------


def norm_2j_pow_direct(x: SeqZ, j: int) -> float:
    """``[(x~ * x)^{*j}](0)`` by direct convolution powers."""
    if j < 1:
        raise ValueError("order j must be a positive integer")
    if x.is_zero:
        return 0.0
    return conv_power(autocorrelation(x), j)[0].real


def grid_size(width: int, j: int) -> int:
    """Smallest grid on which the mean of ``|X|^{2j}`` is exact."""
    return max(2 * j * (width - 1) + 1, 1)


def grid_values(x: SeqZ, size: int) -> np.ndarray:
    """``X`` on ``size`` equispaced points of the circle, up to a unimodular factor.

    The factor comes from the window offset and the orientation of the
    transform; neither affects ``|X|``.
    """
    if size < x.width:
        raise ValueError("grid smaller than the window would alias")
    return np.fft.fft(x.coeffs, n=size)


def norm_2j_pow_grid(x: SeqZ, j: int, size: int | None = None) -> float:
    """Mean of ``|X|^{2j}`` over a grid fine enough to be exact."""
    if x.is_zero:
        return 0.0
    size = size or grid_size(x.width, j)
    vals = np.abs(grid_values(x, size)) ** (2 * j)
    return math.fsum(vals) / size


def norm_2j_pow(x: SeqZ, j: int, rtol: float = 1e-9) -> float:
    """``N_j(x) = [(x~*x)^{*j}](0)``, the mean of ``|X|^{2j}`` over the circle.

    Evaluated by direct convolution and by exact grid quadrature; raises
    :class:`NormConsistencyError` if the two disagree by more than ``rtol``
    (relative to the value, with an absolute floor at round-off level of
    ``(sum |x|)^{2j}`` and at the smallest normal double).  Returns the grid value.
    """
    if j < 1:
        raise ValueError("order j must be a positive integer")
    if x.is_zero:
        return 0.0
    direct = norm_2j_pow_direct(x, j)
    grid = norm_2j_pow_grid(x, j)
    # below the smallest normal double the two paths differ by underflow only
    floor = 1e-14 * float(np.abs(x.coeffs).sum()) ** (2 * j) + np.finfo(float).tiny
    if abs(direct - grid) > rtol * max(abs(direct), grid) + floor:
        raise NormConsistencyError(
            f"N_{j}: convolution {direct!r} vs grid {grid!r} for {x!r}")
    return grid


def lp_norm(x: SeqZ, p: float, size: int | None = None) -> float:
    """L^p norm on the circle of the polynomial with coefficients ``x``.

    For ``p`` not an even integer the integrand is not a trigonometric
    polynomial, so this is an approximation; the default grid has at least
    ``2**16`` points and 16 points per unit of window width.
    """
    if x.is_zero:
        return 0.0
    if size is None:
        size = LP_GRID_MIN
        while size < 16 * x.width:
            size *= 2
    vals = np.abs(grid_values(x, size)) ** p
    return (math.fsum(vals) / size) ** (1.0 / p)
