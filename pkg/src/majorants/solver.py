"""Matched-norm majorant of a finitely supported sequence.

Given ``a`` and an order ``j``, let ``c = a * (a~ * a)^{*(j-1)}``.  We look
for ``b >= 0`` supported on ``supp(c)`` maximizing ``sum_n b(n) |c(n)|``
among sequences with ``N_j(b) = N_j(a)``.  Equivalently (and this is what is
actually solved) ``h = b / Phi(b)`` minimizes ``N_j(h)`` over the weighted
simplex ``{h >= 0 : sum_n h(n) |c(n)| = 1}``; ``b`` is recovered by rescaling.

The majorant is ``F^ = (b * b~)^{*(j-1)} * b``.  It dominates ``r |c|`` where
``r = N_j(b) / Phi(b) >= 1``, and ``F^ / r`` is the minimal-norm majorant.
"""

from __future__ import annotations

import dataclasses
import functools
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from numpy.polynomial import legendre
from scipy.optimize import brentq

from .seqz import (
    WINDOW_CAP,
    SeqZ,
    autocorrelation,
    conv_power,
    convolve,
    lp_norm,
    majorant_coeffs,
    norm_2j_pow,
)

log = logging.getLogger(__name__)

# Sufficient-decrease constant for the Armijo test.
ARMIJO_SIGMA = 1e-4


@dataclass(frozen=True)
class SolverConfig:
    support_eps: float = 1e-12
    kkt_tol: float = 1e-10
    step_shrink: float = 0.5
    step_grow: float = 2.0
    max_iters: int = 20000
    restarts: int = 5
    seed: int = 0

    def __post_init__(self):
        if self.support_eps <= 0 or self.kkt_tol <= 0:
            raise ValueError("tolerances must be positive")
        if not 0 < self.step_shrink < 1 < self.step_grow:
            raise ValueError("need 0 < step_shrink < 1 < step_grow")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")


@dataclass(frozen=True, eq=False)
class MajorantProblem:
    """The data fixed by ``a`` and ``j``.

    ``S`` lists the indices carrying weight; ``absC`` holds ``|c(n)|`` for
    those indices.  A problem produced by :func:`enlarge_support` also has
    indices with weight zero, which are free but do not count in ``Phi``.
    """

    j: int
    a: SeqZ
    c: SeqZ
    S: tuple
    absC: np.ndarray = field(repr=False)
    normA: float
    borderline: tuple = ()

    @property
    def trivial(self) -> bool:
        return self.a.is_zero

    @property
    def p(self) -> float:
        """The exponent ``2j/(2j-1)`` of the majorant's norm."""
        return 2 * self.j / (2 * self.j - 1)

    def recompute_c(self) -> SeqZ:
        return target_sequence(self.a, self.j)


@dataclass(frozen=True, eq=False)
class MajorantSolution:
    b: SeqZ
    M: float
    N: float
    r: float
    Fhat: SeqZ
    FhatMin: SeqZ
    iters: int = 0
    kkt_residual: float = 0.0
    converged: bool = True
    lam: float = 0.0


def target_sequence(a: SeqZ, j: int) -> SeqZ:
    """``c = a * (a~ * a)^{*(j-1)}``, the coefficients of ``|g|^{2j-2} g``."""
    return convolve(a, conv_power(autocorrelation(a), j - 1))


def derive_target(a: SeqZ, j: int, cfg: Optional[SolverConfig] = None) -> MajorantProblem:
    cfg = cfg or SolverConfig()
    if j < 1:
        raise ValueError("order j must be a positive integer")
    if a.width > WINDOW_CAP:
        raise ValueError(f"input window {a.width} exceeds cap {WINDOW_CAP}")
    c = target_sequence(a, j)
    S = tuple(c.support(cfg.support_eps))
    absC = np.array([abs(c[n]) for n in S])
    borderline = ()
    if not c.is_zero:
        mags = np.abs(c.coeffs)
        lo, hi = cfg.support_eps * 1e-3 * mags.max(), cfg.support_eps * 1e3 * mags.max()
        borderline = tuple(n for n, v in zip(c.indices(), mags) if lo < v <= hi)
        if borderline:
            log.warning("coefficients of c near the support threshold at %s", borderline)
    normA = norm_2j_pow(a, j) if not a.is_zero else 0.0
    return MajorantProblem(j=j, a=a, c=c, S=S, absC=absC, normA=normA, borderline=borderline)


def enlarge_support(problem: MajorantProblem, pad: int = 3) -> MajorantProblem:
    """Add zero-weight indices: every gap inside the window of ``S`` and
    ``pad`` extra indices on each side."""
    if not problem.S:
        return problem
    weights = dict(zip(problem.S, problem.absC))
    idx = range(problem.S[0] - pad, problem.S[-1] + pad + 1)
    S = tuple(idx)
    absC = np.array([weights.get(n, 0.0) for n in S])
    return dataclasses.replace(problem, S=S, absC=absC)


def phi(b: SeqZ, problem: MajorantProblem) -> float:
    """``Phi(b) = sum_{n in S} b(n) |c(n)|``."""
    return math.fsum(b[n].real * w for n, w in zip(problem.S, problem.absC))


def grad_norm(b: SeqZ, j: int) -> SeqZ:
    """Gradient of ``h -> N_j(h)`` at a real ``b``: ``2j (b * b~)^{*(j-1)} * b``.

    Entry ``n`` is the derivative along the real coordinate ``h(n)``; the
    result is returned as a real sequence over the window of ``F^``.
    """
    if not b.is_real:
        raise ValueError("gradient is taken at real sequences only")
    return majorant_coeffs(b, j).real() * (2 * j)


def project_weighted_simplex(v: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Euclidean projection of ``v`` onto ``{h >= 0 : sum w h = 1}``.

    The projection is ``max(v - tau w, 0)``.  Sorting the ratios ``v/w``
    in decreasing order gives the candidate active sets; ``tau`` is fixed by
    the largest prefix whose threshold stays below its last ratio.  Entries
    with ``w == 0`` only feel the nonnegativity constraint.
    """
    v = np.asarray(v, dtype=float)
    w = np.asarray(w, dtype=float)
    if not np.all(np.isfinite(v)):
        raise ValueError("cannot project a non-finite point")
    if np.any(w < 0) or not np.any(w > 0):
        raise ValueError("weights must be nonnegative with a positive entry")
    pos = np.flatnonzero(w > 0)
    vp, wp = v[pos], w[pos]
    order = np.argsort(-vp / wp, kind="stable")
    ratio = (vp / wp)[order]
    cum_wv = np.cumsum((wp * vp)[order])
    cum_ww = np.cumsum((wp * wp)[order])
    taus = (cum_wv - 1.0) / cum_ww
    k = np.flatnonzero(taus < ratio)[-1]
    tau = taus[k]
    out = np.maximum(v, 0.0)
    out[pos] = np.maximum(vp - tau * wp, 0.0)
    return out


class _Functional:
    """``N_j`` and its gradient for real sequences on a fixed index list.

    Works on dense numpy arrays over the window of the index list; the
    convolutions are direct (``np.convolve``), not transform based.
    """

    def __init__(self, S, j):
        self.j = j
        self.lo = S[0]
        self.width = S[-1] - S[0] + 1
        self.pos = np.array(S) - self.lo
        # offset of index lo inside the full (b*b~)^{j-1}*b array
        self.offset = (j - 1) * (self.width - 1)

    def dense(self, h):
        out = np.zeros(self.width)
        out[self.pos] = h
        return out

    def coeffs(self, h):
        x = self.dense(h)
        out = x
        if self.j > 1:
            ac = np.convolve(x, x[::-1])
            for _ in range(self.j - 1):
                out = np.convolve(out, ac)
        return out[self.offset + self.pos]

    def __call__(self, h):
        m = self.coeffs(h)
        return float(np.dot(m, h)), 2 * self.j * m

    def increase(self, h, d, g0, g1):
        """``N(h + d) - N(h)`` as the integral of ``<grad N, d>`` along the segment.

        The integrand is a polynomial of degree ``2j - 1``, so Lobatto
        quadrature with ``j + 1`` nodes is exact, and the result is accurate
        relative to ``|grad N| |d|`` rather than to ``N`` itself.
        """
        nodes, wts = _lobatto(self.j + 1)
        vals = [np.dot(g0, d)]
        vals += [np.dot(self(h + x * d)[1], d) for x in nodes[1:-1]]
        vals.append(np.dot(g1, d))
        return float(np.dot(wts, vals))

    def hessian(self, h):
        """Exact Hessian of ``N_j`` on the index list.

        ``d m(n) / d h(k) = j A(n-k) + (j-1) B(n+k)`` with
        ``A = (h*h~)^{*(j-1)}`` and ``B = h^{*j} * h~^{*(j-2)}``.
        """
        j, W, pos = self.j, self.width, self.pos
        if j == 1:
            return 2.0 * np.eye(pos.size)
        x = self.dense(h)
        A = np.ones(1)
        ac = np.convolve(x, x[::-1])
        for _ in range(j - 1):
            A = np.convolve(A, ac)
        diff = pos[:, None] - pos[None, :]
        H = j * A[diff + (j - 1) * (W - 1)]
        B = np.ones(1)
        for _ in range(j):
            B = np.convolve(B, x)
        for _ in range(j - 2):
            B = np.convolve(B, x[::-1])
        H = H + (j - 1) * B[pos[:, None] + pos[None, :] + (j - 2) * (W - 1)]
        return 2 * j * H

    def hess_norm(self, h, iters=30):
        """Power-iteration estimate of the Hessian norm at ``h``."""
        rng = np.random.default_rng(0)
        v = rng.random(h.size) + 0.5
        v /= np.linalg.norm(v)
        eps = 1e-4 * max(np.linalg.norm(h), 1e-300)
        est = 0.0
        for _ in range(iters):
            hv = (self(h + eps * v)[1] - self(h - eps * v)[1]) / (2 * eps)
            est = float(np.linalg.norm(hv))
            if est == 0.0:
                break
            v = hv / est
        return est


@functools.lru_cache(maxsize=None)
def _lobatto(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Lobatto nodes and weights on [0, 1], exact to degree 2n-3."""
    if n == 2:
        return np.array([0.0, 1.0]), np.array([0.5, 0.5])
    pn = legendre.Legendre.basis(n - 1)
    x = np.concatenate([[-1.0], np.sort(pn.deriv().roots().real), [1.0]])
    wts = 2.0 / (n * (n - 1) * pn(x) ** 2)
    return (x + 1) / 2, wts / 2


def kkt_residual(h: np.ndarray, g: np.ndarray, w: np.ndarray) -> tuple[float, float]:
    """Scale-free first-order residual for ``min N_j`` on the weighted simplex.

    With multiplier ``lam = <h, g> / <h, w>`` the optimality conditions are
    ``rho = (g - lam w) / (lam w) >= 0``, ``u = h w >= 0`` and ``u rho = 0``;
    the residual is ``max |min(u, rho)|``.  Zero-weight entries are measured
    with the largest weight in place of ``w`` in ``u`` and the denominator.
    Returns ``(residual, lam)``.
    """
    lam = float(np.dot(h, g) / np.dot(h, w))
    if lam <= 0:
        return math.inf, lam
    wref = np.where(w > 0, w, w.max())
    u = h * wref
    rho = (g - lam * w) / (lam * wref)
    return float(np.max(np.abs(np.minimum(u, rho)))), lam


def random_feasible(problem: MajorantProblem, rng: np.random.Generator) -> np.ndarray:
    """Random point of the weighted simplex (flat Dirichlet in ``h |c|``).

    Zero-weight entries get exponential mass of the same typical size.
    """
    w = problem.absC
    pos = w > 0
    h = np.zeros(w.size)
    h[pos] = rng.dirichlet(np.ones(pos.sum())) / w[pos]
    if not pos.all():
        h[~pos] = rng.exponential(h[pos].mean(), size=(~pos).sum())
    return h


def _zero_solution() -> MajorantSolution:
    z = SeqZ.zero()
    return MajorantSolution(b=z, M=0.0, N=0.0, r=1.0, Fhat=z, FhatMin=z)


def solve(problem: MajorantProblem, cfg: Optional[SolverConfig] = None,
          init: Optional[np.ndarray] = None,
          callback: Optional[Callable[[int, np.ndarray, float], None]] = None
          ) -> MajorantSolution:
    """Projected gradient descent with Armijo backtracking on the weighted simplex.

    Trial steps are Barzilai-Borwein (alternating the two variants), the
    first one ``1/L`` with ``L`` a power-iteration estimate of the Hessian
    norm at the starting point.  ``init`` (values on ``problem.S``) replaces
    the default start ``|c| / Phi(|c|)``.  ``callback(k, h, N)`` sees every
    accepted iterate, including the start.
    """
    cfg = cfg or SolverConfig()
    if problem.trivial:
        return _zero_solution()
    j, w = problem.j, problem.absC
    F = _Functional(problem.S, j)

    h = w / np.dot(w, w) if init is None else project_weighted_simplex(init, w)
    N, g = F(h)
    if callback:
        callback(0, h, N)
    L = F.hess_norm(h)
    t = 1.0 / L if L > 0 else 1.0
    res, lam = kkt_residual(h, g, w)
    converged = res <= cfg.kkt_tol
    k = 0
    while not converged and k < cfg.max_iters:
        k += 1
        for _ in range(100):
            h_new = project_weighted_simplex(h - t * g, w)
            N_new, g_new = F(h_new)
            d = h_new - h
            # the projection leaves <w, d> at round-off rather than zero; near
            # the optimum that drift (times lam) swamps the true decrease, so
            # both sides are measured along the hyperplane
            drift = lam * np.dot(w, d)
            if F.increase(h, d, g, g_new) - drift <= ARMIJO_SIGMA * (np.dot(g, d) - drift):
                break
            t *= cfg.step_shrink
        else:
            log.warning("line search failed at iteration %d (residual %.3g)", k, res)
            break
        s, y = h_new - h, g_new - g
        h, N, g = h_new, N_new, g_new
        if callback:
            callback(k, h, N)
        res, lam = kkt_residual(h, g, w)
        converged = res <= cfg.kkt_tol
        sy = float(np.dot(s, y))
        if sy > 0:
            t = float(np.dot(s, s)) / sy if k % 2 else sy / float(np.dot(y, y))
        else:
            t *= cfg.step_grow
    if converged:
        h, N, g, res = _polish(F, w, h, N, g, res, callback, k)
    else:
        log.warning("no convergence after %d iterations, residual %.3g", k, res)
    return _finish(problem, h, k, res, converged)


def _polish(F, w, h, N, g, res, callback=None, k=0, steps=12):
    """Newton steps on faces of the simplex, starting from the face of ``h``.

    Projected gradient stops at the KKT tolerance, which pins the optimizer
    only a little beyond that; equality-constrained Newton steps on the free
    coordinates take it to round-off.  The free set is adjusted like a primal
    active-set method: coordinates that would go negative are dropped, zero
    coordinates whose reduced gradient turns negative are added.  The best
    point found is returned, and only if it lowers the residual without
    raising ``N``.
    """
    wref = np.where(w > 0, w, w.max())

    def reduced(h, g):
        res, lam = kkt_residual(h, g, w)
        return res, lam, (g - lam * w) / (lam * wref)

    h0, g0 = h, g
    _, lam0, rho = reduced(h, g)
    free = h * wref >= rho
    best = (h, N, g, res)
    for _ in range(steps):
        if not free.any():
            break
        base = np.where(free, h, 0.0)
        _, gb = F(base)
        idx = np.flatnonzero(free)
        H = F.hessian(base)[np.ix_(idx, idx)]
        wf = w[idx]
        K = np.block([[H, wf[:, None]], [wf[None, :], np.zeros((1, 1))]])
        rhs = np.concatenate([-gb[idx], [1.0 - np.dot(w, base)]])
        try:
            step = np.linalg.solve(K, rhs)[:-1]
        except np.linalg.LinAlgError:
            break
        h_new = base.copy()
        h_new[idx] += step
        if not np.all(np.isfinite(h_new)):
            break
        if np.any(h_new < 0):
            free &= h_new > 0
            continue
        N_new, g_new = F(h_new)
        res_new, _, rho = reduced(h_new, g_new)
        h, g = h_new, g_new
        if res_new < best[3]:
            best = (h_new, N_new, g_new, res_new)
        blocked = ~free & (rho < 0)
        if blocked.any():
            free[np.argmin(np.where(blocked, rho, np.inf))] = True
        elif res_new <= 4 * np.finfo(float).eps:
            break
    h, N, g, res = best
    if h is not h0:
        d = h - h0
        if F.increase(h0, d, g0, g) - lam0 * np.dot(w, d) > 1e-13 * N:
            return h0, *F(h0), kkt_residual(h0, g0, w)[0]
        if callback:
            callback(k + 1, h, N)
    return h, N, g, res


def _finish(problem, h, iters, res, converged) -> MajorantSolution:
    j = problem.j
    hseq = SeqZ.on_indices(problem.S, h)
    b = hseq * (problem.normA / norm_2j_pow(hseq, j)) ** (1.0 / (2 * j))
    M = phi(b, problem)
    N = norm_2j_pow(b, j)
    r = N / M
    Fhat = majorant_coeffs(b, j)
    return MajorantSolution(b=b, M=M, N=N, r=r, Fhat=Fhat, FhatMin=Fhat / r,
                            iters=iters, kkt_residual=res, converged=converged,
                            lam=2 * j * N / M)


def minimal_majorant(sol: MajorantSolution) -> SeqZ:
    """``F^ / r``: coefficients of the majorant of smallest ``L^p`` norm."""
    if not sol.converged:
        raise ValueError("solution did not converge")
    return sol.FhatMin


def alternative_majorant(sol: MajorantSolution, h: SeqZ, problem: MajorantProblem,
                         rtol: float = 1e-9) -> SeqZ:
    """Another majorant of ``c`` with the same ``L^p`` norm as ``f``.

    Returns ``F^/r + s h`` with ``s > 0`` chosen by a bracketing root search
    so that its ``L^p`` norm (grid quadrature) equals that of the polynomial
    with coefficients ``c``.  Needs ``r > 1``: otherwise ``F^/r`` already has
    the full norm and there is no room to add mass.
    """
    if sol.r <= 1 + 1e-9:
        raise ValueError(f"ratio r = {sol.r!r} leaves no slack for another majorant")
    if h.is_zero or not h.is_real or np.any(h.coeffs.real < 0):
        raise ValueError("h must be nonzero with nonnegative real coefficients")
    p = problem.p
    target = lp_norm(problem.c, p)
    base = sol.FhatMin

    def excess(s):
        return lp_norm(base + h * s, p) / target - 1.0

    if excess(0.0) >= 0:
        raise ValueError("minimal majorant already has the target norm")
    hi = base.max_abs() / h.max_abs()
    for _ in range(200):
        if excess(hi) > 0:
            break
        hi *= 2
    else:
        raise RuntimeError("could not bracket the rescaling factor")
    s = brentq(excess, 0.0, hi, xtol=1e-15 * hi, rtol=4 * np.finfo(float).eps, maxiter=500)
    if abs(excess(s)) > rtol:
        raise RuntimeError(f"root search ended at relative norm error {excess(s)!r}")
    return base + h * s
