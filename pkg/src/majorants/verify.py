"""Independent checks of the majorant conclusions and related inequalities.

Everything here recomputes from the input sequence with the compensated
direct convolution in :mod:`majorants.seqz`; nothing is reused from the
solver.  The brute-force oracle uses grid quadrature for its objective, which
keeps it independent of both the solver and the verifier.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterator, Optional

import numpy as np
from scipy.optimize import minimize_scalar

from .seqz import SeqZ, convolve, involute, majorant_coeffs, norm_2j_pow_direct
from .solver import (
    MajorantProblem,
    MajorantSolution,
    SolverConfig,
    random_feasible,
    solve,
    target_sequence,
)

SIDON_MAX_SET = 24
SIDON_MAX_J = 4
ORACLE_MAX_SUPPORT = 4

ITEMS = ("nonneg", "support", "norm", "majorize")


@dataclass
class VerificationReport:
    nonneg_margin: float = 0.0
    support_leak: float = 0.0
    norm_gap: float = 0.0
    majorization_margin: float = 0.0
    hoelder_margin: float = 0.0
    upper_majorant_margin: float = 0.0
    ratio: float = 1.0
    tol: float = 1e-7
    passed: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        """All four conclusions hold (auxiliary checks are reported only)."""
        return all(self.passed.get(k, False) for k in ITEMS)

    def lines(self) -> list[str]:
        rows = [
            ("nonneg", "min b on S / max b", self.nonneg_margin),
            ("support", "max |b| off S / max b", self.support_leak),
            ("norm", "|N(b) - N(a)| / N(a)", self.norm_gap),
            ("majorize", "min (F^ - |c|) on S / max|c|", self.majorization_margin),
            ("hoelder", "Hoelder slack / rhs", self.hoelder_margin),
            ("upper", "(N(F^) - N(c)) / N(F^)", self.upper_majorant_margin),
            ("ratio", "r = N(b) / Phi(b)", self.ratio),
        ]
        return [f"{name:<9} {label:<30} {value: .6e}  {'PASS' if self.passed.get(name) else 'FAIL'}"
                for name, label, value in rows]


def verify_solution(problem: MajorantProblem, sol, tol: float = 1e-7) -> VerificationReport:
    """Check the four conclusions for ``sol.b`` against ``problem.a``.

    ``sol`` is a :class:`MajorantSolution` or a bare :class:`SeqZ` ``b``;
    nothing but ``b`` is read from it.

    Margins are relative: ``b`` values to ``max|b|``, the norm gap to
    ``N_j(a)``, majorization to ``max|c|``.  Only ``problem.a``, ``problem.j``
    and the support threshold implied by ``problem.S`` are used; ``c`` and
    both norms are recomputed.
    """
    b = sol.b if isinstance(sol, MajorantSolution) else sol
    j, a = problem.j, problem.a
    c = target_sequence(a, j)
    rep = VerificationReport(tol=tol)
    if a.is_zero:
        rep.passed = {k: b.is_zero for k in ITEMS + ("hoelder", "upper", "ratio")}
        rep.support_leak = b.max_abs()
        return rep

    S = set(problem.S)
    bmax = max(b.max_abs(), np.finfo(float).tiny)
    cmax = c.max_abs()
    on_S = [b[n] for n in S]
    rep.nonneg_margin = min(v.real for v in on_S) / bmax
    imag = max(abs(v.imag) for v in b.coeffs) / bmax
    off = [abs(b[n]) for n in b.indices() if n not in S]
    rep.support_leak = max(off, default=0.0) / bmax

    Na = norm_2j_pow_direct(a, j)
    Nb = norm_2j_pow_direct(b, j)
    rep.norm_gap = abs(Nb - Na) / Na

    Fhat = majorant_coeffs(b, j)
    rep.majorization_margin = min((Fhat[n].real - abs(c[n])) for n in S) / cmax
    off_S = [Fhat[n].real for n in Fhat.indices() if n not in S]
    off_margin = min(off_S, default=0.0) / cmax

    rep.hoelder_margin = check_hoelder(a, b, j) / _hoelder_rhs(a, b, j)
    Phi = math.fsum(b[n].real * abs(c[n]) for n in S)
    rep.ratio = Nb / Phi if Phi > 0 else math.inf
    # The upper-majorant check needs exact domination; lift F^ to |c| where
    # it falls short by round-off only.
    window = sorted(set(c.indices()) | set(Fhat.indices()))
    majorizes = all(Fhat[n].real >= abs(c[n]) - tol * cmax for n in window)
    if majorizes:
        bmaj = SeqZ.on_indices(window, np.maximum(Fhat.values(window[0], window[-1]).real,
                                                 np.abs(c.values(window[0], window[-1]))))
        rep.upper_majorant_margin = check_upper_majorant(bmaj, c, j) / norm_2j_pow_direct(bmaj, j)
    else:
        rep.upper_majorant_margin = math.nan

    rep.passed = {
        "nonneg": rep.nonneg_margin >= -tol and imag <= tol,
        "support": rep.support_leak <= tol,
        "norm": rep.norm_gap <= tol,
        "majorize": rep.majorization_margin >= -tol and off_margin >= -tol,
        "hoelder": rep.hoelder_margin >= -1e-10,
        "upper": majorizes and rep.upper_majorant_margin >= -1e-10,
        "ratio": rep.ratio >= 1 - 1e-9,
    }
    return rep


# -- auxiliary inequalities ----------------------------------------------


def _hoelder_rhs(a: SeqZ, k: SeqZ, j: int) -> float:
    return norm_2j_pow_direct(k, j) ** (1 / (2 * j)) * \
        norm_2j_pow_direct(a, j) ** ((2 * j - 1) / (2 * j))


def check_hoelder(a: SeqZ, k: SeqZ, j: int) -> float:
    """Slack in ``|[k~ * (a*a~)^{*(j-1)} * a](0)| <= N_j(k)^{1/2j} N_j(a)^{(2j-1)/2j}``."""
    c = target_sequence(a, j)
    lhs = abs(convolve(involute(k), c)[0])
    return _hoelder_rhs(a, k, j) - lhs


def check_upper_majorant(b: SeqZ, d: SeqZ, j: int) -> float:
    """``N_j(b) - N_j(d)`` for ``b`` real with ``b >= |d|`` index-wise."""
    if not b.is_real:
        raise ValueError("b must be real")
    if not d.is_zero:
        lo, hi = min(b.start, d.start), max(b.end, d.end)
        short = np.flatnonzero(b.values(lo, hi).real < np.abs(d.values(lo, hi)))
        if short.size:
            raise ValueError(f"b does not dominate |d| at index {lo + short[0]}")
    return norm_2j_pow_direct(b, j) - norm_2j_pow_direct(d, j)


def is_sidon_bj(S, j: int) -> bool:
    """Whether every sum of ``j`` elements of ``S`` determines its summands
    up to order."""
    S = sorted(set(int(s) for s in S))
    if j < 1:
        raise ValueError("j must be a positive integer")
    if len(S) > SIDON_MAX_SET or j > SIDON_MAX_J:
        raise ValueError(f"enumeration capped at |S| <= {SIDON_MAX_SET}, j <= {SIDON_MAX_J}")
    counts = Counter(sum(m) for m in itertools.combinations_with_replacement(S, j))
    return all(v == 1 for v in counts.values())


def exactness_gap(a: SeqZ, j: int) -> float:
    """``N_j(|a|) - N_j(a)``; zero exactly when ``|a|`` is already optimal."""
    gap = norm_2j_pow_direct(a.abs(), j) - norm_2j_pow_direct(a, j)
    return max(gap, 0.0)


# -- brute force oracle ----------------------------------------------------


class _GridNorm:
    # N_j on a fixed index list by exact grid quadrature
    def __init__(self, S, j):
        width = S[-1] - S[0] + 1
        size = 2 * j * (width - 1) + 1
        theta = 2 * np.pi * np.arange(size) / size
        self.E = np.exp(1j * np.outer(theta, np.array(S) - S[0]))
        self.j = j

    def __call__(self, h):
        vals = np.abs(self.E @ h) ** (2 * self.j)
        return math.fsum(vals) / vals.size

    def increase(self, h, d):
        """Coefficients (degree 1..2j) of ``t -> N(h + t d) - N(h)``.

        At each grid point ``|H + t D|^2 = A + B t + C t^2``; raising that
        to the ``j``-th power and dropping the constant term avoids the
        cancellation of evaluating ``N`` twice and subtracting.
        """
        H, D = self.E @ h, self.E @ d
        quad = np.stack([np.abs(H) ** 2, 2 * (H * D.conj()).real, np.abs(D) ** 2])
        poly = np.ones((1, H.size))
        for _ in range(self.j):
            nxt = np.zeros((poly.shape[0] + 2, H.size))
            for k in range(3):
                nxt[k:k + poly.shape[0]] += quad[k] * poly
            poly = nxt
        return np.array([math.fsum(row) for row in poly[1:]]) / H.size


def _compositions(total: int, parts: int) -> Iterator[tuple]:
    if parts == 1:
        yield (total,)
        return
    for k in range(total + 1):
        for rest in _compositions(total - k, parts - 1):
            yield (k,) + rest


def oracle_solve(problem: MajorantProblem, grid_density: int = 40,
                 tol: float = 1e-12, max_sweeps: int = 5000,
                 max_support: int = ORACLE_MAX_SUPPORT) -> SeqZ:
    """Brute-force minimizer of ``N_j`` on the weighted simplex, rescaled.

    Seeds with the best point of a barycentric grid (``grid_density``
    subdivisions) and refines by exchanging mass between pairs of
    coordinates; each exchange is a bounded scalar minimization of a convex
    function, and sweeps stop when no exchange moves more than ``tol``.
    The grid has ``C(grid_density + |S| - 1, |S| - 1)`` points, hence the
    cap on ``|S|``; raise ``max_support`` together with a coarser grid.
    """
    if problem.trivial:
        return SeqZ.zero()
    S, w, j = problem.S, problem.absC, problem.j
    if len(S) > max_support:
        raise ValueError(f"oracle limited to |S| <= {max_support}")
    if np.any(w <= 0):
        raise ValueError("oracle needs positive weights on S")
    N = _GridNorm(S, j)
    k = len(S)

    grid = np.array(list(_compositions(grid_density, k)), dtype=float) / grid_density / w
    vals = np.mean(np.abs(N.E @ grid.T) ** (2 * j), axis=0)
    h = grid[np.argmin(vals)]

    for _ in range(max_sweeps):
        moved = 0.0
        for p, q in itertools.combinations(range(k), 2):
            # h + t (e_p / w_p - e_q / w_q) keeps sum w h fixed
            direction = np.zeros(k)
            direction[p], direction[q] = 1 / w[p], -1 / w[q]
            lo, hi = -h[p] * w[p], h[q] * w[q]
            if hi - lo <= 0:
                continue
            coef = np.append(N.increase(h, direction)[::-1], 0.0)
            res = minimize_scalar(lambda t: np.polyval(coef, t), bounds=(lo, hi), method="bounded",
                                  options={"xatol": tol * (hi - lo) + 1e-300})
            t = res.x if res.fun < 0 else 0.0
            h = np.maximum(h + t * direction, 0.0)
            moved = max(moved, abs(t))
        if moved <= tol:
            break
    hseq = SeqZ.on_indices(S, h)
    return hseq * (problem.normA / norm_2j_pow_direct(hseq, j)) ** (1 / (2 * j))


def uniqueness_probe(problem: MajorantProblem, cfg: Optional[SolverConfig] = None
                     ) -> tuple[float, int]:
    """Largest pairwise sup-distance between optimizers from random starts.

    Returns ``(distance, failures)`` where ``failures`` counts starts that did
    not converge; those are left out of the distance.
    """
    cfg = cfg or SolverConfig()
    if cfg.restarts < 2:
        raise ValueError("need at least two restarts")
    if problem.trivial:
        return 0.0, 0
    rng = np.random.default_rng(cfg.seed)
    sols = [solve(problem, cfg, init=random_feasible(problem, rng)) for _ in range(cfg.restarts)]
    good = [s.b for s in sols if s.converged]
    dist = max((x.max_diff(y) for x, y in itertools.combinations(good, 2)), default=0.0)
    return dist, len(sols) - len(good)


# -- seeded random corpora --------------------------------------------------


def instance_rngs(seed: int, count: int) -> list[np.random.Generator]:
    """Independent generators, one per instance, split from one seed."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(count)]


def random_sequence(rng: np.random.Generator, max_width: int = 8,
                    kind: Optional[str] = None) -> SeqZ:
    """Random nonzero sequence with window width at most ``max_width``.

    ``kind`` is one of ``"int"`` (signed integers), ``"gint"`` (Gaussian
    integers), ``"real"`` or ``"complex"`` (normal entries); interior
    entries are dropped to zero with probability 0.3.
    """
    kind = kind or rng.choice(["int", "gint", "real", "complex"])
    width = int(rng.integers(1, max_width + 1))
    if kind == "int":
        vals = rng.integers(-3, 4, width).astype(complex)
    elif kind == "gint":
        vals = rng.integers(-3, 4, width) + 1j * rng.integers(-3, 4, width)
    elif kind == "real":
        vals = rng.standard_normal(width).astype(complex)
    else:
        vals = rng.standard_normal(width) + 1j * rng.standard_normal(width)
    if width > 2:
        vals[1:-1][rng.random(width - 2) < 0.3] = 0
    units = [-1, 1] if kind in ("int", "real") else [-1, 1, 1j, -1j]
    for end in (0, -1):
        while vals[end] == 0:
            vals[end] = rng.integers(1, 4) * rng.choice(units)
    return SeqZ(int(rng.integers(-4, 5)), vals)


def random_instance(rng: np.random.Generator, max_width: int = 8, orders=(2, 3)):
    return random_sequence(rng, max_width), int(rng.choice(orders))
