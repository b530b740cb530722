"""Numerical search for l.c.K. metrics on a fixed (g, J).

The metric is ``g = L L^T`` for a lower-triangular ``L``, averaged over J
before every evaluation and re-factored after every accepted step.  The
objective is the scale-free defect ``|dω - θ∧ω|^2/|dω|^2 + |dθ|^2/|dω|^4``,
so rescaling the metric cannot drive it to zero.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import linalg as la
from .exterior import (InnerProduct, ce_differential, fundamental_form, lee_form, wedge)
from .hermitian import (ComplexStructureError, HermitianStructure, LckCertificate, check_lck,
                        classify_J)
from .lie import LieAlgebra, is_unimodular

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SearchConfig:
    restarts: int = 8
    seed: int = 0
    max_iters: int = 200
    tol_residual: float = 1e-9
    method: str = "lm"            # "lm" (damped Gauss-Newton) or "gd"
    fd_step: float = 1e-6
    init_scale: float = 0.5
    armijo: float = 1e-4
    shrink: float = 0.5
    max_backtracks: int = 30
    damping: float = 1e-3
    patience: int = 10            # iterations without relative decrease min_decrease
    min_decrease: float = 1e-6
    workers: int = 1

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if not self.tol_residual > 0:
            raise ValueError("tol_residual must be positive")
        if self.method not in ("lm", "gd"):
            raise ValueError(f"unknown method {self.method!r}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class RestartTrace:
    index: int
    initial: float
    final: float
    iterations: int
    evaluations: int
    converged: bool


@dataclass(frozen=True, eq=False)
class SearchResult:
    best_residual: float          # scale-free defect of the best metric
    best_absolute: float          # check_lck residual of the best (trace-normalised) metric
    best_metric: InnerProduct
    certificate: LckCertificate | None
    traces: tuple[RestartTrace, ...]
    best_index: int
    config: SearchConfig

    @property
    def certified(self) -> bool:
        return self.certificate is not None

    def summary(self) -> dict:
        return {
            "best_residual": self.best_residual,
            "best_absolute": self.best_absolute,
            "best_index": self.best_index,
            "certified": self.certified,
            "kahler": bool(self.certificate and self.certificate.is_kahler),
            "metric": [[float(x) for x in row] for row in self.best_metric.gmat],
            "restarts": [asdict(t) for t in self.traces],
            "config": asdict(self.config),
        }


# -- metric handling ----------------------------------------------------------------------

def project_hermitian(gm: InnerProduct, j: np.ndarray) -> InnerProduct:
    """``(g(X, Y) + g(JX, JY)) / 2``."""
    m = gm.gmat
    half = Fraction(1, 2) if la.is_exact(m) else 0.5
    avg = half * (m + j.T @ m @ j)
    return InnerProduct(la.frozen((avg + avg.T) * half))


def _tril_indices(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.tril_indices(n)


def _metric_from_params(p: np.ndarray, n: int, j: np.ndarray) -> np.ndarray:
    lower = np.zeros((n, n))
    lower[_tril_indices(n)] = p
    m = lower @ lower.T
    m = 0.5 * (m + j.T @ m @ j)
    return 0.5 * (m + m.T)


def _normalise(m: np.ndarray) -> np.ndarray:
    return m * (m.shape[0] / np.trace(m))


def _params_from_metric(m: np.ndarray) -> np.ndarray:
    return np.linalg.cholesky(m)[_tril_indices(m.shape[0])]


# -- residuals ------------------------------------------------------------------------------

def lck_residual(g: LieAlgebra, j: np.ndarray, gm: InnerProduct, relative: bool = False) -> float:
    """Certificate residual of ``(g, J, gm)``; the scale-free defect if ``relative``."""
    cert = check_lck(HermitianStructure(g, j, gm))
    return cert.relative_residual if relative else cert.residual


class _Objective:
    """Residual vector whose squared norm is the scale-free defect."""

    def __init__(self, g: LieAlgebra, j: np.ndarray):
        self.g = g.to_float() if g.exact else g
        self.j = la.to_float(j)
        self.n = g.dim
        self.evaluations = 0
        self.size = math.comb(self.n, 3) + math.comb(self.n, 2)

    def metric(self, p: np.ndarray) -> np.ndarray:
        return _metric_from_params(p, self.n, self.j)

    def vector(self, p: np.ndarray) -> np.ndarray:
        self.evaluations += 1
        try:
            return self._vector(self.metric(p))
        except ValueError:          # degenerate metric (LinAlgError is a ValueError)
            return np.full(self.size, np.inf)

    def _vector(self, m: np.ndarray) -> np.ndarray:
        gm = InnerProduct(m)
        omega = fundamental_form(self.j, gm)
        dw = ce_differential(self.g, omega)
        theta = lee_form(self.g, gm, self.j)
        diff = (dw - wedge(theta, omega)).coeffs
        dtheta = ce_differential(self.g, theta).coeffs
        g3 = gm.form_gram(3)
        dn = float(dw.coeffs @ g3 @ dw.coeffs)
        if dn <= 0.0:
            return np.zeros(self.size)  # Kähler
        r3 = np.linalg.cholesky(g3).T @ diff / math.sqrt(dn)
        r2 = np.linalg.cholesky(gm.form_gram(2)).T @ dtheta / dn
        return np.concatenate([r3, r2])

    def value(self, p: np.ndarray) -> float:
        v = self.vector(p)
        return float(v @ v)

    def jacobian(self, p: np.ndarray, h: float) -> np.ndarray:
        cols = []
        for k in range(len(p)):
            e = np.zeros_like(p)
            e[k] = h
            with np.errstate(invalid="ignore"):
                col = (self.vector(p + e) - self.vector(p - e)) / (2 * h)
            cols.append(np.where(np.isfinite(col), col, 0.0))
        return np.column_stack(cols)

    def gradient(self, p: np.ndarray, h: float) -> np.ndarray:
        grad = np.empty_like(p)
        for k in range(len(p)):
            e = np.zeros_like(p)
            e[k] = h
            grad[k] = (self.value(p + e) - self.value(p - e)) / (2 * h)
        return grad


def fd_gradient(g: LieAlgebra, j: np.ndarray, p: np.ndarray, h: float) -> np.ndarray:
    """Central finite-difference gradient of the search objective at parameters ``p``."""
    return _Objective(g, j).gradient(np.asarray(p, dtype=float), h)


def objective_value(g: LieAlgebra, j: np.ndarray, p: np.ndarray) -> float:
    return _Objective(g, j).value(np.asarray(p, dtype=float))


# -- optimisation ----------------------------------------------------------------------------

def _renormalise(obj: _Objective, p: np.ndarray) -> np.ndarray:
    return _params_from_metric(_normalise(obj.metric(p)))


def _run_restart(g: LieAlgebra, j: np.ndarray, cfg: SearchConfig, index: int,
                 start: np.ndarray) -> tuple[RestartTrace, np.ndarray, float]:
    obj = _Objective(g, j)
    p = _renormalise(obj, start)
    f = obj.value(p)
    f0 = f
    target = (cfg.tol_residual * 1e-2) ** 2
    it = stalled = 0
    damping = cfg.damping
    k = len(p)
    while it < cfg.max_iters and f > target and stalled < cfg.patience:
        it += 1
        if cfg.method == "lm":
            r = obj.vector(p)
            jac = obj.jacobian(p, cfg.fd_step)
            grad = 2 * jac.T @ r
            # damped Gauss-Newton step as an augmented least-squares problem
            scale = math.sqrt(damping * (float(np.sum(jac * jac)) / k + 1e-30))
            aug = np.vstack([jac, scale * np.eye(k)])
            direction = -np.linalg.lstsq(aug, np.concatenate([r, np.zeros(k)]), rcond=None)[0]
        else:
            grad = obj.gradient(p, cfg.fd_step)
            direction = -grad
        slope = float(grad @ direction)
        if not slope < 0:
            direction, slope = -grad, -float(grad @ grad)
        step, accepted = 1.0, False
        for _ in range(cfg.max_backtracks):
            trial = p + step * direction
            ft = obj.value(trial)
            if math.isfinite(ft) and ft <= f + cfg.armijo * step * slope:
                accepted = True
                break
            step *= cfg.shrink
        if not accepted:
            if cfg.method == "lm" and damping < 1e6:
                damping *= 10
                stalled += 1
                continue
            break
        if cfg.method == "lm":
            damping = max(damping / 3, 1e-12) if step == 1.0 else damping
        p_new = _renormalise(obj, trial)
        f_new = obj.value(p_new)
        if not math.isfinite(f_new):
            break
        stalled = stalled + 1 if f_new > f * (1 - cfg.min_decrease) else 0
        p, f = p_new, f_new
    final = math.sqrt(f)
    trace = RestartTrace(index, math.sqrt(f0), final, it, obj.evaluations,
                         final < cfg.tol_residual)
    log.debug("restart %d: %.3e -> %.3e in %d iterations", index, trace.initial, final, it)
    return trace, p, final


def _starts(n: int, cfg: SearchConfig) -> list[np.ndarray]:
    k = n * (n + 1) // 2
    rows, cols = _tril_indices(n)
    starts = []
    for child in np.random.SeedSequence(cfg.seed).spawn(cfg.restarts):
        rng = np.random.default_rng(child)
        p = rng.normal(scale=cfg.init_scale, size=k)
        p[rows == cols] += 1.0
        starts.append(p)
    return starts


def search_lck_metric(g: LieAlgebra, j: np.ndarray, cfg: SearchConfig = SearchConfig()) -> SearchResult:
    n = g.dim
    if n < 4 or n % 2:
        raise ComplexStructureError("search needs even dimension >= 4")
    cls = classify_J(g, j)
    if not cls.almost_complex:
        raise ComplexStructureError("J^2 != -1")
    if not cls.integrable:
        raise ComplexStructureError("J is not integrable")
    gf = g.to_float() if g.exact else g
    jf = la.to_float(j)
    starts = _starts(n, cfg)
    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            runs = list(pool.map(lambda a: _run_restart(gf, jf, cfg, *a), enumerate(starts)))
    else:
        runs = [_run_restart(gf, jf, cfg, i, s) for i, s in enumerate(starts)]
    # reduce by restart index: first minimum wins
    best_index = min(range(len(runs)), key=lambda i: (runs[i][2], i))
    _, best_p, best = runs[best_index]
    m = _normalise(_metric_from_params(best_p, n, jf))
    gm = InnerProduct(la.frozen(m))
    cert = check_lck(HermitianStructure(gf, jf, gm))
    certificate = cert if (best < cfg.tol_residual and cert.is_lck
                           and cert.residual < cfg.tol_residual) else None
    return SearchResult(best, cert.residual, gm, certificate, tuple(r[0] for r in runs),
                        best_index, cfg)


@dataclass(frozen=True)
class SweepRow:
    name: str
    dim: int
    unimodular: bool
    abelian: bool
    bi_invariant: bool
    best_residual: float
    certified: bool
    restarts: int


@dataclass(frozen=True)
class SweepTable:
    rows: tuple[SweepRow, ...]
    config: SearchConfig
    label: str = "evidence, not proof"

    def row(self, name: str) -> SweepRow:
        return next(r for r in self.rows if r.name == name)

    def format(self) -> str:
        head = f"falsification sweep ({self.label}); seed={self.config.seed}, " \
               f"restarts={self.config.restarts}, max_iters={self.config.max_iters}"
        lines = [head, f"{'target':<22} dim  unimod  J-class      best residual  certified"]
        for r in self.rows:
            jc = "bi-invariant" if r.bi_invariant else ("abelian" if r.abelian else "integrable")
            lines.append(f"{r.name:<22} {r.dim:>3}  {'yes' if r.unimodular else 'no':<6}  "
                         f"{jc:<12} {r.best_residual:>13.3e}  {'yes' if r.certified else 'no'}")
        return "\n".join(lines)


def falsification_sweep(targets: Sequence[tuple[str, LieAlgebra, np.ndarray]],
                        cfg: SearchConfig = SearchConfig(restarts=32)) -> SweepTable:
    """Search every target; low floors on unimodular bi-invariant targets would contradict theory."""
    rows = []
    for name, g, j in targets:
        cls = classify_J(g, j)
        res = search_lck_metric(g, j, cfg)
        rows.append(SweepRow(name, g.dim, is_unimodular(g)[0], cls.abelian, cls.bi_invariant,
                             res.best_residual, res.certified, cfg.restarts))
    return SweepTable(tuple(rows), cfg)
