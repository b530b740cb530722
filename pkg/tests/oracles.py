"""Independent oracles used to freeze reference values.

Nothing here calls the exterior/hermitian machinery of the package: the
Lee form is obtained by solving ``dω = θ∧ω`` symbolically from the
structure constants, and scalar curvature by the closed formula for
left-invariant metrics in an orthonormal frame.

Run ``python3 tests/oracles.py`` to regenerate ``fixtures/oracles.json``.
"""

from __future__ import annotations

import itertools
import json
from fractions import Fraction
from pathlib import Path

import numpy as np
import sympy as sp

FIXTURE = Path(__file__).parent / "fixtures" / "oracles.json"


def _sym(x):
    return sp.Rational(str(Fraction(x)))


def sympy_lee_form(c, j, g):
    """Solve ``dω = θ∧ω`` for θ.

    ``c[i][j][k]`` are structure constants, ``j`` the matrix of J
    (column a = J e_a) and ``g`` the metric matrix.  Returns the list of
    θ components, or None when no solution exists.
    """
    n = len(c)
    cs = [[[_sym(c[i][jj][k]) for k in range(n)] for jj in range(n)] for i in range(n)]
    J = sp.Matrix(n, n, lambda a, b: _sym(j[a][b]))
    G = sp.Matrix(n, n, lambda a, b: _sym(g[a][b]))
    W = J.T * G                                   # ω(e_a, e_b) = <J e_a, e_b>

    def omega(u, v):
        return (u.T * W * v)[0, 0]

    e = [sp.Matrix([1 if t == i else 0 for t in range(n)]) for i in range(n)]

    def br(a, b):
        return sp.Matrix([cs[a][b][k] for k in range(n)])

    theta = sp.symbols(f"t0:{n}")
    eqs = []
    for a, b, d in itertools.combinations(range(n), 3):
        # dω(Xa,Xb,Xd) = -ω([a,b],d) + ω([a,d],b) - ω([b,d],a)
        dw = -omega(br(a, b), e[d]) + omega(br(a, d), e[b]) - omega(br(b, d), e[a])
        # (θ∧ω)(a,b,d) = θ_a ω_bd - θ_b ω_ad + θ_d ω_ab
        tw = theta[a] * W[b, d] - theta[b] * W[a, d] + theta[d] * W[a, b]
        eqs.append(sp.expand(dw - tw))
    sol = sp.linsolve(eqs, theta)
    if not sol:
        return None
    (vals,) = sol
    if any(v.free_symbols for v in vals):
        raise ValueError("θ is not determined by dω = θ∧ω")
    return [Fraction(int(v.p), int(v.q)) for v in vals]


def besse_scalar_curvature(c, g) -> float:
    """``s = -1/4 Σ|[f_i,f_j]|^2 - 1/2 Σ B(f_i,f_i) - |H|^2`` in an orthonormal frame.

    B is the Killing form and H is defined by ``<H, X> = tr ad_X``.
    """
    c = np.array([[[float(Fraction(x)) for x in row] for row in plane] for plane in c])
    g = np.array([[float(Fraction(x)) for x in row] for row in g])
    n = c.shape[0]
    frame = np.linalg.inv(np.linalg.cholesky(g)).T      # columns are orthonormal
    # constants in the frame: [f_a, f_b] = Σ_k d[a,b,k] f_k
    raw = np.einsum("ia,jb,ijk->abk", frame, frame, c)
    d = np.einsum("abk,kl->abl", raw, np.linalg.inv(frame).T)
    ad = np.transpose(d, (0, 2, 1))                    # ad[a][k, b]
    term1 = -0.25 * np.sum(d ** 2)
    killing = sum(np.trace(ad[a] @ ad[a]) for a in range(n))
    trace = np.array([np.trace(ad[a]) for a in range(n)])
    return float(term1 - 0.5 * killing - trace @ trace)


# -- concrete structures, written out by hand -------------------------------------------

def heisenberg_data(n: int, lam: Fraction):
    dim = 2 * n + 2
    c = [[[0] * dim for _ in range(dim)] for _ in range(dim)]
    for i in range(n):
        c[i][n + i][2 * n] = 1
        c[n + i][i][2 * n] = -1
    j = [[0] * dim for _ in range(dim)]
    for i in range(n):
        j[n + i][i], j[i][n + i] = 1, -1
    j[2 * n + 1][2 * n], j[2 * n][2 * n + 1] = -1, 1
    g = [[Fraction(int(a == b)) for b in range(dim)] for a in range(dim)]
    g[2 * n][2 * n] = g[2 * n + 1][2 * n + 1] = 1 / Fraction(lam)
    return c, j, g


def generate() -> dict:
    out: dict = {"scalar_curvature": {}, "lee_form": {}}
    for n in (1, 2, 3):
        for lam in (1, 2, 3):
            c, _, g = heisenberg_data(n, Fraction(lam))
            verbatim = besse_scalar_curvature(c, g)
            c2, _, g2 = heisenberg_data(n, Fraction(1, lam ** 2))
            reparam = besse_scalar_curvature(c2, g2)
            out["scalar_curvature"][f"{n},{lam}"] = {
                "metric_Z_norm_sq_1_over_lambda": verbatim,
                "metric_Z_norm_sq_lambda_squared": reparam,
            }
    for n in (1, 2):
        for lam in ("1", "2", "1/2"):
            c, j, g = heisenberg_data(n, Fraction(lam))
            out["lee_form"][f"heisenberg,{n},{lam}"] = [str(x) for x in sympy_lee_form(c, j, g)]
    acfm_c = [[[0] * 4 for _ in range(4)] for _ in range(4)]
    for (a, b, k, v) in [(0, 1, 1, 1), (0, 2, 2, -1), (1, 2, 3, 1)]:
        acfm_c[a][b][k], acfm_c[b][a][k] = v, -v
    acfm_j = [[0, 0, -1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, -1, 0, 0]]
    eye4 = [[int(a == b) for b in range(4)] for a in range(4)]
    out["lee_form"]["acfm"] = [str(x) for x in sympy_lee_form(acfm_c, acfm_j, eye4)]
    out["conclusion"] = (
        "With |Z1|^2 = |Z2|^2 = 1/lambda the scalar curvature is -n/(2 lambda); "
        "the law -n lambda^2/2 holds for the metric with |Z1|^2 = |Z2|^2 = 1/lambda^2."
    )
    return out


if __name__ == "__main__":
    data = json.loads(FIXTURE.read_text()) if FIXTURE.exists() else {}
    data.update(generate())
    FIXTURE.parent.mkdir(exist_ok=True)
    FIXTURE.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
    print(f"wrote {FIXTURE}")
