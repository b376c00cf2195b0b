"""Psi-functions (f, g) of the Painleve XXXIV Lax pair at spectral
parameter r_tilde.

f solves the Schrodinger-type equation d^2f/dx^2 = (x + 2q^2 - r) f with
f ~ 2^(-1/6) sqrt(pi) Ai(x - r) for x -> +inf; g follows from the integral
relation q g = -r int_x^inf q f.  Positive r is the density-of-states
branch (f oscillates for x < r), negative r the first-gap branch (f decays
everywhere).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import airy as _airy
from .numerics import (AiryProductTail, Grid, GridFunction, integrate_ode,
                       cumulative_tail_integral)
from .painleve import PainleveTable

#: amplitude of the Airy seed, 2^(-1/6) sqrt(pi)
SEED_AMPLITUDE = 2.0 ** (-1.0 / 6.0) * math.sqrt(math.pi)

#: gap-branch r below which f underflows double precision
GAP_R_MAX = 30.0

#: minimal Airy-decay margin x_max - r for the oscillatory branch
DOS_MARGIN = 4.0

# nodes where q has decayed below this are excluded from ratio-type
# residual diagnostics (q'/q, R/q^2 are roundoff-dominated there)
_Q_FLOOR = 1e-4


@dataclass(frozen=True)
class PsiPair:
    """Lax-pair solution at one spectral parameter on the table grid.

    ``qf_integral`` tabulates I(x) = int_x^inf q f, from which
    g = -r_tilde * I / q.
    """

    r_tilde: float
    f: GridFunction
    g: GridFunction
    table: PainleveTable
    f_prime: GridFunction
    qf_integral: GridFunction


def solve_psi(r_tilde: float, table: PainleveTable,
              rel_tol: float = 1e-11) -> PsiPair:
    """Integrate the f equation downward from x_max and build g from the
    integral relation.

    Downward integration is the stable direction: the Bi-type admixture of
    the Airy seed decays relative to the Ai-type branch as x decreases.
    """
    grid = table.grid
    x_min, x_max = grid.x_min, grid.x_max
    if r_tilde > x_max - DOS_MARGIN:
        raise ValueError(
            f"r_tilde={r_tilde} leaves less than {DOS_MARGIN} of Airy decay "
            f"below x_max={x_max}; use a wider table")
    if r_tilde < -GAP_R_MAX:
        raise ValueError(
            f"gap branch limited to r_tilde >= -{GAP_R_MAX}: f underflows "
            "double precision; use the asymptotic formulas instead")

    qs = table.q.spline()

    def rhs(x, y):
        return [y[1], (x + 2.0 * qs(x) ** 2 - r_tilde) * y[0]]

    av = _airy.airy(x_max - r_tilde)
    seed = [SEED_AMPLITUDE * av.ai, SEED_AMPLITUDE * av.ai_prime]

    g_nodes = grid.nodes()
    _, y = integrate_ode(rhs, x_max, x_min, seed, rel_tol=rel_tol,
                         abs_tol=1e-300, t_eval=g_nodes[::-1])
    f = y[0][::-1].copy()
    fp = y[1][::-1].copy()

    qf = GridFunction(grid, table.q.values * f,
                      tail=AiryProductTail(0.0, r_tilde))
    I = cumulative_tail_integral(qf)

    g_vals = -r_tilde * I.values / table.q.values
    # zero-tail convention: g vanishes at the right end of the table
    g_vals[-1] = 0.0

    return PsiPair(r_tilde=r_tilde,
                   f=GridFunction(grid, f),
                   g=GridFunction(grid, g_vals),
                   table=table,
                   f_prime=GridFunction(grid, fp),
                   qf_integral=I)


def _diagnostic_window(table: PainleveTable) -> np.ndarray:
    q = table.q.values
    ok = q > _Q_FLOOR * np.max(q)
    ok[0] = ok[-1] = False
    return ok


def psi_residuals(psi: PsiPair) -> dict:
    """Per-node residual diagnostics for one PsiPair:

    - ``schrod``: f'' - (x + 2q^2 - r) f  (second-difference form)
    - ``fg_relation``: q g + r int_x^inf q f
    - ``conserved``: d/dx [ (r + R/q^2) f^2 - 2 (q'/q) f g
      + (1 + q^2/r) g^2 ] + f^2  (the conserved combination; r != 0)

    Ratio-type quantities are evaluated only where q is comfortably above
    underflow; residuals are max-norms over that window.
    """
    table = psi.table
    g_nodes = table.grid.nodes()
    h = table.grid.h
    q, R = table.q.values, table.R.values
    qp = table.q_prime.values
    f, gv = psi.f.values, psi.g.values
    r = psi.r_tilde

    # fourth-order five-point second derivative so the stencil truncation
    # error stays well below the 1e-5 residual scale
    fdd = (-f[4:] + 16.0 * f[3:-1] - 30.0 * f[2:-2] + 16.0 * f[1:-3]
           - f[:-4]) / (12.0 * h**2)
    schrod = fdd - (g_nodes[2:-2] + 2.0 * q[2:-2] ** 2 - r) * f[2:-2]
    scale = max(1.0, float(np.max(np.abs(f))))

    fg = q * gv + r * psi.qf_integral.values

    out = {
        "schrod": float(np.max(np.abs(schrod))) / scale,
        "fg_relation": float(np.max(np.abs(fg))) / scale,
        "g_at_xmax": float(abs(gv[-1])),
    }

    if r != 0.0:
        ok = _diagnostic_window(table)
        combo = ((r + R / q**2) * f**2 - 2.0 * (qp / q) * f * gv
                 + (1.0 + q**2 / r) * gv**2)
        combo_gf = GridFunction(table.grid,
                                np.where(np.isfinite(combo), combo, 0.0))
        dcombo = combo_gf.derivative().values
        res = dcombo + f * f
        out["conserved"] = float(np.max(np.abs(res[ok]))) / scale**2
    return out


def small_r_expansion(table: PainleveTable):
    """Coefficient functions of f(r, x) = f0(x) + r f1(x) + r^2 f2(x) + ...

    f0 = 2^(-1/6) sqrt(pi) q
    f1 = -2^(-1/6) sqrt(pi) (q' + q R)
    f2 = 2^(-7/6) sqrt(pi) (q'^2/q + q' R - R/q - q^3/2 + q R^2 / 2)
    """
    q, qp, R = table.q.values, table.q_prime.values, table.R.values
    c = SEED_AMPLITUDE
    f0 = c * q
    f1 = -c * (qp + q * R)
    f2 = 0.5 * c * (qp**2 / q + qp * R - R / q - q**3 / 2.0 + q * R**2 / 2.0)
    mk = lambda v: GridFunction(table.grid, v)
    return mk(f0), mk(f1), mk(f2)


def lax_residuals(psi: PsiPair, psi_shifted: PsiPair) -> dict:
    """Max-norm residuals of the two linear systems the pair satisfies.

    x-system (checked exactly, node by node):
        df/dx = (q'/q) f - g
        dg/dx = r f - (q'/q) g
    r-system (d/dr via finite difference between the two solves):
        df/dr = -(q'/q) f + (1 + q^2/r) g
        dg/dr = (-r - R/q^2) f + (q'/q) g
    """
    if psi.table is not psi_shifted.table:
        raise ValueError("both pairs must live on the same table")
    r = psi.r_tilde
    delta = psi_shifted.r_tilde - r
    if r == 0.0:
        raise ValueError("r-system coefficients are singular at r = 0")

    table = psi.table
    ok = _diagnostic_window(table)
    q, qp, R = table.q.values, table.q_prime.values, table.R.values
    f, gv = psi.f.values, psi.g.values
    fp = psi.f_prime.values
    gp = psi.g.derivative().values
    scale = max(1.0, float(np.max(np.abs(f))))

    res_bf = fp - (qp / q) * f + gv
    res_bg = gp - r * f + (qp / q) * gv
    b_res = max(np.max(np.abs(res_bf[ok])), np.max(np.abs(res_bg[ok])))

    # centered difference: the mirror pair at r - delta is solved here
    psi_minus = solve_psi(r - delta, table)
    dfdr = (psi_shifted.f.values - psi_minus.f.values) / (2.0 * delta)
    dgdr = (psi_shifted.g.values - psi_minus.g.values) / (2.0 * delta)
    res_af = dfdr + (qp / q) * f - (1.0 + q**2 / r) * gv
    res_ag = dgdr - (-r - R / q**2) * f - (qp / q) * gv
    a_res = max(np.max(np.abs(res_af[ok])), np.max(np.abs(res_ag[ok])))

    return {"b_residual": float(b_res) / scale,
            "a_residual": float(a_res) / scale}
