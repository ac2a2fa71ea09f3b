"""Linearized flow around a background solution, and its quadratic energies.

The linearization of the (W, Q) system is written in the variables
(w, r = q - R w), which diagonalize the leading order:

    (d_t + M_bu d_alpha) w + P[r_a/(1+bW bar)] + P[R_a w/(1+bW bar)] = P Gu
    (d_t + M_bu d_alpha) r + i c r - i P[(g+au) w/(1+bW)]            = P Ku

with source terms Gu = G - i(c/2) G1, Ku = K - i(c/2) K1 built from the
auxiliary combinations m, m1, m2, n of the background and the linearized
state. At zero background the system reduces exactly to the linear model
w_t + r_a = 0, r_t + i c r - i g w = 0.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .spectral import SpectralField, derivative, grid_integral, project_P, project_Pbar
from .state import WaveState, auxiliary_fields, control_norms, to_diagonal
from .evolution import RhsFull, _holo_cleanup, rhs_full


@dataclass(frozen=True)
class LinearizedState:
    """Holomorphic linearized pair (w, r), r = q - R w."""

    w: SpectralField
    r: SpectralField


@dataclass(frozen=True)
class Background:
    """A wave state with its diagonal variables and auxiliary fields."""

    s: WaveState
    d: object
    aux: object


def background(s, p):
    d = to_diagonal(s, p)
    return Background(s, d, auxiliary_fields(s, p, d))


@dataclass(frozen=True)
class LinSources:
    """Projected sources P Gu, P Ku and their quadratic (in background) parts."""

    Gu: SpectralField
    Ku: SpectralField
    PG2: SpectralField
    PK2: SpectralField
    PG2_1: SpectralField
    PK2_1: SpectralField


def _source_fields(l, bg, p):
    """P Gu and P Ku from the auxiliary variables m, m1, m2, n."""
    d = bg.d
    W = bg.s.W
    w, r = l.w, l.r
    recip = d.inv1pW
    recip_sq = recip * recip
    core = (derivative(r) + derivative(d.R) * w) * recip  # linearized R
    n = d.R.conj() * core
    m = core * recip.conj() + d.R.conj() * derivative(w) * recip_sq
    m1 = w * recip.conj() - W.conj() * derivative(w) * recip_sq
    m2 = d.R.conj() * w - W.conj() * core
    G = (1.0 + d.Wd) * (project_P(m.conj()) + project_Pbar(m))
    G1 = -(1.0 + d.Wd) * (project_P(m1.conj()) - project_Pbar(m1)) + (
        (d.Wd.conj() - d.Wd) * w * recip.conj()
    )
    K = project_Pbar(n) - project_P(n.conj())
    K1 = project_P(m2.conj()) + project_Pbar(m2)
    Gu = project_P(G - 0.5j * p.c * G1)
    Ku = project_P(K - 0.5j * p.c * K1)
    return Gu, Ku


def lin_sources(l, bg, p):
    """Full projected sources and their quadratic parts.

    PG2   = -P[bW conj(r)_a] + P[R conj(w)_a]
    PK2   = -P[R conj(r)_a]
    PG2_1 =  P[bW conj(w)] + P[W conj(w)_a] + P[bW bar w] - P[bW w]
    PK2_1 =  P[W conj(r)_a] - P[R conj(w)]
    """
    d = bg.d
    W = bg.s.W
    w, r = l.w, l.r
    Gu, Ku = _source_fields(l, bg, p)
    PG2 = -project_P(d.Wd * derivative(r.conj())) + project_P(d.R * derivative(w.conj()))
    PK2 = -project_P(d.R * derivative(r.conj()))
    PG2_1 = (
        project_P(d.Wd * w.conj())
        + project_P(W * derivative(w.conj()))
        + project_P(d.Wd.conj() * w)
        - project_P(d.Wd * w)
    )
    PK2_1 = project_P(W * derivative(r.conj())) - project_P(d.R * w.conj())
    return LinSources(Gu, Ku, PG2, PK2, PG2_1, PK2_1)


def rhs_linearized(l, bg, p):
    """(dw, dr) of the linearized flow around bg."""
    d, aux = bg.d, bg.aux
    w, r = l.w, l.r
    recip = d.inv1pW
    Gu, Ku = _source_fields(l, bg, p)
    dw = (
        -project_P(aux.bu * derivative(w))
        - project_P(derivative(r) * recip.conj())
        - project_P(derivative(d.R) * w * recip.conj())
        + Gu
    )
    dr = (
        -project_P(aux.bu * derivative(r))
        - 1j * p.c * r
        + 1j * project_P((p.g + aux.au) * w * recip)
        + Ku
    )
    return _holo_cleanup(dw), _holo_cleanup(dr)


def energy_lin2(l, bg, p, pad=4):
    """E2 = integral (g+au) |w|^2 + Im(r conj(r)_a) dalpha."""
    au = bg.aux.au.values(pad).real
    wv = l.w.values(pad)
    rv = l.r.values(pad)
    rav = derivative(l.r).values(pad)
    dens = (p.g + au) * np.abs(wv) ** 2 + (rv * np.conj(rav)).imag
    return float(grid_integral(l.w.domain, dens))


def energy_lin3(l, bg, p, pad=4):
    """E3 = E2 + integral 2 Im(R bar w r_a) - 2g Re(bW bar w^2) dalpha.

    Cubic-corrected linearized energy; intended for backgrounds with Au <= 0.2
    (a warning is emitted beyond that).
    """
    Au = control_norms(bg.d, p, W=bg.s.W).Au
    if Au > 0.2:
        warnings.warn(f"energy_lin3 called with Au = {Au:.3f} > 0.2")
    Rv = bg.d.R.values(pad)
    Wdv = bg.d.Wd.values(pad)
    wv = l.w.values(pad)
    rav = derivative(l.r).values(pad)
    dens = 2.0 * (np.conj(Rv) * wv * rav).imag - 2.0 * p.g * (np.conj(Wdv) * wv * wv).real
    return energy_lin2(l, bg, p, pad=pad) + float(grid_integral(l.w.domain, dens))


def evolve_pair(l, s, p, T, dt, scheme="rk4"):
    """Advance (linearized, background) jointly with stage-consistent backgrounds.

    Uses the classical four-stage scheme on the coupled system, evaluating the
    linearized right hand side at the matching internal background stages; this
    is required for clean finite-difference/tangent comparisons.
    """
    if scheme != "rk4":
        raise ValueError("lockstep evolution supports only the rk4 scheme")
    nsteps = max(1, int(np.ceil(T / dt - 1e-12)))
    dt = T / nsteps

    def f(si, li):
        ds = rhs_full(si, p)
        dl = rhs_linearized(li, background(si, p), p)
        return ds, dl

    for _ in range(nsteps):
        k1s, k1l = f(s, l)
        s2 = _stage(s, k1s, 0.5 * dt)
        l2 = _lstage(l, k1l, 0.5 * dt)
        k2s, k2l = f(s2, l2)
        s3 = _stage(s, k2s, 0.5 * dt)
        l3 = _lstage(l, k2l, 0.5 * dt)
        k3s, k3l = f(s3, l3)
        s4 = _stage(s, k3s, dt)
        l4 = _lstage(l, k3l, dt)
        k4s, k4l = f(s4, l4)
        dW = (k1s.dW + 2.0 * k2s.dW + 2.0 * k3s.dW + k4s.dW) / 6.0
        dQ = (k1s.dQ + 2.0 * k2s.dQ + 2.0 * k3s.dQ + k4s.dQ) / 6.0
        dw = (k1l[0] + 2.0 * k2l[0] + 2.0 * k3l[0] + k4l[0]) / 6.0
        dr = (k1l[1] + 2.0 * k2l[1] + 2.0 * k3l[1] + k4l[1]) / 6.0
        s = _stage(s, RhsFull(dW, dQ), dt)
        l = _lstage(l, (dw, dr), dt)
    return l, s


def _stage(s, rhs, dt):
    return WaveState(
        _holo_cleanup(s.W + dt * rhs.dW), _holo_cleanup(s.Q + dt * rhs.dQ), s.t + dt
    )


def _lstage(l, dl, dt):
    return LinearizedState(
        _holo_cleanup(l.w + dt * dl[0]), _holo_cleanup(l.r + dt * dl[1])
    )
