"""Beamformer / power-splitting stage for a fixed RIS configuration.

Solves the lifted problem over W_k = w_k w_k^H and rho_k jointly.  The
``delta^2 / rho`` term of the SINR constraint and the ``1 / (1 - rho)`` factor
of the EH constraint are written with 2x2 PSD blocks

    [[t, 1], [1, rho]] >= 0      (t >= 1 / rho)
    [[s, 1], [1, 1 - rho]] >= 0  (s >= 1 / (1 - rho))

which keeps the whole stage a single SDP.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import conic
from .eh import EhModel
from .metrics import BfSolution, RisVector, effective_channels
from .scene import ChannelSet, Scenario

RHO_MIN = 1e-4
RANK_TOL = 1e-6

_E00 = np.array([[1.0, 0.0], [0.0, 0.0]])
_E11 = np.array([[0.0, 0.0], [0.0, 1.0]])
_E01 = np.array([[0.0, 0.5], [0.5, 0.0]])


class StageInfeasible(RuntimeError):
    def __init__(self, msg: str, which: list | None = None, info: dict | None = None):
        super().__init__(msg)
        self.which = which or []
        self.info = info or {}


def required_input_w(scn: Scenario) -> np.ndarray:
    """EH input power (W) needed per user for its target."""
    return np.asarray(EhModel.from_scenario(scn).required_input(np.asarray(scn.e))) * 1e-3


def ris_noise_terms(ch: ChannelSet, theta: RisVector, scn: Scenario) -> np.ndarray:
    if not theta.active or theta.N == 0:
        return np.zeros(scn.K)
    return scn.sigma2_v * (np.abs(ch.h_r) ** 2 @ np.abs(theta.theta) ** 2)


@dataclass
class P3Result:
    W: list
    w: np.ndarray
    rho: np.ndarray
    objective: float
    rank_residual: np.ndarray
    status: str
    fallback: bool = False
    info: dict = field(default_factory=dict)

    @property
    def solution(self) -> BfSolution:
        return BfSolution(self.w, self.rho)


def build_p3(ch: ChannelSet, theta: RisVector, scn: Scenario, rho_fixed=None,
             directions=None) -> conic.SdpProblem:
    """Assemble the stage SDP.

    ``rho_fixed`` freezes the splitting ratios (random-rho baselines).
    ``directions`` (K, M) restricts W_k to p_k u_k u_k^H with scalar p_k >= 0.
    """
    ch.check(scn)
    M, K = scn.M, scn.K
    H = effective_channels(ch, theta)
    Hk = [np.outer(H[k], H[k].conj()) for k in range(K)]
    gamma = np.asarray(scn.gamma)
    delta2, sigma2, eta = map(np.asarray, (scn.delta2, scn.sigma2, scn.eta))
    q = required_input_w(scn)
    vn = ris_noise_terms(ch, theta, scn)

    p = conic.SdpProblem()
    if directions is None:
        wvars = [p.add_block(f"W{k}", M) for k in range(K)]
    else:
        U = np.asarray(directions)
        U = U / np.maximum(np.linalg.norm(U, axis=1, keepdims=True), 1e-300)
        wvars = [p.add_scalar(f"p{k}") for k in range(K)]

    def quad(A, i):
        """<A, W_i> as a (blocks, scalars) contribution."""
        if directions is None:
            return {wvars[i]: A}, {}
        return {}, {wvars[i]: float(np.real(U[i].conj() @ A @ U[i]))}

    def combine(parts):
        blocks, scalars = {}, {}
        for b, s in parts:
            for n, A in b.items():
                blocks[n] = blocks.get(n, 0) + A
            for n, a in s.items():
                scalars[n] = scalars.get(n, 0.0) + a
        return blocks, scalars

    if directions is None:
        p.set_objective(blocks={wv: np.eye(M) for wv in wvars})
    else:
        p.set_objective(scalars={wv: 1.0 for wv in wvars})

    free_rho = rho_fixed is None
    for k in range(K):
        has_sinr = gamma[k] > 0
        has_eh = q[k] > 0
        if free_rho:
            if has_sinr:
                R = p.add_block(f"R{k}", 2, hermitian=False)
                p.add_constraint({R: _E01}, sense="==", rhs=1.0, label=f"R{k}-link")
                p.add_constraint({R: _E11}, sense=">=", rhs=RHO_MIN, label=f"rho{k}-min")
            if has_eh:
                E = p.add_block(f"E{k}", 2, hermitian=False)
                p.add_constraint({E: _E01}, sense="==", rhs=1.0, label=f"E{k}-link")
                p.add_constraint({E: _E11}, sense=">=", rhs=RHO_MIN, label=f"rho{k}-max")
            if has_sinr and has_eh:
                p.add_constraint({R: _E11, E: _E11}, sense="==", rhs=1.0, label=f"rho{k}-sum")
            elif has_sinr:
                p.add_constraint({R: _E11}, sense="<=", rhs=1 - RHO_MIN, label=f"rho{k}-max")
        if has_sinr:
            parts = [quad(Hk[k] / gamma[k], k)] + [quad(-Hk[k], i) for i in range(K) if i != k]
            blocks, scalars = combine(parts)
            rhs = sigma2[k] + vn[k]
            if free_rho:
                blocks[f"R{k}"] = -delta2[k] * _E00
            else:
                rhs += delta2[k] / rho_fixed[k]
            p.add_constraint(blocks, scalars, ">=", rhs, label=f"sinr{k}")
        if has_eh:
            blocks, scalars = combine([quad(Hk[k], i) for i in range(K)])
            if free_rho:
                blocks[f"E{k}"] = -(q[k] / eta[k]) * _E00
                rhs = -vn[k]
            else:
                rhs = q[k] / (eta[k] * (1 - rho_fixed[k])) - vn[k]
            p.add_constraint(blocks, scalars, ">=", rhs, label=f"eh{k}")

    if theta.active and theta.N > 0:
        t2 = np.abs(theta.theta) ** 2
        Qr = ch.G.conj().T @ (t2[:, None] * ch.G)
        Qr = 0.5 * (Qr + Qr.conj().T)
        blocks, scalars = combine([quad(Qr, i) for i in range(K)])
        p.add_constraint(blocks, scalars, "<=", scn.p_max - scn.sigma2_v * t2.sum(), label="reflect")
    return p


def _rho_from(sol: conic.SdpSolution, scn: Scenario, rho_fixed) -> np.ndarray:
    if rho_fixed is not None:
        return np.asarray(rho_fixed, dtype=float)
    rho = np.full(scn.K, 0.5)
    for k in range(scn.K):
        if f"R{k}" in sol.blocks:
            rho[k] = sol.blocks[f"R{k}"][1, 1]
        elif f"E{k}" in sol.blocks:
            rho[k] = 1.0 - sol.blocks[f"E{k}"][1, 1]
    return np.clip(rho, RHO_MIN, 1 - RHO_MIN)


def _diagnose(ch, theta, scn) -> list:
    H = effective_channels(ch, theta)
    q = required_input_w(scn)
    tiny = 1e-30 * max(1.0, np.max(np.abs(H)) ** 2)
    which = []
    for k in range(scn.K):
        if np.linalg.norm(H[k]) ** 2 <= tiny:
            if scn.gamma[k] > 0:
                which.append(("sinr", k))
            if q[k] > 0:
                which.append(("eh", k))
    return which or [("reflect", None)]


def solve_p3(ch: ChannelSet, theta: RisVector, scn: Scenario, rho_fixed=None,
             settings: conic.SolverSettings | None = None) -> P3Result:
    prob = build_p3(ch, theta, scn, rho_fixed)
    sol = conic.solve(prob, settings)
    if sol.status == conic.INFEASIBLE:
        which = _diagnose(ch, theta, scn)
        raise StageInfeasible(f"beamforming stage infeasible: {which}", which, sol.residuals)
    if sol.status != conic.OPTIMAL:
        raise StageInfeasible(f"beamforming stage solver failure: {sol.residuals}", [], sol.residuals)
    K, M = scn.K, scn.M
    W = [sol.blocks[f"W{k}"] for k in range(K)]
    w = np.zeros((K, M), dtype=complex)
    resid = np.zeros(K)
    for k in range(K):
        w[k], resid[k] = conic.evd_rank1(W[k])
    rho = _rho_from(sol, scn, rho_fixed)
    info = {"solver": sol.residuals}
    fallback = bool(np.any(resid > RANK_TOL))
    objective = sol.objective
    if fallback:
        # keep the dominant directions, re-optimize powers and rho
        prob2 = build_p3(ch, theta, scn, rho_fixed, directions=w)
        sol2 = conic.solve(prob2, settings)
        info["fallback_solver"] = sol2.residuals
        if sol2.status == conic.OPTIMAL:
            nrm = np.maximum(np.linalg.norm(w, axis=1), 1e-300)
            w = w / nrm[:, None] * np.sqrt(np.clip([sol2.scalars[f"p{k}"] for k in range(K)], 0, None))[:, None]
            rho = _rho_from(sol2, scn, rho_fixed)
            objective = sol2.objective
    return P3Result(W=W, w=w, rho=rho, objective=float(objective), rank_residual=resid,
                    status=sol.status, fallback=fallback, info=info)
