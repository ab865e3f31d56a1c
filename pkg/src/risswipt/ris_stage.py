"""RIS coefficient stage: lifted SDP with a rank-one penalty solved by SCA.

With the beamformers fixed, every received amplitude is affine in the RIS
vector.  Writing ``v = conj(theta)`` and ``v~ = [v; 1]``,

    h_k^H w_j = v^H b_kj + a_kj,   |h_k^H w_j|^2 = v~^H S_kj v~ + |a_kj|^2,

so all constraints are linear in ``T = v~ v~^H``.  The rank-one requirement is
enforced through the penalty ``Tr(T) - lambda_max(T)``, whose concave part is
linearized at the previous iterate.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import conic
from .bf_stage import StageInfeasible, required_input_w
from .metrics import BfSolution, RisVector
from .scene import ChannelSet, Scenario

log = logging.getLogger(__name__)

MAX_SCA_ITERS = 50
RANK_TOL = 1e-4


class ExtractionError(RuntimeError):
    pass


@dataclass
class LiftedData:
    a: np.ndarray        # (K, K), a[k, i] = h_{b,k}^H w_i
    b: np.ndarray        # (K, K, N), b[k, i] = conj(h_{r,k}) * (G w_i)
    S: np.ndarray        # (K, K, N+1, N+1)
    Qt: np.ndarray       # (K, N+1, N+1), zero-padded diag(|G w_i|^2)
    Zt: np.ndarray       # (K, N+1, N+1), zero-padded diag(|h_{r,k}|^2)

    @property
    def N(self) -> int:
        return self.b.shape[2]

    @property
    def K(self) -> int:
        return self.a.shape[0]


def lift(ch: ChannelSet, sol: BfSolution, scn: Scenario) -> LiftedData:
    ch.check(scn)
    K, N = scn.K, scn.N
    W = sol.w                                   # (K, M)
    a = ch.h_b.conj() @ W.T                     # [k, i]
    Gw = ch.G @ W.T                             # (N, K), column i = G w_i
    b = ch.h_r.conj()[:, None, :] * Gw.T[None, :, :]
    S = np.zeros((K, K, N + 1, N + 1), dtype=complex)
    S[:, :, :N, :N] = b[..., :, None] * b[..., None, :].conj()
    S[:, :, :N, N] = b * a.conj()[..., None]
    S[:, :, N, :N] = b.conj() * a[..., None]
    Qt = np.zeros((K, N + 1, N + 1))
    Zt = np.zeros((K, N + 1, N + 1))
    idx = np.arange(N)
    Qt[:, idx, idx] = np.abs(Gw.T) ** 2
    Zt[:, idx, idx] = np.abs(ch.h_r) ** 2
    return LiftedData(a=a, b=b, S=S, Qt=Qt, Zt=Zt)


def lift_vector(theta: RisVector) -> np.ndarray:
    return np.concatenate([theta.lifted(), [1.0]])


def lift_matrix(theta: RisVector) -> np.ndarray:
    v = lift_vector(theta)
    return np.outer(v, v.conj())


def extract_theta(T: np.ndarray, active: bool = True) -> RisVector:
    v, _ = conic.evd_rank1(T)
    if v.size == 0 or abs(v[-1]) < 1e-9:
        raise ExtractionError("lifted constant entry is degenerate")
    return RisVector.from_lifted(v[:-1] / v[-1], active=active)


def rank_gap(T: np.ndarray) -> tuple[float, float]:
    """(Tr(T) - lambda_max(T), the same relative to lambda_max)."""
    lam = np.linalg.eigvalsh(0.5 * (T + T.conj().T))
    gap = float(np.sum(lam) - lam[-1])
    return gap, gap / max(lam[-1], 1e-300)


def build_p7(ld: LiftedData, scn: Scenario, T_ref: np.ndarray, sol: BfSolution,
             passive: bool = False) -> conic.SdpProblem:
    """Penalized, slack-augmented SDP linearized at ``T_ref``.

    Residual slacks are relative margins: ``tau_k`` scales the SINR noise
    floor and ``Delta_k`` the required EH input power.
    """
    K, N = ld.K, ld.N
    n = N + 1
    gamma = np.asarray(scn.gamma)
    sigma2, delta2, eta = map(np.asarray, (scn.sigma2, scn.delta2, scn.eta))
    rho = sol.rho
    q = required_input_w(scn)
    sv2 = 0.0 if passive else scn.sigma2_v
    a2 = np.abs(ld.a) ** 2

    # S_kj = s_kj s_kj^H - |a_kj|^2 e e^T with s_kj = [b_kj; a_kj]
    svec = np.concatenate([ld.b, ld.a[..., None]], axis=2)          # (K, K, n)
    zt = np.concatenate([np.abs(ld.Zt.diagonal(axis1=1, axis2=2)[:, :N]), np.zeros((K, 1))], axis=1)
    corner_d = np.zeros(n)
    corner_d[N] = 1.0

    p = conic.SdpProblem()
    T = p.add_block("T", n)
    obj_s = {}
    for k in range(K):
        noise = sigma2[k] + delta2[k] / rho[k]
        if gamma[k] > 0:
            tau = p.add_scalar(f"tau{k}")
            obj_s[tau] = -scn.alpha
            others = [j for j in range(K) if j != k]
            wts = np.array([1.0 / gamma[k] if j == k else -1.0 for j in range(K)])
            d = -sv2 * zt[k] - (wts @ a2[k]) * corner_d
            A = conic.LowRank(svec[k].T, wts, d)
            rhs = noise - a2[k, k] / gamma[k] + a2[k, others].sum()
            p.add_constraint({T: A}, {tau: -noise}, ">=", rhs, label=f"sinr{k}")
        if q[k] > 0:
            dl = p.add_scalar(f"Delta{k}")
            obj_s[dl] = -scn.beta
            c = eta[k] * (1 - rho[k])
            A = conic.LowRank(svec[k].T, np.full(K, c), c * sv2 * zt[k] - c * a2[k].sum() * corner_d)
            p.add_constraint({T: A}, {dl: -q[k]}, ">=", q[k] - c * a2[k].sum(), label=f"eh{k}")

    if passive:
        for i in range(n):
            p.add_constraint({T: conic.LowRank.diag(np.eye(n)[i])}, sense="==", rhs=1.0, label=f"unit{i}")
    else:
        p.add_constraint({T: conic.LowRank.diag(corner_d)}, sense="==", rhs=1.0, label="corner")
        r = ld.Qt.diagonal(axis1=1, axis2=2).sum(axis=0) + sv2 * (1.0 - corner_d)
        p.add_constraint({T: conic.LowRank.diag(r)}, sense="<=", rhs=scn.p_max, label="reflect")

    _, U = np.linalg.eigh(0.5 * (T_ref + T_ref.conj().T))
    u1 = U[:, -1:]
    w = 1.0 / (2 * scn.mu)
    p.set_objective(blocks={T: conic.LowRank(u1, [-w], np.full(n, w))}, scalars=obj_s)
    return p


def relaxed_start(ld: LiftedData, scn: Scenario, sol: BfSolution, passive: bool = False,
                  settings: conic.SolverSettings | None = None) -> np.ndarray:
    """Margin-maximizing relaxation without the rank penalty; used as the SCA start."""
    p = build_p7(ld, scn, np.eye(ld.N + 1), sol, passive)
    p.obj_blocks = {}
    res = conic.solve(p, settings)
    if res.status == conic.INFEASIBLE:
        raise StageInfeasible("RIS stage infeasible", [("ris", None)], res.residuals)
    if res.status != conic.OPTIMAL:
        raise StageInfeasible(f"RIS relaxation solver failure: {res.residuals}", [], res.residuals)
    return res.blocks["T"]


def true_objective(T, slacks: dict, scn: Scenario) -> float:
    """Penalized objective with the exact spectral norm (what SCA decreases)."""
    gap, _ = rank_gap(T)
    s = sum((scn.alpha if k.startswith("tau") else scn.beta) * v for k, v in slacks.items())
    return gap / (2 * scn.mu) - s


@dataclass
class IppaResult:
    T: np.ndarray
    theta: RisVector | None
    tau: np.ndarray
    Delta: np.ndarray
    penalty_history: list = field(default_factory=list)
    objective_history: list = field(default_factory=list)
    iterations: int = 0
    converged: bool = False
    rank_residual: float = np.inf
    info: dict = field(default_factory=dict)


def ippa(ld: LiftedData, scn: Scenario, T0: np.ndarray, sol: BfSolution,
         passive: bool = False, max_iters: int = MAX_SCA_ITERS,
         settings: conic.SolverSettings | None = None) -> IppaResult:
    """SCA loop on the penalized lifted problem, started from ``T0``."""
    K = ld.K
    T_ref = np.asarray(T0)
    f_prev = None
    pen_hist, obj_hist = [], []
    best = None
    converged = False
    it = 0
    for it in range(1, max_iters + 1):
        prob = build_p7(ld, scn, T_ref, sol, passive)
        res = conic.solve(prob, settings)
        if res.status == conic.INFEASIBLE:
            raise StageInfeasible("RIS stage infeasible", [("ris", None)], res.residuals)
        if res.status != conic.OPTIMAL:
            if best is None:
                raise StageInfeasible(f"RIS stage solver failure: {res.residuals}", [], res.residuals)
            log.warning("SCA step %d failed (%s); keeping previous iterate", it, res.residuals.get("solver_status"))
            break
        T = res.blocks["T"]
        gap, rel = rank_gap(T)
        pen_hist.append(gap)
        f3 = res.objective
        obj_hist.append(f3)
        best = (T, res.scalars, rel)
        if f_prev is not None:
            change = abs(f3 - f_prev) / max(abs(f_prev), 1e-12)
            if change < scn.zeta and rel <= RANK_TOL:
                converged = True
                break
        f_prev = f3
        T_ref = T
    T, slacks, rel = best
    tau = np.array([slacks.get(f"tau{k}", 0.0) for k in range(K)])
    Delta = np.array([slacks.get(f"Delta{k}", 0.0) for k in range(K)])
    try:
        theta = extract_theta(T, active=not passive)
    except ExtractionError:
        theta = None
    if passive and theta is not None:
        theta = RisVector(np.exp(1j * np.angle(theta.theta)), active=False)
    return IppaResult(T=T, theta=theta, tau=tau, Delta=Delta, penalty_history=pen_hist,
                      objective_history=obj_hist, iterations=it, converged=converged,
                      rank_residual=rel)
