"""SINR, harvested power and power bookkeeping for a candidate design.

All evaluations work on the raw (unlifted) channels and vectors so they can
audit any solver output independently of the relaxations used to find it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .eh import EhModel
from .scene import ChannelSet, Scenario


@dataclass
class RisVector:
    """Reflection coefficients ``p_n e^{j theta_n}`` (the diagonal of the RIS matrix).

    ``active=False`` marks a passive (or absent) surface: no amplifier noise
    and no reflect-power budget.
    """

    theta: np.ndarray
    active: bool = True

    def __post_init__(self):
        self.theta = np.asarray(self.theta, dtype=complex).reshape(-1)
        if not np.all(np.isfinite(self.theta)):
            raise ValueError("non-finite RIS coefficients")

    @property
    def N(self) -> int:
        return self.theta.size

    def lifted(self) -> np.ndarray:
        """Vector used in the lifted quadratic forms: conj(theta)."""
        return self.theta.conj()

    @classmethod
    def zeros(cls, N: int, active: bool = False) -> "RisVector":
        return cls(np.zeros(N, dtype=complex), active=active)

    @classmethod
    def from_lifted(cls, v, active: bool = True) -> "RisVector":
        return cls(np.asarray(v).conj(), active=active)


@dataclass
class BfSolution:
    w: np.ndarray          # (K, M); row k is the beamformer of user k
    rho: np.ndarray        # (K,), power-splitting ratio in (0, 1)

    def __post_init__(self):
        self.w = np.atleast_2d(np.asarray(self.w, dtype=complex))
        self.rho = np.asarray(self.rho, dtype=float).reshape(-1)

    @property
    def bs_power(self) -> float:
        return float(np.sum(np.abs(self.w) ** 2))


def effective_channel(ch: ChannelSet, theta: RisVector, k: int) -> np.ndarray:
    """h_k with h_k^H = h_{r,k}^H diag(theta) G + h_{b,k}^H."""
    if theta.N != ch.G.shape[0]:
        raise ValueError(f"RIS vector has {theta.N} entries, channel has {ch.G.shape[0]}")
    if theta.N == 0:
        return ch.h_b[k].copy()
    return ch.G.conj().T @ (theta.theta.conj() * ch.h_r[k]) + ch.h_b[k]


def effective_channels(ch: ChannelSet, theta: RisVector) -> np.ndarray:
    """All effective channels stacked as rows, shape (K, M)."""
    return np.stack([effective_channel(ch, theta, k) for k in range(ch.h_b.shape[0])])


def ris_noise(ch: ChannelSet, theta: RisVector, scn: Scenario) -> np.ndarray:
    """Per-user amplified RIS noise sigma_v^2 ||h_{r,k}^H diag(theta)||^2."""
    if not theta.active or theta.N == 0:
        return np.zeros(ch.h_b.shape[0])
    return scn.sigma2_v * (np.abs(ch.h_r) ** 2 @ np.abs(theta.theta) ** 2)


def gains(ch: ChannelSet, theta: RisVector, sol: BfSolution) -> np.ndarray:
    """|h_k^H w_i|^2 as a (K, K) array indexed [k, i]."""
    H = effective_channels(ch, theta)
    return np.abs(H.conj() @ sol.w.T) ** 2


def _check_rho(rho):
    if np.any(rho <= 0) or np.any(rho >= 1):
        raise ValueError("power-splitting ratios must lie in (0, 1)")


def sinr(ch, theta: RisVector, sol: BfSolution, scn: Scenario, k: int | None = None):
    """Received SINR (linear); all users when ``k`` is None."""
    _check_rho(sol.rho)
    g = gains(ch, theta, sol)
    sig = np.diag(g)
    interf = g.sum(axis=1) - sig
    noise = ris_noise(ch, theta, scn) + np.asarray(scn.sigma2) + np.asarray(scn.delta2) / sol.rho
    out = sig / (interf + noise)
    return out if k is None else float(out[k])


def eh_input_power(ch, theta: RisVector, sol: BfSolution, scn: Scenario) -> np.ndarray:
    """Linear power (W) reaching each EH branch."""
    g = gains(ch, theta, sol)
    total = g.sum(axis=1) + ris_noise(ch, theta, scn)
    return np.asarray(scn.eta) * (1.0 - sol.rho) * total


def harvested(ch, theta: RisVector, sol: BfSolution, scn: Scenario, k: int | None = None):
    """Harvested power after the nonlinear EH model, in mW."""
    p_in_mw = np.clip(eh_input_power(ch, theta, sol, scn), 0.0, None) * 1e3
    out = np.asarray(EhModel.from_scenario(scn).harvest(p_in_mw))
    return out if k is None else float(out[k])


def reflect_power(ch, theta: RisVector, sol: BfSolution, scn: Scenario) -> float:
    """Output power of the RIS amplifiers (W); zero for a passive surface."""
    if theta.N == 0 or not theta.active:
        return 0.0
    t2 = np.abs(theta.theta) ** 2
    gw2 = np.abs(ch.G @ sol.w.T) ** 2          # (N, K)
    return float(t2 @ gw2.sum(axis=1) + scn.sigma2_v * t2.sum())


def total_power(ch, theta: RisVector, sol: BfSolution, scn: Scenario) -> float:
    return sol.bs_power + reflect_power(ch, theta, sol, scn)


@dataclass
class Audit:
    sinr: np.ndarray
    harvested_mw: np.ndarray
    reflect_w: float
    sinr_ok: bool
    eh_ok: bool
    reflect_ok: bool
    sinr_margin: np.ndarray = field(repr=False)
    eh_margin: np.ndarray = field(repr=False)

    @property
    def ok(self) -> bool:
        return self.sinr_ok and self.eh_ok and self.reflect_ok

    @property
    def flags(self) -> dict:
        return {"sinr": self.sinr_ok, "eh": self.eh_ok, "reflect": self.reflect_ok}


def audit(ch, theta: RisVector, sol: BfSolution, scn: Scenario,
          rel_tol: float = 1e-4, reflect_tol: float = 1e-6) -> Audit:
    """Feasibility check of a design against the raw constraints.

    Margins are relative: ``sinr / gamma - 1`` and ``harvested / e - 1``
    (``inf`` where the requirement is zero).
    """
    s = sinr(ch, theta, sol, scn)
    h = harvested(ch, theta, sol, scn)
    r = reflect_power(ch, theta, sol, scn)
    g, e = np.asarray(scn.gamma), np.asarray(scn.e)
    with np.errstate(divide="ignore", invalid="ignore"):
        sm = np.where(g > 0, s / np.where(g > 0, g, 1) - 1, np.inf)
        em = np.where(e > 0, h / np.where(e > 0, e, 1) - 1, np.inf)
    return Audit(
        sinr=s, harvested_mw=h, reflect_w=r,
        sinr_ok=bool(np.all(s >= g * (1 - rel_tol))),
        eh_ok=bool(np.all(h >= e * (1 - rel_tol))),
        reflect_ok=bool(not theta.active or r <= scn.p_max * (1 + reflect_tol)),
        sinr_margin=sm, eh_margin=em,
    )
