"""Independent brute-force references for the single-user, single-element case.

Nothing here imports the solver stack: only the raw channel model and the
closed-form EH inversion are shared.
"""

import numpy as np

from risswipt.eh import EhModel

RHO_LO, RHO_HI = 1e-4, 1 - 1e-4


def required_gain(n_v, scn):
    """Smallest |h^H w|^2 meeting both SINR and EH targets, minimized over rho.

    SINR: rho t >= gamma (rho (sigma2 + n_v) + delta2)
    EH:   eta (1 - rho) (t + n_v) >= q
    The first bound falls and the second rises in rho, so the optimum is
    their crossing (a quadratic root) clipped to the admissible interval.
    """
    gamma, s2, d2, eta = scn.gamma[0], scn.sigma2[0], scn.delta2[0], scn.eta[0]
    q = EhModel.from_scenario(scn).required_input(scn.e[0]) * 1e-3
    n_v = np.asarray(n_v, dtype=float)
    A = gamma * (s2 + n_v) + n_v
    B = A - gamma * d2 - q / eta
    r = (B + np.sqrt(B ** 2 + 4 * A * gamma * d2)) / (2 * A)
    r = np.clip(r, RHO_LO, RHO_HI)
    t = np.maximum(gamma * (s2 + n_v + d2 / r), np.maximum(q / (eta * (1 - r)) - n_v, 0.0))
    return t, r


def min_power_two_constraints(h, c, t, u):
    """min ||w||^2 s.t. |h^H w|^2 >= t, |c^H w|^2 <= u (closed form in span{h, c}).

    Vectorized over the leading axis of ``h`` (shape (P, M)); ``c`` is (M,).
    Returns (power, |c^H w|^2); power is inf where the pair is infeasible.
    """
    hn = np.linalg.norm(h, axis=1)
    hh = h / hn[:, None]
    alpha = np.sqrt(t) / hn                      # component along h
    ch_ = hh.conj() @ c                          # h^^H c
    e = c[None, :] - ch_[:, None] * hh           # part of c orthogonal to h
    en = np.linalg.norm(e, axis=1)
    leak = alpha * np.abs(ch_)                   # |c^H w| for MRT
    excess = np.maximum(leak - np.sqrt(np.maximum(u, 0)), 0.0)
    beta = np.where(excess > 0, excess / np.maximum(en, 1e-300), 0.0)
    power = alpha ** 2 + beta ** 2
    power = np.where((u < 0) | ((excess > 0) & (en <= 1e-14 * np.linalg.norm(c))), np.inf, power)
    cw2 = np.minimum(leak, np.sqrt(np.maximum(u, 0))) ** 2
    return power, cw2


def k1n1_eval(ch, scn, amp, phases, inner="mrt"):
    """BS power and total power for theta = amp e^{j phase}; inf where infeasible.

    ``inner="mrt"`` beamforms along the effective channel and rejects points
    that break the reflect budget; ``inner="exact"`` may tilt w away from the
    RIS to respect the budget, which is optimal for a single user.
    """
    theta = amp * np.exp(1j * np.asarray(phases))
    h = ch.G[0].conj()[None, :] * (np.conj(theta) * ch.h_r[0, 0])[:, None] + ch.h_b[0][None, :]
    n_v = scn.sigma2_v * abs(ch.h_r[0, 0]) ** 2 * amp ** 2
    t, _ = required_gain(n_v, scn)
    c = ch.G[0].conj()                           # G w = c^H w
    u = scn.p_max / amp ** 2 - scn.sigma2_v if amp > 0 else np.inf
    if inner == "mrt":
        hn2 = np.sum(np.abs(h) ** 2, axis=1)
        P = t / hn2
        cw2 = t * np.abs(h.conj() @ c) ** 2 / hn2 ** 2
        P = np.where(amp ** 2 * (cw2 + scn.sigma2_v) <= scn.p_max, P, np.inf)
    else:
        P, cw2 = min_power_two_constraints(h, c, np.full(len(theta), t), np.full(len(theta), u))
    refl = amp ** 2 * (cw2 + scn.sigma2_v)
    return P, P + refl


def k1n1_bcd_oracle(ch, scn, n_amp=400, n_phase=360, zooms=4, inner="mrt"):
    """Exhaustive amplitude x phase search with zooming; minimizes BS power.

    Returns (bs_power, total_power, amplitude, phase).
    """
    a_cap = np.sqrt(scn.p_max / scn.sigma2_v)
    amps = np.concatenate([[0.0], np.geomspace(a_cap * 1e-5, a_cap, n_amp - 1)])
    phases = np.linspace(0, 2 * np.pi, n_phase, endpoint=False)
    best = (np.inf, np.inf, 0.0, 0.0)
    for _ in range(zooms + 1):
        for a in amps:
            P, tot = k1n1_eval(ch, scn, a, phases, inner)
            j = int(np.argmin(P))
            if P[j] < best[0]:
                best = (float(P[j]), float(tot[j]), a, float(phases[j]))
        _, _, a0, p0 = best
        ia = int(np.argmin(np.abs(amps - a0)))
        lo, hi = amps[max(ia - 2, 0)], amps[min(ia + 2, len(amps) - 1)]
        dp = phases[1] - phases[0]
        amps = np.linspace(lo, hi, n_amp)
        phases = np.linspace(p0 - 2 * dp, p0 + 2 * dp, n_phase)
    return best


def k1n1_exact_point(ch, scn, amp, phase):
    """Explicit (w, rho, theta) achieving the exact inner solve, for auditing."""
    theta = amp * np.exp(1j * phase)
    h = ch.G[0].conj() * (np.conj(theta) * ch.h_r[0, 0]) + ch.h_b[0]
    c = ch.G[0].conj()
    t, rho = required_gain(scn.sigma2_v * abs(ch.h_r[0, 0]) ** 2 * amp ** 2, scn)
    hh = h / np.linalg.norm(h)
    w = np.sqrt(t) / np.linalg.norm(h) * hh
    u = scn.p_max / amp ** 2 - scn.sigma2_v if amp > 0 else np.inf
    leak = np.vdot(c, w)
    if abs(leak) > np.sqrt(u):
        e = c - np.vdot(hh, c) * hh
        w = w - (abs(leak) - np.sqrt(u)) * (leak / abs(leak)) * e / np.linalg.norm(e) ** 2
    return w, float(rho), theta


def k1n1_margin_oracle(ch, w, rho, scn, n_amp=400, n_phase=360):
    """max over the grid of alpha*tau + beta*Delta for fixed (w, rho), as in the RIS stage."""
    w = np.asarray(w).reshape(-1)
    gamma, s2, d2, eta = scn.gamma[0], scn.sigma2[0], scn.delta2[0], scn.eta[0]
    q = EhModel.from_scenario(scn).required_input(scn.e[0]) * 1e-3
    noise = s2 + d2 / rho
    a_max = np.sqrt(scn.p_max / (abs(ch.G[0] @ w) ** 2 + scn.sigma2_v))
    best = (-np.inf, 0.0, 0.0)
    zt = abs(ch.h_r[0, 0]) ** 2
    for a in np.linspace(0, a_max, n_amp):
        ph = np.linspace(0, 2 * np.pi, n_phase, endpoint=False)
        theta = a * np.exp(1j * ph)
        sig = np.abs(np.conj(ch.h_r[0, 0]) * theta * (ch.G[0] @ w) + np.vdot(ch.h_b[0], w)) ** 2
        n_v = scn.sigma2_v * zt * a ** 2
        tau = (sig / gamma - n_v) / noise - 1
        dl = eta * (1 - rho) * (sig + n_v) / q - 1
        ok = (tau >= -1e-12) & (dl >= -1e-12)
        val = np.where(ok, scn.alpha * np.maximum(tau, 0) + scn.beta * np.maximum(dl, 0), -np.inf)
        j = int(np.argmax(val))
        if val[j] > best[0]:
            best = (float(val[j]), a, ph[j])
    return best
