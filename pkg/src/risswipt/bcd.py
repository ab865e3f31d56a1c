"""Alternating (block coordinate descent) driver, benchmark schemes and sweeps."""

from __future__ import annotations

import hashlib
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import conic
from .bf_stage import StageInfeasible, required_input_w, solve_p3
from .eh import InfeasibleTarget
from .metrics import BfSolution, RisVector, audit, reflect_power
from .ris_stage import ippa, lift, lift_matrix, relaxed_start
from .scene import ChannelSet, Scenario, gen_channels, perturb_csi

log = logging.getLogger(__name__)

MAX_OUTER = 30
SCHEMES = ("active", "active_random_rho", "passive", "passive_random_rho",
           "passive_random_phase", "no_ris")

CONVERGED, STALLED, MAX_ITER, INFEASIBLE = "converged", "stalled", "max-iter", "infeasible"


class RunInfeasible(RuntimeError):
    pass


def derive_seed(*parts) -> int:
    """Stable 63-bit seed from arbitrary printable parts."""
    text = "|".join(repr(p) if not isinstance(p, float) else float(p).hex() for p in parts)
    return int.from_bytes(hashlib.sha256(text.encode()).digest()[:8], "little") >> 1


@dataclass
class RunTrace:
    scheme: str = ""
    seed: int = 0
    f1: list = field(default_factory=list)
    reflect: list = field(default_factory=list)
    total: list = field(default_factory=list)
    ippa_iterations: list = field(default_factory=list)
    w_rank_residual: list = field(default_factory=list)
    t_rank_residual: list = field(default_factory=list)
    audit_ok: list = field(default_factory=list)
    penalty_history: list = field(default_factory=list)
    tau: list = field(default_factory=list)
    Delta: list = field(default_factory=list)
    status: str = ""
    p3_fallbacks: int = 0
    sub_unit_fraction: float = 0.0
    final_audit: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def iterations(self) -> int:
        return len(self.f1)

    @property
    def converged(self) -> bool:
        return self.status == CONVERGED

    def to_dict(self) -> dict:
        d = asdict(self)
        d["iterations"] = self.iterations
        return d


@dataclass
class RunResult:
    sol: BfSolution | None
    theta: RisVector | None
    trace: RunTrace

    @property
    def total_power(self) -> float:
        return self.trace.total[-1] if self.trace.total else float("nan")


def _check_targets(scn: Scenario) -> None:
    try:
        required_input_w(scn)
    except InfeasibleTarget as exc:
        raise RunInfeasible(str(exc)) from exc


def _initial_theta(ch, scn, rng, passive, rho_fixed, settings):
    phases = np.exp(1j * rng.uniform(0.0, 2 * np.pi, scn.N))
    if passive:
        return RisVector(phases, active=False)
    # amplitude: largest common value meeting the reflect budget at the no-RIS beamformers
    ref = solve_p3(ch, RisVector.zeros(scn.N), scn, rho_fixed, settings)
    per_unit = reflect_power(ch, RisVector(phases), ref.solution, scn)
    amp = np.sqrt(scn.p_max / per_unit)
    return RisVector(amp * phases)


def bcd_solve(ch: ChannelSet, scn: Scenario, seed: int, *, passive: bool = False,
              rho_fixed=None, max_outer: int = MAX_OUTER, scheme: str = "",
              settings: conic.SolverSettings | None = None) -> RunResult:
    """Alternate the beamforming stage and the RIS stage until f1 settles."""
    t_start = time.perf_counter()
    _check_targets(scn)
    trace = RunTrace(scheme=scheme or ("passive" if passive else "active"), seed=seed)
    rng = np.random.default_rng(seed)

    if scn.N == 0:
        theta = RisVector.zeros(0)
        try:
            p3 = solve_p3(ch, theta, scn, rho_fixed, settings)
        except StageInfeasible as exc:
            raise RunInfeasible(str(exc)) from exc
        _record(trace, ch, theta, p3, scn)
        trace.status = CONVERGED
        trace.final_audit = _audit_dict(ch, theta, p3.solution, scn)
        trace.wall_time = time.perf_counter() - t_start
        return RunResult(p3.solution, theta, trace)

    try:
        theta = _initial_theta(ch, scn, rng, passive, rho_fixed, settings)
    except StageInfeasible as exc:
        raise RunInfeasible(str(exc)) from exc

    best = None
    status = MAX_ITER
    for it in range(max_outer):
        try:
            p3 = solve_p3(ch, theta, scn, rho_fixed, settings)
        except StageInfeasible as exc:
            if best is None and not passive and np.any(theta.theta):
                # shrink the starting surface until the first stage is solvable
                theta = RisVector(0.5 * theta.theta) if np.max(np.abs(theta.theta)) > 1e-3 \
                    else RisVector.zeros(scn.N)
                trace.notes.append("initial amplitude halved")
                continue
            if best is None:
                raise RunInfeasible(str(exc)) from exc
            trace.notes.append(f"beamforming stage failed at iteration {it}: {exc}")
            status = STALLED
            break
        _record(trace, ch, theta, p3, scn)
        best = (p3.solution, theta)
        if len(trace.f1) > 1:
            prev = trace.f1[-2]
            if abs(trace.f1[-1] - prev) / max(prev, 1e-300) < scn.zeta:
                status = CONVERGED
                break
        if it == max_outer - 1:
            break
        new_theta = _ris_step(ch, scn, p3.solution, theta, passive, trace, settings)
        if new_theta is None:
            status = STALLED
            break
        theta = new_theta

    sol, theta = best
    trace.status = status
    amps = np.abs(theta.theta)
    trace.sub_unit_fraction = float(np.mean(amps < 1.0)) if amps.size else 0.0
    trace.final_audit = _audit_dict(ch, theta, sol, scn)
    trace.wall_time = time.perf_counter() - t_start
    return RunResult(sol, theta, trace)


def _ris_step(ch, scn, sol, theta, passive, trace, settings):
    """One RIS-stage update; None when no audited improvement is available."""
    ld = lift(ch, sol, scn)
    starts = []
    try:
        starts.append(relaxed_start(ld, scn, sol, passive, settings))
    except StageInfeasible as exc:
        trace.notes.append(f"relaxation failed: {exc}")
    starts.append(lift_matrix(theta))  # warm start: always feasible at the current beamformers
    for T0 in starts:
        try:
            res = ippa(ld, scn, T0, sol, passive=passive, settings=settings)
        except StageInfeasible as exc:
            trace.notes.append(f"RIS stage failed: {exc}")
            continue
        if res.theta is None:
            trace.notes.append("RIS extraction failed")
            continue
        if audit(ch, res.theta, sol, scn).ok:
            trace.ippa_iterations.append(res.iterations)
            trace.t_rank_residual.append(res.rank_residual)
            trace.penalty_history.append(res.penalty_history)
            trace.tau.append(res.tau.tolist())
            trace.Delta.append(res.Delta.tolist())
            return res.theta
        trace.notes.append("RIS stage output failed the feasibility audit")
    return None


def _record(trace, ch, theta, p3, scn):
    sol = p3.solution
    refl = reflect_power(ch, theta, sol, scn)
    trace.f1.append(sol.bs_power)
    trace.reflect.append(refl)
    trace.total.append(sol.bs_power + refl)
    trace.w_rank_residual.append(float(np.max(p3.rank_residual)))
    trace.audit_ok.append(audit(ch, theta, sol, scn).ok)
    trace.p3_fallbacks += int(p3.fallback)


def _audit_dict(ch, theta, sol, scn) -> dict:
    a = audit(ch, theta, sol, scn)
    return {"ok": a.ok, **a.flags,
            "sinr_margin": [float(x) for x in a.sinr_margin],
            "eh_margin": [float(x) for x in a.eh_margin],
            "reflect_w": a.reflect_w}


# ---------------------------------------------------------------------------
# benchmark schemes

def parse_scheme(tag: str) -> tuple[str, float | None]:
    """'active@15' -> ('active', 0.015): optional p_max override in mW."""
    name, _, pm = tag.partition("@")
    if name not in SCHEMES:
        raise ValueError(f"unknown scheme {tag!r}; choose from {SCHEMES}")
    if pm:
        if not name.startswith("active"):
            raise ValueError(f"{tag!r}: a reflect-power budget only applies to active schemes")
        return name, float(pm) * 1e-3
    return name, None


def run_scheme(scheme: str, ch: ChannelSet, scn: Scenario, seed: int,
               settings: conic.SolverSettings | None = None) -> RunResult:
    name, pmax = parse_scheme(scheme)
    if pmax is not None:
        scn = scn.replace(p_max=pmax)
    _check_targets(scn)
    rng = np.random.default_rng(derive_seed(seed, "rho"))
    rho_rnd = rng.uniform(0.1, 0.9, scn.K)

    if name == "active":
        return bcd_solve(ch, scn, seed, scheme=scheme, settings=settings)
    if name == "active_random_rho":
        return bcd_solve(ch, scn, seed, rho_fixed=rho_rnd, scheme=scheme, settings=settings)
    if name == "passive":
        return bcd_solve(ch, scn, seed, passive=True, scheme=scheme, settings=settings)
    if name == "passive_random_rho":
        return bcd_solve(ch, scn, seed, passive=True, rho_fixed=rho_rnd, scheme=scheme, settings=settings)

    t0 = time.perf_counter()
    if name == "passive_random_phase":
        theta = RisVector(np.exp(1j * np.random.default_rng(seed).uniform(0, 2 * np.pi, scn.N)), active=False)
    else:
        theta = RisVector.zeros(scn.N)
    trace = RunTrace(scheme=scheme, seed=seed)
    try:
        p3 = solve_p3(ch, theta, scn, None, settings)
    except StageInfeasible as exc:
        raise RunInfeasible(str(exc)) from exc
    _record(trace, ch, theta, p3, scn)
    trace.status = CONVERGED
    trace.final_audit = _audit_dict(ch, theta, p3.solution, scn)
    trace.wall_time = time.perf_counter() - t0
    return RunResult(p3.solution, theta, trace)


# ---------------------------------------------------------------------------
# sweeps

AXES = ("M", "N", "xi", "p_max")


@dataclass
class RunRecord:
    schema_version: int
    scheme: str
    axis: str
    axis_value: float
    trial: int
    seed: int
    converged: bool
    iterations: int
    f1_W: float
    reflect_W: float
    total_W: float
    min_sinr_margin: float
    min_eh_margin: float
    wall_ms: float
    status: str = ""
    feasible: bool = False              # final iterate passes the audit (any status)
    true_feasible: bool | None = None  # xi axis: design meets targets on the true channels
    design_total_W: float = float("nan")  # total power computed on the design (estimated) channels
    sinr_margins: list = field(default_factory=list)
    eh_margins: list = field(default_factory=list)


def cell_scenario(scn: Scenario, axis: str, value) -> Scenario:
    if axis == "M":
        return scn.replace(M=int(value))
    if axis == "N":
        return scn.replace(N=int(value))
    if axis == "p_max":
        return scn.replace(p_max=float(value))
    if axis == "xi":
        return scn
    raise ValueError(f"unknown axis {axis!r}; choose from {AXES}")


def run_trial(scn_base: Scenario, axis: str, value, trial: int, seed0: int, scheme: str,
              settings: conic.SolverSettings | None = None) -> RunRecord:
    """One (value, trial, scheme) cell entry.

    Channels depend only on (seed0, trial) so every scheme and every axis
    value of a trial sees the same propagation draw (paired comparisons).
    On the ``xi`` axis the scheme runs on perturbed channels; the reported
    powers come from re-solving the beamforming stage on the true channels
    with the surface held at its designed value.
    """
    scn = cell_scenario(scn_base, axis, value)
    ch_seed = derive_seed(seed0, trial, "channel")
    run_seed = derive_seed(seed0, float(value), trial, scheme)
    t0 = time.perf_counter()
    true_ch = gen_channels(scn, ch_seed)
    design_ch = true_ch
    if axis == "xi":
        design_ch = perturb_csi(true_ch, float(value), derive_seed(seed0, float(value), trial, "csi"))
    base = dict(schema_version=1, scheme=scheme, axis=axis, axis_value=float(value), trial=trial, seed=run_seed)
    try:
        res = run_scheme(scheme, design_ch, scn, run_seed, settings)
    except (RunInfeasible, StageInfeasible) as exc:
        log.warning("trial %s/%s/%s failed: %s", value, trial, scheme, exc)
        nan = float("nan")
        return RunRecord(**base, converged=False, iterations=0, f1_W=nan, reflect_W=nan, total_W=nan,
                         min_sinr_margin=nan, min_eh_margin=nan,
                         wall_ms=1e3 * (time.perf_counter() - t0), status=INFEASIBLE)
    tr = res.trace
    fa = tr.final_audit
    f1, refl, tot = tr.f1[-1], tr.reflect[-1], tr.total[-1]
    feasible, true_ok, design_tot = bool(fa["ok"]), None, tot
    if axis == "xi":
        # surface fixed from the estimated CSI; the BS re-optimizes on the true channels
        name, pmax = parse_scheme(scheme)
        scn_eval = scn.replace(p_max=pmax) if pmax is not None else scn
        try:
            p3 = solve_p3(true_ch, res.theta, scn_eval, None, settings)
        except StageInfeasible as exc:
            log.warning("trial %s/%s/%s infeasible on true channels: %s", value, trial, scheme, exc)
            nan = float("nan")
            return RunRecord(**base, converged=False, iterations=tr.iterations, f1_W=nan, reflect_W=nan,
                             total_W=nan, min_sinr_margin=nan, min_eh_margin=nan,
                             wall_ms=1e3 * (time.perf_counter() - t0), status=INFEASIBLE,
                             true_feasible=False, design_total_W=design_tot)
        fa = _audit_dict(true_ch, res.theta, p3.solution, scn_eval)
        f1 = p3.solution.bs_power
        refl = reflect_power(true_ch, res.theta, p3.solution, scn_eval)
        tot = f1 + refl
        feasible = true_ok = bool(fa["ok"])
    return RunRecord(
        **base, converged=tr.converged and feasible, iterations=tr.iterations,
        f1_W=f1, reflect_W=refl, total_W=tot,
        min_sinr_margin=min(fa["sinr_margin"]), min_eh_margin=min(fa["eh_margin"]),
        wall_ms=1e3 * (time.perf_counter() - t0), status=tr.status, feasible=feasible,
        true_feasible=true_ok, design_total_W=design_tot,
        sinr_margins=fa["sinr_margin"], eh_margins=fa["eh_margin"])


def _run_trial_args(args):
    return run_trial(*args)


def sweep(scn_base: Scenario, axis: str, values, trials: int, seed0: int,
          schemes=("active",), workers: int = 1, on_record=None) -> list[RunRecord]:
    """Run every (value, trial, scheme) cell; records are returned in a fixed order."""
    if not len(values):
        raise ValueError("values must be nonempty")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    for s in schemes:
        parse_scheme(s)
    jobs = [(scn_base, axis, v, t, seed0, s) for v in values for t in range(trials) for s in schemes]
    records = []
    if workers <= 1:
        for job in jobs:
            rec = run_trial(*job)
            records.append(rec)
            if on_record:
                on_record(rec)
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            # map preserves submission order, keeping output deterministic
            for rec in pool.map(_run_trial_args, jobs):
                records.append(rec)
                if on_record:
                    on_record(rec)
    return records


def summarize(records: list[RunRecord]) -> list[dict]:
    """Per (scheme, axis_value) mean total power with a 95% t-interval.

    Means use every audited run, including those stopped by the iteration
    cap; infeasible or unaudited runs count as failures.
    """
    from scipy import stats

    cells: dict = {}
    for r in records:
        cells.setdefault((r.scheme, r.axis_value), []).append(r)
    out = []
    for (scheme, value), rs in cells.items():
        ok = np.array([r.total_W for r in rs if r.feasible and np.isfinite(r.total_W)])
        n = ok.size
        mean = float(ok.mean()) if n else float("nan")
        half = float(stats.t.ppf(0.975, n - 1) * ok.std(ddof=1) / np.sqrt(n)) if n > 1 else float("nan")
        out.append({"scheme": scheme, "axis_value": value, "trials": len(rs), "ok": int(n),
                    "mean_total_W": mean, "ci95_low": mean - half, "ci95_high": mean + half,
                    "mean_iterations": float(np.mean([r.iterations for r in rs])),
                    "converged": int(sum(r.converged for r in rs)),
                    "failure_rate": 1 - n / len(rs), "flagged": (1 - n / len(rs)) > 0.5})
    return out
