"""Small SDP modelling layer on top of cvxopt.

Problems are stated over Hermitian (or real symmetric) PSD blocks and
nonnegative scalars with real-linear constraints ``<A, X> + a.s {>=,<=,==} r``.
Hermitian blocks are mapped to real symmetric blocks of twice the size via
:func:`embed_hermitian` so any real-cone backend can be used.

The problem is handed to ``cvxopt.solvers.conelp`` as its *dual* standard
form: our variables become cvxopt's ``z`` and every constraint becomes one
free cvxopt variable.  The cost per interior-point step then scales with the
(small) number of constraints instead of the number of matrix entries.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
from cvxopt import matrix as cvx_matrix
from cvxopt import solvers as cvx_solvers

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
FAILED = "numerical-failure"


def embed_hermitian(X: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """[[Re X, -Im X], [Im X, Re X]]; spectrum is that of X, each eigenvalue doubled."""
    X = np.asarray(X)
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise ValueError("expected a square matrix")
    if np.max(np.abs(X - X.conj().T), initial=0.0) > tol * max(1.0, np.max(np.abs(X), initial=0.0)):
        raise ValueError("matrix is not Hermitian")
    R, I = X.real, X.imag
    return np.block([[R, -I], [I, R]])


def unembed(Y: np.ndarray) -> np.ndarray:
    """Hermitian d x d matrix from a (not necessarily structured) 2d x 2d symmetric one."""
    d = Y.shape[0] // 2
    Y = 0.5 * (Y + Y.T)
    return 0.5 * (Y[:d, :d] + Y[d:, d:]) + 0.5j * (Y[d:, :d] - Y[:d, d:])


def evd_rank1(X: np.ndarray) -> tuple[np.ndarray, float]:
    """Dominant-eigenpair factor sqrt(l1) u1 and the ratio l2 / l1.

    The entry of ``u1`` with the largest magnitude is rotated to be real and
    nonnegative so the factor is unique.
    """
    X = np.asarray(X)
    d = X.shape[0]
    Xh = 0.5 * (X + X.conj().T)
    lam, U = np.linalg.eigh(Xh)
    l1 = lam[-1]
    scale = np.max(np.abs(Xh), initial=0.0)
    if d == 0 or l1 <= 1e-14 * max(scale, 1e-300) or scale == 0.0:
        return np.zeros(d, dtype=X.dtype if np.iscomplexobj(X) else float), 0.0
    u = U[:, -1]
    j = int(np.argmax(np.abs(u)))
    u = u * (np.abs(u[j]) / u[j])
    resid = max(lam[-2], 0.0) / l1 if d > 1 else 0.0
    v = np.sqrt(l1) * u
    if not np.iscomplexobj(X):
        v = v.real
    return v, float(resid)


@dataclass
class LowRank:
    """Hermitian coefficient ``U diag(c) U^H + diag(d)``.

    The lifted RIS constraints are all of this form with a handful of columns,
    which lets :func:`solve` avoid dense n x n coefficient algebra.
    """

    U: np.ndarray
    c: np.ndarray
    d: np.ndarray

    def __post_init__(self):
        self.d = np.asarray(self.d, dtype=float).reshape(-1)
        n = self.d.size
        self.U = np.asarray(self.U, dtype=complex).reshape(n, -1)
        self.c = np.asarray(self.c, dtype=float).reshape(-1)
        if self.c.size != self.U.shape[1]:
            raise ValueError("U and c disagree on the rank")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.d.size, self.d.size)

    @classmethod
    def diag(cls, d) -> "LowRank":
        d = np.asarray(d, dtype=float).reshape(-1)
        return cls(np.zeros((d.size, 0), complex), np.zeros(0), d)

    def dense(self) -> np.ndarray:
        return (self.U * self.c) @ self.U.conj().T + np.diag(self.d).astype(complex)

    def inner(self, Y: np.ndarray) -> float:
        """Re Tr(A Y)."""
        vals = np.sum(self.U.conj() * (Y @ self.U), axis=0).real
        return float(self.c @ vals + self.d @ np.real(np.diagonal(Y)))


def _dense(A) -> np.ndarray:
    return A.dense() if isinstance(A, LowRank) else np.asarray(A)


def _inner(A, X) -> float:
    if isinstance(A, LowRank):
        return A.inner(X)
    return float(np.real(np.vdot(A, X)))


@dataclass
class Block:
    name: str
    dim: int
    hermitian: bool = True

    @property
    def real_dim(self) -> int:
        return 2 * self.dim if self.hermitian else self.dim


@dataclass
class Constraint:
    blocks: dict[str, np.ndarray]
    scalars: dict[str, float]
    sense: str          # ">=", "<=", "=="
    rhs: float
    label: str = ""


@dataclass
class SdpProblem:
    blocks: list[Block] = field(default_factory=list)
    scalars: list[str] = field(default_factory=list)
    constraints: list[Constraint] = field(default_factory=list)
    obj_blocks: dict[str, np.ndarray] = field(default_factory=dict)
    obj_scalars: dict[str, float] = field(default_factory=dict)
    obj_const: float = 0.0

    def add_block(self, name: str, dim: int, hermitian: bool = True) -> str:
        if name in self._names():
            raise ValueError(f"duplicate variable {name!r}")
        self.blocks.append(Block(name, dim, hermitian))
        return name

    def add_scalar(self, name: str) -> str:
        """A nonnegative scalar variable."""
        if name in self._names():
            raise ValueError(f"duplicate variable {name!r}")
        self.scalars.append(name)
        return name

    def _names(self):
        return {b.name for b in self.blocks} | set(self.scalars)

    def block(self, name: str) -> Block:
        for b in self.blocks:
            if b.name == name:
                return b
        raise KeyError(name)

    def add_constraint(self, blocks=None, scalars=None, sense=">=", rhs=0.0, label=""):
        if sense not in (">=", "<=", "=="):
            raise ValueError(f"bad sense {sense!r}")
        blocks = {k: v if isinstance(v, LowRank) else np.asarray(v) for k, v in (blocks or {}).items()}
        for name, A in blocks.items():
            b = self.block(name)
            if A.shape != (b.dim, b.dim):
                raise ValueError(f"{label}: coefficient for {name} has shape {A.shape}, block is {b.dim}")
            if isinstance(A, LowRank):
                continue
            if np.max(np.abs(A - A.conj().T), initial=0.0) > 1e-9 * max(1.0, np.max(np.abs(A), initial=0.0)):
                raise ValueError(f"{label}: coefficient for {name} is not Hermitian")
        for name in (scalars or {}):
            if name not in self.scalars:
                raise KeyError(name)
        self.constraints.append(Constraint(blocks, dict(scalars or {}), sense, float(rhs), label))

    def set_objective(self, blocks=None, scalars=None, constant=0.0):
        self.obj_blocks = {k: v if isinstance(v, LowRank) else np.asarray(v) for k, v in (blocks or {}).items()}
        self.obj_scalars = dict(scalars or {})
        self.obj_const = float(constant)

    def evaluate(self, c: Constraint, X: dict, s: dict) -> float:
        val = sum(_inner(A, X[n]) for n, A in c.blocks.items())
        return val + sum(a * s[n] for n, a in c.scalars.items())

    def objective_value(self, X: dict, s: dict) -> float:
        val = sum(_inner(C, X[n]) for n, C in self.obj_blocks.items())
        return val + sum(a * s[n] for n, a in self.obj_scalars.items()) + self.obj_const

    def dump(self, fh=None) -> str:
        """Plain-text listing: variables, then constraint triplets (row, col, value)."""
        out = io.StringIO()
        out.write("# sdp-problem v1\n")
        for b in self.blocks:
            out.write(f"block {b.name} {b.dim} {'hermitian' if b.hermitian else 'symmetric'}\n")
        for s in self.scalars:
            out.write(f"scalar {s} nonneg\n")

        def terms(blocks, scalars):
            for n, A in blocks.items():
                A = _dense(A)
                for i, j in zip(*np.nonzero(np.triu(A))):
                    out.write(f"  {n} {i} {j} {A[i, j].real:.17g} {getattr(A[i, j], 'imag', 0.0):.17g}\n")
            for n, a in scalars.items():
                out.write(f"  {n} {a:.17g}\n")

        out.write(f"objective min const {self.obj_const:.17g}\n")
        terms(self.obj_blocks, self.obj_scalars)
        for idx, c in enumerate(self.constraints):
            out.write(f"constraint {idx} {c.label or '-'} {c.sense} {c.rhs:.17g}\n")
            terms(c.blocks, c.scalars)
        text = out.getvalue()
        if fh is not None:
            fh.write(text)
        return text


@dataclass
class SolverSettings:
    feastol: float = 1e-7
    abstol: float = 1e-7
    reltol: float = 1e-7
    maxiters: int = 200
    refinement: int = 1
    structured: bool = True     # try the low-rank interior-point path first when applicable


@dataclass
class SdpSolution:
    status: str
    blocks: dict[str, np.ndarray]
    scalars: dict[str, float]
    objective: float
    residuals: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status == OPTIMAL


def _vec_real(A: np.ndarray, hermitian: bool) -> np.ndarray:
    """Coefficient of <A, X> against cvxopt's column-major symmetric block."""
    A = _dense(A)
    if hermitian:
        R = 0.5 * embed_hermitian(A, tol=1e-8)
    else:
        R = np.real(A)
    return R.reshape(-1, order="F")


def solve(p: SdpProblem, settings: SolverSettings | None = None) -> SdpSolution:
    """Solve ``p``; the structured path is tried first and cvxopt is the fallback."""
    settings = settings or SolverSettings()
    cons, early = _split_trivial(p)
    if early is not None:
        return early
    note = None
    if settings.structured and _is_structured(p):
        try:
            res = _solve_structured(p, cons, settings)
        except np.linalg.LinAlgError as exc:
            res = SdpSolution(FAILED, {}, {}, np.nan, {"reason": f"linear algebra: {exc}"})
        if res.ok:
            return res
        note = res.residuals.get("reason", "structured path did not converge")
    res = _solve_cvxopt(p, cons, settings)
    if note is not None:
        res.residuals["structured_failure"] = note
    return res


def _zero_solution(p: SdpProblem):
    X = {b.name: np.zeros((b.dim, b.dim), dtype=complex if b.hermitian else float) for b in p.blocks}
    s = {n: 0.0 for n in p.scalars}
    return X, s


def _split_trivial(p: SdpProblem):
    """Drop constraints without variables; an early result if one is violated or none remain."""
    cons = []
    for c in p.constraints:
        empty = all(not np.any(_dense(A)) for A in c.blocks.values()) and all(a == 0 for a in c.scalars.values())
        if empty:
            tol = 1e-12 * max(1.0, abs(c.rhs))
            ok = {">=": 0 >= c.rhs - tol, "<=": 0 <= c.rhs + tol, "==": abs(c.rhs) <= tol}[c.sense]
            if not ok:
                return cons, SdpSolution(INFEASIBLE, {}, {}, np.nan, {"reason": f"trivially violated: {c.label}"})
            continue
        cons.append(c)
    if not cons:
        # every variable is free in its cone; the zero point is optimal iff the cost is PSD
        X, s = _zero_solution(p)
        bounded = all(np.linalg.eigvalsh(0.5 * (_dense(C) + _dense(C).conj().T))[0] >= -1e-12
                      for C in p.obj_blocks.values()) and all(a >= 0 for a in p.obj_scalars.values())
        return cons, SdpSolution(OPTIMAL if bounded else FAILED, X, s, p.obj_const, {"reason": "no constraints"})
    return cons, None


def _finish(p: SdpProblem, cons, X, s, status, info) -> SdpSolution:
    """Attach independent residual checks to a backend result."""
    viol = 0.0
    for con in cons:
        val = p.evaluate(con, X, s)
        scale = max(abs(con.rhs), max((np.max(np.abs(_dense(A))) * max(np.trace(np.abs(X[n])), 1e-300)
                                       for n, A in con.blocks.items()), default=0.0), 1e-300)
        gap = {">=": con.rhs - val, "<=": val - con.rhs, "==": abs(val - con.rhs)}[con.sense]
        viol = max(viol, gap / scale)
    info["max_rel_violation"] = viol
    min_eig = min((np.linalg.eigvalsh(Xb)[0] / max(np.trace(Xb).real, 1e-300) for Xb in X.values()
                   if Xb.size), default=0.0)
    info["min_rel_eig"] = float(min_eig)
    return SdpSolution(status, X, s, p.objective_value(X, s), info)


def _solve_cvxopt(p: SdpProblem, cons, settings: SolverSettings) -> SdpSolution:
    nsc = len(p.scalars)
    scalar_idx = {n: i for i, n in enumerate(p.scalars)}
    ineq = [i for i, c in enumerate(cons) if c.sense != "=="]
    slack_idx = {i: nsc + j for j, i in enumerate(ineq)}
    L = nsc + len(ineq)
    offsets, off = {}, L
    for b in p.blocks:
        offsets[b.name] = off
        off += b.real_dim ** 2
    nz, m = off, len(cons)

    h = np.zeros(nz)
    for n, C in p.obj_blocks.items():
        b = p.block(n)
        h[offsets[n]:offsets[n] + b.real_dim ** 2] = _vec_real(C, b.hermitian)
    for n, a in p.obj_scalars.items():
        h[scalar_idx[n]] = a

    G = np.zeros((nz, m))
    c_vec = np.zeros(m)
    for i, con in enumerate(cons):
        col = np.zeros(nz)
        for n, A in con.blocks.items():
            b = p.block(n)
            col[offsets[n]:offsets[n] + b.real_dim ** 2] = _vec_real(A, b.hermitian)
        for n, a in con.scalars.items():
            col[scalar_idx[n]] = a
        f = np.max(np.abs(col))
        col /= f
        if con.sense == ">=":
            col[slack_idx[i]] = -1.0
        elif con.sense == "<=":
            col[slack_idx[i]] = 1.0
        G[:, i] = col
        c_vec[i] = -con.rhs / f
    hs = h / max(np.max(np.abs(h)), 1e-300)

    dims = {"l": L, "q": [], "s": [b.real_dim for b in p.blocks]}
    opts = {"show_progress": False, "feastol": settings.feastol, "abstol": settings.abstol,
            "reltol": settings.reltol, "maxiters": settings.maxiters, "refinement": settings.refinement}
    try:
        res = cvx_solvers.conelp(cvx_matrix(c_vec), cvx_matrix(G), cvx_matrix(hs), dims, options=opts)
    except (ValueError, ArithmeticError) as exc:
        X, s = _zero_solution(p)
        return SdpSolution(FAILED, X, s, np.nan, {"reason": str(exc), "backend": "cvxopt"})

    z = np.array(res["z"]).reshape(-1) if res["z"] is not None else None
    info = {
        "backend": "cvxopt",
        "solver_status": res["status"],
        "iterations": res.get("iterations"),
        "gap": res.get("gap"),
        "relative_gap": res.get("relative gap"),
        "primal_infeasibility": res.get("dual infeasibility"),
        "dual_infeasibility": res.get("primal infeasibility"),
    }
    if res["status"] == "dual infeasible":
        X, s = _zero_solution(p)
        return SdpSolution(INFEASIBLE, X, s, np.nan, info)
    if z is None:
        X, s = _zero_solution(p)
        return SdpSolution(FAILED, X, s, np.nan, info)

    X = {}
    for b in p.blocks:
        Y = z[offsets[b.name]:offsets[b.name] + b.real_dim ** 2].reshape(b.real_dim, b.real_dim, order="F")
        X[b.name] = unembed(Y) if b.hermitian else 0.5 * (Y + Y.T)
    s = {n: float(z[i]) for n, i in scalar_idx.items()}
    return _finish(p, cons, X, s, OPTIMAL if res["status"] == "optimal" else FAILED, info)


# ---------------------------------------------------------------------------
# structured path: one Hermitian block, low-rank-plus-diagonal coefficients

def _is_structured(p: SdpProblem) -> bool:
    if len(p.blocks) != 1 or not p.blocks[0].hermitian:
        return False
    coeffs = [A for c in p.constraints for A in c.blocks.values()] + list(p.obj_blocks.values())
    return all(isinstance(A, LowRank) for A in coeffs)


def _max_step(L: np.ndarray, dX: np.ndarray) -> float:
    """Largest a with chol-factored X + a dX still PSD."""
    S = sla.solve_triangular(L, dX, lower=True)
    S = sla.solve_triangular(L, S.conj().T, lower=True)
    lam = sla.eigvalsh(0.5 * (S + S.conj().T), subset_by_index=[0, 0])[0]
    return -1.0 / lam if lam < 0 else np.inf


def _ratio(x: np.ndarray, dx: np.ndarray) -> float:
    neg = dx < 0
    return float(np.min(-x[neg] / dx[neg])) if np.any(neg) else np.inf


def _solve_structured(p: SdpProblem, cons, settings: SolverSettings) -> SdpSolution:
    """Infeasible-start primal-dual path following (HKM direction, Mehrotra corrector).

    Standard form  min <C, X> + f.x  s.t.  <A_i, X> + g_i.x = b_i,  X >= 0, x >= 0,
    where x collects the user scalars and one slack per inequality.  With
    A_i = U_i diag(c_i) U_i^H + diag(d_i) every Schur-complement entry
    Tr(A_i X A_j Z^-1) is assembled from n x R products only.
    """
    blk = p.blocks[0]
    n, name = blk.dim, blk.name
    nsc = len(p.scalars)
    sidx = {s: i for i, s in enumerate(p.scalars)}
    ineq = [i for i, c in enumerate(cons) if c.sense != "=="]
    slack = {i: nsc + j for j, i in enumerate(ineq)}
    m, q = len(cons), nsc + len(ineq)

    Us, cs, owner = [], [], []
    Dmat = np.zeros((n, m))
    Gm = np.zeros((m, q))
    b = np.zeros(m)
    normA = np.zeros(m)
    for i, con in enumerate(cons):
        A = con.blocks.get(name)
        dense = A.dense() if A is not None else np.zeros((n, n))
        f = max(np.max(np.abs(dense), initial=0.0), max((abs(a) for a in con.scalars.values()), default=0.0))
        if A is not None:
            Us.append(A.U)
            cs.append(A.c / f)
            owner += [i] * A.U.shape[1]
            Dmat[:, i] = A.d / f
        for sname, a in con.scalars.items():
            Gm[i, sidx[sname]] = a / f
        if con.sense == ">=":
            Gm[i, slack[i]] = -1.0
        elif con.sense == "<=":
            Gm[i, slack[i]] = 1.0
        b[i] = con.rhs / f
        normA[i] = np.linalg.norm(dense) / f
    Ucat = np.hstack(Us) if Us else np.zeros((n, 0), complex)
    ccat = np.concatenate(cs) if cs else np.zeros(0)
    owner = np.asarray(owner, dtype=int)
    Cmat = np.zeros((Ucat.shape[1], m))
    Cmat[np.arange(owner.size), owner] = ccat

    Cobj = p.obj_blocks.get(name)
    C = Cobj.dense() if Cobj is not None else np.zeros((n, n), complex)
    fobj = np.zeros(q)
    for sname, a in p.obj_scalars.items():
        fobj[sidx[sname]] = a
    hs = max(np.max(np.abs(C), initial=0.0), np.max(np.abs(fobj), initial=0.0), 1e-300)
    C, fobj = C / hs, fobj / hs

    def A_op(Y):
        vals = np.sum(Ucat.conj() * (Y @ Ucat), axis=0).real
        return Cmat.T @ vals + Dmat.T @ np.real(np.diagonal(Y))

    def A_adj(y):
        w = ccat * y[owner] if owner.size else ccat
        return (Ucat * w) @ Ucat.conj().T + np.diag(Dmat @ y)

    nb, nc = np.linalg.norm(b), np.linalg.norm(C) + np.linalg.norm(fobj)
    xi = max(10.0, np.sqrt(n), n * np.max((1 + np.abs(b)) / (1 + normA)))
    eta = max(10.0, np.sqrt(n), np.max(normA), nc)
    X, x = xi * np.eye(n, dtype=complex), np.full(q, xi)
    Z, z = eta * np.eye(n, dtype=complex), np.full(q, eta)
    y = np.zeros(m)
    I = np.eye(n)
    info = {"backend": "structured", "solver_status": "max-iters"}
    status = FAILED
    for it in range(1, settings.maxiters + 1):
        rp = b - A_op(X) - Gm @ x
        Rd = C - A_adj(y) - Z
        Rd = 0.5 * (Rd + Rd.conj().T)
        rd = fobj - Gm.T @ y - z
        pobj = float(np.real(np.vdot(C, X)) + fobj @ x)
        dobj = float(b @ y)
        gap = float(np.real(np.vdot(X, Z)) + x @ z)
        mu = gap / (n + q)
        pres = np.linalg.norm(rp) / (1 + nb)
        dres = (np.linalg.norm(Rd) + np.linalg.norm(rd)) / (1 + nc)
        rgap = abs(pobj - dobj) / (1 + abs(pobj) + abs(dobj))
        info.update(iterations=it - 1, gap=gap, relative_gap=rgap, primal_infeasibility=pres,
                    dual_infeasibility=dres)
        if pres <= settings.feastol and dres <= settings.feastol and \
                (rgap <= settings.reltol or gap <= settings.abstol):
            status = OPTIMAL
            info["solver_status"] = "optimal"
            break

        Lz = sla.cholesky(Z, lower=True)
        Zinv = sla.cho_solve((Lz, True), I)
        Zinv = 0.5 * (Zinv + Zinv.conj().T)
        Lx = sla.cholesky(X, lower=True)

        XU, ZU = X @ Ucat, Zinv @ Ucat
        P = (Ucat.conj().T @ XU) * (Ucat.conj().T @ ZU).T
        Q = XU.conj() * ZU
        M2 = Cmat.T @ Q.T @ Dmat
        Msch = Cmat.T @ P @ Cmat + M2 + M2.conj().T + Dmat.T @ (X * Zinv.T) @ Dmat
        Msch = np.real(Msch)
        Msch = 0.5 * (Msch + Msch.T) + (Gm * (x / z)) @ Gm.T
        try:
            fac = sla.cho_factor(Msch)
            msolve = lambda r: sla.cho_solve(fac, r)  # noqa: E731
        except np.linalg.LinAlgError:
            lu = sla.lu_factor(Msch)
            msolve = lambda r: sla.lu_solve(lu, r)  # noqa: E731
        XRZ = X @ Rd @ Zinv

        def direction(Rc, rc):
            rhs = rp - A_op(Rc - XRZ) - Gm @ (rc - x / z * rd)
            dy = msolve(rhs)
            dZ = Rd - A_adj(dy)
            dZ = 0.5 * (dZ + dZ.conj().T)
            dz = rd - Gm.T @ dy
            dX = Rc - X @ dZ @ Zinv
            dX = 0.5 * (dX + dX.conj().T)
            dx = rc - x / z * dz
            return dX, dx, dy, dZ, dz

        def steps(dX, dx, dZ, dz):
            ap = min(1.0, _max_step(Lx, dX), _ratio(x, dx))
            ad = min(1.0, _max_step(Lz, dZ), _ratio(z, dz))
            return ap, ad

        # predictor
        dXa, dxa, _, dZa, dza = direction(-X, -x)
        ap, ad = steps(dXa, dxa, dZa, dza)
        mu_aff = (np.real(np.vdot(X + ap * dXa, Z + ad * dZa)) + (x + ap * dxa) @ (z + ad * dza)) / (n + q)
        sigma = min(1.0, max(0.0, mu_aff / mu)) ** 3
        # corrector
        Rc = sigma * mu * Zinv - X - dXa @ dZa @ Zinv
        rc = sigma * mu / z - x - dxa * dza / z
        dX, dx, dy, dZ, dz = direction(Rc, rc)
        ap, ad = steps(dX, dx, dZ, dz)
        tau = 0.98 if it > 1 else 0.9
        ap, ad = min(1.0, tau * ap), min(1.0, tau * ad)
        X = X + ap * dX
        x = x + ap * dx
        y = y + ad * dy
        Z = Z + ad * dZ
        z = z + ad * dz
        X = 0.5 * (X + X.conj().T)
        Z = 0.5 * (Z + Z.conj().T)

    if status != OPTIMAL:
        info["reason"] = f"structured path stopped: {info['solver_status']}"
        X0, s0 = _zero_solution(p)
        return SdpSolution(FAILED, X0, s0, np.nan, info)
    s = {sname: float(x[i]) for sname, i in sidx.items()}
    return _finish(p, cons, {name: X}, s, OPTIMAL, info)
