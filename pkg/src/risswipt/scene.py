"""Scenario constants, node geometry, pathloss and Rician channel draws."""

from __future__ import annotations

import configparser
import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

SCHEMA_VERSION = 1


def db2lin(x):
    return 10.0 ** (np.asarray(x, dtype=float) / 10.0)


def dbm2watt(x):
    return 10.0 ** ((np.asarray(x, dtype=float) - 30.0) / 10.0)


def _per_user(value, K: int, name: str) -> tuple[float, ...]:
    arr = np.atleast_1d(np.asarray(value, dtype=float))
    if arr.size == 1:
        arr = np.full(K, float(arr[0]))
    if arr.size != K:
        raise ValueError(f"{name}: expected 1 or {K} values, got {arr.size}")
    return tuple(float(v) for v in arr)


@dataclass(frozen=True)
class Scenario:
    """All system constants for one downlink setup.

    Powers are in watts except ``e`` (harvested-power targets, mW) and the
    EH coefficients ``eh_a, eh_b, eh_c`` which are fitted in mW.  Per-user
    fields accept a scalar, which is broadcast to all ``K`` users.
    """

    M: int = 10
    K: int = 4
    N: int = 20
    gamma: tuple[float, ...] = 10.0          # linear SINR targets
    e: tuple[float, ...] = 0.01              # mW (-20 dBm)
    eta: tuple[float, ...] = 1.0
    p_max: float = 10e-3                     # W
    sigma2: tuple[float, ...] = 1e-10        # W (-70 dBm)
    delta2: tuple[float, ...] = 1e-8         # W (-50 dBm)
    sigma2_v: float = 1e-10                  # W (-70 dBm)
    eh_a: float = 2.463
    eh_b: float = 1.635
    eh_c: float = 0.826
    mu: float = 5e-5
    alpha: float = 1.0
    beta: float = 1.0
    zeta: float = 1e-3
    rician_K_dB: float = 10.0
    bs_pos: tuple[float, float] = (3.5, 0.0)
    ris_pos: tuple[float, float] = (0.0, 8.0)
    user_center: tuple[float, float] = (3.5, 8.0)
    user_radius: float = 2.5
    kappa_direct: float = 3.0
    kappa_reflect: float = 2.2
    C0_dB: float = -30.0
    D0: float = 1.0

    def __post_init__(self):
        set_ = lambda k, v: object.__setattr__(self, k, v)  # noqa: E731
        for name in ("gamma", "e", "eta", "sigma2", "delta2"):
            set_(name, _per_user(getattr(self, name), self.K, name))
        for name in ("bs_pos", "ris_pos", "user_center"):
            set_(name, tuple(float(v) for v in getattr(self, name)))
        self.validate()

    def validate(self) -> None:
        if self.M < 1 or self.K < 1 or self.N < 0:
            raise ValueError("need M >= 1, K >= 1, N >= 0")
        g, e, eta = map(np.asarray, (self.gamma, self.e, self.eta))
        if np.any(g < 0) or np.any(e < 0):
            raise ValueError("gamma and e must be nonnegative")
        if np.any(eta <= 0) or np.any(eta > 1):
            raise ValueError("eta must lie in (0, 1]")
        if self.p_max <= 0:
            raise ValueError("p_max must be positive")
        if min(self.sigma2) <= 0 or min(self.delta2) <= 0 or self.sigma2_v < 0:
            raise ValueError("receiver noise powers must be positive, RIS noise nonnegative")
        if min(self.eh_a, self.eh_b, self.eh_c) <= 0:
            raise ValueError("EH coefficients a, b, c must be positive")
        if self.mu <= 0 or self.alpha <= 0 or self.beta <= 0:
            raise ValueError("mu, alpha, beta must be positive")
        if not 0 < self.zeta < 1:
            raise ValueError("zeta must lie in (0, 1)")
        if self.user_radius < 0 or self.D0 <= 0:
            raise ValueError("user_radius must be >= 0 and D0 > 0")

    def replace(self, **changes) -> "Scenario":
        # per-user fields were already broadcast to K; re-broadcast on a K change
        if "K" in changes and changes["K"] != self.K:
            for name in ("gamma", "e", "eta", "sigma2", "delta2"):
                changes.setdefault(name, getattr(self, name)[0])
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict:
        return {f.name: (list(v) if isinstance(v := getattr(self, f.name), tuple) else v)
                for f in dataclasses.fields(self)}


@dataclass(frozen=True)
class ChannelSet:
    G: np.ndarray      # (N, M) BS -> RIS
    h_r: np.ndarray    # (K, N) RIS -> user k, row k
    h_b: np.ndarray    # (K, M) BS -> user k, row k
    user_pos: np.ndarray = field(default=None, repr=False)

    @property
    def dims(self) -> tuple[int, int, int]:
        """(M, K, N)."""
        return self.h_b.shape[1], self.h_b.shape[0], self.G.shape[0]

    def check(self, scn: Scenario) -> None:
        if self.G.shape != (scn.N, scn.M) or self.h_r.shape != (scn.K, scn.N) \
                or self.h_b.shape != (scn.K, scn.M):
            raise ValueError(f"channel shapes {self.G.shape}, {self.h_r.shape}, "
                             f"{self.h_b.shape} do not match M={scn.M}, K={scn.K}, N={scn.N}")
        for arr in (self.G, self.h_r, self.h_b):
            if not np.all(np.isfinite(arr)):
                raise ValueError("non-finite channel entries")


def pathloss(d, kappa: float, C0_dB: float = -30.0, D0: float = 1.0):
    """Large-scale power gain C0 (d/D0)^-kappa."""
    d = np.asarray(d, dtype=float)
    if D0 <= 0 or np.any(d <= 0):
        raise ValueError("distance and reference distance must be positive")
    out = db2lin(C0_dB) * (d / D0) ** (-kappa)
    return float(out) if out.ndim == 0 else out


def ula_response(n: int, axis: np.ndarray, direction: np.ndarray) -> np.ndarray:
    """Half-wavelength ULA steering vector for a unit ``direction``."""
    cos_angle = float(np.dot(axis, direction))
    return np.exp(1j * np.pi * np.arange(n) * cos_angle)


# BS array lies along x (faces +y); RIS array lies along y (faces +x).
_BS_AXIS = np.array([1.0, 0.0])
_RIS_AXIS = np.array([0.0, 1.0])


def _unit(v):
    return v / np.linalg.norm(v)


def _cn(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def drop_users(scn: Scenario, rng: np.random.Generator) -> np.ndarray:
    r = scn.user_radius * np.sqrt(rng.uniform(size=scn.K))
    phi = rng.uniform(0.0, 2 * np.pi, size=scn.K)
    c = np.asarray(scn.user_center)
    return c + np.stack([r * np.cos(phi), r * np.sin(phi)], axis=1)


def gen_channels(scn: Scenario, seed: int) -> ChannelSet:
    """Draw one Rician channel realization, deterministic in ``seed``."""
    rng = np.random.default_rng(seed)
    users = drop_users(scn, rng)
    kr = db2lin(scn.rician_K_dB)
    w_los, w_nlos = np.sqrt(kr / (1 + kr)), np.sqrt(1 / (1 + kr))
    bs, ris = np.asarray(scn.bs_pos), np.asarray(scn.ris_pos)
    M, K, N = scn.M, scn.K, scn.N
    pl = lambda d, kap: pathloss(d, kap, scn.C0_dB, scn.D0)  # noqa: E731

    # NLoS draws in a fixed order so that N = 0 and N > 0 share user drops
    nlos_b = _cn(rng, (K, M))
    nlos_g = _cn(rng, (N, M))
    nlos_r = _cn(rng, (K, N))

    h_b = np.empty((K, M), dtype=complex)
    for k, u in enumerate(users):
        d = u - bs
        los = ula_response(M, _BS_AXIS, _unit(d))
        h_b[k] = np.sqrt(pl(np.linalg.norm(d), scn.kappa_direct)) * (w_los * los + w_nlos * nlos_b[k])

    G = np.zeros((N, M), dtype=complex)
    h_r = np.zeros((K, N), dtype=complex)
    if N > 0:
        d = ris - bs
        los = np.outer(ula_response(N, _RIS_AXIS, _unit(-d)),
                       ula_response(M, _BS_AXIS, _unit(d)).conj())
        G = np.sqrt(pl(np.linalg.norm(d), scn.kappa_reflect)) * (w_los * los + w_nlos * nlos_g)
        for k, u in enumerate(users):
            d = u - ris
            los = ula_response(N, _RIS_AXIS, _unit(d))
            h_r[k] = np.sqrt(pl(np.linalg.norm(d), scn.kappa_reflect)) * (w_los * los + w_nlos * nlos_r[k])
    return ChannelSet(G=G, h_r=h_r, h_b=h_b, user_pos=users)


def perturb_csi(ch: ChannelSet, xi: float, seed: int) -> ChannelSet:
    """Additive estimation error with per-entry variance ``xi * |h|^2``."""
    if xi < 0:
        raise ValueError("CSI error level must be nonnegative")
    if xi == 0:
        return ch
    rng = np.random.default_rng(seed)

    def noisy(h):
        return h + np.sqrt(xi) * np.abs(h) * _cn(rng, h.shape)

    return ChannelSet(G=noisy(ch.G), h_r=noisy(ch.h_r), h_b=noisy(ch.h_b), user_pos=ch.user_pos)


# ---------------------------------------------------------------------------
# configuration files

# key -> (unit kind, per-user?)  unit kind: "int", "float", "lin" (dB allowed),
# "power" (dBm / mW / W, stored in W), "mw" (dBm / mW / W, stored in mW), "pair"
CONFIG_SCHEMA: dict[str, tuple[str, str]] = {
    "M": ("int", "BS antennas"),
    "K": ("int", "users"),
    "N": ("int", "RIS elements (0 = no RIS)"),
    "gamma": ("lin", "SINR target per user; linear or '<x> dB'"),
    "e": ("mw", "harvested-power target per user; '<x> dBm', '<x> mW' or '<x> W'"),
    "eta": ("float", "energy conversion efficiency per user, (0, 1]"),
    "p_max": ("power", "maximum RIS reflect power; dBm / mW / W (bare number = W)"),
    "sigma2": ("power", "antenna noise per user; dBm / mW / W"),
    "delta2": ("power", "ID circuit noise per user; dBm / mW / W"),
    "sigma2_v": ("power", "active-RIS dynamic noise; dBm / mW / W"),
    "eh_a": ("float", "EH coefficient a (mW fit)"),
    "eh_b": ("float", "EH coefficient b (mW fit)"),
    "eh_c": ("float", "EH coefficient c (mW fit)"),
    "mu": ("float", "rank-one penalty factor"),
    "alpha": ("float", "SINR residual weight"),
    "beta": ("float", "EH residual weight"),
    "zeta": ("float", "relative-change convergence tolerance"),
    "rician_K_dB": ("db", "Rician factor; '<x> dB' or bare dB number"),
    "bs_pos": ("pair", "BS position 'x, y' (m)"),
    "ris_pos": ("pair", "RIS position 'x, y' (m)"),
    "user_center": ("pair", "user cluster center 'x, y' (m)"),
    "user_radius": ("float", "user cluster radius (m)"),
    "kappa_direct": ("float", "pathloss exponent, BS -> user"),
    "kappa_reflect": ("float", "pathloss exponent, BS -> RIS and RIS -> user"),
    "C0_dB": ("db", "pathloss at reference distance; '<x> dB' or bare dB number"),
    "D0": ("float", "reference distance (m)"),
}
REQUIRED_KEYS = ("M", "K", "N")


class ConfigError(ValueError):
    def __init__(self, key: str, msg: str):
        super().__init__(f"{key}: {msg}")
        self.key = key


def _parse_scalar(key: str, kind: str, text: str):
    t = text.strip()
    low = t.lower()
    try:
        if kind == "int":
            return int(t)
        if kind == "float":
            return float(t)
        if kind == "lin":
            return float(db2lin(float(t[:-2]))) if low.endswith("db") else float(t)
        if kind == "db":
            return float(t[:-2]) if low.endswith("db") else float(t)
        if kind in ("power", "mw"):
            if low.endswith("dbm"):
                w = float(dbm2watt(float(t[:-3])))
            elif low.endswith("mw"):
                w = float(t[:-2]) * 1e-3
            elif low.endswith("w"):
                w = float(t[:-1])
            else:
                w = float(t) * (1e-3 if kind == "mw" else 1.0)
            return w if kind == "power" else w * 1e3
    except ValueError:
        pass
    raise ConfigError(key, f"cannot parse {text!r} as {kind}")


def parse_config_text(text: str, source: str = "<config>") -> Scenario:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError("<file>", str(exc)) from exc
    if not cp.has_section("scenario"):
        raise ConfigError("[scenario]", "missing section")
    raw = dict(cp["scenario"])
    for key in REQUIRED_KEYS:
        if key not in raw:
            raise ConfigError(key, "required field missing")
    kwargs = {}
    for key, text_value in raw.items():
        if key not in CONFIG_SCHEMA:
            raise ConfigError(key, "unknown field")
        kind = CONFIG_SCHEMA[key][0]
        if kind == "pair":
            parts = [p for p in text_value.replace(",", " ").split() if p]
            if len(parts) != 2:
                raise ConfigError(key, "expected two coordinates 'x, y'")
            kwargs[key] = tuple(_parse_scalar(key, "float", p) for p in parts)
            continue
        parts = [p for p in text_value.split(",") if p.strip()]
        vals = [_parse_scalar(key, kind, p) for p in parts]
        kwargs[key] = vals[0] if len(vals) == 1 else tuple(vals)
    try:
        return Scenario(**kwargs)
    except ValueError as exc:
        raise ConfigError("scenario", str(exc)) from exc


def load_config(path) -> Scenario:
    p = Path(path)
    return parse_config_text(p.read_text(), source=str(p))


def dump_config(scn: Scenario) -> str:
    """Serialize a Scenario into the config format (internal units)."""
    lines = [f"# schema_version = {SCHEMA_VERSION}", "[scenario]"]
    for f in dataclasses.fields(scn):
        v = getattr(scn, f.name)
        kind = CONFIG_SCHEMA[f.name][0]
        if kind == "mw":
            text = ", ".join(f"{x!r} mW" for x in v)
        elif kind == "pair":
            text = ", ".join(repr(x) for x in v)
        elif isinstance(v, tuple):
            text = ", ".join(repr(x) for x in v) + (" W" if kind == "power" else "")
        elif kind == "power":
            text = f"{v!r} W"
        elif kind == "db":
            text = f"{v!r} dB"
        else:
            text = repr(v)
        lines.append(f"{f.name} = {text}")
    return "\n".join(lines) + "\n"
