"""
Seeded Monte Carlo BER sweeps.

Trial ``t`` at power ``P_dB`` draws everything from
``SeedSequence([seed, sign, round(|P_dB| * 1000), t])``, so results do not
depend on how trials are spread over worker processes.
"""
from __future__ import annotations

import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import cfma, channels
from .gf2_codes import (NestedCodePair, build_nested_pair, derive_encoder, encode, parse_alist,
                        regular_ldpc)
from .modulation import ModulationSpec

CSV_HEADER = "scenario,P_dB,stage,bit_errors,bits_total,trials,ber"


class ConfigError(ValueError):
    """Invalid configuration; ``line`` is 1-based or ``None`` when no line applies."""

    def __init__(self, line, msg):
        super().__init__(f"line {line}: {msg}" if line else msg)
        self.line = line


# ---------------------------------------------------------------------------
# configuration


def _parse_complex(tok: str):
    t = tok.strip().replace(" ", "")
    if t.endswith("i") or t.endswith("j"):
        v = complex(t[:-1] + "j")
        return v
    return float(t)


def _fmt_num(v):
    if isinstance(v, complex):
        sign = "+" if v.imag >= 0 else "-"
        return f"{v.real!r}{sign}{abs(v.imag)!r}i"
    return repr(float(v))


def _list(conv):
    def parse(s):
        s = s.strip()
        return tuple(conv(t) for t in s.split(",")) if s else ()
    return parse


def _onoff(s):
    s = s.strip().lower()
    if s not in ("on", "off"):
        raise ValueError("expected on or off")
    return s == "on"


def _user(s):
    s = s.strip().lower()
    if s == "auto":
        return None
    v = int(s)
    if v not in (1, 2):
        raise ValueError("expected 1, 2 or auto")
    return v


REQ = object()

# section -> key -> (field name, parser, default)
SCHEMA = {
    "channel": {
        "topology": ("topology", str.strip, REQ),
        "gains": ("gains", _list(_parse_complex), REQ),
    },
    "codes": {
        "source": ("source", str.strip, REQ),
        "n": ("n", int, None),
        "dv": ("dv", int, 3),
        "dc": ("dc", int, None),
        "merges": ("merges", _list(int), (0,)),
        "code_seed": ("code_seed", int, 0),
        "alist_sub": ("alist_sub", str.strip, None),
        "alist_super": ("alist_super", str.strip, None),
        "target_user": ("target_user", _user, None),
    },
    "modulation": {
        "family": ("family", str.strip, REQ),
        "L": ("L", int, 1),
        "theta": ("theta", float, 0.0),
    },
    "sweep": {
        "scenario": ("scenario", str.strip, REQ),
        "powers_db": ("powers_db", _list(float), REQ),
        "trials": ("trials", int, REQ),
        "iterations": ("iterations", int, 25),
        "seed": ("seed", int, 0),
        "target_ber": ("target_ber", float, 1e-5),
        "workers": ("workers", int, 1),
        "noise": ("noise", _onoff, True),
    },
}


@dataclass(frozen=True)
class SimConfig:
    scenario: str
    topology: str
    gains: tuple
    source: str
    family: str
    powers_db: tuple
    trials: int
    n: int | None = None
    dv: int = 3
    dc: int | None = None
    merges: tuple = (0,)
    code_seed: int = 0
    alist_sub: str | None = None
    alist_super: str | None = None
    target_user: int | None = None
    L: int = 1
    theta: float = 0.0
    iterations: int = 25
    seed: int = 0
    target_ber: float = 1e-5
    workers: int = 1
    noise: bool = True
    lines: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def K(self) -> int:
        return 2 if self.topology == "interference" else len(self.gains)


def parse_config(text: str) -> SimConfig:
    """Parse and validate the sectioned ``key = value`` format."""
    section = None
    vals, lines = {}, {}
    for no, raw in enumerate(text.splitlines(), 1):
        ln = raw.split("#", 1)[0].strip()
        if not ln:
            continue
        if ln.startswith("["):
            if not ln.endswith("]"):
                raise ConfigError(no, "unterminated section header")
            section = ln[1:-1].strip()
            if section not in SCHEMA:
                raise ConfigError(no, f"unknown section [{section}]")
            continue
        if section is None:
            raise ConfigError(no, "key outside of any section")
        if "=" not in ln:
            raise ConfigError(no, "expected key = value")
        key, val = (p.strip() for p in ln.split("=", 1))
        if key not in SCHEMA[section]:
            raise ConfigError(no, f"unknown key '{key}' in [{section}]")
        name, conv, _ = SCHEMA[section][key]
        if name in vals:
            raise ConfigError(no, f"duplicate key '{key}'")
        try:
            vals[name] = conv(val)
        except (ValueError, TypeError) as exc:
            raise ConfigError(no, f"bad value for '{key}': {exc}") from None
        lines[name] = no
    for sec, keys in SCHEMA.items():
        for key, (name, _, default) in keys.items():
            if name not in vals:
                if default is REQ:
                    raise ConfigError(None, f"missing required key '{key}' in [{sec}]")
                vals[name] = default
    cfg = SimConfig(**vals, lines=lines)
    validate(cfg)
    return cfg


def validate(cfg: SimConfig) -> None:
    def bad(name, msg):
        raise ConfigError(cfg.lines.get(name), msg)

    if cfg.trials < 1:
        bad("trials", "trials must be >= 1")
    if cfg.iterations < 1:
        bad("iterations", "iterations must be >= 1")
    if cfg.workers < 1:
        bad("workers", "workers must be >= 1")
    if not 0 < cfg.target_ber < 1:
        bad("target_ber", "target_ber must lie in (0, 1)")
    if any(b <= a for a, b in zip(cfg.powers_db, cfg.powers_db[1:])):
        bad("powers_db", "powers must be strictly increasing")
    try:
        channels.ChannelScenario(cfg.topology, cfg.gains)
    except ValueError as exc:
        bad("gains", str(exc))
    try:
        ModulationSpec(cfg.family, 1.0, cfg.L, cfg.theta)
    except ValueError as exc:
        bad("family", str(exc))
    if (cfg.family == "qam") != (cfg.topology == "mac_complex"):
        bad("family", "qam goes with the mac_complex topology and only there")
    if cfg.topology in ("interference", "kuser") and cfg.family != "bpsk":
        bad("family", f"{cfg.topology} supports bpsk only")
    if cfg.source == "regular":
        if cfg.n is None or cfg.dc is None:
            bad("source", "regular codes need n and dc")
        if (cfg.n * cfg.dv) % cfg.dc:
            bad("n", "n * dv must be divisible by dc")
        if any(t < 0 for t in cfg.merges):
            bad("merges", "merge counts must be >= 0")
        want = cfg.K - 1 if cfg.topology == "kuser" else 1
        if len(cfg.merges) != want:
            bad("merges", f"expected {want} merge count(s)")
    elif cfg.source == "alist":
        if cfg.topology == "kuser":
            bad("source", "kuser codes come from the regular recipe")
        if not (cfg.alist_sub and cfg.alist_super):
            bad("source", "alist source needs alist_sub and alist_super")
    else:
        bad("source", "source must be regular or alist")


def emit_config(cfg: SimConfig) -> str:
    """Canonical text: fixed section and key order, every set value written out."""
    out = []
    for sec, keys in SCHEMA.items():
        out.append(f"[{sec}]")
        for key, (name, _, _) in keys.items():
            v = getattr(cfg, name)
            if v is None:
                if name == "target_user":
                    out.append(f"{key} = auto")
                continue
            if isinstance(v, bool):
                s = "on" if v else "off"
            elif isinstance(v, tuple):
                s = ", ".join(_fmt_num(x) if isinstance(x, (float, complex)) else str(x) for x in v)
            elif isinstance(v, float):
                s = repr(v)
            else:
                s = str(v)
            out.append(f"{key} = {s}")
        out.append("")
    return "\n".join(out)


# ---------------------------------------------------------------------------
# scenario construction


@dataclass
class Scenario:
    cfg: SimConfig
    codebook: cfma.CfmaCodebook | None = None
    kuser_codes: list | None = None
    kuser_encoders: list | None = None

    @property
    def n(self) -> int:
        return self.kuser_codes[0].n if self.kuser_codes else self.codebook.n

    def stage_names(self) -> list:
        c = self.cfg
        if c.topology == "kuser":
            return [f"e{m}" for m in range(c.K, 1, -1)] + [f"user{k}" for k in range(1, c.K + 1)]
        base = ["sum", "user1", "user2"]
        if c.topology == "interference":
            return [f"rx{r}_{s}" for r in (1, 2) for s in base]
        return base


def _read_alist(path, cfg, name):
    try:
        return parse_alist(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(cfg.lines.get(name), f"cannot read {path}: {exc}") from None
    except ValueError as exc:
        raise ConfigError(cfg.lines.get(name), f"{path}: {exc}") from None


def build_scenario(cfg: SimConfig) -> Scenario:
    """Build the codes; mismatches surface here, before any trial runs."""
    spec = ModulationSpec(cfg.family, 1.0, cfg.L, cfg.theta)
    if cfg.topology == "kuser":
        mats = cfma.build_kuser_codes(regular_ldpc(cfg.n, cfg.dv, cfg.dc, cfg.code_seed), cfg.merges, cfg.code_seed)
        return Scenario(cfg, kuser_codes=mats, kuser_encoders=[derive_encoder(H) for H in mats])
    if cfg.source == "alist":
        Hs = _read_alist(cfg.alist_sub, cfg, "alist_sub")
        Hp = _read_alist(cfg.alist_super, cfg, "alist_super")
        if Hs.n != Hp.n:
            raise ConfigError(cfg.lines.get("alist_super"), "sub and super codes differ in length")
        G = derive_encoder(Hs).generator
        if any(Hp.syndrome(g).any() for g in G):
            raise ConfigError(cfg.lines.get("alist_super"), "subcode is not contained in the supercode")
        pairs = [NestedCodePair(Hs, Hp)] * cfg.L
    else:
        pairs = []
        for l in range(cfg.L):
            Hb = regular_ldpc(cfg.n, cfg.dv, cfg.dc, cfg.code_seed + l)
            pairs.append(build_nested_pair(Hb, cfg.merges[0], cfg.code_seed + l))
    try:
        cb = cfma.CfmaCodebook(pairs, spec)
    except ValueError as exc:
        raise ConfigError(cfg.lines.get("family"), str(exc)) from None
    return Scenario(cfg, codebook=cb)


# ---------------------------------------------------------------------------
# trials


def trial_rng(seed: int, P_dB: float, trial: int) -> np.random.Generator:
    mdb = int(round(P_dB * 1000))
    return np.random.default_rng(np.random.SeedSequence([seed, int(mdb < 0), abs(mdb), trial]))


def _errs(a, b):
    return int(np.count_nonzero(np.asarray(a) != np.asarray(b)))


def run_trial(sc: Scenario, P_dB: float, trial: int, noise: bool | None = None) -> dict:
    """Bit errors per stage for one transmitted block, scored against the truth."""
    cfg = sc.cfg
    noise = cfg.noise if noise is None else noise
    P = 10.0 ** (P_dB / 10.0)
    rng = trial_rng(cfg.seed, P_dB, trial)
    if cfg.topology == "kuser":
        us = [encode(e, rng.integers(0, 2, e.k, dtype=np.uint8)) for e in sc.kuser_encoders]
        xs = [np.sqrt(P) * (2.0 * u - 1.0) for u in us]
        y = channels.transmit_kuser(xs, [float(g.real) for g in cfg.gains], rng, noise)
        res = cfma.decode_kuser(y, sc.kuser_codes, [float(g.real) for g in cfg.gains], P, cfg.iterations)
        out, e = {}, us[0].copy()
        truth = {1: e.copy()}
        for m in range(2, cfg.K + 1):
            e = e ^ us[m - 1]
            truth[m] = e.copy()
        for m in range(cfg.K, 1, -1):
            out[f"e{m}"] = _errs(res.sums[m], truth[m])
        for k in range(cfg.K):
            out[f"user{k + 1}"] = _errs(res.users[k], us[k])
        return out
    cb = sc.codebook.with_power(P)
    u1, u2 = cb.random_codewords(rng)
    s = cfma.sum_digits_oracle(u1, u2, cb.spec.L)

    def score(r, prefix=""):
        return {prefix + "sum": _errs(r.s_levels, s),
                prefix + "user1": _errs(r.u1_levels, u1),
                prefix + "user2": _errs(r.u2_levels, u2)}

    if cfg.topology == "interference":
        h = float(cfg.gains[0].real)
        r1, r2 = cfma.run_interference(u1, u2, cb, h, rng, noise, cfg.target_user, cfg.iterations)
        return {**score(r1, "rx1_"), **score(r2, "rx2_")}
    gains = tuple(cfg.gains)
    y = cfma.transmit_pair(cb, u1, u2, gains, rng, noise)
    return score(cfma.decode_cfma(y, cb, gains, target_user=cfg.target_user, max_iter=cfg.iterations))


@dataclass(frozen=True)
class BerRecord:
    scenario: str
    P_dB: float
    stage: str
    bit_errors: int
    bits_total: int
    trials: int

    @property
    def ber(self) -> float:
        return self.bit_errors / self.bits_total

    def csv_row(self) -> str:
        return (f"{self.scenario},{self.P_dB:.6g},{self.stage},{self.bit_errors},"
                f"{self.bits_total},{self.trials},{self.ber:.6g}")


_WORKER: dict = {}


def _init_worker(cfg):
    _WORKER["sc"] = build_scenario(cfg)


def _run_chunk(args):
    P_dB, trials = args
    sc = _WORKER["sc"]
    tot = dict.fromkeys(sc.stage_names(), 0)
    for t in trials:
        for k, v in run_trial(sc, P_dB, t).items():
            tot[k] += v
    return tot


def _chunks(trials, workers):
    ids = np.arange(trials)
    return [c.tolist() for c in np.array_split(ids, min(trials, workers * 4)) if c.size]


def _records(sc, P_dB, totals):
    cfg = sc.cfg
    bits = cfg.trials * sc.n * (cfg.L if cfg.topology != "kuser" else 1)
    return [BerRecord(cfg.scenario, P_dB, st, totals[st], bits, cfg.trials) for st in sc.stage_names()]


def run_ber_point(cfg: SimConfig, P_dB: float, scenario: Scenario | None = None, pool=None) -> list:
    """Per-stage error counts over ``cfg.trials`` blocks at one power."""
    sc = scenario or build_scenario(cfg)
    parts = _chunks(cfg.trials, cfg.workers)
    if pool is None:
        totals = dict.fromkeys(sc.stage_names(), 0)
        for t in range(cfg.trials):
            for k, v in run_trial(sc, P_dB, t).items():
                totals[k] += v
    else:
        totals = dict.fromkeys(sc.stage_names(), 0)
        for part in pool.map(_run_chunk, [(P_dB, p) for p in parts]):
            for k, v in part.items():
                totals[k] += v
    return _records(sc, P_dB, totals)


def theoretical_bound_db(sc: Scenario):
    """Minimum power for the scenario's code rates, or ``None`` when not applicable."""
    from .rate_region import InfeasibleTarget, PrecisionError, min_power_db
    cfg = sc.cfg
    if cfg.topology == "kuser":
        return None
    cb = sc.codebook
    per = 2 if cb.spec.is_complex else 1
    R = [per * cb.k(u) / cb.n for u in (1, 2)]
    gl = [(1.0, float(cfg.gains[0].real)), (float(cfg.gains[0].real), 1.0)] if cfg.topology == "interference" \
        else [tuple(cfg.gains)]
    try:
        return max(min_power_db(tuple(R), g, cb.spec) for g in gl)
    except (InfeasibleTarget, PrecisionError):
        return None


@dataclass(frozen=True)
class SweepResult:
    csv: str
    records: list
    bound_db: float | None


def run_sweep(cfg: SimConfig, compute_bound: bool = True) -> SweepResult:
    sc = build_scenario(cfg)
    recs = []
    if cfg.powers_db:
        if cfg.workers > 1:
            with ProcessPoolExecutor(cfg.workers, initializer=_init_worker, initargs=(cfg,)) as pool:
                for p in cfg.powers_db:
                    recs += run_ber_point(cfg, p, sc, pool)
        else:
            for p in cfg.powers_db:
                recs += run_ber_point(cfg, p, sc)
    buf = io.StringIO(newline="")
    buf.write(CSV_HEADER + "\n")
    for r in recs:
        buf.write(r.csv_row() + "\n")
    bound = theoretical_bound_db(sc) if compute_bound else None
    return SweepResult(buf.getvalue(), recs, bound)
