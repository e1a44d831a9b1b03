"""
Rate regions for uniform discrete inputs on the Gaussian two-user MAC.

All conditional entropies are expectations of ``-log2 p(g | Y)`` under a
finite Gaussian mixture. The default estimator integrates each mixture
component with Gauss-Hermite nodes centred on its mean; Monte Carlo is
available as an independent check.
"""
from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .llr import PairMixture
from .modulation import ModulationSpec

_LN2 = np.log(2.0)


class PrecisionError(RuntimeError):
    pass


class InfeasibleTarget(ValueError):
    pass


@dataclass(frozen=True)
class EntropyEstimator:
    """Integration method for mixture entropies.

    ``nodes`` is the Gauss-Hermite order per real axis; ``None`` picks 129
    for real channels, 48 for 4-QAM and 32 for larger QAM. The error bound is the
    largest change against a rerun at roughly half the order.
    """

    method: str = "quadrature"
    nodes: int | None = None
    samples: int = 1_000_000
    seed: int = 0
    max_error: float = 1e-3

    def __post_init__(self):
        if self.method not in ("quadrature", "monte_carlo"):
            raise ValueError("method must be quadrature or monte_carlo")


@dataclass(frozen=True)
class RatePoint:
    R1: float
    R2: float
    per_complex_symbol: bool = False


@dataclass(frozen=True)
class EntropySet:
    """Entropies in bits; ``err`` bounds the absolute integration error of each."""

    HX1: float
    HX2: float
    HS_Y: float
    H12_YS: float
    H1_Y: float
    H2_Y: float
    H12_Y: float
    err: float
    stderr: dict | None = None

    @property
    def H1_Y2(self) -> float:
        """H(X1 | Y, X2)."""
        return self.H12_Y - self.H2_Y

    @property
    def H2_Y1(self) -> float:
        return self.H12_Y - self.H1_Y


# ---------------------------------------------------------------------------
# integration core


def _gh(nodes: int, complex_: bool):
    x, w = np.polynomial.hermite_e.hermegauss(nodes)
    w = w / np.sqrt(2.0 * np.pi)
    if not complex_:
        return x, w
    z = ((x[:, None] + 1j * x[None, :]) / np.sqrt(2.0)).ravel()
    return z, (w[:, None] * w[None, :]).ravel()


def _loglik(y, means, complex_):
    if complex_:
        return -((y.real[..., None] - means.real) ** 2 + (y.imag[..., None] - means.imag) ** 2)
    return -0.5 * (y[..., None] - means) ** 2


def _grouped_lse(ll, labels):
    """``logsumexp`` of ``ll`` over each group of equal ``labels`` (equal-size groups)."""
    order = np.argsort(labels, kind="stable")
    G = len(np.unique(labels))
    shp = ll.shape[:-1] + (G, ll.shape[-1] // G)
    return logsumexp(ll[..., order].reshape(shp), axis=-1), np.unique(labels)


def _negation_weights(means, groupings):
    """Component weights that fold the mixture's ``y -> -y`` symmetry.

    When negating every mean permutes the components and maps each
    grouping's partition onto itself, component ``c`` and its mirror
    contribute equally, so only one of them is integrated.
    """
    C = len(means)
    d = np.abs(means[:, None] + means[None, :])
    sigma = d.argmin(axis=1)
    scale = max(np.abs(means).max(), 1.0)
    if not np.all(d[np.arange(C), sigma] <= 1e-9 * scale) or len(set(sigma.tolist())) != C:
        return np.ones(C)
    for lab in groupings:
        pairs = set(zip(lab.tolist(), lab[sigma].tolist()))
        if len({a for a, _ in pairs}) != len(pairs):
            return np.ones(C)
    w = np.zeros(C)
    for c in range(C):
        w[min(c, sigma[c])] += 1.0
    return w


def _quad_entropies(means, groupings, complex_, nodes):
    """``H(G | Y)`` in bits for each label array in ``groupings``."""
    z, w = _gh(nodes, complex_)
    C = len(means)
    cw = _negation_weights(means, groupings)
    comps = np.flatnonzero(cw)
    prepared = []
    for lab in groupings:
        order = np.argsort(lab, kind="stable")
        uniq = np.unique(lab)
        prepared.append((order, len(uniq), np.searchsorted(uniq, lab)))
    out = np.zeros(len(groupings))
    chunk = max(1, int(4e6 // (len(z) * C)))
    for lo in range(0, len(comps), chunk):
        idx = comps[lo:lo + chunk]
        y = means[idx, None] + z[None, :]
        ll = _loglik(y, means, complex_)
        lpy = logsumexp(ll, axis=-1)
        for gi, (order, G, pos) in enumerate(prepared):
            glse = logsumexp(ll[..., order].reshape(ll.shape[:-1] + (G, C // G)), axis=-1)
            lg = np.take_along_axis(glse, pos[idx][:, None, None], axis=-1)[..., 0]
            out[gi] += np.sum(cw[idx, None] * (lpy - lg) * w[None, :])
    return out / C / _LN2


def _mc_entropies(means, groupings, complex_, samples, seed):
    rng = np.random.default_rng(seed)
    C = len(means)
    acc = np.zeros((len(groupings), 2))
    done = 0
    while done < samples:
        m = min(samples - done, max(1, int(2e6 // C)))
        c = rng.integers(0, C, m)
        if complex_:
            zz = (rng.standard_normal(m) + 1j * rng.standard_normal(m)) * np.sqrt(0.5)
        else:
            zz = rng.standard_normal(m)
        ll = _loglik(means[c] + zz, means, complex_)
        lpy = logsumexp(ll, axis=-1)
        for gi, lab in enumerate(groupings):
            glse, uniq = _grouped_lse(ll, lab)
            pos = np.searchsorted(uniq, lab[c])
            v = (lpy - glse[np.arange(m), pos]) / _LN2
            acc[gi] += (v.sum(), (v * v).sum())
        done += m
    mean = acc[:, 0] / samples
    var = acc[:, 1] / samples - mean ** 2
    return mean, np.sqrt(np.maximum(var, 0.0) / samples)


def _estimate(means, groupings, complex_, est: EntropyEstimator):
    default = (48 if len(means) <= 16 else 32) if complex_ else 129
    if est.method == "monte_carlo":
        mean, se = _mc_entropies(means, groupings, complex_, est.samples, est.seed)
        return mean, float(3 * se.max()), se
    nodes = est.nodes or default
    hi = _quad_entropies(means, groupings, complex_, nodes)
    lo = _quad_entropies(means, groupings, complex_, max(8, nodes // 2 + 1))
    err = float(np.abs(hi - lo).max())
    if err > est.max_error:
        raise PrecisionError(f"quadrature error bound {err:.3g} exceeds {est.max_error:g}")
    return hi, err, None


def _axis_ids(U, M):
    """Collapse per-axis symbols into one integer label."""
    lab = np.zeros(U.shape[0], np.int64)
    for a in range(U.shape[1]):
        lab = lab * M + U[:, a]
    return lab


# ---------------------------------------------------------------------------
# public API


def conditional_entropies(P, gains, spec: ModulationSpec, a=(1, 1),
                          est: EntropyEstimator = EntropyEstimator()) -> EntropySet:
    """Entropies of uniform inputs with ``S = a1 X1 + a2 X2 (mod 2**L)`` per axis.

    Parameters
    ----------
    P : float
        Power per user, linear.
    gains : pair of float or complex
    spec : ModulationSpec
        Family, ``L`` and rotation; its own power is ignored.
    a : pair of int
        Coefficients of the combination, not both zero mod ``2**L``.
    """
    spec = spec.with_power(P)
    M = spec.M
    if a[0] % M == 0 and a[1] % M == 0:
        raise ValueError("coefficient pair must be nonzero")
    mix = PairMixture(spec, gains)
    S = (a[0] * mix.U1 + a[1] * mix.U2) % M
    groups = [_axis_ids(S, M), _axis_ids(mix.U1, M), _axis_ids(mix.U2, M), np.arange(mix.C)]
    vals, err, se = _estimate(np.asarray(mix.means), groups, spec.is_complex, est)
    HS, H1, H2, H12 = (float(v) for v in vals)
    hx = float(mix.axes * spec.L)
    stderr = None if se is None else dict(zip(("HS_Y", "H1_Y", "H2_Y", "H12_Y"), se.tolist()))
    return EntropySet(hx, hx, HS, H12 - HS, H1, H2, H12, err, stderr)


def point_to_point_entropy(P, gain, spec: ModulationSpec, est: EntropyEstimator = EntropyEstimator()):
    """``(H(X), H(X | Y), err)`` for a single user."""
    spec = spec.with_power(P)
    pts = np.asarray(gain * spec.constellation(), dtype=complex if spec.is_complex else float)
    vals, err, _ = _estimate(pts, [np.arange(len(pts))], spec.is_complex, est)
    return float(np.log2(len(pts))), float(vals[0]), err


def mac_region(P, gains, spec, est: EntropyEstimator = EntropyEstimator(), ent: EntropySet | None = None):
    """Corners ``A = (I(X1;Y), I(X2;Y|X1))`` and ``B = (I(X1;Y|X2), I(X2;Y))``."""
    e = ent or conditional_entropies(P, gains, spec, (1, 1), est)
    A = RatePoint(e.HX1 - e.H1_Y, e.HX2 - e.H2_Y1, spec.is_complex)
    B = RatePoint(e.HX1 - e.H1_Y2, e.HX2 - e.H2_Y, spec.is_complex)
    return A, B


def cfma_corners(P, gains, spec, a=(1, 1), est: EntropyEstimator = EntropyEstimator(),
                 ent: EntropySet | None = None):
    """Compute-forward points ``A'`` and ``B'``."""
    e = ent or conditional_entropies(P, gains, spec, a, est)
    worst = max(e.HS_Y, e.H12_YS)
    Ap = RatePoint(e.HX1 - worst, e.HX2 - e.HS_Y, spec.is_complex)
    Bp = RatePoint(e.HX1 - e.HS_Y, e.HX2 - worst, spec.is_complex)
    return Ap, Bp


def dominant_face_check(e: EntropySet, tol: float | None = None) -> dict:
    """Where ``A'`` and ``B'`` sit relative to the dominant face.

    ``B'`` lies on it when ``H(X1|Y,X2) <= H(S|Y) <= H(X1,X2|Y) / 2`` and
    ``A'`` when the same holds with ``H(X2|Y,X1)``. Equality on the left
    means the point coincides with the corner. Values are ``"interior"``,
    ``"corner"`` or ``"off"``.
    """
    tol = 1e-6 + 2 * e.err if tol is None else tol

    def flag(lower):
        if e.HS_Y > 0.5 * e.H12_Y + tol or e.HS_Y < lower - tol:
            return "off"
        return "corner" if abs(e.HS_Y - lower) <= tol else "interior"

    return {"A": flag(e.H2_Y1), "B": flag(e.H1_Y2)}


@dataclass(frozen=True)
class RegionReport:
    P: float
    gains: tuple
    spec: ModulationSpec
    a: tuple
    entropies: EntropySet
    A: RatePoint
    B: RatePoint
    Ap: RatePoint
    Bp: RatePoint
    faces: dict


def region_report(P, gains, spec, a=(1, 1), est: EntropyEstimator = EntropyEstimator()) -> RegionReport:
    e = conditional_entropies(P, gains, spec, a, est)
    A, B = mac_region(P, gains, spec, est, e)
    Ap, Bp = cfma_corners(P, gains, spec, a, est, e)
    return RegionReport(P, tuple(gains), spec.with_power(P), tuple(a), e, A, B, Ap, Bp, dominant_face_check(e))


def _db(x):
    return 10.0 ** (x / 10.0)


def min_power_db(target, gains, spec, a=(1, 1), est: EntropyEstimator = EntropyEstimator(),
                 lo_db: float = -10.0, hi_db: float = 40.0, tol_db: float = 1e-3,
                 rate_tol: float = 1e-4) -> float:
    """Smallest power (dB) at which ``target`` is dominated by ``A'`` or ``B'``.

    With a single gain the target is a point-to-point rate and the
    criterion is ``I(X;Y) >= target``.
    """
    gains = tuple(np.atleast_1d(gains))
    if len(gains) == 1:
        R = float(target if np.isscalar(target) else np.atleast_1d(target)[0])
        hx = np.log2(spec.M ** (2 if spec.is_complex else 1))
        if R > hx:
            raise InfeasibleTarget(f"rate {R} exceeds log2 of the constellation size")

        def ok(Pdb):
            H, HxY, _ = point_to_point_entropy(_db(Pdb), gains[0], spec, est)
            return H - HxY >= R - rate_tol
    else:
        R1, R2 = (target.R1, target.R2) if isinstance(target, RatePoint) else target
        hx = spec.L * (2 if spec.is_complex else 1)
        if max(R1, R2) > hx:
            raise InfeasibleTarget("target exceeds the input entropy")

        def ok(Pdb):
            Ap, Bp = cfma_corners(_db(Pdb), gains, spec, a, est)
            return any(R1 <= p.R1 + rate_tol and R2 <= p.R2 + rate_tol for p in (Ap, Bp))

    if not ok(hi_db):
        raise InfeasibleTarget(f"target not reached at {hi_db} dB")
    if ok(lo_db):
        return lo_db
    lo, hi = lo_db, hi_db
    while hi - lo > tol_db:
        mid = 0.5 * (lo + hi)
        lo, hi = (lo, mid) if ok(mid) else (mid, hi)
    return hi


CSV_COLUMNS = ("P_dB", "R1_A", "R2_A", "R1_B", "R2_B", "R1_Ap", "R2_Ap", "R1_Bp", "R2_Bp",
               "HS_Y", "face_flag_A", "face_flag_B")


def region_csv(powers_db, gains, spec, a=(1, 1), est: EntropyEstimator = EntropyEstimator()) -> str:
    buf = io.StringIO(newline="")
    buf.write(",".join(CSV_COLUMNS) + "\n")
    for pdb in powers_db:
        r = region_report(_db(pdb), gains, spec, a, est)
        vals = [pdb, r.A.R1, r.A.R2, r.B.R1, r.B.R2, r.Ap.R1, r.Ap.R2, r.Bp.R1, r.Bp.R2, r.entropies.HS_Y]
        buf.write(",".join(f"{v:.6g}" for v in vals) + f",{r.faces['A']},{r.faces['B']}\n")
    return buf.getvalue()
