"""
Binary linear codes: parity-check matrices, alist I/O, systematic encoding
and nested-code construction by merging parity checks.

All indices in the Python API are 0-based; the alist format is 1-based.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np


class AlistError(ValueError):
    """Malformed alist text. ``line`` is the 1-based offending line."""

    def __init__(self, line: int, msg: str):
        super().__init__(f"line {line}: {msg}")
        self.line = line


class MergeRefused(ValueError):
    pass


class NoMessageSpace(ValueError):
    pass


class ConstructionFailed(RuntimeError):
    def __init__(self, done: int, wanted: int):
        super().__init__(f"found only {done} of {wanted} legal merges")
        self.done = done
        self.wanted = wanted


@dataclass(frozen=True, eq=False)
class ParityCheckMatrix:
    """Sparse binary parity-check matrix with Tanner-graph adjacency.

    ``check_rows[c]`` holds the sorted variable indices of check ``c`` and
    ``var_cols[v]`` the sorted check indices of variable ``v``.
    """

    n: int
    m: int
    check_rows: tuple
    var_cols: tuple = field(repr=False)

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ValueError("need n >= 1 and m >= 1")
        if len(self.check_rows) != self.m or len(self.var_cols) != self.n:
            raise ValueError("adjacency list counts do not match (n, m)")
        edges_r = set()
        for c, row in enumerate(self.check_rows):
            if len(set(row)) != len(row):
                raise ValueError(f"duplicate variable in check {c}")
            for v in row:
                if not 0 <= v < self.n:
                    raise ValueError(f"variable index {v} out of range")
                edges_r.add((c, int(v)))
        edges_c = set()
        for v, col in enumerate(self.var_cols):
            if len(set(col)) != len(col):
                raise ValueError(f"duplicate check in variable {v}")
            for c in col:
                if not 0 <= c < self.m:
                    raise ValueError(f"check index {c} out of range")
                edges_c.add((int(c), v))
        if edges_r != edges_c:
            raise ValueError("check_rows and var_cols disagree")

    @classmethod
    def from_rows(cls, n: int, rows) -> "ParityCheckMatrix":
        rows = tuple(tuple(sorted(int(v) for v in r)) for r in rows)
        cols = [[] for _ in range(n)]
        for c, r in enumerate(rows):
            for v in r:
                cols[v].append(c)
        return cls(n, len(rows), rows, tuple(tuple(c) for c in cols))

    @classmethod
    def from_dense(cls, H) -> "ParityCheckMatrix":
        H = np.asarray(H) % 2
        return cls.from_rows(H.shape[1], [np.flatnonzero(r) for r in H])

    def dense(self) -> np.ndarray:
        H = np.zeros((self.m, self.n), dtype=np.uint8)
        for c, row in enumerate(self.check_rows):
            H[c, list(row)] = 1
        return H

    def __eq__(self, other):
        if not isinstance(other, ParityCheckMatrix):
            return NotImplemented
        return self.n == other.n and self.check_rows == other.check_rows

    def __hash__(self):
        return hash((self.n, self.check_rows))

    @cached_property
    def edges(self):
        """Check-major edge arrays ``(var, check, row_start)`` for message passing."""
        ev = np.fromiter((v for row in self.check_rows for v in row), dtype=np.int64)
        ec = np.repeat(np.arange(self.m), [len(r) for r in self.check_rows])
        starts = np.concatenate(([0], np.cumsum([len(r) for r in self.check_rows])[:-1]))
        return ev, ec, starts.astype(np.int64)

    def syndrome(self, u) -> np.ndarray:
        u = np.asarray(u)
        if u.shape != (self.n,):
            raise ValueError(f"expected length {self.n}, got {u.shape}")
        ev, _, starts = self.edges
        return (np.add.reduceat(u[ev].astype(np.int64) & 1, starts) & 1).astype(np.uint8)

    @cached_property
    def rank(self) -> int:
        return gf2_rank(self.dense())


def is_codeword(H: ParityCheckMatrix, u) -> bool:
    return not H.syndrome(u).any()


# ---------------------------------------------------------------------------
# GF(2) elimination


def gf2_rref(M, col_order=None):
    """Reduced row echelon form over GF(2).

    Columns are scanned in ``col_order`` (default natural order). Returns the
    reduced matrix (rows beyond the rank are zero) and the pivot columns.
    """
    A = np.array(M, dtype=bool) if not isinstance(M, np.ndarray) else (M % 2).astype(bool)
    rows, cols = A.shape
    order = range(cols) if col_order is None else col_order
    pivots = []
    r = 0
    for c in order:
        if r == rows:
            break
        nz = np.flatnonzero(A[r:, c])
        if nz.size == 0:
            continue
        p = r + nz[0]
        if p != r:
            A[[r, p]] = A[[p, r]]
        hit = np.flatnonzero(A[:, c])
        hit = hit[hit != r]
        if hit.size:
            A[hit] ^= A[r]
        pivots.append(c)
        r += 1
    return A.astype(np.uint8), pivots


def gf2_rank(M) -> int:
    return len(gf2_rref(M)[1])


@dataclass(frozen=True, eq=False)
class Encoder:
    """Systematic encoder for the code with parity-check matrix ``H``.

    Message bits land on ``info_positions``; the parity positions are filled
    from ``parity_map`` so codewords stay in the original variable order.
    """

    H: ParityCheckMatrix
    info_positions: np.ndarray
    parity_positions: np.ndarray
    parity_map: np.ndarray = field(repr=False)

    @property
    def k(self) -> int:
        return len(self.info_positions)

    @property
    def n(self) -> int:
        return self.H.n

    @property
    def permutation(self) -> np.ndarray:
        """Codeword position of systematic coordinate ``i``."""
        return np.concatenate((self.info_positions, self.parity_positions))

    @cached_property
    def generator(self) -> np.ndarray:
        G = np.zeros((self.k, self.n), dtype=np.uint8)
        G[np.arange(self.k), self.info_positions] = 1
        G[:, self.parity_positions] = self.parity_map.T
        return G


def derive_encoder(H: ParityCheckMatrix, prefer_pivots=None) -> Encoder:
    """Build a systematic encoder by Gaussian elimination with column pivoting.

    ``prefer_pivots`` lists columns to try as pivots first; passing the parity
    positions of a supercode's encoder keeps the information positions of a
    subcode inside the supercode's.
    """
    if prefer_pivots is None:
        order = None
    else:
        first = list(dict.fromkeys(int(c) for c in prefer_pivots))
        seen = set(first)
        order = first + [c for c in range(H.n) if c not in seen]
    R, piv = gf2_rref(H.dense(), order)
    r = len(piv)
    if r >= H.n:
        raise NoMessageSpace("parity-check matrix leaves no message space (k = 0)")
    pivots = np.array(piv, dtype=np.int64)
    free = np.setdiff1d(np.arange(H.n), pivots)
    A = R[:r][:, free]
    return Encoder(H, free, pivots, A.astype(np.uint8))


def encode(enc: Encoder, message) -> np.ndarray:
    msg = np.asarray(message)
    if msg.shape[-1] != enc.k:
        raise ValueError(f"message length {msg.shape[-1]} != k = {enc.k}")
    msg = msg.astype(np.uint8) & 1
    out = np.zeros(msg.shape[:-1] + (enc.n,), dtype=np.uint8)
    out[..., enc.info_positions] = msg
    par = (msg.astype(np.int64) @ enc.parity_map.T.astype(np.int64)) & 1
    out[..., enc.parity_positions] = par
    return out


def full_rank_rows(H: ParityCheckMatrix) -> ParityCheckMatrix:
    """Drop linearly dependent checks, keeping the earliest independent ones."""
    _, piv = gf2_rref(H.dense().T)
    if len(piv) == H.m:
        return H
    return ParityCheckMatrix.from_rows(H.n, [H.check_rows[c] for c in sorted(piv)])


# ---------------------------------------------------------------------------
# alist


def parse_alist(text: str) -> ParityCheckMatrix:
    lines = [(i + 1, ln.split()) for i, ln in enumerate(text.splitlines())]
    lines = [(no, tok) for no, tok in lines if tok]
    pos = 0

    def take(count=None):
        nonlocal pos
        if pos >= len(lines):
            last = lines[-1][0] + 1 if lines else 1
            raise AlistError(last, "unexpected end of input")
        no, tok = lines[pos]
        pos += 1
        try:
            vals = [int(t) for t in tok]
        except ValueError:
            raise AlistError(no, "non-integer entry") from None
        if count is not None and len(vals) != count:
            raise AlistError(no, f"expected {count} entries, found {len(vals)}")
        return no, vals

    no, (n, m) = take(2)
    if n < 1 or m < 1:
        raise AlistError(no, "n and m must be positive")
    no, (maxc, maxr) = take(2)
    no_cd, col_deg = take(n)
    no_rd, row_deg = take(m)

    cols = []
    for v in range(n):
        no, vals = take()
        idx = [x for x in vals if x != 0]
        if len(vals) > maxc or len(idx) != col_deg[v]:
            raise AlistError(no, f"variable {v + 1}: degree mismatch")
        if any(not 1 <= x <= m for x in idx):
            raise AlistError(no, "check index out of range")
        if len(set(idx)) != len(idx):
            raise AlistError(no, "duplicate check index")
        cols.append(sorted(x - 1 for x in idx))
    rows = []
    for c in range(m):
        no, vals = take()
        idx = [x for x in vals if x != 0]
        if len(vals) > maxr or len(idx) != row_deg[c]:
            raise AlistError(no, f"check {c + 1}: degree mismatch")
        if any(not 1 <= x <= n for x in idx):
            raise AlistError(no, "variable index out of range")
        if len(set(idx)) != len(idx):
            raise AlistError(no, "duplicate variable index")
        rows.append(sorted(x - 1 for x in idx))
        edges_row = {(c, v) for v in rows[-1]}
        edges_col = {(c, v) for v in range(n) if c in cols[v]}
        if edges_row != edges_col:
            raise AlistError(no, f"check {c + 1} disagrees with the variable lists")
    if pos != len(lines):
        raise AlistError(lines[pos][0], "trailing content after adjacency lists")
    if max(col_deg) != maxc or max(row_deg) != maxr:
        raise AlistError(2, "maximum degrees do not match degree lists")
    return ParityCheckMatrix(n, m, tuple(tuple(r) for r in rows), tuple(tuple(c) for c in cols))


def write_alist(H: ParityCheckMatrix) -> str:
    cd = [len(c) for c in H.var_cols]
    rd = [len(r) for r in H.check_rows]
    out = [f"{H.n} {H.m}", f"{max(cd)} {max(rd)}", " ".join(map(str, cd)), " ".join(map(str, rd))]
    out += [" ".join(str(c + 1) for c in col) for col in H.var_cols]
    out += [" ".join(str(v + 1) for v in row) for row in H.check_rows]
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# merging


def _merged(H: ParityCheckMatrix, i: int, j: int, new_row) -> ParityCheckMatrix:
    lo, hi = min(i, j), max(i, j)
    rows = list(H.check_rows)
    rows[lo] = tuple(sorted(new_row))
    del rows[hi]
    return ParityCheckMatrix.from_rows(H.n, rows)


def _check_pair(H, i, j):
    if i == j:
        raise MergeRefused("cannot merge a check with itself")
    for c in (i, j):
        if not 0 <= c < H.m:
            raise IndexError(f"check index {c} out of range")


def merge_checks(H: ParityCheckMatrix, i: int, j: int) -> ParityCheckMatrix:
    """Replace checks ``i`` and ``j`` by their sum; requires disjoint supports.

    The merged check takes the position of the smaller index.
    """
    _check_pair(H, i, j)
    a, b = set(H.check_rows[i]), set(H.check_rows[j])
    if a & b:
        raise MergeRefused(f"checks {i} and {j} share variables {sorted(a & b)}")
    return _merged(H, i, j, a | b)


def merge_checks_xor(H: ParityCheckMatrix, i: int, j: int) -> ParityCheckMatrix:
    """Like :func:`merge_checks` but shared variables cancel.

    Refused when the sum is the zero row or when a shared variable would be
    left without any check.
    """
    _check_pair(H, i, j)
    a, b = set(H.check_rows[i]), set(H.check_rows[j])
    new = a ^ b
    if not new:
        raise MergeRefused("merged check would be empty")
    lonely = [v for v in a & b if len(H.var_cols[v]) <= 2]
    if lonely:
        raise MergeRefused(f"variables {sorted(lonely)} would be left isolated")
    return _merged(H, i, j, new)


@dataclass(frozen=True)
class NestedCodePair:
    """Lower-rate code ``H_sub`` and the supercode ``H_super`` obtained by merging."""

    H_sub: ParityCheckMatrix
    H_super: ParityCheckMatrix
    merge_log: tuple = ()

    @property
    def n(self) -> int:
        return self.H_sub.n

    @cached_property
    def encoders(self) -> tuple:
        """``(sub, super)`` encoders with the subcode's info positions nested inside."""
        sup = derive_encoder(self.H_super)
        sub = derive_encoder(self.H_sub, prefer_pivots=sup.parity_positions)
        return sub, sup

    @property
    def rates(self) -> tuple:
        sub, sup = self.encoders
        return sup.k / self.n, sub.k / self.n


def build_nested_pair(H_base: ParityCheckMatrix, merges: int, seed: int = 0,
                      allow_xor: bool = True, max_attempts: int = 20000) -> NestedCodePair:
    """Merge ``merges`` random check pairs of ``H_base`` into a supercode.

    Disjoint-support pairs are preferred; XOR merges with shared variables are
    the fallback when ``allow_xor``. Each accepted merge lowers the rank by
    exactly one, so the supercode gains exactly ``merges`` dimensions.
    """
    if merges < 0 or merges > H_base.m - 1:
        raise ValueError(f"merges must lie in [0, {H_base.m - 1}]")
    rng = np.random.default_rng(seed)
    H = H_base
    log = []
    full_rank = H_base.rank == H_base.m
    rank = H_base.rank
    attempts = 0
    while len(log) < merges:
        cand = None
        for _ in range(64):
            attempts += 1
            i, j = (int(x) for x in rng.choice(H.m, size=2, replace=False))
            if not set(H.check_rows[i]) & set(H.check_rows[j]):
                cand = merge_checks(H, i, j)
                break
        if cand is None and allow_xor:
            for _ in range(64):
                attempts += 1
                i, j = (int(x) for x in rng.choice(H.m, size=2, replace=False))
                try:
                    cand = merge_checks_xor(H, i, j)
                    break
                except MergeRefused:
                    continue
        if cand is not None:
            merged = cand.check_rows[min(i, j)]
            dup = sum(r == merged for r in cand.check_rows) > 1
            if not dup and not full_rank:
                new_rank = cand.rank
                dup = new_rank != rank - 1
            if not dup:
                H = cand
                log.append((i, j))
                if not full_rank:
                    rank -= 1
        if attempts > max_attempts:
            raise ConstructionFailed(len(log), merges)
    return NestedCodePair(H_base, H, tuple(log))


def regular_ldpc(n: int, dv: int, dc: int, seed: int = 0, full_rank: bool = True) -> ParityCheckMatrix:
    """Random (dv, dc)-regular LDPC code, built greedily to avoid 4-cycles.

    Each variable picks ``dv`` checks among those with the most free sockets,
    skipping checks that already share a neighbour with it when possible.
    With ``full_rank`` dependent checks are dropped afterwards.
    """
    if (n * dv) % dc:
        raise ValueError("n * dv must be divisible by dc")
    m = n * dv // dc
    rng = np.random.default_rng(seed)
    free = np.full(m, dc)
    rows = [set() for _ in range(m)]
    cols = []
    for v in rng.permutation(n):
        chosen = []
        near = set()
        for _ in range(dv):
            ok = free > 0
            ok[chosen] = False
            pool = np.flatnonzero(ok)
            if pool.size == 0:
                break
            clean = np.array([c for c in pool if not (rows[c] & near)], dtype=np.int64)
            pick_from = clean if clean.size else pool
            best = pick_from[free[pick_from] == free[pick_from].max()]
            c = int(rng.choice(best))
            chosen.append(c)
            near |= rows[c]
        for c in chosen:
            rows[c].add(int(v))
            free[c] -= 1
        cols.append(chosen)
    H = ParityCheckMatrix.from_rows(n, [r for r in rows if r])
    return full_rank_rows(H) if full_rank else H
