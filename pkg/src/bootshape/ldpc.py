"""Systematic binary LDPC codes: alist I/O, GF(2) encoding, LLR construction and belief propagation.

LLRs are natural-log ratios ``ln P(bit=0)/P(bit=1)``; positive favours 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Optional

import numpy as np

LLR_MAX = 40.0
DEFAULT_MAX_ITER = 50
_PHI_FLOOR = 1e-30


class AlistError(ValueError):
    """Base class for alist parse failures."""


class AlistHeaderError(AlistError):
    pass


class AlistDegreeError(AlistError):
    pass


class AlistIndexError(AlistError):
    pass


class AlistConsistencyError(AlistError):
    """Row lists and column lists describe different matrices."""


class RankError(ValueError):
    """The parity-check matrix is rank deficient over GF(2)."""


@dataclass(frozen=True, eq=False)
class LdpcCode:
    """Parity-check matrix plus, once systematic, the map from data bits to check bits.

    For a systematic code the first ``k`` codeword bits are the data and the last
    ``m`` are checks, ``checks = encode_map @ data (mod 2)``. ``permutation[j]``
    is the column of the original matrix that became column ``j``. The matrix
    may keep linearly dependent rows; they do not change the code and are still
    used by the decoder.
    """

    parity: np.ndarray
    k: int
    encode_map: Optional[np.ndarray] = None
    permutation: Optional[np.ndarray] = None

    def __post_init__(self):
        h = np.asarray(self.parity, dtype=np.uint8)
        if h.ndim != 2 or np.any(h > 1):
            raise ValueError("parity-check matrix must be a 2-D 0/1 array")
        h.flags.writeable = False
        object.__setattr__(self, "parity", h)

    @property
    def n(self) -> int:
        return self.parity.shape[1]

    @property
    def m(self) -> int:
        return self.n - self.k

    @property
    def rate(self) -> float:
        return self.k / self.n

    @property
    def systematic(self) -> bool:
        return self.encode_map is not None

    @cached_property
    def column_degrees(self) -> np.ndarray:
        return self.parity.sum(axis=0).astype(int)

    @cached_property
    def row_degrees(self) -> np.ndarray:
        return self.parity.sum(axis=1).astype(int)

    @cached_property
    def graph(self) -> "_Graph":
        return _Graph.build(self.parity)

    def syndrome(self, words) -> np.ndarray:
        words = np.asarray(words)
        return (words.astype(np.float32) @ self.parity.T.astype(np.float32)).astype(np.int64) % 2


# -- alist ------------------------------------------------------------------


def _int_rows(lines):
    out = []
    for n, line in enumerate(lines):
        try:
            out.append([int(t) for t in line.split()])
        except ValueError:
            raise AlistHeaderError(f"non-integer token on line {n + 1}") from None
    return out


def parse_alist(text) -> LdpcCode:
    """Parse MacKay's alist format (zero padding in the index lists is ignored)."""
    if isinstance(text, bytes):
        text = text.decode("ascii")
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if len(lines) < 4:
        raise AlistHeaderError("alist needs at least the four header lines")
    rows = _int_rows(lines)
    if len(rows[0]) != 2 or len(rows[1]) != 2:
        raise AlistHeaderError("lines 1 and 2 must hold two integers each")
    n, m = rows[0]
    max_col, max_row = rows[1]
    if n <= 0 or m <= 0:
        raise AlistHeaderError(f"bad dimensions N={n} M={m}")
    col_deg, row_deg = rows[2], rows[3]
    if len(col_deg) != n or len(row_deg) != m:
        raise AlistDegreeError(
            f"expected {n} column and {m} row degrees, got {len(col_deg)} and {len(row_deg)}"
        )
    if max(col_deg) != max_col or max(row_deg) != max_row:
        raise AlistDegreeError("maximum degrees in line 2 disagree with the degree lists")
    if sum(col_deg) != sum(row_deg):
        raise AlistDegreeError("column and row degrees count a different number of edges")
    if len(rows) < 4 + n + m:
        raise AlistHeaderError(f"expected {n} column lists and {m} row lists")

    h_cols = np.zeros((m, n), dtype=np.uint8)
    for j in range(n):
        idx = [i for i in rows[4 + j] if i != 0]
        if len(idx) != col_deg[j]:
            raise AlistDegreeError(f"column {j + 1} lists {len(idx)} entries, degree says {col_deg[j]}")
        for i in idx:
            if not 1 <= i <= m:
                raise AlistIndexError(f"row index {i} out of range in column {j + 1}")
            h_cols[i - 1, j] = 1
    h_rows = np.zeros((m, n), dtype=np.uint8)
    for i in range(m):
        idx = [j for j in rows[4 + n + i] if j != 0]
        if len(idx) != row_deg[i]:
            raise AlistDegreeError(f"row {i + 1} lists {len(idx)} entries, degree says {row_deg[i]}")
        for j in idx:
            if not 1 <= j <= n:
                raise AlistIndexError(f"column index {j} out of range in row {i + 1}")
            h_rows[i, j - 1] = 1
    if not np.array_equal(h_cols, h_rows):
        raise AlistConsistencyError("row lists contradict column lists")
    if np.any(h_cols.sum(axis=0) != col_deg) or np.any(h_cols.sum(axis=1) != row_deg):
        raise AlistConsistencyError("repeated indices in adjacency lists")
    return LdpcCode(h_cols, n - m)


def to_alist(parity) -> str:
    h = np.asarray(parity, dtype=np.uint8)
    m, n = h.shape
    cols = [np.nonzero(h[:, j])[0] + 1 for j in range(n)]
    rows = [np.nonzero(h[i])[0] + 1 for i in range(m)]
    cd = [len(c) for c in cols]
    rd = [len(r) for r in rows]
    out = [f"{n} {m}", f"{max(cd)} {max(rd)}", " ".join(map(str, cd)), " ".join(map(str, rd))]
    out += [" ".join(map(str, c)) for c in cols]
    out += [" ".join(map(str, r)) for r in rows]
    return "\n".join(out) + "\n"


# -- GF(2) systematic form --------------------------------------------------


def make_systematic(code: LdpcCode, drop_redundant: bool = False) -> LdpcCode:
    """Permute columns so the trailing check positions carry an invertible submatrix.

    Gauss-Jordan elimination over GF(2) scans columns right to left, so a matrix
    that is already ``[P | I]`` keeps the identity permutation. Dependent rows
    raise :class:`RankError` unless ``drop_redundant`` is set, in which case the
    number of check bits equals the rank.
    """
    h = code.parity.astype(bool)
    rows, n = h.shape
    a = h.copy()
    pivots = []
    r = 0
    for col in range(n - 1, -1, -1):
        if r == rows:
            break
        nz = np.flatnonzero(a[r:, col])
        if nz.size == 0:
            continue
        p = r + nz[0]
        if p != r:
            a[[r, p]] = a[[p, r]]
        hit = np.flatnonzero(a[:, col])
        hit = hit[hit != r]
        a[hit] ^= a[r]
        pivots.append(col)
        r += 1
    rank = r
    if rank < rows and not drop_redundant:
        raise RankError(
            f"parity-check matrix has GF(2) rank {rank} with {rows} rows "
            f"({rows - rank} redundant); drop them or pass drop_redundant=True"
        )
    if rank == 0:
        raise RankError("parity-check matrix is zero")
    pivot_row = {col: i for i, col in enumerate(pivots)}
    check_cols = sorted(pivots)
    data_cols = [c for c in range(n) if c not in pivot_row]
    perm = np.array(data_cols + check_cols, dtype=np.int64)
    encode_map = np.array([a[pivot_row[c], data_cols] for c in check_cols], dtype=np.uint8)
    encode_map = encode_map.reshape(len(check_cols), len(data_cols))
    base = code.permutation if code.permutation is not None else np.arange(n)
    return LdpcCode(code.parity[:, perm], n - rank, encode_map, base[perm])


def gf2_rank(matrix) -> int:
    a = np.asarray(matrix, dtype=bool).copy()
    rows, cols = a.shape
    r = 0
    for col in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(a[r:, col])
        if nz.size == 0:
            continue
        p = r + nz[0]
        a[[r, p]] = a[[p, r]]
        hit = np.flatnonzero(a[:, col])
        hit = hit[hit != r]
        a[hit] ^= a[r]
        r += 1
    return r


def encode(code: LdpcCode, data) -> np.ndarray:
    """Systematic codeword ``data ++ checks``; accepts one word or a batch of rows."""
    if not code.systematic:
        raise ValueError("code is not in systematic form; call make_systematic first")
    data = np.asarray(data, dtype=np.uint8)
    if data.shape[-1] != code.k:
        raise ValueError(f"expected {code.k} data bits, got {data.shape[-1]}")
    checks = (data.astype(np.float32) @ code.encode_map.T.astype(np.float32)).astype(np.int64) & 1
    return np.concatenate([data, checks.astype(np.uint8)], axis=-1)


# -- LLRs -------------------------------------------------------------------


def _clamp(x):
    return np.clip(x, -LLR_MAX, LLR_MAX)


def _log_ratio(num, den):
    with np.errstate(divide="ignore"):
        return np.log(num) - np.log(den)


def bsc_llr_uniform(received, epsilon: float) -> np.ndarray:
    """Channel LLRs for BSC outputs under a uniform prior."""
    if not 0 <= epsilon < 0.5:
        raise ValueError(f"epsilon must be in [0, 0.5), got {epsilon}")
    y = np.asarray(received)
    mag = _clamp(_log_ratio(1 - epsilon, epsilon))
    return np.where(y == 0, mag, -mag).astype(float)


def bsc_llr_matched(received, epsilon: float, prior) -> np.ndarray:
    """BSC LLRs shifted by the prior log-ratio ``ln(pi0/pi1)`` of non-uniform data bits."""
    if not 0 <= epsilon < 0.5:
        raise ValueError(f"epsilon must be in [0, 0.5), got {epsilon}")
    pi0, pi1 = (float(x) for x in prior)
    if pi0 <= 0 or pi1 <= 0:
        raise ValueError("prior must put mass on both symbols")
    y = np.asarray(received)
    mag = _log_ratio(1 - epsilon, epsilon)
    shift = math.log(pi0) - math.log(pi1)
    return _clamp(np.where(y == 0, mag + shift, shift - mag).astype(float))


def known_bit_llr(bits) -> np.ndarray:
    """Saturated LLRs for bits the decoder knows with certainty."""
    b = np.asarray(bits)
    return np.where(b == 0, LLR_MAX, -LLR_MAX).astype(float)


# -- belief propagation -----------------------------------------------------


@dataclass(frozen=True, eq=False)
class _Graph:
    """Tanner-graph edge lists, edges ordered by check node."""

    edge_var: np.ndarray
    edge_check: np.ndarray
    check_starts: np.ndarray
    edge_seg: np.ndarray  # index of each edge's check among checks with edges
    by_var: np.ndarray  # permutation grouping edges by variable
    var_starts: np.ndarray
    var_has_edges: np.ndarray
    check_has_edges: np.ndarray
    n: int

    @classmethod
    def build(cls, parity):
        checks, vars_ = np.nonzero(parity)  # row-major: already grouped by check
        m, n = parity.shape
        by_var = np.argsort(vars_, kind="stable")
        check_deg = np.bincount(checks, minlength=m)
        var_deg = np.bincount(vars_, minlength=n)
        check_starts = np.concatenate([[0], np.cumsum(check_deg)[:-1]])[check_deg > 0]
        var_starts = np.concatenate([[0], np.cumsum(var_deg)[:-1]])[var_deg > 0]
        edge_seg = np.cumsum(check_deg > 0)[checks] - 1
        return cls(vars_, checks, check_starts, edge_seg, by_var, var_starts, var_deg > 0, check_deg > 0, n)

    def var_sum(self, msgs):
        """Per-variable sum of edge messages, shape (batch, n)."""
        out = np.zeros((msgs.shape[0], self.n))
        if msgs.shape[1]:
            out[:, self.var_has_edges] = np.add.reduceat(msgs[:, self.by_var], self.var_starts, axis=1)
        return out

    def check_reduce(self, ufunc, values):
        """Per-check reduction broadcast back onto the edges."""
        return ufunc.reduceat(values, self.check_starts, axis=1)[:, self.edge_seg]

    def syndrome_ok(self, hard):
        if self.edge_var.size == 0:
            return np.ones(hard.shape[0], dtype=bool)
        par = np.add.reduceat(hard[:, self.edge_var].astype(np.int64), self.check_starts, axis=1)
        return ~np.any(par & 1, axis=1)


def _phi(x):
    x = np.maximum(x, _PHI_FLOOR)
    return np.log1p(2.0 / np.expm1(x))


@dataclass
class DecodeResult:
    bits: np.ndarray
    converged: np.ndarray
    iterations: np.ndarray

    def __iter__(self):
        return iter((self.bits, self.converged, self.iterations))


def decode_bp(
    code: LdpcCode, llrs, max_iter: int = DEFAULT_MAX_ITER, algorithm: str = "sum-product"
) -> DecodeResult:
    """Flooding belief propagation with early stop on a zero syndrome.

    ``llrs`` is one word of ``n`` LLRs or a ``(batch, n)`` array; the result has
    the matching shape. ``converged`` means the hard decision satisfies every
    parity check and no posterior LLR is exactly zero (an undecided bit).
    ``algorithm`` is ``"sum-product"`` (tanh rule) or ``"min-sum"``.
    """
    if algorithm not in ("sum-product", "min-sum"):
        raise ValueError(f"unknown algorithm {algorithm!r}")
    llrs = np.asarray(llrs, dtype=float)
    single = llrs.ndim == 1
    llrs = np.atleast_2d(llrs)
    if llrs.shape[1] != code.n:
        raise ValueError(f"expected {code.n} LLRs per word, got {llrs.shape[1]}")
    g = code.graph
    batch = llrs.shape[0]
    llrs = _clamp(llrs)

    bits = (llrs < 0).astype(np.uint8)
    converged = g.syndrome_ok(bits) & np.all(llrs != 0, axis=1)
    iterations = np.zeros(batch, dtype=np.int64)
    active = np.flatnonzero(~converged)
    v2c = llrs[active][:, g.edge_var]
    prior = llrs[active]

    for it in range(1, max_iter + 1):
        if active.size == 0:
            break
        neg = v2c < 0
        flip = g.check_reduce(np.add, neg.astype(np.int64)) - neg
        mag = np.abs(v2c)
        if algorithm == "sum-product":
            f = _phi(mag)
            ext = _phi(np.maximum(g.check_reduce(np.add, f) - f, _PHI_FLOOR))
            if not mag.all():
                # an erased neighbour makes the outgoing message exactly zero
                erased = mag == 0
                others = g.check_reduce(np.add, erased.astype(np.int64)) - erased
                ext = np.where(others > 0, 0.0, ext)
        else:
            ext = _min_excluding_self(g, mag)
        c2v = _clamp(np.where(flip & 1, -ext, ext))
        total = prior + g.var_sum(c2v)
        hard = (total < 0).astype(np.uint8)
        done = g.syndrome_ok(hard) & np.all(total != 0, axis=1)
        bits[active] = hard
        iterations[active] = it
        converged[active] = done
        keep = ~done
        active = active[keep]
        prior = prior[keep]
        v2c = _clamp(total[keep][:, g.edge_var] - c2v[keep])

    if single:
        return DecodeResult(bits[0], bool(converged[0]), int(iterations[0]))
    return DecodeResult(bits, converged, iterations)


def _min_excluding_self(g: _Graph, mag):
    min1 = g.check_reduce(np.minimum, mag)
    is_min = mag == min1
    ties = g.check_reduce(np.add, is_min.astype(np.int64))
    min2 = g.check_reduce(np.minimum, np.where(is_min, np.inf, mag))
    min2 = np.where(np.isinf(min2), LLR_MAX, min2)
    return np.where(is_min & (ties == 1), min2, min1)


# -- code construction ------------------------------------------------------


def _progressive_graph(n, m, col_degree, rng):
    """Grow a Tanner graph one edge at a time, avoiding 4-cycles where possible.

    Each new edge of a variable goes to a check with the lowest current degree
    among those not sharing a variable with the variable's existing checks.
    """
    target = np.full(m, (n * col_degree) // m)
    target[: (n * col_degree) % m] += 1
    rng.shuffle(target)
    degree = np.zeros(m, dtype=np.int64)
    check_vars: list[list[int]] = [[] for _ in range(m)]
    var_checks: list[list[int]] = [[] for _ in range(n)]
    for v in range(n):
        for _ in range(col_degree):
            mine = var_checks[v]
            blocked = np.zeros(m, dtype=bool)
            blocked[mine] = True
            near = blocked.copy()
            for c in mine:
                for u in check_vars[c]:
                    near[var_checks[u]] = True
            for mask in (near | (degree >= target), near, blocked):
                cand = np.flatnonzero(~mask)
                if cand.size:
                    break
            low = cand[degree[cand] == degree[cand].min()]
            c = int(rng.choice(low))
            degree[c] += 1
            check_vars[c].append(v)
            var_checks[v].append(c)
    h = np.zeros((m, n), dtype=np.uint8)
    for v, cs in enumerate(var_checks):
        h[cs, v] = 1
    return h


def data_length(n: int, rate: float, align: int = 4) -> int:
    """Number of data bits for a length-``n`` code of nominal ``rate``, rounded to ``align``."""
    k = int(round(n * rate / align)) * align
    if not 0 < k < n:
        raise ValueError(f"rate {rate} leaves no data or no check bits at n={n}")
    return k


@lru_cache(maxsize=16)
def regular_code(n: int, rate: float, seed: int = 0, col_degree: int = 3, align: int = 4) -> LdpcCode:
    """Seeded pseudo-random column-regular LDPC code in systematic form.

    Check degrees are as equal as the dimensions allow. Constructions whose
    parity-check matrix is rank deficient are redrawn from the next seed in
    ``(seed, attempt)``, so the result always has exactly ``n - k`` independent
    checks.
    """
    k = data_length(n, rate, align)
    m = n - k
    for attempt in range(32):
        rng = np.random.default_rng([seed, attempt, n, m, col_degree])
        h = _progressive_graph(n, m, col_degree, rng)
        try:
            return make_systematic(LdpcCode(h, k))
        except RankError:
            continue
    raise RankError(f"no full-rank construction found for n={n}, m={m}")

