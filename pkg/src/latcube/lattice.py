"""Rank-1 lattices, the reconstruction property, and generating-vector search.

A rank-1 lattice is the point set x_j = (j z / M mod 1), j = 0..M-1, given
by a generating vector z in Z^d and a size M.  Nodes are recentred from
[0, 1)^d to [-1/2, 1/2)^d before any transformation is applied.  A lattice
reconstructs a frequency set I when k -> k.z mod M is injective on I, which
is what makes the single-FFT evaluation/reconstruction pair exact.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError, LatticeSearchError
from .freqset import FrequencySet
from .transforms import ProductTransform

# int64 dot products k.z are safe as long as d * max|k| * max(z) stays well
# below 2^63; beyond that we fall back to exact Python integers
_INT64_SAFE = 2**62


def frequency_residues(indices: np.ndarray, z, M: int) -> np.ndarray:
    """k.z mod M for every row k, exact for arbitrarily large operands."""
    K = np.asarray(indices, dtype=np.int64)
    zv = np.asarray(z, dtype=np.int64)
    kmax = int(np.max(np.abs(K))) if K.size else 0
    zmax = int(np.max(np.abs(zv))) if zv.size else 0
    if K.shape[1] * max(kmax, 1) * max(zmax, 1) < _INT64_SAFE:
        return (K @ zv) % M
    # exact fallback: Python integers are unbounded
    out = [int(sum(int(k) * int(w) for k, w in zip(row, zv))) % M for row in K]
    return np.asarray(out, dtype=np.int64)


class Rank1Lattice:
    """Lattice x_j = (j z / M mod 1), recentred to [-1/2, 1/2)^d.

    Components of z are stored reduced mod M into [0, M).
    """

    __slots__ = ("z", "M")

    def __init__(self, z, M: int):
        M = int(M)
        if M < 1:
            raise DomainError(f"lattice size must be >= 1, got {M}")
        zv = tuple(int(c) % M for c in np.asarray(z).ravel())
        if not zv:
            raise DomainError("generating vector must have at least one component")
        self.z = zv
        self.M = M

    @property
    def dim(self) -> int:
        return len(self.z)

    def nodes(self) -> np.ndarray:
        """All M nodes, j ascending, shape (M, d).

        j*z_k mod M is formed in exact integer arithmetic and recentring is
        folded in before the single floating division, so coordinates are
        bit-stable and lie in [-1/2, 1/2).
        """
        j = np.arange(self.M, dtype=np.int64)
        zv = np.asarray(self.z, dtype=np.int64)
        if self.M * max(max(self.z), 1) >= _INT64_SAFE:
            r = np.asarray(
                [[(int(jj) * c) % self.M for c in self.z] for jj in j], dtype=np.int64
            )
        else:
            r = (j[:, None] * zv[None, :]) % self.M
        q = (2 * r + self.M) % (2 * self.M)
        return q / float(2 * self.M) - 0.5

    def __repr__(self):
        return f"Rank1Lattice(z={self.z}, M={self.M})"

    def __eq__(self, other):
        return isinstance(other, Rank1Lattice) and self.z == other.z and self.M == other.M

    def __hash__(self):
        return hash((self.z, self.M))


class TransformedLattice:
    """Rank-1 lattice pushed through a coordinatewise transformation."""

    __slots__ = ("base", "map")

    def __init__(self, base: Rank1Lattice, map: ProductTransform):
        if base.dim != map.dim:
            raise DomainError(
                f"lattice dimension {base.dim} does not match transform dimension {map.dim}"
            )
        self.base = base
        self.map = map

    @property
    def dim(self) -> int:
        return self.base.dim

    def nodes(self) -> np.ndarray:
        return self.map.forward(self.base.nodes())

    def __repr__(self):
        return f"TransformedLattice({self.base!r}, {self.map.label()})"


def is_reconstructing(lattice: Rank1Lattice, I: FrequencySet) -> bool:
    """True iff k -> k.z mod M is injective on I.

    Injectivity on I is equivalent to t.z != 0 mod M for every nonzero t in
    the difference set of I (each such t is a difference of two distinct
    elements of I), so the O(|I|) distinctness check replaces the quadratic
    difference-set scan.
    """
    if lattice.dim != I.dim:
        raise DomainError(
            f"lattice dimension {lattice.dim} does not match set dimension {I.dim}"
        )
    if len(I) > lattice.M:
        return False
    res = frequency_residues(I.indices, lattice.z, lattice.M)
    return np.unique(res).size == len(I)


def _distinct_rows_mask(R: np.ndarray) -> np.ndarray:
    """Boolean mask over rows of R whose entries are pairwise distinct."""
    if R.shape[1] < 2:
        return np.ones(R.shape[0], dtype=bool)
    S = np.sort(R, axis=1)
    return ~np.any(S[:, 1:] == S[:, :-1], axis=1)


def _witness_rows(n: int, M: int) -> np.ndarray:
    """Strided subset of frequency rows used to reject candidates cheaply.

    A residue collision inside any subset already disproves injectivity,
    so the subset test is sound; it is sized ~4 sqrt(M) to make surviving
    bad candidates rare (collision counts scale with (size)^2 / M).
    """
    target = min(n, 4 * math.isqrt(M) + 64)
    stride = max(1, n // target)
    return np.arange(0, n, stride)


def _first_injective(base: np.ndarray, ks: np.ndarray, vals: np.ndarray, M: int,
                     full_base: np.ndarray | None = None,
                     full_ks: np.ndarray | None = None) -> int | None:
    """Smallest v in vals with base + ks*v injective mod M, or None.

    base/ks may be a witness subset; survivors are re-tested against
    full_base/full_ks when given.
    """
    dtype = _scan_dtype(M, int(np.max(np.abs(ks))) if ks.size else 0, 2)
    R = (base.astype(dtype)[None, :] + np.outer(vals, ks).astype(dtype)) % M
    hits = np.flatnonzero(_distinct_rows_mask(R))
    if full_base is None:
        return int(vals[hits[0]]) if hits.size else None
    for i in hits:
        v = int(vals[i])
        res = (full_base + full_ks * v) % M
        if np.unique(res).size == res.size:
            return v
    return None


def _scan_dtype(M: int, kmax: int, d: int):
    """int32 when every intermediate fits, halving sort traffic."""
    return np.int32 if (d * max(kmax, 1) * M) < 2**31 - 1 else np.int64


def _korobov_at(K: np.ndarray, M: int, batch: int, scan_hi: int | None = None) -> tuple | None:
    """Smallest Korobov vector (1, a, ..., a^(d-1)) mod M injective on K, or None.

    scan_hi caps the exclusive upper end of the multiplier scan (default M).
    """
    n, d = K.shape
    if M == 1:
        return (0,) * d if n <= 1 else None
    if d == 1:
        z = np.asarray([1], dtype=np.int64)
        res = frequency_residues(K, z, M)
        return (1,) if np.unique(res).size == n else None
    scan_hi = M if scan_hi is None else min(scan_hi, M)
    wit = _witness_rows(n, M)
    dtype = _scan_dtype(M, int(np.max(np.abs(K))), d)
    Kw = K[wit].astype(dtype)
    full_check_needed = wit.size < n
    for start in range(1, scan_hi, batch):
        avals = np.arange(start, min(start + batch, scan_hi), dtype=np.int64)
        Z = np.empty((d, avals.size), dtype=np.int64)
        Z[0] = 1 % M
        for s in range(1, d):
            Z[s] = (Z[s - 1] * avals) % M
        # witness residues per candidate row: k_1 + sum_s z_s k_s, laid out (B, nw)
        R = np.broadcast_to((Kw[:, 0] % M).astype(dtype), (avals.size, Kw.shape[0])).copy()
        for s in range(1, d):
            R += Z[s].astype(dtype)[:, None] * Kw[:, s][None, :]
            R %= M
        for i in np.flatnonzero(_distinct_rows_mask(R)):
            z = tuple(int(Z[s, i]) for s in range(d))
            if not full_check_needed:
                return z
            res = frequency_residues(K, z, M)
            if np.unique(res).size == n:
                return z
    return None


_D2_SIEVE_BOX_CAP = 1 << 24


def _d2_difference_table(K: np.ndarray):
    """Difference set of a 2-D frequency set, grouped by second component.

    The set sits inside a bounded box, so it is read off the support of the
    integer autocorrelation of the indicator array (computed by FFT; counts
    are integers, making the 0.5 threshold exact).  Returns the nonzero
    purely-horizontal |t_1| values and pairs (t_2 > 0, array of t_1 values).
    """
    from scipy.signal import fftconvolve

    k1 = K[:, 0] - K[:, 0].min()
    k2 = K[:, 1] - K[:, 1].min()
    B = np.zeros((int(k1.max()) + 1, int(k2.max()) + 1))
    B[k1, k2] = 1.0
    corr = fftconvolve(B, B[::-1, ::-1])
    present = corr > 0.5
    c1, c2 = B.shape[0] - 1, B.shape[1] - 1
    t1_grid = np.arange(present.shape[0]) - c1
    horiz = t1_grid[np.flatnonzero(present[:, c2])]
    horiz = np.abs(horiz[horiz != 0])
    groups = []
    for col in range(c2 + 1, present.shape[1]):
        rows = np.flatnonzero(present[:, col])
        if rows.size:
            groups.append((col - c2, t1_grid[rows].astype(np.int64)))
    return horiz, groups


def _korobov_d2_sieve_at(table, M: int) -> tuple | None:
    """Exact smallest Korobov multiplier for d = 2 via the difference set.

    a is unusable iff some difference t with t_2 != 0 solves
    a t_2 = -t_1 (mod M); pure-horizontal differences rule out the size M
    altogether when M divides one of them.  Marking those arithmetic
    progressions and taking the first unmarked a >= 1 reproduces the
    brute-force scan order exactly.
    """
    horiz, groups = table
    if horiz.size and np.any(horiz % M == 0):
        return None  # t.z = t_1 vanishes mod M for every a: no vector exists
    bad = np.zeros(M, dtype=bool)
    bad[0] = True
    for v, t1s in groups:
        g = math.gcd(v, M)
        mg = M // g
        if g == 1:
            inv = pow(v, -1, M)
            bad[((-t1s) * inv) % M] = True
        else:
            sel = t1s[t1s % g == 0]
            if sel.size:
                inv = pow((v // g) % mg, -1, mg)
                a0 = ((-(sel // g)) * inv) % mg
                for j in range(g):
                    bad[a0 + j * mg] = True
    good = np.flatnonzero(~bad)
    if good.size:
        return (1, int(good[0]))
    return None


def _cbc_at(K: np.ndarray, M: int, projections: list, batch: int,
            scan_hi: int | None = None) -> tuple | None:
    """Greedy component-by-component vector for size M, or None on failure.

    z_1 is fixed to 1; each later component is the smallest value in
    0..M-1 (capped by scan_hi) keeping the residue map injective on the
    projection of the frequency set to the coordinates chosen so far.
    """
    n, d = K.shape
    if M == 1:
        return (0,) * d if n <= 1 else None
    scan_hi = M if scan_hi is None else min(scan_hi, M)
    z = [1]
    P1 = projections[0]
    if np.unique(P1[:, 0] % M).size != P1.shape[0]:
        return None
    for s in range(2, d + 1):
        P = projections[s - 1]
        prev = (P[:, : s - 1] @ np.asarray(z, dtype=np.int64)) % M
        ks = P[:, s - 1].copy()
        wit = _witness_rows(P.shape[0], M)
        use_witness = wit.size < P.shape[0]
        found = None
        for start in range(0, scan_hi, batch):
            vals = np.arange(start, min(start + batch, scan_hi), dtype=np.int64)
            if use_witness:
                found = _first_injective(prev[wit], ks[wit], vals, M,
                                         full_base=prev, full_ks=ks)
            else:
                found = _first_injective(prev, ks, vals, M)
            if found is not None:
                break
        if found is None:
            return None
        z.append(found)
    return tuple(z)


def find_reconstructing_lattice(
    I: FrequencySet,
    strategy: str = "korobov",
    min_size: int | None = None,
    cap_factor: float = 2.0,
    batch: int = 4096,
    growth: float = 1.0,
    scan_limit: int | None = None,
) -> Rank1Lattice:
    """Deterministic search for a reconstructing lattice, smallest size first.

    Sizes M are tried in ascending order starting from max(|I|, min_size).
    ``korobov`` scans a = 1..M-1 with z = (1, a, a^2, ...) mod M and returns
    the smallest qualifying (M, a); ``cbc`` greedily builds one vector per M
    and moves to the next size when a coordinate cannot be completed.  The
    search stops at M > cap_factor * |I|^2, which signals the cap rather
    than nonexistence.

    With the defaults every integer size is visited, so the result is the
    minimum feasible (M, a).  Feasibility for hyperbolic crosses in d >= 3
    only sets in at M many multiples of |I|, making a unit-step scan
    intractable there; ``growth > 1`` advances M geometrically instead and
    ``scan_limit`` caps the candidates tried per size.  Both keep the
    search deterministic and every returned lattice reconstructing, at the
    price of a possibly non-minimal M.
    """
    n = len(I)
    if n < 1:
        raise DomainError("cannot search a lattice for an empty frequency set")
    if strategy not in ("korobov", "cbc"):
        raise DomainError(f"unknown search strategy {strategy!r}")
    if growth < 1.0:
        raise DomainError("growth must be >= 1")
    lo = max(n, int(min_size) if min_size else 1)
    hi = max(lo, math.ceil(cap_factor * n * n))
    K = I.indices
    kmax = int(np.max(np.abs(K))) if K.size else 0
    if K.shape[1] * max(kmax, 1) * hi >= _INT64_SAFE:
        raise DomainError("frequency magnitudes too large for the vectorized search")
    projections = None
    if strategy == "cbc":
        from .freqset import _lexsorted_unique

        projections = [_lexsorted_unique(K[:, :s]) for s in range(1, K.shape[1] + 1)]
    d2_table = None
    if strategy == "korobov" and K.shape[1] == 2 and n >= 2:
        spans = (np.ptp(K[:, 0]) * 2 + 1) * (np.ptp(K[:, 1]) * 2 + 1)
        if spans <= _D2_SIEVE_BOX_CAP:
            d2_table = _d2_difference_table(K)
    M = lo
    while M <= hi:
        scan_hi = M if scan_limit is None else min(M, scan_limit + 1)
        if strategy == "korobov":
            if d2_table is not None and M > 1 and scan_limit is None:
                z = _korobov_d2_sieve_at(d2_table, M)
            else:
                z = _korobov_at(K, M, batch, scan_hi)
        else:
            z = _cbc_at(K, M, projections, batch, scan_hi)
        if z is not None:
            return Rank1Lattice(z, M)
        M = max(M + 1, int(M * growth))
    raise LatticeSearchError(
        f"no reconstructing lattice with M <= {hi} found for |I| = {n} "
        f"(cap_factor = {cap_factor}; a larger cap may succeed)"
    )


def lattice_to_line(lattice: Rank1Lattice) -> str:
    """One-line form ``M z_1 ... z_d``."""
    return " ".join([str(lattice.M)] + [str(c) for c in lattice.z])


def lattice_from_line(line: str) -> Rank1Lattice:
    parts = line.split()
    if len(parts) < 2:
        raise DomainError(f"lattice line needs 'M z_1 ... z_d', got {line!r}")
    return Rank1Lattice([int(p) for p in parts[1:]], int(parts[0]))


def parse_lattice_option(text: str) -> Rank1Lattice:
    """Parse the CLI form ``M:z1,z2,...``."""
    head, sep, tail = text.partition(":")
    if not sep:
        raise DomainError(f"lattice option must look like 'M:z1,z2,...', got {text!r}")
    try:
        M = int(head)
        z = [int(p) for p in tail.split(",") if p.strip() != ""]
    except ValueError:
        raise DomainError(f"bad lattice option {text!r}") from None
    if not z:
        raise DomainError(f"lattice option {text!r} has no generating vector")
    return Rank1Lattice(z, M)
