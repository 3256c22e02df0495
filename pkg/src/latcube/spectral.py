"""Fast evaluation and reconstruction along rank-1 lattices.

Both directions ride on a single length-M one-dimensional DFT: evaluation
folds coefficients into the residue classes k.z mod M and inverse-transforms;
reconstruction forward-transforms the samples and reads each coefficient out
of its residue class.  On a reconstructing lattice the composition is exact
(the system matrix A satisfies A* A = M I), and the relative discrete error
eps_inf measures how far given samples are from that exactness.

DFT convention: forward is sum_j v_j e^(-2 pi i l j / M) with no
normalization; inverse carries the 1/M.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, DomainError, NonReconstructingLatticeError
from .freqset import FrequencySet
from .lattice import Rank1Lattice, frequency_residues, is_reconstructing
from .transforms import ProductTransform, periodized_samples

# point-block size for direct partial-sum evaluation, keeps the phase matrix
# around a few hundred MB at the largest supported frequency sets
_PARTIAL_SUM_BLOCK = 1 << 21


@dataclass(frozen=True)
class CoefficientVector:
    """Complex amplitudes aligned with the order of a frequency set."""

    support: FrequencySet
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.complex128)
        if vals.shape != (len(self.support),):
            raise DomainError(
                f"{vals.shape[0] if vals.ndim == 1 else vals.shape} values for "
                f"{len(self.support)} frequencies"
            )
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def dim(self) -> int:
        return self.support.dim

    def value_at(self, k) -> complex:
        """Coefficient of the frequency k (zero if k is not in the support)."""
        k = np.asarray(k, dtype=np.int64)
        hit = np.flatnonzero(np.all(self.support.indices == k, axis=1))
        return complex(self.values[hit[0]]) if hit.size else 0.0j


def dft_forward(v) -> np.ndarray:
    """Unnormalized forward DFT of any length, O(M log M).

    Delegates to numpy's pocketfft, whose mixed-radix decomposition with a
    Bluestein fallback covers arbitrary (also large-prime) lengths.
    """
    v = np.asarray(v, dtype=np.complex128)
    if v.ndim != 1 or v.size < 1:
        raise DomainError("dft_forward expects a nonempty 1-D vector")
    return np.fft.fft(v)


def dft_inverse(v) -> np.ndarray:
    """Inverse DFT carrying the 1/M factor; exact roundtrip with dft_forward."""
    v = np.asarray(v, dtype=np.complex128)
    if v.ndim != 1 or v.size < 1:
        raise DomainError("dft_inverse expects a nonempty 1-D vector")
    return np.fft.ifft(v)


def evaluate_at_lattice(c: CoefficientVector, lattice: Rank1Lattice) -> np.ndarray:
    """Values sum_k c_k e^(2 pi i k.x_j) at all M lattice nodes.

    Coefficients sharing a residue k.z mod M are accumulated (aliasing is
    legal here), then one inverse FFT scaled by M produces the samples.
    Runtime O(M log M + d |I|).
    """
    if c.dim != lattice.dim:
        raise DomainError(
            f"coefficients have dimension {c.dim}, lattice has {lattice.dim}"
        )
    res = frequency_residues(c.support.indices, lattice.z, lattice.M)
    g = np.zeros(lattice.M, dtype=np.complex128)
    np.add.at(g, res, c.values)
    return lattice.M * np.fft.ifft(g)


def reconstruct_from_lattice(
    samples, I: FrequencySet, lattice: Rank1Lattice, check: bool = True
) -> CoefficientVector:
    """Fourier coefficients on I from M samples along the lattice.

    For samples of a polynomial supported inside I this recovers the
    coefficients exactly; for general samples it returns the lattice
    quadrature approximation of each coefficient, with out-of-set frequency
    content aliased onto the residue classes of I.

    ``check=False`` skips the injectivity test in hot loops; callers then
    assert the reconstruction property themselves.
    """
    s = np.asarray(samples, dtype=np.complex128)
    if s.ndim != 1 or s.size != lattice.M:
        raise DomainError(f"sample vector must have length M = {lattice.M}")
    if I.dim != lattice.dim:
        raise DomainError(f"set dimension {I.dim} does not match lattice {lattice.dim}")
    if check and not is_reconstructing(lattice, I):
        raise NonReconstructingLatticeError(
            f"lattice {lattice!r} does not reconstruct the given {len(I)}-element set"
        )
    g = np.fft.fft(s)
    res = frequency_residues(I.indices, lattice.z, lattice.M)
    return CoefficientVector(I, g[res] / lattice.M)


class TransformedPolynomial:
    """Cube function spanned by the weighted exponentials of a transform.

    h(y) = sum_k c_k sqrt(density(y) / weight(y)) e^(2 pi i k.inverse(y)).
    Callable on interior points; its periodized samples along any lattice
    are exactly the plain trigonometric-polynomial values, which sampling
    routines exploit to avoid divergent boundary factors.
    """

    def __init__(self, coefficients: CoefficientVector, weight, transform: ProductTransform):
        if coefficients.dim != transform.dim:
            raise DomainError("coefficient and transform dimensions disagree")
        self.coefficients = coefficients
        self.weight = weight
        self.transform = transform

    def __call__(self, Y) -> np.ndarray:
        return evaluate_partial_sum(self.coefficients, self.weight, self.transform, Y)


def sample_transformed_function(
    h, weight, transform: ProductTransform, lattice: Rank1Lattice
) -> np.ndarray:
    """Periodized samples of h at the recentred lattice nodes.

    For a :class:`TransformedPolynomial` matching the given transform the
    samples equal the trigonometric polynomial evaluated by the fast path,
    exactly and without touching boundary densities.
    """
    if lattice.dim != transform.dim:
        raise DomainError(
            f"lattice dimension {lattice.dim} does not match transform {transform.dim}"
        )
    if isinstance(h, TransformedPolynomial) and h.transform == transform:
        from .transforms import ConstantWeight

        same_weight = h.weight is weight or (
            isinstance(h.weight, ConstantWeight) and isinstance(weight, ConstantWeight)
        )
        if same_weight:
            return evaluate_at_lattice(h.coefficients, lattice)
    return periodized_samples(h, weight, transform, lattice.nodes())


def evaluate_partial_sum(
    c: CoefficientVector, weight, transform: ProductTransform, points
) -> np.ndarray:
    """Direct O(|I| * n) evaluation of the weighted partial sum at points.

    Each value is sqrt(density/weight) times the plain trigonometric
    polynomial at the pulled-back point.  Points must be interior wherever
    the density diverges at the boundary; offending points raise
    DivergentDensityError.  No fast off-lattice transform is provided:
    callers needing many points should evaluate on a second lattice.
    """
    Y = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if Y.shape[1] != transform.dim:
        raise DomainError(
            f"points have dimension {Y.shape[1]}, transform has {transform.dim}"
        )
    X = transform.inverse(Y)
    factor = np.ones(Y.shape[0])
    for j, t in enumerate(transform.components):
        factor *= t.density(Y[:, j]) / weight.component(j, Y[:, j])
    factor = np.sqrt(factor)
    K = c.support.indices.astype(np.float64)
    out = np.empty(Y.shape[0], dtype=np.complex128)
    block = max(1, _PARTIAL_SUM_BLOCK // max(1, len(c.support)))
    for lo in range(0, Y.shape[0], block):
        hi = min(lo + block, Y.shape[0])
        phases = np.exp(2j * np.pi * (X[lo:hi] @ K.T))
        out[lo:hi] = phases @ c.values
    return out * factor


def lattice_quadrature(g, lattice: Rank1Lattice) -> complex:
    """Equal-weight average (1/M) sum_j g(x_j) over the lattice nodes.

    Integrates exactly (up to roundoff) every trigonometric polynomial whose
    frequencies t all satisfy t.z != 0 mod M, in particular everything
    supported on the difference set of a frequency set the lattice
    reconstructs.
    """
    values = np.asarray(g(lattice.nodes()), dtype=np.complex128)
    if values.shape != (lattice.M,):
        raise DomainError(f"integrand returned shape {values.shape}, expected ({lattice.M},)")
    return complex(np.mean(values))


def rel_discrete_error(
    h,
    weight,
    transform: ProductTransform,
    I: FrequencySet,
    lattice: Rank1Lattice,
    check: bool = True,
) -> float:
    """Relative l-infinity gap between samples and their reconstruction.

    Samples h along the transformed lattice, reconstructs coefficients on I,
    re-evaluates them at the same nodes, and returns
    ||s - s'||_inf / ||s||_inf.  Zero (up to roundoff) exactly when the
    periodized h is a trigonometric polynomial supported inside I.
    """
    s = sample_transformed_function(h, weight, transform, lattice)
    norm = float(np.max(np.abs(s)))
    if norm == 0.0:
        raise DegenerateInputError("sample vector is identically zero")
    c = reconstruct_from_lattice(s, I, lattice, check=check)
    s2 = evaluate_at_lattice(c, lattice)
    return float(np.max(np.abs(s - s2))) / norm


def write_coefficients(c: CoefficientVector, stream) -> None:
    """Text form: header ``d N``, then one line ``k_1 ... k_d re im`` per entry."""
    stream.write(f"{c.dim} {c.support.cross_order}\n")
    for row, v in zip(c.support.indices, c.values):
        ks = " ".join(str(int(k)) for k in row)
        stream.write(f"{ks} {v.real:.17g} {v.imag:.17g}\n")


def read_coefficients(stream) -> CoefficientVector:
    header = stream.readline().split()
    if len(header) != 2:
        raise DomainError("coefficient header must be 'd N'")
    d, N = int(header[0]), int(header[1])
    rows, vals = [], []
    for line in stream:
        parts = line.split()
        if not parts:
            continue
        if len(parts) != d + 2:
            raise DomainError(f"coefficient line has {len(parts)} fields, expected {d + 2}")
        rows.append([int(p) for p in parts[:d]])
        vals.append(complex(float(parts[d]), float(parts[d + 1])))
    support = FrequencySet(d, np.asarray(rows, dtype=np.int64), cross_order=N)
    order = {tuple(r): i for i, r in enumerate(rows)}
    aligned = [vals[order[k]] for k in support]
    return CoefficientVector(support, np.asarray(aligned, dtype=np.complex128))


def write_samples(values, M: int, stream) -> None:
    """Text form: header ``M``, then one line ``re im`` per sample."""
    v = np.asarray(values, dtype=np.complex128)
    if v.shape != (M,):
        raise DomainError(f"sample vector must have length {M}")
    stream.write(f"{M}\n")
    for x in v:
        stream.write(f"{x.real:.17g} {x.imag:.17g}\n")


def read_samples(stream) -> np.ndarray:
    header = stream.readline().split()
    if len(header) != 1:
        raise DomainError("sample header must be 'M'")
    M = int(header[0])
    vals = []
    for line in stream:
        parts = line.split()
        if not parts:
            continue
        if len(parts) != 2:
            raise DomainError(f"sample line has {len(parts)} fields, expected 2")
        vals.append(complex(float(parts[0]), float(parts[1])))
    if len(vals) != M:
        raise DomainError(f"sample file announced {M} values but carries {len(vals)}")
    return np.asarray(vals, dtype=np.complex128)
