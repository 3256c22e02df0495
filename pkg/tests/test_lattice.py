import numpy as np
import pytest

from latcube.errors import DomainError, LatticeSearchError
from latcube.freqset import difference_set, from_indices, hyperbolic_cross
from latcube.lattice import (
    Rank1Lattice,
    TransformedLattice,
    find_reconstructing_lattice,
    frequency_residues,
    is_reconstructing,
    lattice_from_line,
    lattice_to_line,
    parse_lattice_option,
)
from latcube.transforms import (
    IdentityTransform,
    LogarithmicTransform,
    ProductTransform,
    SineTransform,
)


def literal_difference_check(lattice, I):
    """Independent oracle: materialize D(I) and test t.z mod M != 0."""
    D = difference_set(I)
    for t in D:
        if all(v == 0 for v in t):
            continue
        if sum(ti * zi for ti, zi in zip(t, lattice.z)) % lattice.M == 0:
            return False
    return True


def brute_korobov(I, start):
    """Independent reference for the smallest-first Korobov search."""
    M = start
    while True:
        if M == 1:
            if len(I) <= 1:
                return Rank1Lattice([0] * I.dim, 1)
            M += 1
            continue
        for a in range(1, M):
            z = [1]
            for _ in range(I.dim - 1):
                z.append((z[-1] * a) % M)
            cand = Rank1Lattice(z, M)
            res = {sum(ki * zi for ki, zi in zip(k, cand.z)) % M for k in I}
            if len(res) == len(I):
                return cand
        M += 1


def test_nodes_trivial_and_recentred():
    assert np.allclose(Rank1Lattice((0,), 1).nodes(), [[0.0]])
    nodes = Rank1Lattice((1,), 4).nodes().ravel()
    assert np.array_equal(nodes, [0.0, 0.25, -0.5, -0.25])


def test_nodes_known_coordinates():
    lat = Rank1Lattice((1, 7), 150)
    node = lat.nodes()[1]
    assert np.allclose(node, [1 / 150, 7 / 150])
    assert np.allclose(node, [0.006667, 0.046667], atol=5e-7)


def test_nodes_stay_in_half_open_cube():
    lat = Rank1Lattice((3, 5, 11), 37)
    nodes = lat.nodes()
    assert np.all(nodes >= -0.5) and np.all(nodes < 0.5)


def test_nodes_reproducible():
    lat = Rank1Lattice((1, 7), 150)
    assert lat.nodes().tobytes() == lat.nodes().tobytes()


def test_transformed_nodes():
    lat = Rank1Lattice((1, 7), 150)
    ident = TransformedLattice(lat, ProductTransform([IdentityTransform()] * 2))
    assert np.array_equal(ident.nodes(), lat.nodes())

    sine = TransformedLattice(lat, ProductTransform([SineTransform()] * 2))
    assert np.allclose(sine.nodes()[1], [0.01047, 0.07304], atol=5e-5)

    log3 = TransformedLattice(lat, ProductTransform([LogarithmicTransform(3)] * 2))
    assert np.allclose(log3.nodes()[1], [0.01999, 0.1368], atol=5e-5)
    assert np.all(np.abs(log3.nodes()) <= 0.5)


def test_transformed_lattice_dimension_check():
    with pytest.raises(DomainError):
        TransformedLattice(Rank1Lattice((1, 2), 5), ProductTransform([SineTransform()]))


def test_z_reduced_mod_M():
    lat = Rank1Lattice((-1, 17), 5)
    assert lat.z == (4, 2)
    with pytest.raises(DomainError):
        Rank1Lattice((1,), 0)


def test_is_reconstructing_univariate():
    for N in (1, 3, 10):
        I = hyperbolic_cross(1, N)
        assert is_reconstructing(Rank1Lattice((1,), 2 * N + 1), I)
        assert not is_reconstructing(Rank1Lattice((1,), 2 * N), I)


def test_is_reconstructing_on_small_cross():
    # |I_2^2| = 21, so M = 13 can never separate it; the (1,4) collision
    # (1,1).z = 5 = (0,-2).z mod 13 fails it a second way
    I = hyperbolic_cross(2, 2)
    assert not is_reconstructing(Rank1Lattice((1, 5), 13), I)
    assert not is_reconstructing(Rank1Lattice((1, 4), 13), I)
    assert is_reconstructing(Rank1Lattice((1, 5), 23), I)
    assert literal_difference_check(Rank1Lattice((1, 5), 23), I)


def test_is_reconstructing_matches_literal_difference_check():
    rng = np.random.default_rng(2024)
    for _ in range(100):
        d = int(rng.integers(1, 4))
        count = int(rng.integers(2, 30))
        I = from_indices(d, rng.integers(-7, 8, size=(count, d)))
        if len(I) > 200:
            continue
        M = int(rng.integers(max(2, len(I) // 2), 3 * len(I) + 2))
        lat = Rank1Lattice(rng.integers(0, M, size=d), M)
        assert is_reconstructing(lat, I) == literal_difference_check(lat, I)


def test_find_korobov_small_fixtures():
    lat = find_reconstructing_lattice(hyperbolic_cross(1, 4))
    assert (lat.M, lat.z) == (9, (1,))

    lat = find_reconstructing_lattice(hyperbolic_cross(2, 2))
    assert (lat.M, lat.z) == (23, (1, 5))

    single = from_indices(3, [(0, 0, 0)])
    lat = find_reconstructing_lattice(single)
    assert (lat.M, lat.z) == (1, (0, 0, 0))


def test_find_matches_brute_reference():
    rng = np.random.default_rng(7)
    for _ in range(25):
        d = int(rng.integers(1, 4))
        I = from_indices(d, rng.integers(-4, 5, size=(int(rng.integers(1, 10)), d)))
        got = find_reconstructing_lattice(I, strategy="korobov")
        ref = brute_korobov(I, len(I))
        assert (got.M, got.z) == (ref.M, ref.z)
        assert is_reconstructing(got, I)
        assert got.M >= len(I)


def test_find_cbc_returns_reconstructing_lattice():
    for d, N in ((2, 4), (3, 3), (2, 8)):
        I = hyperbolic_cross(d, N)
        lat = find_reconstructing_lattice(I, strategy="cbc")
        assert is_reconstructing(lat, I)
        assert lat.M >= len(I)
        again = find_reconstructing_lattice(I, strategy="cbc")
        assert (lat.M, lat.z) == (again.M, again.z)


def test_cbc_and_korobov_agree_with_sieve_on_2d():
    # the d=2 difference-set sieve must reproduce the generic scan exactly
    I = hyperbolic_cross(2, 6)
    sieve = find_reconstructing_lattice(I, strategy="korobov")
    ref = brute_korobov(I, len(I))
    assert (sieve.M, sieve.z) == (ref.M, ref.z)


def test_find_honors_min_size():
    I = hyperbolic_cross(1, 4)
    lat = find_reconstructing_lattice(I, min_size=18)
    assert lat.M == 18 and lat.z == (1,)


def test_find_search_cap():
    I = hyperbolic_cross(2, 2)
    with pytest.raises(LatticeSearchError):
        find_reconstructing_lattice(I, cap_factor=0.04)


def test_find_with_growth_and_scan_limit_is_valid_and_deterministic():
    I = hyperbolic_cross(3, 6)
    a = find_reconstructing_lattice(I, strategy="korobov", growth=1.3, scan_limit=64)
    b = find_reconstructing_lattice(I, strategy="korobov", growth=1.3, scan_limit=64)
    assert (a.M, a.z) == (b.M, b.z)
    assert is_reconstructing(a, I)
    exact = find_reconstructing_lattice(I, strategy="korobov")
    assert a.M >= exact.M


def test_find_rejects_bad_arguments():
    I = hyperbolic_cross(1, 2)
    with pytest.raises(DomainError):
        find_reconstructing_lattice(I, strategy="magic")
    with pytest.raises(DomainError):
        find_reconstructing_lattice(I, growth=0.5)


def test_residues_int64_guard_matches_exact_arithmetic():
    K = np.asarray([[5_000_000, -4_999_999], [123_456, 654_321]], dtype=np.int64)
    z = (999_999_999_937, 999_999_999_989)
    M = 1_000_000_007_599
    got = frequency_residues(K, z, M)
    expect = [sum(int(k) * int(w) for k, w in zip(row, z)) % M for row in K]
    assert got.tolist() == expect


def test_serialization():
    lat = Rank1Lattice((1, 5), 23)
    line = lattice_to_line(lat)
    assert line == "23 1 5"
    assert lattice_from_line(line) == lat
    assert parse_lattice_option("23:1,5") == lat
    with pytest.raises(DomainError):
        parse_lattice_option("23")
    with pytest.raises(DomainError):
        parse_lattice_option("x:1,2")
