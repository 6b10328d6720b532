from itertools import combinations
from math import comb

import numpy as np
import pytest

import oracle
from conftest import random_dense
from stopred import BinaryMatrix
from stopred.codes import make_generator
from stopred.stopping import (BudgetExceededError, ColumnSet, PatternProfile, covers, fer, is_coverable,
                              is_stopping_set, random_subset_indices, random_subset_masks, spectrum_exhaustive,
                              undecodable_profile)


def test_column_set_validation():
    S = ColumnSet((3, 1), 5)
    assert S.indices == (1, 3) and S.mask == 0b1010 and len(S) == 2
    assert ColumnSet.from_mask(0b1010, 5) == S
    with pytest.raises(ValueError):
        ColumnSet((1, 1), 5)
    with pytest.raises(IndexError):
        ColumnSet((5,), 5)


def test_covers():
    assert covers(0b0110, [1, 3], 4)
    assert not covers(0b0110, [1, 2], 4)
    assert not covers(0b0110, [0, 3], 4)


def test_predicates_match_oracle(rng):
    for _ in range(30):
        dense = random_dense(rng, rng.integers(2, 6), 8, rng.uniform(0.2, 0.7))
        H = BinaryMatrix.from_dense(dense)
        for k in range(0, 5):
            for S in combinations(range(8), k):
                assert is_stopping_set(H, S) == oracle.is_stopping(dense, S)
                if S:
                    assert is_coverable(H, S) == oracle.is_coverable(dense, S)


def test_empty_set_is_not_a_stopping_set(golay):
    assert not is_stopping_set(golay.H, [])


def test_golay_examples(golay):
    # a weight-8 codeword support is a stopping set that no dual codeword covers
    from stopred.gf2 import row_space_array
    word8 = next(int(c) for c in row_space_array(golay.generator()) if int(c).bit_count() == 8)
    S = [j for j in range(24) if word8 >> j & 1]
    assert is_stopping_set(golay.H, S)
    assert not is_coverable(golay.H, S)
    for j in range(24):
        assert not is_stopping_set(golay.H, [j])


@pytest.mark.parametrize("coverable_only", [True, False])
def test_spectrum_matches_oracle(rng, coverable_only):
    for _ in range(12):
        n = int(rng.integers(6, 12))
        dense = random_dense(rng, int(rng.integers(2, 6)), n, 0.4)
        H = BinaryMatrix.from_dense(dense)
        got = spectrum_exhaustive(H, n, coverable_only=coverable_only).counts
        assert got == oracle.spectrum(dense, n, coverable_only)


def test_spectrum_beyond_one_word(rng):
    dense = random_dense(rng, 4, 70, 0.05)
    H = BinaryMatrix.from_dense(dense)
    assert spectrum_exhaustive(H, 2, coverable_only=False).counts == oracle.spectrum(dense, 2, False)
    assert spectrum_exhaustive(H, 2).counts == oracle.spectrum(dense, 2, True)


def test_spectrum_validation(golay):
    with pytest.raises(ValueError):
        spectrum_exhaustive(golay.H, 0)
    with pytest.raises(BudgetExceededError):
        spectrum_exhaustive(golay.H, 12, budget=1000)


def test_spectrum_indexing(golay):
    spectrum = spectrum_exhaustive(golay.H, 5)
    assert spectrum[4] == 110 and spectrum[5] == 1837 and spectrum.ell == 5
    assert spectrum.truncated(4).counts == [0, 0, 0, 110]
    with pytest.raises(IndexError):
        spectrum[0]


def test_random_subsets_are_uniform_and_distinct():
    rng = make_generator(1)
    masks = random_subset_masks(rng, 10, 3, 60000)
    assert all(int(m).bit_count() == 3 for m in masks[:1000])
    assert int(masks.max()) < 1 << 10
    freq = np.bincount([int(m) for m in masks], minlength=1 << 10)
    hits = freq[[sum(1 << j for j in S) for S in combinations(range(10), 3)]]
    assert hits.sum() == 60000
    assert abs(hits.mean() - 500) < 1 and hits.std() < 4 * np.sqrt(500)
    idx = random_subset_indices(make_generator(1), 100, 7, 500)
    assert idx.shape == (500, 7)
    assert all(len(set(row)) == 7 for row in idx.tolist())


@pytest.mark.parametrize("decoder", ["iterative", "ml"])
def test_profile_matches_oracle(rng, decoder):
    for _ in range(6):
        n = 9
        dense = random_dense(rng, 4, n, 0.5)
        H = BinaryMatrix.from_dense(dense)
        psi = undecodable_profile(H, decoder).psi
        for w in range(n + 1):
            if decoder == "iterative":
                want = sum(bool(oracle.peel(dense, E)) for E in combinations(range(n), w))
            else:
                want = sum(oracle.ml_fails(dense, E) for E in combinations(range(n), w))
            assert psi[w] == want


def test_profile_tail_and_sampling(golay):
    prof = undecodable_profile(golay.H, "ml", w_max=14, exhaustive_to=8, samples=20000, seed=5)
    assert prof.psi[8] == 759 and prof.exact[8]
    assert not prof.exact[9] and prof.samples[9][1] == 20000
    assert prof.psi[13] == comb(24, 13) and prof.exact[13]
    assert prof.psi[15] is None
    assert abs(prof.psi[10] - 91080) < 5 * prof.stderr(10)
    again = undecodable_profile(golay.H, "ml", w_max=14, exhaustive_to=8, samples=20000, seed=5)
    assert again.psi == prof.psi


def test_unknown_decoder(golay):
    with pytest.raises(ValueError):
        undecodable_profile(golay.H, "bp")


def test_fer_formula():
    psi = [0, 1, 3, 1]
    p = 0.2
    want = 1 * p * 0.8 ** 2 + 3 * p ** 2 * 0.8 + p ** 3
    assert fer(psi, p) == pytest.approx(want)
    assert fer(PatternProfile(3, "ml", psi, [True] * 4), 0.0) == 0.0
    assert fer([comb(3, w) for w in range(4)], 0.37) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        fer(psi, 1.5)
