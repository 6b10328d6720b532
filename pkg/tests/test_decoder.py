from itertools import combinations

import oracle
from conftest import random_dense
from stopred import BinaryMatrix
from stopred.decoder import compare_decoders, ml_decode, peel
from stopred.gf2 import row_space_array
from stopred.stopping import is_stopping_set, spectrum_exhaustive


def _size4_sets(golay):
    out = []
    for S in combinations(range(24), 4):
        if is_stopping_set(golay.H, S):
            out.append(S)
    return out


def test_empty_erasure(golay):
    assert peel(golay.H, []).success
    assert ml_decode(golay.H, []).success


def test_single_erasures_peel(golay):
    for j in range(24):
        out = peel(golay.H, [j])
        assert out.success and len(out.residual) == 0 and out.method == "iterative"


def test_size4_stopping_sets_stall_peeling(golay):
    sets = _size4_sets(golay)
    assert len(sets) == 110
    for S in sets[:30]:
        out = peel(golay.H, S)
        assert not out.success and out.residual.indices == S
        assert ml_decode(golay.H, S).success


def test_ml_on_codeword_support(golay):
    word8 = next(int(c) for c in row_space_array(golay.generator()) if int(c).bit_count() == 8)
    S = [j for j in range(24) if word8 >> j & 1]
    assert not ml_decode(golay.H, S).success
    assert not ml_decode(golay.H, range(13)).success
    for S in combinations(range(24), 7):
        assert ml_decode(golay.H, S).success
        break


def test_peel_matches_oracle(rng):
    for _ in range(200):
        n = int(rng.integers(4, 13))
        dense = random_dense(rng, int(rng.integers(1, 7)), n, 0.4)
        H = BinaryMatrix.from_dense(dense)
        E = [j for j in range(n) if rng.random() < 0.5]
        out = peel(H, E)
        assert set(out.residual.indices) == oracle.peel(dense, E)
        assert out.success == (not out.residual.indices)
        assert ml_decode(H, E).success == (not oracle.ml_fails(dense, E))


def test_peel_recovers_values(golay, rng):
    G = golay.generator().to_dense()
    c = (rng.integers(0, 2, 12) @ G) % 2
    E = [0, 5, 9]
    received = [None if j in E else int(c[j]) for j in range(24)]
    out = peel(golay.H, E, received)
    assert out.success and out.codeword.tolist() == c.tolist()
    ml = ml_decode(golay.H, list(range(6)), [None] * 6 + c[6:].tolist())
    assert ml.success and ml.codeword.tolist() == c.tolist()


def test_row_order_does_not_matter(rng):
    dense = random_dense(rng, 6, 12, 0.3)
    H = BinaryMatrix.from_dense(dense)
    for _ in range(30):
        E = [j for j in range(12) if rng.random() < 0.6]
        base = peel(H, E).residual
        for _ in range(3):
            order = rng.permutation(6).tolist()
            assert peel(H, E, row_order=order).residual == base


def test_compare_decoders_original_golay(golay):
    cmp = compare_decoders(golay.H, range(0, 6), exhaustive_to=5)
    rows = {r.weight: r for r in cmp.rows}
    assert rows[4].disagreements == 110 and rows[4].iterative_fail == 110 and rows[4].ml_fail == 0
    assert rows[5].iterative_fail == 2277
    assert all(r.exhaustive for r in cmp.rows)


def test_compare_decoders_heavy_weights_agree(golay):
    cmp = compare_decoders(golay.H, [13, 20, 24], exhaustive_to=8)
    assert cmp.disagreements == 0
    assert all(r.iterative_fail == r.total for r in cmp.rows)


def test_compare_decoders_sampled_is_seeded(golay):
    a = compare_decoders(golay.H, [9], exhaustive_to=8, samples=5000, seed=11)
    b = compare_decoders(golay.H, [9], exhaustive_to=8, samples=5000, seed=11)
    assert a.rows == b.rows
    assert a.rows[0].tested == 5000 and not a.rows[0].exhaustive and a.rows[0].seed == 11


def test_full_row_space_makes_decoders_agree(golay):
    # all 4095 nonzero dual codewords cover every coverable stopping set
    words = [int(w) for w in row_space_array(golay.H)[1:]]
    Hfull = BinaryMatrix.from_row_masks(words, 24)
    cmp = compare_decoders(Hfull, range(0, 10), exhaustive_to=9)
    assert cmp.disagreements == 0
    assert sum(spectrum_exhaustive(Hfull, 6).counts) == 0
