from fractions import Fraction
from itertools import combinations
from math import comb, floor

import pytest

from stopred.bounds import (ensemble_bound, hierarchy_bound_xi1, hs_bound, pi, pi_exact, sre_mean_spectrum,
                            sv_bound, u_single_row, u_two_rows, w_opt_candidates, xi2_bound)
from stopred.stopping import StoppingSpectrum

GOLAY_U = [0, 0, 0, 110, 1837, 14795, 74349, 257796, 649275, 1206755, 1585794, 1189574]


def xi1_oracle(u, R, tau, rank_tau, ell):
    """Direct rational evaluation of the definition."""
    X = 2 ** R

    def p(i, j):
        return 1 - Fraction(i * 2 ** (R - i), X - j)

    best = None
    t = 0
    while best is None or t < best:
        D = sum(u[i - 1] * _prod(p, i, tau + 1, tau + t) for i in range(1, ell + 1))
        P, kappa, j = floor(D), 0, tau + t
        while P > 0:
            j += 1
            kappa += 1
            P = floor(p(ell, j) * P)
        if best is None or t + kappa < best:
            best = t + kappa
        t += 1
    return tau + best + max(0, R - max(rank_tau, ell))


def _prod(p, i, lo, hi):
    out = Fraction(1)
    for j in range(lo, hi + 1):
        out *= p(i, j)
    return out


def test_pi_values():
    assert pi(1, 1, 1) == 0
    assert pi_exact(12, 1, 1) == Fraction(2047, 4095)
    assert pi(12, 1, 1) == pytest.approx(2047 / 4095, rel=1e-15)
    assert 0 < pi(3000, 5, 10) < 1
    with pytest.raises(ValueError):
        pi(3, 1, 8)


@pytest.mark.parametrize("r,d,want", [(12, 8, 2509), (24, 12, 4540385), (2, 2, 0)])
def test_sv_bound(r, d, want):
    assert sv_bound(r, d) == want


def test_sv_bound_tanner():
    v = sv_bound(91, 20)
    assert v == sum(comb(91, i) for i in range(1, 19))
    assert str(v).startswith("62") and len(str(v)) == 19


@pytest.mark.parametrize("n,d,r,want", [(24, 8, 12, 232), (48, 12, 24, 4440), (155, 20, 91, 1526972)])
def test_hs_bound(n, d, r, want):
    assert hs_bound(n, d, r) == want


def test_hs_bound_definition_small():
    n, d, r = 16, 5, 8
    t = 0
    while sum(comb(n, i) * Fraction(2 ** i - i, 2 ** i) ** t for i in range(1, d)) >= 1:
        t += 1
    assert hs_bound(n, d, r) == t + r - d + 1
    assert hs_bound(10, 3, 5) == 5


def _uncovered(n, rows, ell):
    out = []
    for i in range(1, ell + 1):
        cnt = 0
        for S in combinations(range(n), i):
            if all(len(set(S) & row) != 1 for row in rows):
                cnt += 1
        out.append(cnt)
    return out


def test_u_single_row_brute_force():
    for n in range(1, 11):
        for w in range(1, n + 1):
            row = set(range(w))
            assert u_single_row(n, w, n).counts == _uncovered(n, [row], n)


def test_u_two_rows_brute_force():
    for n in range(2, 10):
        for w in range(1, n + 1):
            for delta in range(0, w + 1):
                if 2 * w - delta > n:
                    continue
                rows = [set(range(w)), set(range(w - delta, 2 * w - delta))]
                assert u_two_rows(n, w, delta, n).counts == _uncovered(n, rows, n), (n, w, delta)


def test_u_examples():
    assert u_single_row(24, 8, 7)[1] == 16
    assert u_single_row(9, 9, 3)[1] == 0
    assert u_two_rows(6, 2, 0, 2).counts == [2, 3]
    assert u_two_rows(12, 4, 4, 5).counts == u_single_row(12, 4, 5).counts
    with pytest.raises(ValueError):
        u_two_rows(5, 3, 0, 2)


def test_xi1_golay_table_values():
    assert hierarchy_bound_xi1(u_single_row(24, 8, 7), 12, 1, 1, 7).value == 185
    assert hierarchy_bound_xi1(GOLAY_U, 12, 12, 12, 7).value == 168
    col = [hierarchy_bound_xi1(GOLAY_U, 12, 12, 12, ell).value for ell in range(1, 13)]
    assert col == [12, 12, 12, 25, 49, 91, 168, 304, 540, 927, 1507, 2241]


@pytest.mark.parametrize("case", [
    (GOLAY_U, 12, 12, 12, 5),
    (GOLAY_U, 12, 12, 12, 7),
    ([0, 0, 3, 20], 6, 2, 2, 4),
    ([1, 5, 9], 8, 1, 1, 3),
])
def test_xi1_matches_rational_oracle(case):
    u, R, tau, rank_tau, ell = case
    assert hierarchy_bound_xi1(u, R, tau, rank_tau, ell).value == xi1_oracle(u, R, tau, rank_tau, ell)


def test_xi1_witness():
    rep = hierarchy_bound_xi1(u_single_row(24, 8, 7), 12, 1, 1, 7)
    w = rep.witness
    assert rep.value == w["tau"] + w["t_star"] + w["kappa_at_t_star"] + w["delta"]
    assert w["delta"] == 5 and w["method"] == "exact"


@pytest.mark.parametrize("R", [24, 30, 40])
def test_xi1_approximate_agrees_with_exact(R):
    u = u_single_row(24, 8, 7)
    exact = hierarchy_bound_xi1(u, R, 1, 1, 7, method="exact").value
    approx = hierarchy_bound_xi1(u, R, 1, 1, 7, method="approximate").value
    assert approx == exact


def test_xi1_monotone_in_u_and_rank():
    base = hierarchy_bound_xi1(GOLAY_U, 12, 12, 12, 8).value
    for i in range(8):
        bumped = list(GOLAY_U)
        bumped[i] += 500
        assert hierarchy_bound_xi1(bumped, 12, 12, 12, 8).value >= base
    assert hierarchy_bound_xi1(GOLAY_U, 13, 12, 12, 8).value >= base


def test_xi1_validation():
    with pytest.raises(ValueError):
        hierarchy_bound_xi1([], 12, 1, 1, 1)
    with pytest.raises(ValueError):
        hierarchy_bound_xi1(GOLAY_U, 12, 0, 1, 4)
    with pytest.raises(ValueError):
        hierarchy_bound_xi1(GOLAY_U[:3], 12, 1, 1, 4)
    with pytest.raises(ValueError):
        hierarchy_bound_xi1(GOLAY_U, 12, 1, 1, 4, method="guess")


def test_xi2_golay_column():
    col = [xi2_bound(GOLAY_U, 12, ell).value for ell in range(1, 13)]
    assert col == [12, 12, 12, 27, 51, 95, 174, 316, 560, 960, 1558, 2309]


def test_xi2_zero_spectrum():
    assert xi2_bound([0] * 5, 9, 5).value == 9


def test_xi2_matches_real_minimum():
    u = [0, 0, 0, 110, 1837]
    X = 2 ** 12
    best = None
    for t in range(0, 80):
        D = sum(u[i - 1] * _prod(lambda i, j: 1 - Fraction(i * 2 ** (12 - i), X - j), i, 13, 12 + t)
                for i in range(1, 6))
        v = t + D
        best = v if best is None or v < best else best
    assert xi2_bound(u, 12, 5).value == 12 + floor(best)


def test_xi1_not_above_xi2():
    for ell in range(1, 13):
        assert hierarchy_bound_xi1(GOLAY_U, 12, 12, 12, ell).value <= xi2_bound(GOLAY_U, 12, ell).value


def test_sre_mean_spectrum_small_sizes():
    spectrum = sre_mean_spectrum(12, 6, 6)
    assert spectrum.counts[0] == 0 and spectrum.counts[1] == 0
    assert not spectrum.exact


@pytest.mark.parametrize("n,m,printed,digits", [(12, 6, 34.75, 2), (24, 8, 189.07, 2), (18, 9, 281.32, 2)])
def test_ensemble_bound_table(n, m, printed, digits):
    v = ensemble_bound(sre_mean_spectrum(n, m, m), m, m).value
    assert round(v, digits) == printed


def test_ensemble_bound_floor_row():
    assert floor(ensemble_bound(sre_mean_spectrum(6, 3, 3), 3, 3).value) == 3


def test_ensemble_bound_accepts_spectrum_objects():
    spectrum = StoppingSpectrum(10, [0.0, 0.0, 1.5], exact=False)
    assert ensemble_bound(spectrum, 4, 3).value >= 4


def test_w_opt_candidates():
    assert w_opt_candidates(24, 7).candidates == (3, 4)
    assert w_opt_candidates(12, 12).candidates == (1, 1)
    with pytest.raises(ValueError):
        w_opt_candidates(5, 1)
