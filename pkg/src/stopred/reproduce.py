"""Recompute the reference tables and diff them against the checked-in
expected values in ``data/expected``.

Each comparison is a ``Cell``; ``INFO`` cells carry values that are shown
but not judged (alternative configurations, known printing slips).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from math import comb

from .bounds import (ensemble_bound, hierarchy_bound_xi1, hs_bound, sre_mean_spectrum, sv_bound, u_single_row,
                     xi2_bound)
from .codes import golay_extended
from .estimator import upper_confidence_count
from .stopping import ITERATIVE, ML, spectrum_exhaustive, undecodable_profile

TABLES = ("I", "II", "IV", "V")
PASS, FAIL, INFO = "PASS", "FAIL", "INFO"


@dataclass
class Cell:
    table: str
    cell: str
    expected: str
    observed: str
    status: str

    def line(self) -> str:
        return f"{self.status} table {self.table} {self.cell}: expected {self.expected}, observed {self.observed}"


def load_expected(name: str) -> dict:
    text = resources.files("stopred").joinpath("data", "expected", f"{name}.json").read_text()
    return json.loads(text)


def _eq(table, cell, expected, observed) -> Cell:
    return Cell(table, cell, str(expected), str(observed), PASS if str(expected) == str(observed) else FAIL)


def _leading(value: int, printed: str) -> bool:
    mant, _, exp = printed.partition("e")
    digits = len(mant.replace(".", "").lstrip("0"))
    return f"{value:.{digits - 1}e}".replace("e+", "e") == f"{float(printed):.{digits - 1}e}".replace("e+", "e")


def matches_printed(value: float, printed: str, floor: bool = False, sig: int | None = None) -> bool:
    """Compare ``value`` with a table entry at the precision it was printed."""
    if floor:
        return math.floor(value) == int(printed)
    if sig is not None:
        return float(f"{value:.{sig - 1}e}") == float(f"{float(printed):.{sig - 1}e}")
    if "e" in printed:
        mant = printed.split("e")[0]
        return matches_printed(value, printed, sig=len(mant.replace(".", "").lstrip("0")))
    decimals = len(printed.split(".")[1]) if "." in printed else 0
    return round(value, decimals) == round(float(printed), decimals)


def table_1(progress=None) -> list[Cell]:
    exp = load_expected("table1")["codes"]
    cells = []
    for key, c in exp.items():
        r = c["n"] - c["k"]
        sv = sv_bound(r, c["d"])
        if "sv" in c:
            cells.append(_eq("I", f"{key} sv", c["sv"], sv))
        else:
            ok = _leading(sv, c["sv_leading"])
            cells.append(Cell("I", f"{key} sv", c["sv_leading"], str(sv), PASS if ok else FAIL))
        cells.append(_eq("I", f"{key} hs", c["hs"], hs_bound(c["n"], c["d"], r)))
    for key in ("golay", "tanner"):
        c = exp[key]
        cfg = c["tau1"]
        ell = c["d"] - 1
        if progress:
            progress(f"table I: {key} tau=1")
        u = u_single_row(c["n"], cfg["first_row_weight"], ell)
        rep = hierarchy_bound_xi1(u, cfg["rank_param"], 1, cfg["rank_tau"], ell)
        cells.append(_eq("I", f"{key} xi1 tau=1 (w={cfg['first_row_weight']}, rank_param={cfg['rank_param']})",
                         c["xi1_tau1"], rep.value))
        if "m" in cfg:
            alt = hierarchy_bound_xi1(u, cfg["m"], 1, cfg["rank_tau"], ell)
            cells.append(Cell("I", f"{key} xi1 tau=1 (rank_param=m={cfg['m']})", c["xi1_tau1"],
                              str(alt.value), INFO))
    g = exp["golay"]
    if progress:
        progress("table I: golay tau=m spectrum")
    spectrum = spectrum_exhaustive(golay_extended().H, g["d"] - 1)
    rep = hierarchy_bound_xi1(spectrum, 12, 12, 12, g["d"] - 1)
    cells.append(_eq("I", "golay xi1 tau=m", g["xi1_taum"], rep.value))
    return cells


def table_2(progress=None) -> list[Cell]:
    exp = load_expected("table2")
    cells = []
    if progress:
        progress("table II: exhaustive spectrum to size 12")
    spectrum = spectrum_exhaustive(golay_extended().H, 12)
    for i, (e, o) in enumerate(zip(exp["u"], spectrum.counts), start=1):
        cells.append(_eq("II", f"u_{i}", e, o))
    blocks = [("exact", spectrum.counts, exp["xi1"], exp["xi2"])]
    for b in exp["estimates"]:
        u_hat = [upper_confidence_count(x, b["N"], exp["epsilon"], comb(24, i)) for i, x in enumerate(b["x_bar"], 1)]
        tag = f"N={b['N']}"
        for i, (e, o) in enumerate(zip(b["u_hat"], u_hat), start=1):
            cells.append(_eq("II", f"{tag} u_hat_{i}", e, o))
        blocks.append((tag, u_hat, b["xi1"], b["xi2"]))
    for tag, u, t3, t4 in blocks:
        for ell in range(1, 13):
            cells.append(_eq("II", f"{tag} xi1 rho_{ell}", t3[ell - 1],
                             hierarchy_bound_xi1(u, 12, 12, 12, ell).value))
            cells.append(_eq("II", f"{tag} xi2 rho_{ell}", t4[ell - 1], xi2_bound(u, 12, ell).value))
    return cells


def table_4(progress=None) -> list[Cell]:
    exp = load_expected("table4")
    n = exp["n"]
    H = golay_extended().H
    cells = []
    for key, decoder in (("psi_h", ITERATIVE), ("psi_ml", ML)):
        if progress:
            progress(f"table IV: {decoder} profile")
        psi = undecodable_profile(H, decoder, exhaustive_to=12).psi
        for w in range(exp["zero_below"][key]):
            cells.append(_eq("IV", f"{key} w={w}", 0, psi[w]))
        for w, v in exp[key].items():
            cells.append(_eq("IV", f"{key} w={w}", v, psi[int(w)]))
        printed = exp["tail_printed"][key]
        base = 23 if printed == "C(23,w)" else 24
        for w in range(13, n + 1):
            observed = psi[w]
            if base == 24:
                cells.append(_eq("IV", f"{key} w={w}", comb(24, w), observed))
            else:
                # every pattern heavier than r = 12 is undecodable, so the
                # observed tail is C(24,w); the printed C(23,w) is reported only
                cells.append(Cell("IV", f"{key} w={w} (printed {printed})", str(comb(23, w)), str(observed), INFO))
    return cells


def _rate_m(n: int, rate: str) -> int:
    return n - int(Fraction(rate) * n)


def table_5(progress=None) -> list[Cell]:
    exp = load_expected("table5")
    cells = []
    for n_key, row in exp["rho_m"].items():
        n = int(n_key)
        for rate, printed in zip(exp["rates"], row):
            m = _rate_m(n, rate)
            if progress:
                progress(f"table V: n={n} R={rate}")
            value = float(ensemble_bound(sre_mean_spectrum(n, m, m), m, m).value)
            if n_key in exp["floor_rows"]:
                ok = matches_printed(value, printed, floor=True)
            elif n >= exp["significant_from"]:
                ok = matches_printed(value, printed, sig=exp["significant_digits"])
            else:
                ok = matches_printed(value, printed)
            cells.append(Cell("V", f"n={n} R={rate} rho_m", printed, f"{value:.6g}", PASS if ok else FAIL))
    return cells


RUNNERS = {"I": table_1, "II": table_2, "IV": table_4, "V": table_5}


def run(tables=TABLES, progress=None) -> list[Cell]:
    cells = []
    for t in tables:
        if t not in RUNNERS:
            raise ValueError(f"unknown table {t!r}; choose from {', '.join(TABLES)}")
        cells += RUNNERS[t](progress)
    return cells


def reproduce_doc(cells: list[Cell]) -> dict:
    return {
        "kind": "reproduce", "version": 1,
        "passed": sum(c.status == PASS for c in cells),
        "failed": sum(c.status == FAIL for c in cells),
        "cells": [vars(c) for c in cells],
    }
