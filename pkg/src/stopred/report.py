"""JSON and CSV renderings of results.

Every JSON document carries ``kind`` and ``version`` and validates against
``data/schemas/<kind>.json``.  CSV column orders are the ``*_COLUMNS``
tuples below and do not change between versions.
"""

from __future__ import annotations

import csv
import io
import json
from importlib import resources
from math import comb
from typing import Iterable, Sequence

from .bounds import BoundReport
from .decoder import DecoderComparison
from .estimator import EstimationResult
from .stopping import PatternProfile, StoppingSpectrum

VERSION = 1

SPECTRUM_COLUMNS = ("i", "count", "total", "exact")
ESTIMATE_COLUMNS = ("i", "N", "successes", "x_bar", "epsilon", "kappa", "u_hat", "total")
PROFILE_COLUMNS = ("w", "count", "total", "exact", "failures", "samples")
COMPARISON_COLUMNS = ("weight", "total", "tested", "exhaustive", "iterative_fail", "ml_fail", "disagreements")
BOUND_COLUMNS = ("name", "value", "ell", "tau", "rank_param", "t_star", "kappa_at_t_star", "delta", "method")
ENSEMBLE_COLUMNS = ("variant", "n", "m", "J", "K", "ell", "rho", "rho_hat", "epsilon_percent", "confidence")
GREEDY_COLUMNS = ("ell", "rows", "best_restart", "restarts")


def _num(v):
    if v is None:
        return None
    if isinstance(v, int):
        return str(v)
    return repr(float(v))


def spectrum_doc(spectrum: StoppingSpectrum) -> dict:
    return {
        "kind": "spectrum", "version": VERSION, "n": spectrum.n,
        "coverable_only": spectrum.coverable_only, "exact": spectrum.exact,
        "rows": [{"i": i, "count": _num(c), "total": str(comb(spectrum.n, i)), "exact": spectrum.exact}
                 for i, c in enumerate(spectrum.counts, start=1)],
        "meta": _jsonable(spectrum.meta),
    }


def spectrum_from_doc(doc: dict) -> StoppingSpectrum:
    counts = []
    for row in doc["rows"]:
        v = row["count"]
        counts.append(int(v) if v.lstrip("-").isdigit() else float(v))
    return StoppingSpectrum(doc["n"], counts, doc.get("coverable_only", True), doc.get("exact", True),
                            dict(doc.get("meta", {})))


def estimate_doc(res: EstimationResult) -> dict:
    rows = []
    for i in range(1, res.ell + 1):
        k = i - 1
        rows.append({"i": i, "N": res.N[k], "successes": res.successes[k], "x_bar": res.x_bar[k],
                     "epsilon": res.epsilon[k], "kappa": res.kappa[k], "u_hat": str(res.u_hat[k]),
                     "total": str(res.totals[k])})
    return {"kind": "estimate", "version": VERSION, "n": res.n, "seed": res.seed, "source": res.source,
            "confidence": res.confidence, "rows": rows, "meta": _jsonable(res.meta)}


def profile_doc(profiles: Sequence[PatternProfile], labels: Sequence[str] | None = None) -> dict:
    out = []
    for idx, p in enumerate(profiles):
        rows = []
        for w in range(p.n + 1):
            if p.psi[w] is None:
                continue
            fails, N = (p.samples[w][0], p.samples[w][1]) if w in p.samples else (None, None)
            rows.append({"w": w, "count": _num(p.psi[w]), "total": str(comb(p.n, w)), "exact": p.exact[w],
                         "failures": fails, "samples": N})
        label = labels[idx] if labels else f"{p.decoder}"
        seed = next(iter(p.samples.values()))[2] if p.samples else None
        out.append({"label": label, "decoder": p.decoder, "matrix_rows": p.matrix_rows, "seed": seed, "rows": rows})
    return {"kind": "profile", "version": VERSION, "n": profiles[0].n if profiles else 0, "profiles": out}


def comparison_doc(cmp: DecoderComparison) -> dict:
    return {"kind": "comparison", "version": VERSION, "n": cmp.n, "matrix_rows": cmp.matrix_rows,
            "disagreements": cmp.disagreements,
            "rows": [{c: getattr(r, c) for c in COMPARISON_COLUMNS} | {"seed": r.seed} for r in cmp.rows]}


def bounds_doc(reports: Iterable[BoundReport], params: dict | None = None) -> dict:
    return {"kind": "bounds", "version": VERSION, "params": _jsonable(params or {}),
            "bounds": [_jsonable(r.to_dict()) for r in reports]}


def fer_doc(grid: Sequence[float], curves: dict) -> dict:
    return {"kind": "fer", "version": VERSION, "p": list(grid),
            "curves": [{"label": k, "fer": list(v)} for k, v in curves.items()]}


def ensemble_doc(rows: list[dict], params: dict | None = None) -> dict:
    return {"kind": "ensemble", "version": VERSION, "params": _jsonable(params or {}), "rows": _jsonable(rows)}


def greedy_doc(log: dict) -> dict:
    return {"kind": "greedy", "version": VERSION} | _jsonable(log)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "item"):
        return obj.item()
    if isinstance(obj, float) and obj != obj:
        return None
    return obj


# ----------------------------------------------------------------------
# CSV

def _csv(columns: Sequence[str], rows: Iterable[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(columns), extrasaction="ignore", lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({k: ("" if row.get(k) is None else row.get(k)) for k in columns})
    return buf.getvalue()


def to_csv(doc: dict) -> str:
    kind = doc["kind"]
    if kind == "spectrum":
        return _csv(SPECTRUM_COLUMNS, doc["rows"])
    if kind == "estimate":
        return _csv(ESTIMATE_COLUMNS, doc["rows"])
    if kind == "profile":
        cols = ("label", "decoder") + PROFILE_COLUMNS
        rows = [{"label": p["label"], "decoder": p["decoder"]} | r for p in doc["profiles"] for r in p["rows"]]
        return _csv(cols, rows)
    if kind == "comparison":
        return _csv(COMPARISON_COLUMNS, doc["rows"])
    if kind == "bounds":
        rows = []
        for b in doc["bounds"]:
            row = {"name": b["name"], "value": b["value"]}
            row |= {k: b["params"].get(k) for k in ("ell", "tau", "rank_param")}
            row |= {k: b["witness"].get(k) for k in ("t_star", "kappa_at_t_star", "delta", "method")}
            rows.append(row)
        return _csv(BOUND_COLUMNS, rows)
    if kind == "fer":
        cols = ["p"] + [c["label"] for c in doc["curves"]]
        rows = [{"p": p} | {c["label"]: c["fer"][k] for c in doc["curves"]} for k, p in enumerate(doc["p"])]
        return _csv(cols, rows)
    if kind == "ensemble":
        return _csv(ENSEMBLE_COLUMNS, doc["rows"])
    if kind == "greedy":
        return _csv(GREEDY_COLUMNS, [{"ell": doc["ell"], "rows": doc["row_count"],
                                      "best_restart": doc["best_restart"],
                                      "restarts": len(doc["runs"])}])
    if kind == "reproduce":
        return _csv(("table", "cell", "expected", "observed", "status"), doc["cells"])
    raise ValueError(f"no CSV layout for {kind!r}")


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"


def load_schema(kind: str) -> dict:
    text = resources.files("stopred").joinpath("data", "schemas", f"{kind}.json").read_text()
    return json.loads(text)
