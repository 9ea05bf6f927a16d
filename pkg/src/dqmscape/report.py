"""JSON/CSV renderings of landscape analyses."""

from __future__ import annotations

import csv
import io
from typing import Sequence

import numpy as np

from .encode import EncodingKind, QuboPair, decode
from .errors import DegenerateInstanceError
from .landscape import DEFAULT_MAX_VARS, Landscape, landscape_stats, sweep_rows, closed_form_stats
from .thresholds import threshold_report

FILTERS = ("all", "valid", "invalid", "local-min")


def analysis_report(
    q: QuboPair,
    gamma: float | None = None,
    *,
    solutions: str = "all",
    include_thresholds: bool = True,
    max_vars: int = DEFAULT_MAX_VARS,
) -> dict:
    """``{descriptor, stats, thresholds?, solutions}`` for one encoded instance.

    With ``gamma`` each solution also carries ``f`` and ``local_min``; the
    ``local-min`` filter requires ``gamma``.
    """
    if solutions not in FILTERS:
        raise ValueError(f"unknown solution filter {solutions!r}")
    if solutions == "local-min" and gamma is None:
        raise ValueError("the local-min filter needs a gamma value")
    land = Landscape(q, max_vars)
    desc = q.descriptor
    doc: dict = {"descriptor": None if desc is None else desc.to_dict()}

    stats = landscape_stats(land).to_dict()
    if desc is not None and desc.kind in (EncodingKind.ONE_HOT, EncodingKind.DOMAIN_WALL):
        expected = closed_form_stats(desc.kind, desc.k, desc.l)
        stats["closed_form_agrees"] = all(
            stats[key] == expected[key] for key in ("valid_count", "invalid_count", "max_penalty")
        )
    doc["stats"] = stats

    if include_thresholds:
        try:
            doc["thresholds"] = threshold_report(land).to_dict()
        except DegenerateInstanceError as exc:
            doc["thresholds"] = {"error": str(exc)}

    mask = np.ones(land.size, dtype=bool)
    local = None
    if gamma is not None:
        doc["gamma"] = float(gamma)
        local = land.local_min_mask(gamma)
        f = land.energies(gamma)
    if solutions == "valid":
        mask = land.valid
    elif solutions == "invalid":
        mask = ~land.valid
    elif solutions == "local-min":
        mask = local

    rows = []
    for i in np.flatnonzero(mask):
        rec = land.record(int(i)).to_dict()
        if desc is not None and desc.kind is not EncodingKind.K_HOT and rec["valid"]:
            rec["assignment"] = list(decode(rec["bits"], desc).assignment)
        if gamma is not None:
            rec["f"] = float(f[i])
            rec["local_min"] = bool(local[i])
        rows.append(rec)
    doc["solutions"] = rows
    if gamma is not None:
        doc["local_minima"] = {
            "valid": [land.bitstring(i) for i in np.flatnonzero(local & land.valid)],
            "invalid": [land.bitstring(i) for i in np.flatnonzero(local & ~land.valid)],
        }
    return doc


def sweep_csv(q: QuboPair, gammas: Sequence[float], *, wide: bool = False, max_vars: int = DEFAULT_MAX_VARS) -> str:
    """Energies on a gamma grid: long form ``gamma,bits,valid,f`` or wide ``gamma,<bits>...``."""
    land = Landscape(q, max_vars)
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    if not wide:
        writer.writerow(["gamma", "bits", "valid", "f"])
        for gamma, bits, valid, f in sweep_rows(land, gammas):
            writer.writerow([repr(gamma), bits, int(valid), repr(f)])
        return out.getvalue()
    writer.writerow(["gamma", *(land.bitstring(i) for i in range(land.size))])
    for gamma in gammas:
        gamma = float(gamma)
        writer.writerow([repr(gamma), *(repr(float(v)) for v in land.energies(gamma))])
    return out.getvalue()
