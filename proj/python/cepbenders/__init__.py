"""Capacity expansion planning solved monolithically or by Benders decomposition."""

import json

from ._core import (
    Case,
    CaseFormatError,
    load_case,
    model_size,
    select_even_weeks,
    select_weeks,
    synthetic_case,
    write_case,
)
from . import _core

__all__ = [
    "Case",
    "CaseFormatError",
    "capacity_mse",
    "load_case",
    "model_size",
    "run",
    "select_even_weeks",
    "select_weeks",
    "synthetic_case",
    "write_case",
]


def run(case, method="benders", scenario=None, relax=False, rel_tol=1e-3, k_max=1000,
        mip_gap=1e-4, workers=1):
    """Solve `case` and return the report as a dict."""
    text = _core._run(case, method, scenario or "", relax, rel_tol, k_max, mip_gap, workers)
    return json.loads(text)


def capacity_mse(report, reference):
    """Root of summed squared capacity differences (MW) between two report dicts."""
    return _core._capacity_mse(json.dumps(report), json.dumps(reference))
