"""Table-style summaries of a preset: cycle counts and threshold."""

from __future__ import annotations

import time

from .cycles import count_coupled_cycles, enumerate_cycles
from .exit import DEFAULT_TOL, threshold
from .lifting import extract_local_code, lifted_components
from .presets import Preset

__all__ = ["preset_cycles", "preset_threshold", "table_row"]


def preset_cycles(preset: Preset, scope: str, length: int):
    """Cycle count of ``preset`` in ``scope``.

    Returns ``(count, decomposition)``; the decomposition is ``None`` for
    uncoupled scopes.  Coupled scopes are counted from replica windows, so
    the L-replica chain is never enumerated as a whole.
    """
    if preset.kind == "lc" and scope in ("coupled-protograph", "lifted-coupled"):
        raise ValueError(f"preset {preset.name} is a local code; use a local scope")
    if scope == "local-protograph":
        return enumerate_cycles(preset.local_protograph(), length), None
    if scope == "lifted-local":
        if preset.kind == "lc":
            return enumerate_cycles(preset.lifted().h, length), None
        return enumerate_cycles(extract_local_code(preset.lifted(), 0), length), None
    if scope == "coupled-protograph":
        b0, b1 = preset.components()
    elif scope == "lifted-coupled":
        h0, h1 = lifted_components(preset.protograph(), preset.partition(), preset.p)
        b0, b1 = h0.toarray(), h1.toarray()
    else:
        raise ValueError(f"unknown scope {scope!r}")
    dec = count_coupled_cycles(b0, b1, preset.l, length=length)
    return dec.total, dec


def preset_threshold(preset: Preset, tol: float = DEFAULT_TOL, model: str = "exact"):
    return threshold(preset.analysis_matrix(), tol=tol, model=model)


def table_row(preset: Preset, tol: float = DEFAULT_TOL, model: str = "exact",
              with_c8: bool = True) -> dict:
    """{proto C6, lifted C6, proto C8, lifted C8, sigma*} for one preset."""
    t0 = time.perf_counter()
    proto_scope = "local-protograph" if preset.kind == "lc" else "coupled-protograph"
    lifted_scope = "lifted-local" if preset.kind == "lc" else "lifted-coupled"
    row = {"code": preset.name}
    row["proto_c6"] = preset_cycles(preset, proto_scope, 6)[0]
    row["lifted_c6"] = preset_cycles(preset, lifted_scope, 6)[0]
    if with_c8:
        row["proto_c8"] = preset_cycles(preset, proto_scope, 8)[0]
        row["lifted_c8"] = preset_cycles(preset, lifted_scope, 8)[0]
    row["sigma_star"] = preset_threshold(preset, tol, model).sigma_star
    row["runtime"] = time.perf_counter() - t0
    return row
