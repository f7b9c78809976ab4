"""Figure-reproduction presets.

Each preset is a ready-to-run :class:`ExperimentConfig` whose model
parameters, measures, averaging scopes and coupling grids match one
published curve.  Realization counts default to desk scale so a preset
finishes in minutes; ``full=True`` restores the publication-scale
ensemble sizes.
"""

from __future__ import annotations

from dataclasses import replace

from .config import ExperimentConfig

_2D_GRID = (0.1, 0.2, 0.3, 0.5, 1.0, 2.0, 3.0, 5.0, 10.0, 20.0, 30.0)
_PEAK_GRID = (0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0, 30.0)


def _cfg(**kwargs) -> ExperimentConfig:
    kwargs.setdefault("directory", "results")
    return ExperimentConfig(**kwargs)


def _build_presets() -> dict:
    presets = {}
    presets["fig-2d-gamma"] = (
        _cfg(kind="2d", units="JL_over_delta", j_values=_2D_GRID, measures=("gamma",)),
        2000, 200,
    )
    presets["fig-2d-pn"] = (
        _cfg(kind="2d", units="JL_over_delta", j_values=_2D_GRID, measures=("pn:central",)),
        2000, 200,
    )
    presets["fig-2d-c12"] = (
        _cfg(
            kind="2d", units="JL_over_delta",
            j_values=(0.05, 0.1, 0.2, 0.5, 1.0, 1.5, 2.5, 5.0, 10.0, 20.0, 50.0),
            measures=("c1:central", "c2:central"),
        ),
        2000, 200,
    )
    presets["fig-2d-cmap"] = (
        _cfg(
            kind="2d", units="JL_over_delta",
            j_values=(0.1, 0.3, 0.5, 1.0, 2.0, 3.0, 5.0, 10.0, 20.0, 30.0),
            measures=("cmap", "c1:central_third"),
        ),
        200, 20,
    )
    presets["fig-1d-pds"] = (
        _cfg(
            kind="1d", L_values=(12,), units="J_over_Jc", j_values=(0.35, 15.0),
            measures=("pds", "gamma"),
        ),
        10, 3,
    )
    presets["fig-1d-pn"] = (
        _cfg(
            kind="1d", L_values=(12,), units="J_over_Jc",
            j_values=(0.1, 0.3, 1.0, 3.0, 10.0, 30.0, 100.0, 300.0, 1000.0),
            measures=("pn",),
        ),
        10, 2,
    )
    presets["fig-c-distance"] = (
        _cfg(
            kind="1d", L_values=(10,), l_c_values=(5,), units="J_over_Jc",
            j_values=_PEAK_GRID, measures=("c1", "c2", "c3", "c4", "c5"),
        ),
        30, 5,
    )
    presets["fig-c-range"] = (
        _cfg(
            kind="1d", L_values=(10,), l_c_values=(1, 2, 3), units="J_over_Jc",
            j_values=_PEAK_GRID, measures=("c3",),
        ),
        30, 5,
    )
    presets["fig-c-size"] = (
        _cfg(
            kind="1d", L_values=(6, 8, 10, 12), units="J_over_Jc",
            j_values=(0.1, 0.3, 1.0, 3.0, 10.0, 30.0), measures=("ca",),
        ),
        30, 3,
    )
    presets["fig-clambda"] = (
        _cfg(
            kind="1d", L_values=(12,), units="J_over_Jc",
            j_values=(0.01, 0.1, 1.0, 10.0, 100.0), measures=("clambda",),
        ),
        30, 2,
    )
    presets["fig-s1"] = (
        _cfg(
            kind="1d", L_values=(6, 8, 10, 12), units="J_over_Jc",
            j_values=(0.1, 0.3, 1.0, 3.0, 15.0, 30.0), measures=("s1",),
        ),
        30, 3,
    )
    presets["fig-sn"] = (
        _cfg(
            kind="1d", L_values=(12,), units="J_over_Jc",
            j_values=(0.1, 0.5, 1.0, 3.0, 15.0),
            measures=("sn1", "sn2", "sn3", "sn4", "sn5"),
        ),
        10, 2,
    )
    presets["fig-shalf"] = (
        _cfg(
            kind="1d", L_values=(6, 8, 10, 12), units="J_over_Jc",
            j_values=(0.1, 0.5, 1.0, 3.0, 15.0, 30.0), measures=("shalf",),
        ),
        10, 2,
    )
    presets["fig-weakchaos"] = (
        _cfg(
            kind="1d", L_values=(10,), l_c_values=(1, 5), units="J_over_Jc",
            j_values=(0.1, 0.3, 1.0, 3.0, 10.0, 30.0, 100.0),
            measures=("gamma", "c1", "pn"),
        ),
        30, 5,
    )
    return presets


_PRESETS = _build_presets()

PRESET_NAMES = tuple(sorted(_PRESETS))


def preset(name: str, full: bool = False) -> ExperimentConfig:
    """Named experiment config; ``full`` switches to publication-scale R."""
    try:
        config, r_full, r_desk = _PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; available: {', '.join(PRESET_NAMES)}") from None
    return replace(config, realizations=r_full if full else r_desk, directory=name)
