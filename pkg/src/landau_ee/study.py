"""Scan orchestration and persistence: CSV table, JSON result document
(deterministic — wall-clock metadata goes to a separate file), and SVG plots
rendered from the CSV by a pure formatting pass.
"""

import json
import os
import time
from datetime import datetime, timezone

from .config import config_echo
from .entanglement import (
    TruncationPolicy,
    area_law_scan,
    fit_slope,
    pnorm_scaling_exponent,
)
from .errors import DomainError


def _policy(cfg):
    if cfg.truncation_mode == "explicit":
        return TruncationPolicy(mode="explicit", l_max=cfg.levels, m_max=cfg.m_max)
    return TruncationPolicy(l_max=cfg.levels)


def run_scan(cfg):
    """Execute the area-law scan described by the config."""
    return area_law_scan(
        cfg.b0,
        cfg.field_family,
        cfg.potential_family,
        cfg.region,
        cfg.l_grid,
        cfg.alphas,
        cfg.interval,
        p_values=cfg.p_values,
        policy=_policy(cfg),
        jobs=cfg.jobs,
        quadrature=cfg.quadrature_overrides or None,
    )


def csv_columns(p_values):
    cols = ["L", "alpha", "S_unpert", "S_pert"]
    cols += [f"cross_p{p!r}" for p in p_values]
    cols += [f"diff_p{p!r}" for p in p_values]
    return cols


def table_to_csv(table):
    """Render the scan table; floats via repr (shortest round-trip)."""
    lines = [",".join(csv_columns(table.p_values))]
    for row in table.rows:
        cells = [repr(float(row.L)), repr(float(row.alpha)),
                 repr(float(row.s_unpert)), repr(float(row.s_pert))]
        cells += [repr(float(row.cross_norms[p])) for p in table.p_values]
        cells += [repr(float(row.diff_norms[p])) for p in table.p_values]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def compute_fits(table, fit_window):
    """Slope fits and log-log exponents; None when the grid is too short."""
    n_scales = len({row.L for row in table.rows})
    if n_scales < 3:
        return None
    fits = {"slopes": {}, "exponents": {}}
    for alpha in table.alphas:
        for column in ("S_unpert", "S_pert"):
            slope, intercept, r2 = fit_slope(table, column, fit_window, alpha=alpha)
            fits["slopes"][f"{column}_alpha{alpha!r}"] = {
                "slope": slope, "intercept": intercept, "r_squared": r2,
            }
    for p in table.p_values:
        try:
            fits["exponents"][f"same_p{p!r}"] = pnorm_scaling_exponent(
                table, "same", p
            )
        except DomainError:
            fits["exponents"][f"same_p{p!r}"] = None
        try:
            fits["exponents"][f"difference_p{p!r}"] = pnorm_scaling_exponent(
                table, "difference", p
            )
        except DomainError:
            fits["exponents"][f"difference_p{p!r}"] = None
    return fits


def result_document(cfg, table, fits):
    """Deterministic JSON document: config echo, fits, and the full table."""
    rows = [
        {
            "L": row.L,
            "alpha": row.alpha,
            "S_unpert": row.s_unpert,
            "S_pert": row.s_pert,
            "cross": {repr(p): row.cross_norms[p] for p in table.p_values},
            "diff": {repr(p): row.diff_norms[p] for p in table.p_values},
        }
        for row in table.rows
    ]
    return {"config": config_echo(cfg), "fits": fits, "table": rows}


def cmd_scan(cfg, out_dir=None):
    """Run the scan and write table.csv, scan.json, run_meta.json, plots."""
    out = out_dir or cfg.out
    os.makedirs(out, exist_ok=True)
    started = datetime.now(timezone.utc).isoformat()
    t0 = time.monotonic()
    table = run_scan(cfg)
    fits = compute_fits(table, cfg.fit_window)
    wall = time.monotonic() - t0

    csv_path = os.path.join(out, "table.csv")
    with open(csv_path, "w") as fh:
        fh.write(table_to_csv(table))
    with open(os.path.join(out, "scan.json"), "w") as fh:
        json.dump(result_document(cfg, table, fits), fh, indent=2, sort_keys=True)
        fh.write("\n")
    with open(os.path.join(out, "run_meta.json"), "w") as fh:
        json.dump(
            {"started_at": started, "wall_clock_seconds": wall,
             "rows": len(table.rows), "jobs": cfg.jobs},
            fh, indent=2, sort_keys=True,
        )
        fh.write("\n")
    written = [csv_path, os.path.join(out, "scan.json"),
               os.path.join(out, "run_meta.json")]
    if cfg.plots:
        from .plots import plots_from_csv

        written += plots_from_csv(csv_path, out)
    return table, written
