"""Parameter sweeps over (alpha, beta, nu, amplitude) with a process pool.

Cells are independent runs; results are collected by the parent and sorted
by their grid key, so the output does not depend on completion order.
"""

from __future__ import annotations

import itertools
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

from .config import format_float, sim_config_from_sections
from .solver import run

__all__ = ["SweepCell", "SweepResult", "run_cell", "run_sweep", "MAX_CELLS"]

MAX_CELLS = 10_000
CELL_COLUMNS = ("alpha", "beta", "nu", "amplitude", "verdict", "blowup_time_estimate",
                "max_gradient", "final_sup_norm", "anomalous")


@dataclass
class SweepCell:
    alpha: float
    beta: float
    nu: float
    amplitude: float
    verdict: str
    blowup_time_estimate: Optional[float] = None
    max_gradient: float = math.nan
    final_sup_norm: float = math.nan
    anomalous: bool = False
    resolution_study: Optional[dict] = None
    error: Optional[str] = None
    bisection: bool = False

    @property
    def key(self):
        return (self.alpha, self.nu, self.amplitude, self.beta)


@dataclass
class SweepResult:
    axes: dict
    cells: list = field(default_factory=list)
    boundary_estimate: dict = field(default_factory=dict)
    wall_time: float = 0.0

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True, allow_nan=True)


def run_cell(task) -> SweepCell:
    """Worker entry point: ``task`` is (sections, base_dir, alpha, beta, nu, amplitude, per_amp, bisection)."""
    sections, base_dir, alpha, beta, nu, amp, per_amp, bisection = task
    overrides = {"alpha": alpha, "beta": beta, "nu": nu, "amplitude": amp}
    if per_amp is not None:
        overrides["blowup_gradient_threshold"] = per_amp * abs(amp)
    try:
        cfg = sim_config_from_sections(sections, base_dir, **overrides)
        max_steps = sections["solver"].get("max_steps", 10_000_000)
        res = run(cfg, max_steps=max_steps)
    except Exception as exc:  # recorded per cell; the sweep continues
        return SweepCell(alpha, beta, nu, amp, "failed", error=f"{type(exc).__name__}: {exc}",
                         bisection=bisection)
    rec = res.record
    anomalous = res.verdict == "blowup_detected" and beta >= 1.0 - alpha
    study = None
    if anomalous and res.confirmation is not None:
        conf = res.confirmation
        study = {"n_points": cfg.grid.n_points * 2, "raw_verdict": conf.raw_verdict,
                 "blowup_time_estimate": conf.blowup_time_estimate}
    return SweepCell(alpha, beta, nu, amp, res.verdict, res.blowup_time_estimate,
                     float(rec.gradient_sup.max()), float(rec.sup_norm[-1]), anomalous, study,
                     bisection=bisection)


def _bracket(cells):
    """(highest blowup beta, lowest completed beta above it) or None."""
    blow = [c.beta for c in cells if c.verdict == "blowup_detected"]
    if not blow:
        return None
    hi_blow = max(blow)
    done = [c.beta for c in cells if c.verdict == "completed" and c.beta > hi_blow]
    if not done:
        return None
    return hi_blow, min(done)


def run_sweep(sections: dict, base_dir=None, workers: int = 1) -> SweepResult:
    axes = {name: list(sections["axes"].get(name, [])) for name in ("alpha", "beta", "nu", "amplitude")}
    for name, default in (("nu", sections["physics"].get("nu")),
                          ("amplitude", sections["initial_data"].get("amplitude"))):
        if not axes[name]:
            if default is None:
                raise ValueError(f"axis '{name}' is empty and has no base value")
            axes[name] = [default]
    for name in ("alpha", "beta"):
        if not axes[name]:
            raise ValueError(f"axis '{name}' is empty")
    n_cells = math.prod(len(v) for v in axes.values())
    if n_cells > MAX_CELLS:
        raise ValueError(f"sweep has {n_cells} cells, limit is {MAX_CELLS}")
    opts = sections.get("sweep", {})
    per_amp = opts.get("gradient_threshold_per_amplitude")
    steps = opts.get("bisection_steps", 0)
    t0 = time.perf_counter()
    tasks = [(sections, base_dir, a, b, nu, amp, per_amp, False)
             for a, b, nu, amp in itertools.product(axes["alpha"], axes["beta"], axes["nu"], axes["amplitude"])]
    cells = _execute(tasks, workers)
    groups = {}
    for c in cells:
        groups.setdefault((c.alpha, c.nu, c.amplitude), []).append(c)
    # bisection rounds run the midpoints of all open brackets together
    open_groups = {k: _bracket(v) for k, v in groups.items()}
    for _ in range(steps):
        pending = []
        for k, br in open_groups.items():
            if br is None:
                continue
            if any(c.beta == round(0.5 * (br[0] + br[1]), 12) for c in groups[k]):
                # the midpoint already ran without settling either side
                open_groups[k] = None
                continue
            pending.append((k, br))
        if not pending:
            break
        tasks = [(sections, base_dir, k[0], round(0.5 * (br[0] + br[1]), 12), k[1], k[2], per_amp, True)
                 for k, br in pending]
        for (k, br), cell in zip(pending, _execute(tasks, workers)):
            groups[k].append(cell)
            if cell.verdict == "blowup_detected":
                open_groups[k] = (cell.beta, br[1])
            elif cell.verdict == "completed":
                open_groups[k] = (br[0], cell.beta)
            else:
                # an unresolved midpoint cannot move either end of the bracket
                open_groups[k] = None
    estimate = {}
    for k, members in groups.items():
        br = _bracket(members)
        label = f"alpha={format_float(k[0])},nu={format_float(k[1])},amplitude={format_float(k[2])}"
        estimate[label] = None if br is None else 0.5 * (br[0] + br[1])
    all_cells = sorted((c for v in groups.values() for c in v), key=lambda c: c.key)
    return SweepResult(axes, [asdict(c) for c in all_cells], estimate, time.perf_counter() - t0)


def _execute(tasks, workers):
    if workers <= 1 or len(tasks) <= 1:
        return [run_cell(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(workers, len(tasks))) as pool:
        return list(pool.map(run_cell, tasks))


def write_sweep(result: SweepResult, out_dir) -> list:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = [out / "sweep_result.json", out / "sweep_cells.csv"]
    paths[0].write_text(result.to_json() + "\n", encoding="utf-8")
    lines = [",".join(CELL_COLUMNS)]
    for c in result.cells:
        row = []
        for name in CELL_COLUMNS:
            v = c[name]
            if v is None:
                row.append("")
            elif isinstance(v, bool):
                row.append("true" if v else "false")
            elif isinstance(v, float):
                row.append(format_float(v))
            else:
                row.append(str(v))
        lines.append(",".join(row))
    paths[1].write_text("\n".join(lines) + "\n", encoding="utf-8")
    return paths
