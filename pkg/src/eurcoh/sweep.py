"""Parameter sweeps over the Bell-diagonal family and their CSV format."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

from .errors import InvalidConfig, MalformedCsv
from .infotheory import DELTA_VARIANTS, uncertainty_report
from .states import bell_diagonal_state, mub_qubit
from .tomography import derive_seed, monte_carlo_errors, standard_settings, write_atomic

SCHEMA = "eurcoh-sweep/1"
THETA_GRID = (0.0, 10.0, 20.0, 30.0, 40.0, 45.0, 50.0, 60.0, 70.0, 80.0, 90.0)
P_GRID = tuple(round(0.1 * i, 1) for i in range(11))
DEFAULT_BRANCHES = {"theta": (0.0, 1.0), "p": (30.0, 45.0)}

ROW_QUANTITIES = (
    "elhs", "erhs1", "erhs2", "clhs", "crhs1", "crhs2",
    "s_ab", "s_b", "s_a_given_b", "i_ab", "delta",
)


@dataclass(frozen=True)
class SweepConfig:
    """One sweep. ``fixed_values`` lists the branches: p values for a theta sweep,
    theta values (degrees) for a p sweep."""

    sweep_kind: str = "theta"
    fixed_values: tuple[float, ...] = ()
    grid: tuple[float, ...] = ()
    pipeline: str = "analytic"
    exposure: float = 1e4
    mc_samples: int = 100
    seed: int = 0
    delta_variant: str = "consistent"
    settings_mode: int = 36
    output_path: str | None = None
    workers: int = 1

    def resolved(self) -> SweepConfig:
        grid = self.grid or (THETA_GRID if self.sweep_kind == "theta" else P_GRID)
        fixed = self.fixed_values or DEFAULT_BRANCHES.get(self.sweep_kind, ())
        cfg = replace(self, grid=tuple(float(g) for g in grid), fixed_values=tuple(float(f) for f in fixed))
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if self.sweep_kind not in ("theta", "p"):
            raise InvalidConfig(f"sweep kind must be 'theta' or 'p', not {self.sweep_kind!r}")
        if self.pipeline not in ("analytic", "tomographic"):
            raise InvalidConfig(f"unknown pipeline {self.pipeline!r}")
        if self.delta_variant not in DELTA_VARIANTS:
            raise InvalidConfig(f"unknown delta variant {self.delta_variant!r}")
        if self.settings_mode not in (16, 36):
            raise InvalidConfig("settings must be 16 or 36")
        if not self.grid:
            raise InvalidConfig("grid is empty")
        if any(b <= a for a, b in zip(self.grid, self.grid[1:])):
            raise InvalidConfig("grid must be strictly increasing")
        if not self.fixed_values:
            raise InvalidConfig("no branch values given")
        theta_vals, p_vals = (self.grid, self.fixed_values) if self.sweep_kind == "theta" else (
            self.fixed_values, self.grid)
        if any(not 0.0 <= t <= 90.0 for t in theta_vals):
            raise InvalidConfig("theta values must lie in [0, 90] degrees")
        if any(not 0.0 <= p <= 1.0 for p in p_vals):
            raise InvalidConfig("p values must lie in [0, 1]")
        if not (self.exposure > 0 and math.isfinite(self.exposure)):
            raise InvalidConfig("exposure must be positive")
        if self.mc_samples < 1:
            raise InvalidConfig("mc_samples must be at least 1")
        if self.workers < 1:
            raise InvalidConfig("workers must be at least 1")

    def points(self) -> list[tuple[int, int, float, float]]:
        """(branch index, grid index, p, theta_deg) in output order."""
        out = []
        for bi, fixed in enumerate(self.fixed_values):
            for gi, g in enumerate(self.grid):
                p, theta = (fixed, g) if self.sweep_kind == "theta" else (g, fixed)
                out.append((bi, gi, p, theta))
        return out


@dataclass(frozen=True)
class SweepRow:
    theta_deg: float
    p: float
    values: dict[str, float]
    std_devs: dict[str, float] = field(default_factory=dict)
    fidelity: float | None = None
    fidelity_std: float | None = None
    n_failed: int = 0

    def __getattr__(self, name):
        try:
            return self.__dict__["values"][name]
        except KeyError:
            raise AttributeError(name) from None


def analytic_row(p: float, theta_deg: float, delta_variant: str = "consistent") -> SweepRow:
    rep = uncertainty_report(bell_diagonal_state(p, theta_deg), mub_qubit(), delta_variant)
    return SweepRow(theta_deg, p, {q: float(getattr(rep, q)) for q in ROW_QUANTITIES})


def _tomographic_row(args) -> SweepRow:
    cfg, bi, gi, p, theta = args
    rho = bell_diagonal_state(p, theta)
    settings = standard_settings(cfg.settings_mode)
    seed = derive_seed(cfg.seed, bi, gi)
    quantities = ROW_QUANTITIES + ("fidelity",)
    n = max(cfg.mc_samples, 2)
    rep = monte_carlo_errors(rho, settings, cfg.exposure, n, seed, quantities, cfg.delta_variant)
    stats = rep.as_dict()
    if cfg.mc_samples == 1:
        first = dict(zip(quantities, rep.samples[0]))
        return SweepRow(theta, p, {q: first[q] for q in ROW_QUANTITIES}, fidelity=first["fidelity"])
    return SweepRow(
        theta,
        p,
        {q: stats[q][0] for q in ROW_QUANTITIES},
        {q: stats[q][1] for q in ROW_QUANTITIES},
        fidelity=stats["fidelity"][0],
        fidelity_std=stats["fidelity"][1],
        n_failed=rep.n_failed,
    )


def run_sweep(config: SweepConfig) -> list[SweepRow]:
    """Evaluate every (branch, grid) point; write the CSV if ``output_path`` is set."""
    cfg = config.resolved()
    points = cfg.points()
    if cfg.pipeline == "analytic":
        rows = [analytic_row(p, theta, cfg.delta_variant) for _, _, p, theta in points]
    else:
        jobs = [(cfg, bi, gi, p, theta) for bi, gi, p, theta in points]
        if cfg.workers > 1:
            with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
                rows = list(pool.map(_tomographic_row, jobs))
        else:
            rows = [_tomographic_row(j) for j in jobs]
    if cfg.output_path:
        write_atomic(cfg.output_path, rows_to_csv(rows, cfg))
    return rows


def _fmt(x: float | None) -> str:
    return "" if x is None else format(x, ".17g")


def columns_for(cfg: SweepConfig) -> list[str]:
    cols = ["theta_deg", "p", *ROW_QUANTITIES]
    if cfg.pipeline == "tomographic":
        cols.append("fidelity")
        if cfg.mc_samples > 1:
            cols += [f"{q}_std" for q in ROW_QUANTITIES] + ["fidelity_std", "n_failed"]
    return cols


def rows_to_csv(rows: Sequence[SweepRow], cfg: SweepConfig) -> str:
    buf = io.StringIO()
    buf.write(
        f"# schema={SCHEMA} kind={cfg.sweep_kind} pipeline={cfg.pipeline} "
        f"delta_variant={cfg.delta_variant} seed={cfg.seed} exposure={_fmt(cfg.exposure)} "
        f"mc_samples={cfg.mc_samples} settings={cfg.settings_mode} "
        f"branches={';'.join(_fmt(f) for f in cfg.fixed_values)}\n"
    )
    cols = columns_for(cfg)
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        rec = {"theta_deg": r.theta_deg, "p": r.p, **r.values, "fidelity": r.fidelity,
               "fidelity_std": r.fidelity_std, "n_failed": r.n_failed}
        rec.update({f"{q}_std": v for q, v in r.std_devs.items()})
        w.writerow([str(rec[c]) if c == "n_failed" else _fmt(rec[c]) for c in cols])
    return buf.getvalue()


@dataclass
class SweepTable:
    meta: dict[str, str]
    columns: list[str]
    rows: list[dict[str, float]]

    @property
    def kind(self) -> str:
        return self.meta.get("kind", "theta")

    def has_std(self) -> bool:
        return any(c.endswith("_std") for c in self.columns)


def read_sweep_csv(text: str) -> SweepTable:
    meta: dict[str, str] = {}
    body = []
    for line in text.splitlines():
        if line.startswith("#"):
            for tok in line[1:].split():
                if "=" in tok:
                    k, v = tok.split("=", 1)
                    meta[k] = v
        elif line.strip():
            body.append(line)
    if not body:
        raise MalformedCsv("sweep CSV has no header row")
    reader = csv.reader(body)
    columns = next(reader)
    missing = {"theta_deg", "p", "elhs", "clhs"} - set(columns)
    if missing:
        raise MalformedCsv(f"sweep CSV lacks columns {sorted(missing)}")
    rows = []
    for rec in reader:
        if len(rec) != len(columns):
            raise MalformedCsv(f"row has {len(rec)} fields, header has {len(columns)}")
        try:
            rows.append({c: (float(v) if v != "" else math.nan) for c, v in zip(columns, rec)})
        except ValueError as exc:
            raise MalformedCsv(str(exc)) from exc
    if not rows:
        raise MalformedCsv("sweep CSV has no data rows")
    return SweepTable(meta, columns, rows)
