"""Monte-Carlo harness: one-trial method pipeline, parameter sweeps with
common random numbers, and CSV/JSON result files.

Every trial index owns a fixed random stream derived from the master seed
alone, so all sweep points see the same channel realizations and curves
differ only through the swept parameter.
"""

from __future__ import annotations

import csv
import json
import math
import subprocess
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace
from enum import Enum
from pathlib import Path

import numpy as np

from .beamforming import fully_digital, project_hybrid, r_max, relaxed_beamformers
from .channels import (
    ArrayGeometries,
    ScenarioConfig,
    SystemDims,
    sample_channel_triple,
)
from .effective import build_effective, gram_sum, total_channel
from .evaluation import (
    EvaluationInput,
    perturb_matrix_to_nmse,
    perturb_to_nmse,
    spectral_efficiency,
)
from .reflection import (
    asymptotic_reflection,
    project_reflection,
    random_reflection,
    relaxed_reflection,
)


class Method(str, Enum):
    """Reflection/transceiver combinations the harness can evaluate."""

    PROPOSED_HYBRID = "proposed_hybrid"
    PROPOSED_FULLY_DIGITAL = "proposed_fully_digital"
    SOTA_ASYMPTOTIC = "sota_asymptotic"
    RANDOM_REFLECTION_FULLY_DIGITAL = "random_reflection_fully_digital"
    UPPER_BOUND = "upper_bound"


SWEEP_KINDS = ("ptx_dbm", "n_path", "nmse_db", "system_size")

CSV_COLUMNS = (
    "trial_id", "seed", "method", "p_tx_dbm", "n_r", "n_t", "m",
    "n_r_rf", "n_t_rf", "n_s", "n_path", "nmse_db",
    "spectral_efficiency_bps_hz", "delta_gap_bps_hz", "status",
)


@dataclass(frozen=True)
class SweepAxis:
    """The parameter being swept and its values, one result point each.

    kind "nmse_db" accepts None as the perfect-CSI point; kind "system_size"
    takes SystemDims values. Values must be distinct.
    """

    kind: str
    values: tuple

    def __post_init__(self):
        if self.kind not in SWEEP_KINDS:
            raise ValueError(f"unknown sweep kind {self.kind!r}; expected one of {SWEEP_KINDS}")
        if not self.values:
            raise ValueError("sweep needs at least one value")
        seen = []
        for val in self.values:
            if val in seen:
                raise ValueError(f"duplicate sweep value {val!r}")
            seen.append(val)
            if self.kind == "ptx_dbm" and not isinstance(val, (int, float)):
                raise ValueError("ptx_dbm values must be numbers")
            if self.kind == "n_path" and not isinstance(val, int):
                raise ValueError("n_path values must be integers")
            if self.kind == "nmse_db" and not (val is None or isinstance(val, (int, float))):
                raise ValueError("nmse_db values must be numbers or None")
            if self.kind == "system_size" and not isinstance(val, SystemDims):
                raise ValueError("system_size values must be SystemDims")


@dataclass(frozen=True)
class ExperimentConfig:
    """Complete description of one sweep experiment."""

    dims: SystemDims
    scenario: ScenarioConfig
    methods: tuple[Method, ...]
    sweep: SweepAxis
    trials: int
    master_seed: int
    noise_dbm: float = -91.0
    ptx_dbm: float = 40.0

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not self.methods:
            raise ValueError("at least one method is required")
        if len(set(self.methods)) != len(self.methods):
            raise ValueError("duplicate methods")
        # Canonical declaration order keeps row order stable across runs.
        ordered = tuple(m for m in Method if m in self.methods)
        object.__setattr__(self, "methods", ordered)


@dataclass(frozen=True)
class PointSettings:
    """Trial parameters after applying one sweep value to the base config."""

    dims: SystemDims
    scenario: ScenarioConfig
    p_tx_dbm: float
    nmse_db: float | None


def resolve_point(config: ExperimentConfig, sweep_index: int) -> PointSettings:
    """Merge sweep value sweep_index into the base configuration."""
    value = config.sweep.values[sweep_index]
    dims, scenario = config.dims, config.scenario
    p_tx_dbm, nmse_db = config.ptx_dbm, None
    kind = config.sweep.kind
    if kind == "ptx_dbm":
        p_tx_dbm = float(value)
    elif kind == "n_path":
        scenario = replace(scenario, n_path=int(value))
    elif kind == "nmse_db":
        nmse_db = None if value is None else float(value)
    elif kind == "system_size":
        dims = value
    return PointSettings(dims=dims, scenario=scenario, p_tx_dbm=p_tx_dbm, nmse_db=nmse_db)


@dataclass(frozen=True)
class TrialRecord:
    """One method's outcome in one trial at one sweep point. Mirrors the CSV
    schema; None fields serialize as empty cells."""

    trial_id: int
    seed: int
    method: str
    p_tx_dbm: float
    n_r: int
    n_t: int
    m: int
    n_r_rf: int
    n_t_rf: int
    n_s: int
    n_path: int
    nmse_db: float | None
    spectral_efficiency_bps_hz: float | None
    delta_gap_bps_hz: float | None
    status: str


def dbm_to_watts(x_dbm: float) -> float:
    return 10.0 ** ((x_dbm - 30.0) / 10.0)


def trial_seed_sequence(master_seed: int, trial_index: int) -> np.random.SeedSequence:
    """Root of trial trial_index's random streams. Depends on the master
    seed and trial index only, never on the sweep point, so every sweep point
    replays identical draws (common random numbers)."""
    return np.random.SeedSequence(master_seed, spawn_key=(trial_index,))


def run_trial(config: ExperimentConfig, sweep_index: int, trial_index: int) -> list[TrialRecord]:
    """Evaluate every configured method on one shared channel realization.

    The trial's root stream spawns three substreams in fixed order (channel,
    method-internal randomness, CSI perturbation), so adding or removing
    methods never disturbs the channel draw. Imperfect CSI, when swept,
    degrades only the two proposed designs: they are built from the corrupted
    cascade and direct link but always evaluated on the true channel. A
    method failure is recorded in its row's status and never aborts the
    trial.
    """
    point = resolve_point(config, sweep_index)
    dims, scenario = point.dims, point.scenario
    root = trial_seed_sequence(config.master_seed, trial_index)
    seed = int(root.generate_state(1, dtype=np.uint64)[0])
    channel_rng, method_rng, perturb_rng = (
        np.random.default_rng(s) for s in root.spawn(3))

    p_tx = dbm_to_watts(point.p_tx_dbm)
    noise_var = dbm_to_watts(config.noise_dbm)

    geoms = ArrayGeometries.from_dims(dims)
    triple = sample_channel_triple(dims, geoms, scenario, channel_rng)
    eff_true = build_effective(triple)
    h_tr_true = triple.h_tr.matrix

    if point.nmse_db is None:
        eff_des, h_tr_des = eff_true, h_tr_true
    else:
        eff_des = perturb_to_nmse(eff_true, point.nmse_db, perturb_rng)
        h_tr_des = perturb_matrix_to_nmse(h_tr_true, point.nmse_db, perturb_rng)

    grams: dict[int, np.ndarray] = {}

    def gram_of(eff):
        key = id(eff)
        if key not in grams:
            grams[key] = gram_sum(eff)
        return grams[key]

    outcomes: dict[Method, tuple[float | None, str]] = {}
    v_hat = None
    for method in config.methods:
        try:
            if method in (Method.PROPOSED_HYBRID, Method.PROPOSED_FULLY_DIGITAL):
                if v_hat is None:
                    v_hat = project_reflection(relaxed_reflection(gram_of(eff_des)))
                h_design = total_channel(h_tr_des, eff_des, v_hat)
                h_actual = total_channel(h_tr_true, eff_true, v_hat)
                if method is Method.PROPOSED_HYBRID:
                    bf = project_hybrid(
                        relaxed_beamformers(h_design, dims, p_tx, noise_var), p_tx)
                else:
                    bf = fully_digital(h_design, p_tx, noise_var, dims.n_s)
                se = spectral_efficiency(EvaluationInput(h_actual, bf, noise_var))
            elif method is Method.SOTA_ASYMPTOTIC:
                v_lim = asymptotic_reflection(triple)
                h_lim = total_channel(h_tr_true, eff_true, v_lim)
                bf = project_hybrid(
                    relaxed_beamformers(h_lim, dims, p_tx, noise_var), p_tx)
                se = spectral_efficiency(EvaluationInput(h_lim, bf, noise_var))
            elif method is Method.RANDOM_REFLECTION_FULLY_DIGITAL:
                v_rand = random_reflection(dims.m, method_rng)
                h_rand = total_channel(h_tr_true, eff_true, v_rand)
                bf = fully_digital(h_rand, p_tx, noise_var, dims.n_s)
                se = spectral_efficiency(EvaluationInput(h_rand, bf, noise_var))
            elif method is Method.UPPER_BOUND:
                v_star = relaxed_reflection(gram_of(eff_true))
                se = r_max(total_channel(h_tr_true, eff_true, v_star),
                           p_tx, noise_var, dims.n_s)
            else:
                raise ValueError(f"unhandled method {method}")
            outcomes[method] = (se, "ok")
        except (ValueError, np.linalg.LinAlgError) as exc:
            outcomes[method] = (None, f"failed:{type(exc).__name__}")

    upper_se = outcomes.get(Method.UPPER_BOUND, (None, ""))[0]
    records = []
    for method in config.methods:
        se, status = outcomes[method]
        if se is None or upper_se is None:
            delta = None
        elif method is Method.UPPER_BOUND:
            delta = 0.0
        else:
            delta = upper_se - se
        records.append(TrialRecord(
            trial_id=trial_index, seed=seed, method=method.value,
            p_tx_dbm=point.p_tx_dbm, n_r=dims.n_r, n_t=dims.n_t, m=dims.m,
            n_r_rf=dims.n_r_rf, n_t_rf=dims.n_t_rf, n_s=dims.n_s,
            n_path=scenario.n_path, nmse_db=point.nmse_db,
            spectral_efficiency_bps_hz=se, delta_gap_bps_hz=delta,
            status=status))
    return records


def _run_trial_task(args) -> list[TrialRecord]:
    return run_trial(*args)


@dataclass(frozen=True)
class SweepResult:
    csv_path: Path
    json_path: Path
    records: tuple[TrialRecord, ...]
    summary: dict


def run_sweep(config: ExperimentConfig, out_dir, threads: int = 1) -> SweepResult:
    """Run trials x sweep points, then write results.csv and summary.json.

    With threads > 1 trials run in worker processes; rows are assembled in
    task order either way, so the output files are identical for any thread
    count.
    """
    if threads < 1:
        raise ValueError("threads must be at least 1")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    n_points = len(config.sweep.values)
    tasks = [(config, si, ti)
             for si in range(n_points) for ti in range(config.trials)]
    if threads == 1:
        batches = [run_trial(*t) for t in tasks]
    else:
        chunk = max(1, len(tasks) // (4 * threads))
        with ProcessPoolExecutor(max_workers=threads) as pool:
            batches = list(pool.map(_run_trial_task, tasks, chunksize=chunk))

    per_point: list[list[TrialRecord]] = [[] for _ in range(n_points)]
    for (_, si, _), recs in zip(tasks, batches):
        per_point[si].extend(recs)
    records = tuple(r for point in per_point for r in point)

    csv_path = out / "results.csv"
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for rec in records:
            writer.writerow([_cell(getattr(rec, col)) for col in CSV_COLUMNS])

    summary = summarize(config, per_point)
    json_path = out / "summary.json"
    with open(json_path, "w") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")
    return SweepResult(csv_path=csv_path, json_path=json_path,
                       records=records, summary=summary)


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        # repr round-trips doubles exactly, so downstream consumers can
        # reproduce aggregate statistics bit-for-bit.
        return repr(value)
    return str(value)


def _sweep_value_jsonable(value):
    if isinstance(value, SystemDims):
        return asdict(value)
    return value


def summarize(config: ExperimentConfig, per_point: list[list[TrialRecord]]) -> dict:
    """Aggregate per (method, sweep point): mean and standard error of the
    spectral efficiency over trials with status ok."""
    entries = []
    for si, recs in enumerate(per_point):
        value = config.sweep.values[si]
        for method in config.methods:
            ses = np.array([
                r.spectral_efficiency_bps_hz for r in recs
                if r.method == method.value and r.status == "ok"
                and r.spectral_efficiency_bps_hz is not None])
            n = len(ses)
            mean = float(np.mean(ses)) if n else None
            if n > 1:
                stderr = float(np.std(ses, ddof=1) / math.sqrt(n))
            else:
                stderr = 0.0 if n == 1 else None
            entries.append({
                "method": method.value,
                "sweep_index": si,
                "sweep_value": _sweep_value_jsonable(value),
                "mean": mean,
                "stderr": stderr,
                "trials": n,
            })
    return {
        "version": version_string(),
        "sweep_axis": config.sweep.kind,
        "config": config_to_dict(config),
        "summary": entries,
    }


def config_to_dict(config: ExperimentConfig) -> dict:
    scen = config.scenario
    return {
        "dims": asdict(config.dims),
        "scenario": {
            "n_path": scen.n_path,
            "d_ti_range_m": list(scen.d_ti_range_m),
            "d_ir_range_m": list(scen.d_ir_range_m),
            "d_tr_slack_m": scen.d_tr_slack_m,
            "penetration_tr_db": scen.penetration_tr_db,
        },
        "methods": [m.value for m in config.methods],
        "sweep": {
            "kind": config.sweep.kind,
            "values": [_sweep_value_jsonable(v) for v in config.sweep.values],
        },
        "trials": config.trials,
        "master_seed": config.master_seed,
        "noise_dbm": config.noise_dbm,
        "ptx_dbm": config.ptx_dbm,
    }


def version_string() -> str:
    """Best-effort build identifier: git describe when running from a
    checkout, else the installed distribution version."""
    here = Path(__file__).resolve().parent
    try:
        proc = subprocess.run(
            ["git", "describe", "--tags", "--always", "--dirty"],
            cwd=here, capture_output=True, text=True, timeout=10)
        if proc.returncode == 0 and proc.stdout.strip():
            return proc.stdout.strip()
    except (OSError, subprocess.SubprocessError):
        pass
    try:
        from importlib.metadata import version
        return "v" + version("artifact")
    except Exception:
        return "unversioned"


def _require_keys(obj: dict, required: set[str], optional: set[str], where: str):
    unknown = set(obj) - required - optional
    if unknown:
        raise ValueError(f"unknown key(s) in {where}: {sorted(unknown)}")
    missing = required - set(obj)
    if missing:
        raise ValueError(f"missing key(s) in {where}: {sorted(missing)}")


def _parse_dims(obj) -> SystemDims:
    if not isinstance(obj, dict):
        raise ValueError("dims must be an object")
    keys = {"n_t", "n_r", "m", "n_t_rf", "n_r_rf", "n_s"}
    _require_keys(obj, keys, set(), "dims")
    vals = {}
    for k in keys:
        if not isinstance(obj[k], int) or isinstance(obj[k], bool):
            raise ValueError(f"dims.{k} must be an integer")
        vals[k] = obj[k]
    return SystemDims(**vals)


def _parse_pair(obj, where: str) -> tuple[float, float]:
    if (not isinstance(obj, (list, tuple)) or len(obj) != 2
            or not all(isinstance(x, (int, float)) for x in obj)):
        raise ValueError(f"{where} must be a [low, high] pair")
    return (float(obj[0]), float(obj[1]))


def _parse_scenario(obj) -> ScenarioConfig:
    if not isinstance(obj, dict):
        raise ValueError("scenario must be an object")
    optional = {"n_path", "d_ti_range_m", "d_ir_range_m", "d_tr_slack_m",
                "penetration_tr_db"}
    _require_keys(obj, set(), optional, "scenario")
    kwargs = {}
    if "n_path" in obj:
        if not isinstance(obj["n_path"], int) or isinstance(obj["n_path"], bool):
            raise ValueError("scenario.n_path must be an integer")
        kwargs["n_path"] = obj["n_path"]
    for key in ("d_ti_range_m", "d_ir_range_m"):
        if key in obj:
            kwargs[key] = _parse_pair(obj[key], f"scenario.{key}")
    for key in ("d_tr_slack_m", "penetration_tr_db"):
        if key in obj:
            if not isinstance(obj[key], (int, float)):
                raise ValueError(f"scenario.{key} must be a number")
            kwargs[key] = float(obj[key])
    return ScenarioConfig(**kwargs)


def parse_methods(names) -> tuple[Method, ...]:
    if isinstance(names, str):
        names = [n.strip() for n in names.split(",") if n.strip()]
    if not isinstance(names, (list, tuple)) or not names:
        raise ValueError("methods must be a nonempty list of names")
    known = {m.value: m for m in Method}
    out = []
    for name in names:
        if name not in known:
            raise ValueError(
                f"unknown method {name!r}; expected one of {sorted(known)}")
        out.append(known[name])
    return tuple(out)


def _parse_sweep(obj) -> SweepAxis:
    if not isinstance(obj, dict):
        raise ValueError("sweep must be an object")
    _require_keys(obj, {"kind", "values"}, set(), "sweep")
    kind = obj["kind"]
    raw = obj["values"]
    if not isinstance(raw, list) or not raw:
        raise ValueError("sweep.values must be a nonempty list")
    if kind == "system_size":
        values = tuple(_parse_dims(v) for v in raw)
    elif kind == "nmse_db":
        values = tuple(None if v is None else float(v) for v in raw
                       if v is None or isinstance(v, (int, float)))
        if len(values) != len(raw):
            raise ValueError("nmse_db sweep values must be numbers or null")
    elif kind == "n_path":
        if not all(isinstance(v, int) and not isinstance(v, bool) for v in raw):
            raise ValueError("n_path sweep values must be integers")
        values = tuple(raw)
    elif kind == "ptx_dbm":
        if not all(isinstance(v, (int, float)) for v in raw):
            raise ValueError("ptx_dbm sweep values must be numbers")
        values = tuple(float(v) for v in raw)
    else:
        raise ValueError(f"unknown sweep kind {kind!r}; expected one of {SWEEP_KINDS}")
    return SweepAxis(kind=kind, values=values)


def load_config(path) -> ExperimentConfig:
    """Parse a JSON experiment description. Unknown keys anywhere are errors
    so config typos fail loudly instead of silently running defaults."""
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise ValueError("config root must be an object")
    required = {"dims", "methods", "sweep", "trials", "master_seed"}
    optional = {"scenario", "noise_dbm", "ptx_dbm"}
    _require_keys(obj, required, optional, "config")

    if not isinstance(obj["trials"], int) or isinstance(obj["trials"], bool):
        raise ValueError("trials must be an integer")
    if not isinstance(obj["master_seed"], int) or isinstance(obj["master_seed"], bool):
        raise ValueError("master_seed must be an integer")
    kwargs = dict(
        dims=_parse_dims(obj["dims"]),
        scenario=_parse_scenario(obj.get("scenario", {})),
        methods=parse_methods(obj["methods"]),
        sweep=_parse_sweep(obj["sweep"]),
        trials=obj["trials"],
        master_seed=obj["master_seed"],
    )
    for key in ("noise_dbm", "ptx_dbm"):
        if key in obj:
            if not isinstance(obj[key], (int, float)):
                raise ValueError(f"{key} must be a number")
            kwargs[key] = float(obj[key])
    return ExperimentConfig(**kwargs)
