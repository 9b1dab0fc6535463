"""
Two-qubit gate scaling experiment.

For every backend and evaluation-qubit count n the QAE circuit is built,
routed when the backend has a constrained topology, lowered to the native
set and its entanglers counted. Constrained backends repeat this ``trials``
times with independently derived seeds; all-to-all backends are
deterministic and are computed once.
"""

import csv
import io
import logging
import math
import zlib
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import matplotlib
import numpy as np
from matplotlib.figure import Figure
from pydantic import BaseModel, ConfigDict, Field, model_validator

from . import __version__
from .circuit import count_two_qubit_gates
from .config import get_settings
from .errors import DomainError, FitError, UnknownDeviceError
from .qae import QaeProblem, build_qae
from .router import route, routed_two_qubit_count
from .topology import CouplingMap, builtin_coupling_map
from .transpiler import IONTRAP, SUPERCONDUCTING, NativeGateSet, transpile

logger = logging.getLogger(__name__)

CSV_COLUMNS = ["backend", "n", "trials", "mean", "std", "sem", "min", "max"]


class BackendSpec(BaseModel):
    """Native gate set plus coupling; ``coupling=None`` means all-to-all."""

    model_config = ConfigDict(frozen=True)

    name: str
    native: NativeGateSet
    coupling: Optional[CouplingMap] = None

    @model_validator(mode="after")
    def check_pairing(self) -> "BackendSpec":
        if self.native.two_qubit_kind is IONTRAP.two_qubit_kind and self.coupling is not None:
            raise ValueError("ion-trap backends are all-to-all")
        return self

    @property
    def is_deterministic(self) -> bool:
        return self.coupling is None

    def fits(self, n: int) -> bool:
        return self.coupling is None or n + 1 <= self.coupling.qubit_count


BACKEND_NAMES = ("iontrap", "ideal", "tokyo", "cairo", "yorktown")
DEFAULT_BACKENDS = ("iontrap", "ideal", "tokyo", "cairo")


def get_backend(name: str) -> BackendSpec:
    """Build a registered backend by name."""
    if name == "iontrap":
        return BackendSpec(name=name, native=IONTRAP)
    if name == "ideal":
        return BackendSpec(name=name, native=SUPERCONDUCTING)
    if name in ("tokyo", "cairo", "yorktown"):
        return BackendSpec(name=name, native=SUPERCONDUCTING, coupling=builtin_coupling_map(name))
    raise UnknownDeviceError(f"unknown backend {name!r}; expected one of {list(BACKEND_NAMES)}")


class ScalingRecord(BaseModel):
    """Statistics of the two-qubit count for one (backend, n) cell."""

    model_config = ConfigDict(frozen=True)

    backend: str
    n: int = Field(ge=1)
    trials: int = Field(ge=1)
    counts: Tuple[int, ...] = ()
    mean: float
    std: float = Field(ge=0.0)
    sem: float = Field(ge=0.0)
    minimum: float
    maximum: float

    @model_validator(mode="after")
    def check_counts(self) -> "ScalingRecord":
        if self.counts and len(self.counts) != self.trials:
            raise ValueError(f"{len(self.counts)} counts recorded for {self.trials} trials")
        if self.minimum > self.maximum:
            raise ValueError("minimum exceeds maximum")
        return self

    @classmethod
    def from_counts(cls, backend: str, n: int, counts: Sequence[int]) -> "ScalingRecord":
        values = np.asarray(counts, dtype=float)
        std = float(np.std(values, ddof=1)) if len(values) > 1 else 0.0
        return cls(
            backend=backend,
            n=n,
            trials=len(values),
            counts=tuple(int(c) for c in counts),
            mean=float(np.mean(values)),
            std=std,
            sem=std / math.sqrt(len(values)),
            minimum=float(values.min()),
            maximum=float(values.max()),
        )


class SkippedCell(BaseModel):
    model_config = ConfigDict(frozen=True)

    backend: str
    n: int
    reason: str


class ScalingRun(BaseModel):
    """Records of a run, the cells it could not run, and its parameters."""

    model_config = ConfigDict(frozen=True)

    records: Tuple[ScalingRecord, ...]
    skipped: Tuple[SkippedCell, ...] = ()
    seed: int
    trials: int
    p: float

    def series(self, backend: str) -> List[ScalingRecord]:
        return sorted((r for r in self.records if r.backend == backend), key=lambda r: r.n)

    def metadata(self) -> Dict[str, object]:
        return {"tool": f"tbill-qae {__version__}", "seed": self.seed, "trials": self.trials, "p": self.p}


class QuadraticFit(BaseModel):
    """y = a2 * n**2 + a1 * n + a0 with its coefficient of determination."""

    model_config = ConfigDict(frozen=True)

    a2: float
    a1: float
    a0: float
    r_squared: float
    points: int = 0

    def __call__(self, n):
        n = np.asarray(n, dtype=float)
        return self.a2 * n**2 + self.a1 * n + self.a0

    def describe(self) -> str:
        return f"{self.a2:.4f} n^2 {self.a1:+.4f} n {self.a0:+.4f} (R^2 = {self.r_squared:.6f})"


def derive_seed(seed: int, backend: str, n: int, trial: int) -> int:
    """Seed of one routing trial, independent of execution order."""
    sequence = np.random.SeedSequence([seed, zlib.crc32(backend.encode("utf-8")), n, trial])
    return int(sequence.generate_state(1)[0])


def cell_counts(backend: BackendSpec, n: int, trials: int, seed: int, p: float) -> List[int]:
    """Two-qubit counts of ``trials`` runs of one cell."""
    circuit = build_qae(QaeProblem(p=p, eval_qubits=n))
    if backend.is_deterministic:
        return [count_two_qubit_gates(transpile(circuit, backend.native))] * trials
    counts = []
    for trial in range(trials):
        routed = route(
            circuit, backend.coupling, seed=derive_seed(seed, backend.name, n, trial), trials=1
        )
        counts.append(routed_two_qubit_count(routed, backend.native))
    return counts


def _run_cell(args: Tuple[BackendSpec, int, int, int, float]) -> ScalingRecord:
    backend, n, trials, seed, p = args
    record = ScalingRecord.from_counts(backend.name, n, cell_counts(backend, n, trials, seed, p))
    logger.debug(f"{backend.name} n={n}: mean {record.mean:.2f}, sem {record.sem:.3f}")
    return record


def run_scaling(
    backends: Iterable[Union[str, BackendSpec]],
    n_min: int = 1,
    n_max: int = 19,
    trials: Optional[int] = None,
    seed: Optional[int] = None,
    p: Optional[float] = None,
    workers: Optional[int] = None,
) -> ScalingRun:
    """
    Run every (backend, n) cell.

    Cells that need more qubits than the device has are logged and listed in
    ``skipped``; the rest of the run continues. Records come back sorted by
    backend order then n regardless of ``workers``.
    """
    settings = get_settings()
    trials = settings.DEFAULT_TRIALS if trials is None else trials
    seed = settings.DEFAULT_SEED if seed is None else seed
    p = settings.DEFAULT_P if p is None else p
    workers = settings.SCALING_WORKERS if workers is None else workers
    if n_min < 1 or n_max < n_min:
        raise DomainError(f"invalid evaluation-qubit range {n_min}..{n_max}")
    if trials < 1:
        raise DomainError("trials must be at least 1")
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"probability {p} outside [0, 1]")

    specs = [get_backend(b) if isinstance(b, str) else b for b in backends]
    cells = []
    skipped: List[SkippedCell] = []
    for spec in specs:
        for n in range(n_min, n_max + 1):
            if spec.fits(n):
                cells.append((spec, n, trials, seed, p))
            else:
                reason = f"needs {n + 1} qubits, {spec.name} has {spec.coupling.qubit_count}"
                logger.warning(f"Skipping {spec.name} n={n}: {reason}")
                skipped.append(SkippedCell(backend=spec.name, n=n, reason=reason))

    logger.info(
        f"Running {len(cells)} scaling cells over {len(specs)} backends "
        f"(trials={trials}, seed={seed}, workers={workers})"
    )
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            records = list(executor.map(_run_cell, cells))
    else:
        records = [_run_cell(cell) for cell in cells]

    order = {spec.name: i for i, spec in enumerate(specs)}
    records.sort(key=lambda r: (order[r.backend], r.n))
    return ScalingRun(records=tuple(records), skipped=tuple(skipped), seed=seed, trials=trials, p=p)


def fit_quadratic(
    points: Sequence[Tuple[float, float]],
    weights: Optional[Sequence[float]] = None,
) -> QuadraticFit:
    """Least-squares quadratic through ``(n, y)`` points."""
    if len({float(x) for x, _ in points}) < 3:
        raise FitError("a quadratic fit needs at least 3 distinct n values")
    x = np.array([float(x) for x, _ in points])
    y = np.array([float(v) for _, v in points])
    w = np.ones_like(x) if weights is None else np.asarray(weights, dtype=float)
    if w.shape != x.shape or np.any(w <= 0) or not np.all(np.isfinite(w)):
        raise FitError("weights must be positive, finite and one per point")

    design = np.column_stack([x**2, x, np.ones_like(x)])
    root = np.sqrt(w)
    coef, _, rank, _ = np.linalg.lstsq(design * root[:, None], y * root, rcond=None)
    if rank < 3:
        raise FitError("quadratic design matrix is rank deficient")

    residual = y - design @ coef
    ss_res = float(np.sum(w * residual**2))
    ss_tot = float(np.sum(w * (y - np.average(y, weights=w)) ** 2))
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return QuadraticFit(
        a2=float(coef[0]), a1=float(coef[1]), a0=float(coef[2]), r_squared=r_squared, points=len(x)
    )


def fit_records(
    records: Iterable[ScalingRecord], weighted: bool = False
) -> Dict[str, QuadraticFit]:
    """
    Fit each backend's per-n means. With ``weighted`` the points are weighted
    by 1/sem**2; a backend with any zero sem is fitted unweighted.
    """
    grouped: Dict[str, List[ScalingRecord]] = {}
    for r in records:
        grouped.setdefault(r.backend, []).append(r)

    fits: Dict[str, QuadraticFit] = {}
    for backend, series in grouped.items():
        series.sort(key=lambda r: r.n)
        points = [(r.n, r.mean) for r in series]
        weights = None
        if weighted:
            if all(r.sem > 0 for r in series):
                weights = [1.0 / r.sem**2 for r in series]
            else:
                logger.info(f"{backend} has zero-variance points; fitting unweighted")
        try:
            fits[backend] = fit_quadratic(points, weights)
        except FitError as exc:
            logger.warning(f"No fit for {backend}: {exc}")
    return fits


def _format_number(value: float) -> str:
    value = float(value)
    return str(int(value)) if value.is_integer() else repr(value)


def emit_csv(records: Iterable[ScalingRecord], meta: Optional[Mapping[str, object]] = None) -> str:
    """CSV with columns ``backend,n,trials,mean,std,sem,min,max``."""
    buffer = io.StringIO()
    if meta:
        buffer.write("# " + " ".join(f"{k}={v}" for k, v in meta.items()) + "\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in records:
        writer.writerow(
            [r.backend, r.n, r.trials]
            + [_format_number(v) for v in (r.mean, r.std, r.sem, r.minimum, r.maximum)]
        )
    return buffer.getvalue()


def parse_csv(text: str) -> List[ScalingRecord]:
    """Read records written by ``emit_csv``; comment lines are skipped."""
    rows = [line for line in text.splitlines() if line.strip() and not line.startswith("#")]
    reader = csv.DictReader(rows)
    missing = set(CSV_COLUMNS) - set(reader.fieldnames or [])
    if missing:
        raise DomainError(f"scaling CSV lacks columns {sorted(missing)}")
    return [
        ScalingRecord(
            backend=row["backend"],
            n=int(row["n"]),
            trials=int(row["trials"]),
            mean=float(row["mean"]),
            std=float(row["std"]),
            sem=float(row["sem"]),
            minimum=float(row["min"]),
            maximum=float(row["max"]),
        )
        for row in reader
    ]


_SERIES_STYLE = {
    "iontrap": ("x", "-"),
    "ideal": ("*", "--"),
    "tokyo": ("^", "-."),
    "cairo": ("o", ":"),
    "yorktown": ("s", (0, (5, 1))),
}


def emit_plot(
    records: Iterable[ScalingRecord],
    fits: Optional[Mapping[str, QuadraticFit]] = None,
    meta: Optional[Mapping[str, object]] = None,
) -> str:
    """
    SVG scatter of mean counts with sem error bars and fitted curves, one
    series per backend. Output is byte-stable for identical input.
    """
    fits = fits or {}
    grouped: Dict[str, List[ScalingRecord]] = {}
    for r in records:
        grouped.setdefault(r.backend, []).append(r)

    with matplotlib.rc_context({"svg.fonttype": "none", "svg.hashsalt": "tbill-qae"}):
        fig = Figure(figsize=(7, 5))
        ax = fig.add_subplot()
        for index, (backend, series) in enumerate(grouped.items()):
            series.sort(key=lambda r: r.n)
            marker, linestyle = _SERIES_STYLE.get(backend, ("d", "-"))
            color = f"C{index}"
            ns = [r.n for r in series]
            container = ax.errorbar(
                ns,
                [r.mean for r in series],
                yerr=[r.sem for r in series],
                fmt=marker,
                color=color,
                capsize=3,
                label=backend,
            )
            container.lines[0].set_gid(f"series-{backend}")
            if backend in fits:
                xs = np.linspace(min(ns), max(ns), 200)
                (curve,) = ax.plot(xs, fits[backend](xs), linestyle=linestyle, color=color)
                curve.set_gid(f"fit-{backend}")

        ax.set_xlabel("Evaluation qubits n")
        ax.set_ylabel("Two-qubit gate count")
        if meta:
            ax.set_title(", ".join(f"{k}={v}" for k, v in meta.items()), fontsize=8)
        ax.grid(True, alpha=0.3)
        ax.legend()

        buffer = io.StringIO()
        fig.savefig(buffer, format="svg", metadata={"Date": None})
    return buffer.getvalue()
