"""Time-stamped run records shared by the strong and finite-volume solvers."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import Domain, GridFn, ScalarSeries

SERIES_NAMES = ("mass", "l1", "l2", "linf", "m1", "m2", "xi1", "xi2")


@dataclass
class Trajectory:
    """Snapshots (subsampled at a stride) plus per-step scalar series.

    ``stop_reason`` is one of ``"completed"``, ``"slope_threshold"``,
    ``"overflow"``; ``t_stop`` is the last valid time.
    """

    domain: Domain
    n: int
    times: np.ndarray
    series: dict
    snap_times: np.ndarray
    snapshots: list
    stop_reason: str = "completed"
    t_stop: float = 0.0
    meta: dict = field(default_factory=dict)

    def snapshot(self, i: int) -> GridFn:
        return GridFn(self.domain, self.snapshots[i])

    def last(self) -> GridFn:
        return GridFn(self.domain, self.snapshots[-1])

    def scalar_series(self, name: str) -> ScalarSeries:
        return ScalarSeries(self.times, self.series[name])

    @property
    def h(self) -> float:
        return self.domain.length / self.n


class _Recorder:
    """Accumulates the per-step series and strided snapshots during a run."""

    def __init__(self, domain: Domain, n: int, stride: int, meta: dict):
        self.domain = domain
        self.n = n
        self.h = domain.length / n
        self.stride = max(int(stride), 1)
        self.meta = dict(meta)
        self.times = []
        self.cols = {name: [] for name in SERIES_NAMES}
        self.snap_times = []
        self.snapshots = []
        self._step = 0

    def record(self, t: float, values: np.ndarray, slope_fn) -> None:
        h = self.h
        self.times.append(t)
        self.cols["mass"].append(h * values.sum())
        self.cols["l1"].append(h * np.abs(values).sum())
        self.cols["l2"].append(np.sqrt(h * (values * values).sum()))
        self.cols["linf"].append(np.abs(values).max())
        m1, xi1, m2, xi2 = slope_fn(values)
        self.cols["m1"].append(m1)
        self.cols["m2"].append(m2)
        self.cols["xi1"].append(xi1)
        self.cols["xi2"].append(xi2)
        if self._step % self.stride == 0:
            self.snap_times.append(t)
            self.snapshots.append(values.copy())
        self._step += 1

    def force_snapshot(self, t: float, values: np.ndarray) -> None:
        if self.snap_times and self.snap_times[-1] == t:
            return
        self.snap_times.append(t)
        self.snapshots.append(values.copy())

    def build(self, stop_reason: str, t_stop: float) -> Trajectory:
        series = {k: np.asarray(v) for k, v in self.cols.items()}
        return Trajectory(
            domain=self.domain,
            n=self.n,
            times=np.asarray(self.times),
            series=series,
            snap_times=np.asarray(self.snap_times),
            snapshots=self.snapshots,
            stop_reason=stop_reason,
            t_stop=t_stop,
            meta=self.meta,
        )


def synthetic_trajectory(domain: Domain, n: int, times, field_fn,
                         meta: dict | None = None) -> Trajectory:
    """Trajectory built from an analytic field (x, t) -> values.

    Snapshots are recorded at every listed time; used for closed-form
    references (transported profiles, stationary jumps) in tests and checks.
    """
    from .diagnostics import slope_extrema_values

    h = domain.length / n
    x = domain.cell_centers(n)
    rec = _Recorder(domain, n, 1, meta or {"solver": "synthetic"})
    times = np.asarray(times, dtype=np.float64)
    for t in times:
        rec.record(float(t), np.asarray(field_fn(x, float(t)), dtype=np.float64),
                   lambda v: slope_extrema_values(v, h, domain.periodic,
                                                  domain.a))
    return rec.build("completed", float(times[-1]))


def write_series_csv(traj: Trajectory, path) -> None:
    """Series CSV with header t,mass,l2,linf,m1,m2,xi1,xi2."""
    names = ("mass", "l2", "linf", "m1", "m2", "xi1", "xi2")
    with open(path, "w") as fh:
        fh.write("t," + ",".join(names) + "\n")
        for i, t in enumerate(traj.times):
            row = ",".join(f"{traj.series[k][i]:.17g}" for k in names)
            fh.write(f"{t:.17g},{row}\n")
