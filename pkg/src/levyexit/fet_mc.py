"""Monte Carlo estimation of first-exit-time distributions."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .mobility import DEFAULT_CAP, ExitArrays, ModelKind, simulate_exits
from .parallel import BLOCK_SIZE, block_rng, block_sizes, run_blocks
from .stepdist import StepLaw

ABANDON_LIMIT = 1e-3


class BatchValidationError(RuntimeError):
    """Too many trials hit the step cap for the batch to be trusted."""


def dkw_epsilon(trials, delta=0.01):
    """Half-width of the two-sided DKW band at confidence ``1 - delta``."""
    return math.sqrt(math.log(2.0 / delta) / (2.0 * trials))


@dataclass
class EmpiricalFet:
    sorted_times: np.ndarray
    trials: int
    abandoned: int = 0
    records: ExitArrays | None = field(default=None, repr=False)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.sorted_times = np.sort(np.asarray(self.sorted_times, dtype=float))

    @classmethod
    def from_times(cls, times, abandoned=0, **kw):
        times = np.asarray(times, dtype=float)
        return cls(times, times.size + abandoned, abandoned, **kw)

    @property
    def size(self):
        return self.sorted_times.size

    def quantile(self, q):
        """Left-continuous order statistic at rank ``ceil(q * m)`` (clamped)."""
        if not 0.0 <= q <= 1.0:
            raise ValueError(f"q must lie in [0, 1], got {q}")
        m = self.size
        if m == 0:
            raise ValueError("empty batch")
        k = min(max(math.ceil(q * m), 1), m)
        return float(self.sorted_times[k - 1])

    def cdf_at(self, t):
        """Fraction of exit times ``<= t``; vectorised over ``t``."""
        if self.size == 0:
            raise ValueError("empty batch")
        out = np.searchsorted(self.sorted_times, t, side="right") / self.size
        return out[()] if np.ndim(out) == 0 else out

    def mean(self):
        return float(self.sorted_times.mean())

    def stderr(self):
        if self.size < 2:
            return math.inf
        return float(self.sorted_times.std(ddof=1) / math.sqrt(self.size))

    def dkw(self, delta=0.01):
        return dkw_epsilon(self.size, delta)

    def merge(self, other):
        times = np.concatenate([self.sorted_times, other.sorted_times])
        return EmpiricalFet(times, self.trials + other.trials, self.abandoned + other.abandoned)

    def validate(self, limit=ABANDON_LIMIT):
        if self.abandoned > limit * self.trials:
            raise BatchValidationError(
                f"{self.abandoned} of {self.trials} trials abandoned (limit {limit:.1%})")
        return self


def _block(law, r, size, seed, key, disc, axis_radius, cap):
    return simulate_exits(law, r, size, block_rng(seed, *key), disc=disc,
                          axis_radius=axis_radius, cap=cap)


def simulate_batch(law, r, trials, seed, *, stream=(), disc=True, axis_radius=None,
                   cap=DEFAULT_CAP, workers=None, block=BLOCK_SIZE):
    """Run ``trials`` exits in fixed blocks and merge them by trial index."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    stream = tuple(stream)
    tasks = [(law, r, size, seed, stream + (b,), disc, axis_radius, cap)
             for b, size in enumerate(block_sizes(trials, block))]
    parts = run_blocks(_block, tasks, workers)
    return ExitArrays(*(np.concatenate([getattr(p, f) for p in parts])
                        for f in ("step_count", "walk_time", "truncated_last", "axis_steps")))


def run_batch(kind, alpha, n, c_d, trials, seed, *, sigma=1.0, stream=(), cap=DEFAULT_CAP,
              workers=None, validate=True):
    """Exit-time sample for one (model, alpha, n) cell with ``r = c_d * sqrt(n)``.

    Flight and walk batches with equal ``seed`` and ``stream`` replay the same
    step sequences, so they are coupled trial by trial.
    """
    kind = ModelKind.parse(kind)
    law = StepLaw(alpha, n, sigma)
    r = c_d * math.sqrt(n)
    rec = simulate_batch(law, r, trials, seed, stream=stream, cap=cap, workers=workers)
    ok = rec.step_count >= 0
    times = rec.step_count[ok].astype(float) if kind is ModelKind.FLIGHT else rec.walk_time[ok]
    meta = dict(model=kind.value, alpha=alpha, n=n, c_d=c_d, trials=int(trials),
                seed=int(seed), abandoned=int((~ok).sum()))
    fet = EmpiricalFet(times, int(trials), int((~ok).sum()), records=rec, meta=meta)
    return fet.validate() if validate else fet


def run_projected_batch(alpha, n, radius, trials, seed, *, sigma=1.0, stream=(),
                        cap=DEFAULT_CAP, workers=None, validate=True):
    """Flight exit times of the x-projection from ``[-radius, radius]``."""
    law = StepLaw(alpha, n, sigma)
    rec = simulate_batch(law, radius, trials, seed, stream=stream, disc=False,
                         axis_radius=radius, cap=cap, workers=workers)
    ok = rec.axis_steps >= 0
    fet = EmpiricalFet(rec.axis_steps[ok].astype(float), int(trials), int((~ok).sum()),
                       records=rec)
    return fet.validate() if validate else fet


def _fmt(v):
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return ""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return "%.12g" % v


def write_csv(path, header, rows):
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def write_json(path, payload):
    with open(path, "w", newline="\n") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def write_batch(fet, csv_path, json_path=None, extra=None):
    """Per-trial CSV plus JSON sidecar; abandoned trials keep their row, blank."""
    rec = fet.records
    walk = fet.meta.get("model") == ModelKind.WALK.value
    rows = []
    for i in range(len(rec)):
        n_steps = int(rec.step_count[i])
        if n_steps < 0:
            rows.append((i, None, -1, None))
        elif walk:
            rows.append((i, float(rec.walk_time[i]), n_steps, float(rec.truncated_last[i])))
        else:
            rows.append((i, float(n_steps), n_steps, None))
    write_csv(csv_path, ("trial_index", "exit_time", "step_count", "truncated_last"), rows)
    if json_path is not None:
        payload = {k: fet.meta[k] for k in ("model", "alpha", "n", "c_d", "trials", "seed",
                                            "abandoned")}
        if extra:
            payload.update(extra)
        write_json(json_path, payload)
