"""Seeded, jittered benchmark trials and their CSV summary."""
from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .geometry import Pose2D
from .planner import ALGORITHMS, PlannerConfig, RearrangementPlan, plan
from .scenario import Scenario, ScenarioError, validate

MAX_REDRAWS = 100
COLUMNS = ("scenario", "algo", "trials", "S", "T_p_mean", "T_p_std", "L_t_mean", "L_t_std",
           "L_p_mean", "L_p_std", "N_pre_mean", "N_obs_mean")


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Independent stream per (seed, trial); the same for any worker layout."""
    return np.random.default_rng(np.random.SeedSequence([seed, trial]))


def jitter_scenario(sc: Scenario, jitter: float, rng: np.random.Generator) -> Scenario | None:
    """Uniformly perturb every start and goal position by up to ``jitter`` per axis.

    Orientations are kept. Draws that break a scenario precondition are redrawn;
    None is returned if no valid draw is found within the redraw budget.
    """
    if jitter < 0:
        raise ValueError("jitter must be non-negative")
    if jitter == 0 or not sc.objects:
        return sc
    for _ in range(MAX_REDRAWS + 1):
        d = rng.uniform(-jitter, jitter, size=(len(sc.objects), 2, 2))
        objs = [replace(o, start=Pose2D(o.start.x + d[i, 0, 0], o.start.y + d[i, 0, 1], o.start.theta),
                        goal=Pose2D(o.goal.x + d[i, 1, 0], o.goal.y + d[i, 1, 1], o.goal.theta))
                for i, o in enumerate(sc.objects)]
        cand = sc.with_objects(objs)
        try:
            validate(cand)
        except ScenarioError:
            continue
        return cand
    return None


@dataclass(frozen=True)
class TrialResult:
    trial: int
    success: bool
    T_p: float = math.nan
    L_t: float = math.nan
    L_p: float = math.nan
    N_pre: int = 0
    N_obs: int = 0
    instance: Scenario | None = None
    plan: RearrangementPlan | None = None


def run_trial(sc: Scenario, algo: str, jitter: float, seed: int, trial: int,
              config: PlannerConfig | None = None, keep: bool = False) -> TrialResult:
    inst = jitter_scenario(sc, jitter, trial_rng(seed, trial))
    if inst is None:
        return TrialResult(trial, False)
    t0 = time.perf_counter()
    p = plan(inst, algo, config=config)
    tp = time.perf_counter() - t0
    if p is None:
        return TrialResult(trial, False, tp, instance=inst if keep else None)
    return TrialResult(trial, True, tp, p.L_t, p.L_p, p.N_pre, p.N_obs,
                       inst if keep else None, p if keep else None)


def _run(args):
    return run_trial(*args)


@dataclass(frozen=True)
class BenchReport:
    scenario: str
    algo: str
    results: tuple[TrialResult, ...]

    @property
    def trials(self) -> int:
        return len(self.results)

    @property
    def successes(self) -> list[TrialResult]:
        return [r for r in self.results if r.success]

    @property
    def S(self) -> float:
        return 100.0 * len(self.successes) / self.trials if self.trials else math.nan

    def mean(self, attr: str) -> float:
        ok = self.successes
        return float(np.mean([getattr(r, attr) for r in ok])) if ok else math.nan

    def std(self, attr: str) -> float:
        ok = self.successes
        return float(np.std([getattr(r, attr) for r in ok])) if ok else math.nan

    def row(self, timing: bool = True) -> dict:
        tp = (self.mean("T_p") * 1000.0, self.std("T_p") * 1000.0) if timing else (None, None)
        return {"scenario": self.scenario, "algo": self.algo, "trials": self.trials, "S": self.S,
                "T_p_mean": tp[0], "T_p_std": tp[1],
                "L_t_mean": self.mean("L_t"), "L_t_std": self.std("L_t"),
                "L_p_mean": self.mean("L_p"), "L_p_std": self.std("L_p"),
                "N_pre_mean": self.mean("N_pre"), "N_obs_mean": self.mean("N_obs")}


def bench(sc: Scenario, algo: str, trials: int, jitter: float, seed: int, *,
          workers: int = 1, config: PlannerConfig | None = None, keep: bool = False) -> BenchReport:
    """Run ``trials`` jittered instances; results do not depend on ``workers``."""
    if algo not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algo!r}")
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if jitter < 0:
        raise ValueError("jitter must be non-negative")
    jobs = [(sc, algo, jitter, seed, i, config, keep) for i in range(trials)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run, jobs))
    else:
        results = [_run(j) for j in jobs]
    return BenchReport(sc.name, algo, tuple(results))


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    if isinstance(v, int):
        return str(v)
    if math.isnan(v):
        return "nan"
    return f"{v:.4f}"


def report_csv(reports, timing: bool = True) -> str:
    """CSV text with one row per report; T_p in milliseconds, lengths in metres, S in percent.

    With ``timing`` off the wall-clock columns are left empty so the text is a
    pure function of (scenario, algorithm, trials, jitter, seed).
    """
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(COLUMNS)
    for r in reports:
        row = r.row(timing)
        out.writerow([_fmt(row[c]) for c in COLUMNS])
    return buf.getvalue()


def write_report(reports, path, timing: bool = True) -> None:
    with open(path, "w", newline="") as f:
        f.write(report_csv(reports, timing))


def plot_report(reports, path) -> None:
    """Bar chart of success rate and mean pushing length per algorithm."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(8, 3))
    names = [f"{r.scenario}\n{r.algo}" for r in reports]
    ax1.bar(names, [r.S for r in reports], color="tab:blue")
    ax1.set_ylabel("success rate (%)")
    ax1.set_ylim(0, 100)
    ax2.bar(names, [r.mean("L_p") for r in reports], yerr=[r.std("L_p") for r in reports],
            color="gold", edgecolor="black")
    ax2.set_ylabel("pushing length L_p (m)")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
