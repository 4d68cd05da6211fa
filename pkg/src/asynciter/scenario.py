"""Seeded multi-trial experiments with CSV trajectories and a JSON summary.

Output layout in ``config.output_dir``::

    trial_0.csv, trial_1.csv, ...   iter,err_norm,active_mask,p_0,...,p_{n-1}
    results.json                    config echo, per-trial results, aggregate

State columns are filled every ``record_stride`` iterations and on the
final row, and left empty otherwise.  Everything except the
``generated_at`` key of results.json is a deterministic function of the
config.
"""

from __future__ import annotations

import csv
import json
import logging
import os
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

from . import rng
from .activation import SchedulePolicy, ScheduleKind, ScheduleState, mask_string
from .config import ExperimentConfig
from .dynamics import TrajectoryRecord, compute_fixed_point, perturb_matrix, run_trajectory
from .errors import AsyncIterError, InsufficientData, NotContractive
from .linalg import inf_norm, spectral_radius
from .matrix_gen import generate_system
from .rate import RateMode, fit_empirical_rate, theoretical_rate
from .spectral_analysis import disjoint_windows

log = logging.getLogger(__name__)

TIMESTAMP_KEY = "generated_at"
MAX_FINDINGS_PER_TRIAL = 5

# child-seed indices under each trial seed
_SYSTEM, _SCHEDULE, _PERTURBATION = 0, 1, 2


@dataclass
class ScenarioResult:
    config_echo: dict
    per_trial: list[dict]
    aggregate: dict
    generated_at: str = field(default="", compare=False)

    def to_dict(self) -> dict:
        return {
            TIMESTAMP_KEY: self.generated_at,
            "config": self.config_echo,
            "per_trial": self.per_trial,
            "aggregate": self.aggregate,
        }


def trial_seed(master_seed: int, trial_index: int) -> int:
    return rng.split_seed(master_seed, trial_index)


def _window_summary(F: np.ndarray, traj: TrajectoryRecord, T: int) -> dict:
    reports = disjoint_windows(F, traj.masks, T)
    covered = [r for r in reports if r.coverage_satisfied]
    findings = [r for r in covered if not r.estimate.certified_below_one]
    if findings:
        log.info(
            "%d of %d covered windows not certified (largest rho ~ %.6g)",
            len(findings), len(covered), max(r.estimate.rho for r in findings),
        )
    return {
        "windows_checked": len(reports),
        "windows_certified": sum(r.estimate.certified_below_one for r in reports),
        "violations": len(reports) - len(covered),
        "covered_windows": len(covered),
        "covered_uncertified": len(findings),
        "max_product_rho": max((r.estimate.rho for r in reports), default=None),
        "findings": [r.to_dict() for r in findings[:MAX_FINDINGS_PER_TRIAL]],
    }


def _run_trial(config: ExperimentConfig, index: int) -> tuple[dict, TrajectoryRecord | None]:
    seed = trial_seed(config.master_seed, index)
    out: dict = {"trial": index, "seed": seed, "error": None}
    try:
        spec = generate_system(
            config.n,
            config.target_rho,
            config.zero_diagonal,
            rng.split_seed(seed, _SYSTEM),
            config.sign_convention,
        )
        if config.perturbation_epsilon > 0:
            nominal = spec
            spec = perturb_matrix(nominal, config.perturbation_epsilon, rng.split_seed(seed, _PERTURBATION))
            est = spectral_radius(spec.F)
            out["perturbation"] = {
                "epsilon": config.perturbation_epsilon,
                "rho_nominal": spectral_radius(nominal.F).rho,
                "rho_perturbed": est.rho,
                "certified_below_one": est.certified_below_one,
            }
            if not est.certified_below_one:
                raise NotContractive(f"perturbed matrix not certified (rho ~ {est.rho:.6g})")
            out["perturbation"]["fixed_point_shift"] = inf_norm(
                compute_fixed_point(spec) - compute_fixed_point(nominal)
            )

        policy = SchedulePolicy(
            config.schedule.kind,
            config.n,
            config.schedule.p_update,
            config.T,
            rng.split_seed(seed, _SCHEDULE),
        )
        traj = run_trajectory(
            spec,
            np.zeros(config.n),
            ScheduleState.start(policy),
            config.criterion,
            config.record_stride,
        )
        P_star = traj.fixed_point if traj.fixed_point is not None else compute_fixed_point(spec)

        mode = (
            RateMode.PROBABILISTIC
            if policy.kind in (ScheduleKind.BERNOULLI, ScheduleKind.BOUNDED_DELAY_REPAIR)
            else RateMode.DETERMINISTIC
        )
        rho_F = spectral_radius(spec.F).rho
        report = theoretical_rate(rho_F, policy.gamma, config.T, config.n, mode)
        report.realized_update_frequency = float(traj.masks.mean(axis=0).min())
        try:
            report.with_fit(*fit_empirical_rate(traj.error_norms))
        except InsufficientData as exc:
            out["fit_error"] = str(exc)

        out.update(
            iterations=traj.iterations,
            converged_at=traj.converged_at,
            final_error=float(traj.error_norms[-1]),
            fixed_point_distance=inf_norm(traj.final_state - P_star),
            rate=report.to_dict(),
            window_reports_summary=_window_summary(spec.F, traj, config.T),
        )
        return out, traj
    except AsyncIterError as exc:
        log.info("trial %d failed: %s", index, exc)
        out["error"] = {"type": type(exc).__name__, "message": str(exc)}
        out.update(iterations=0, converged_at=None, final_error=None, fixed_point_distance=None, rate=None,
                   window_reports_summary=None)
        return out, None


def write_trajectory_csv(path: str, traj: TrajectoryRecord) -> None:
    n = traj.masks.shape[1] if traj.masks.size else traj.initial_state.size
    recorded = dict(zip(traj.state_iterations, traj.states))
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["iter", "err_norm", "active_mask"] + [f"p_{i}" for i in range(n)])
        for k in range(1, traj.iterations + 1):
            state = recorded.get(k)
            cells = [repr(float(v)) for v in state] if state is not None else [""] * n
            writer.writerow([k, repr(float(traj.error_norms[k - 1])), mask_string(traj.masks[k - 1])] + cells)


def run_scenario(config: ExperimentConfig, timestamp: str | None = None) -> ScenarioResult:
    """Run every trial, write trial CSVs and results.json, return the result."""
    os.makedirs(config.output_dir, exist_ok=True)
    per_trial = []
    for index in range(config.trials):
        record, traj = _run_trial(config, index)
        if traj is not None:
            write_trajectory_csv(os.path.join(config.output_dir, f"trial_{index}.csv"), traj)
        per_trial.append(record)

    converged = [t["converged_at"] for t in per_trial if t["converged_at"] is not None]
    contractions = [
        t["rate"]["empirical_contraction"]
        for t in per_trial
        if t["rate"] and t["rate"]["empirical_contraction"] is not None
    ]
    aggregate = {
        "convergence_fraction": len(converged) / config.trials,
        "mean_converged_at": float(np.mean(converged)) if converged else None,
        "mean_empirical_contraction": float(np.mean(contractions)) if contractions else None,
        "failed_trials": sum(t["error"] is not None for t in per_trial),
    }
    echo = config.to_dict()
    echo["rng"] = rng.describe()
    result = ScenarioResult(
        config_echo=echo,
        per_trial=per_trial,
        aggregate=aggregate,
        generated_at=timestamp or datetime.now(timezone.utc).isoformat(),
    )
    with open(os.path.join(config.output_dir, "results.json"), "w") as fh:
        json.dump(result.to_dict(), fh, indent=2, sort_keys=True, allow_nan=False)
        fh.write("\n")
    return result
