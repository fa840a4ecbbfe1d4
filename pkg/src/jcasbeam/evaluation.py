"""Beampattern metrics and the multi-configuration experiment sweep.

The sweep runs the full design over a grid of (SNR, rho, sensing subcarrier
count) settings with paired channel realizations: realization r always uses
seed base_seed + r, so every configuration sees the same channels and the
comparisons are matched. Covariance solves are shared through a cache keyed
by (design power, subcarrier), since nothing else enters that problem.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
import multiprocessing

import numpy as np

from .beamgrid import BeamGrid, build_grid
from .channel import generate_rayleigh
from .config import SystemConfig
from .covariance import beampattern_values as beampattern_gain
from .covariance import solve_pattern_covariance
from .pipeline import DesignResult, eigen_stage, run_design, select_jcas_subcarriers


def precoder_pattern(f: np.ndarray, steering: np.ndarray) -> np.ndarray:
    """Transmit beampattern a^H (F F^H) a of one precoder over the grid."""
    return beampattern_gain(f @ f.conj().T, steering)


def beampattern_mse(precoders: np.ndarray, jcas_subcarriers, grid: BeamGrid) -> float:
    """Mean squared pattern error vs the binary mask over sensing subcarriers.

    Averages |desired - a^H F F^H a|^2 over all grid angles and all
    subcarriers in the sensing set; nan when the set is empty.
    """
    jcas = [int(k) for k in jcas_subcarriers]
    if not jcas:
        return float("nan")
    errs = []
    for k in jcas:
        pat = precoder_pattern(precoders[k], grid.steering[k])
        errs.append(np.abs(grid.desired_gain - pat) ** 2)
    return float(np.mean(errs))


def average_jcas_pattern(result: DesignResult) -> np.ndarray:
    """Beampattern averaged over the sensing subcarriers of one design run."""
    pats = [
        precoder_pattern(result.precoders[int(k)], result.grid.steering[int(k)])
        for k in result.jcas_subcarriers
    ]
    return np.mean(pats, axis=0)


def median_member_pattern(result: DesignResult) -> np.ndarray:
    """Beampattern of the median-index sensing subcarrier (ascending order)."""
    jcas = result.jcas_subcarriers
    k = int(jcas[(len(jcas) - 1) // 2])
    return precoder_pattern(result.precoders[k], result.grid.steering[k])


@dataclass(frozen=True)
class SweepPoint:
    """Averaged metrics for one (SNR, rho, sensing-count) configuration."""

    snr_db: float
    rho: float
    n_jcas: int
    avg_rate: float
    avg_mse: float
    label: str  # "Conv." when every subcarrier senses, else "Prop."


@dataclass(frozen=True)
class SweepResult:
    points: tuple
    pattern_snr: float
    angles: np.ndarray
    pattern_avg: dict     # (rho, n_jcas) -> mean pattern over realizations
    pattern_member: dict  # (rho, n_jcas) -> median-subcarrier pattern, averaged
    n_realizations: int
    base_seed: int


def _power_for_snr(base: SystemConfig, snr_db: float) -> float:
    return base.noise_power * 10.0 ** (snr_db / 10.0)


def _config_for(base: SystemConfig, snr_db: float, rho: float, n_jcas: int, seed: int) -> SystemConfig:
    return replace(
        base,
        power_budget=_power_for_snr(base, snr_db),
        rho=rho,
        n_jcas=n_jcas,
        seed=seed,
    )


def _realization_metrics(payload):
    """Metrics for every configuration on one channel realization.

    Module-level so worker processes can import it. Returns
    ({(snr, rho, J): (avg_rate, mse)}, {(rho, J): (avg_pattern, member_pattern)}).
    """
    base, snrs, rhos, jcas_counts, seed, grid, cov_cache, pattern_snr = payload
    channels = generate_rayleigh(base.n_subcarriers, base.n_rx, base.n_tx, seed)
    point_metrics = {}
    patterns = {}
    for snr in snrs:
        for rho in rhos:
            for n_jcas in jcas_counts:
                cfg = _config_for(base, snr, rho, n_jcas, seed)
                covs = {
                    k: sol
                    for (p, k), sol in cov_cache.items()
                    if p == cfg.effective_power
                }
                result = run_design(cfg, channels=channels, grid=grid, covariances=covs)
                mse = beampattern_mse(result.precoders, result.jcas_subcarriers, grid)
                point_metrics[(snr, rho, n_jcas)] = (result.avg_rate, mse)
                if snr == pattern_snr and n_jcas > 0:
                    patterns[(rho, n_jcas)] = (
                        average_jcas_pattern(result),
                        median_member_pattern(result),
                    )
    return point_metrics, patterns


def sweep(
    base_cfg: SystemConfig,
    snrs,
    rhos,
    jcas_counts,
    n_realizations: int,
    base_seed: int | None = None,
    jobs: int = 1,
) -> SweepResult:
    """Run the design across a configuration grid with paired realizations.

    Beampatterns are recorded at 10 dB SNR when present in ``snrs``, else at
    the last SNR. ``jobs`` > 1 distributes realizations over worker processes;
    the reduction order is fixed either way, so results are reproducible.
    """
    snrs = [float(s) for s in snrs]
    rhos = [float(r) for r in rhos]
    jcas_counts = [int(j) for j in jcas_counts]
    if n_realizations < 1:
        raise ValueError("n_realizations must be at least 1")
    if base_seed is None:
        base_seed = base_cfg.seed
    grid = build_grid(base_cfg)
    pattern_snr = 10.0 if any(abs(s - 10.0) < 1e-9 for s in snrs) else snrs[-1]

    # Pass 1: find which (power, subcarrier) covariance solves any run needs.
    needed = set()
    for r in range(n_realizations):
        seed = base_seed + r
        channels = generate_rayleigh(base_cfg.n_subcarriers, base_cfg.n_rx, base_cfg.n_tx, seed)
        for snr in snrs:
            cfg = _config_for(base_cfg, snr, rhos[0], jcas_counts[0], seed)
            _, rates = eigen_stage(cfg, channels)
            for n_jcas in jcas_counts:
                for k in select_jcas_subcarriers(rates, n_jcas):
                    needed.add((cfg.effective_power, int(k)))

    # Pass 2: solve each needed covariance once.
    cov_cache = {}
    for power, k in sorted(needed):
        cov_cache[(power, k)] = solve_pattern_covariance(
            grid.steering[k], power * grid.desired_gain, power
        )

    # Pass 3: full designs per realization, optionally in parallel.
    payloads = [
        (
            base_cfg,
            tuple(snrs),
            tuple(rhos),
            tuple(jcas_counts),
            base_seed + r,
            grid,
            cov_cache,
            pattern_snr,
        )
        for r in range(n_realizations)
    ]
    if jobs > 1:
        ctx = multiprocessing.get_context("spawn")
        with ProcessPoolExecutor(max_workers=jobs, mp_context=ctx) as pool:
            outputs = list(pool.map(_realization_metrics, payloads))
    else:
        outputs = [_realization_metrics(p) for p in payloads]

    rate_sum = {}
    mse_sum = {}
    pat_avg = {}
    pat_member = {}
    for point_metrics, patterns in outputs:  # realization order is fixed
        for key, (rate, mse) in point_metrics.items():
            rate_sum[key] = rate_sum.get(key, 0.0) + rate
            mse_sum[key] = mse_sum.get(key, 0.0) + mse
        for key, (avg, member) in patterns.items():
            if key not in pat_avg:
                pat_avg[key] = np.zeros_like(avg)
                pat_member[key] = np.zeros_like(member)
            pat_avg[key] += avg
            pat_member[key] += member

    points = []
    for snr in snrs:
        for rho in rhos:
            for n_jcas in jcas_counts:
                key = (snr, rho, n_jcas)
                label = "Conv." if n_jcas == base_cfg.n_subcarriers else "Prop."
                points.append(
                    SweepPoint(
                        snr_db=snr,
                        rho=rho,
                        n_jcas=n_jcas,
                        avg_rate=rate_sum[key] / n_realizations,
                        avg_mse=mse_sum[key] / n_realizations,
                        label=label,
                    )
                )

    return SweepResult(
        points=tuple(points),
        pattern_snr=pattern_snr,
        angles=grid.angles,
        pattern_avg={k: v / n_realizations for k, v in pat_avg.items()},
        pattern_member={k: v / n_realizations for k, v in pat_member.items()},
        n_realizations=n_realizations,
        base_seed=base_seed,
    )
