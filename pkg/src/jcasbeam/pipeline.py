"""End-to-end design: eigenmode stage, subcarrier selection, sensing refinement.

The flow per run:

1. Per-subcarrier eigenmode precoders and their achievable rates.
2. Pick the n_jcas subcarriers with the lowest rates for sensing duty.
3. Solve the beampattern covariance problem on those subcarriers.
4. Refine each sensing subcarrier's precoder on the power sphere, trading
   covariance match against distance from the eigenmode precoder.
5. Reassemble: refined precoders on sensing subcarriers, eigenmode elsewhere;
   recompute combiners and final rates everywhere.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .beamgrid import BeamGrid, build_grid
from .channel import ChannelSet, generate_rayleigh
from .config import SystemConfig
from .covariance import CovarianceSolution, solve_radar_covariance
from .errors import SolverError
from .manifold import RcgResult, solve_rcg
from .precoding import achievable_rate, eigenmode_precoder, optimal_combiner


def select_jcas_subcarriers(rates, n_jcas: int) -> np.ndarray:
    """Indices of the ``n_jcas`` lowest-rate subcarriers, ascending by index.

    Ties go to the lower subcarrier index (stable sort).
    """
    rates = np.asarray(rates)
    picked = np.argsort(rates, kind="stable")[:n_jcas]
    return np.sort(picked)


def assemble_final_precoders(eigen_precoders: np.ndarray, refined: dict) -> np.ndarray:
    """Eigenmode precoders with refined ones substituted on sensing subcarriers."""
    out = eigen_precoders.copy()
    for k, result in refined.items():
        out[k] = result.precoder
    return out


def eigen_stage(cfg: SystemConfig, channels: ChannelSet):
    """Eigenmode precoder and achievable rate on every subcarrier.

    Returns (precoders, rates) with shapes (K, n_tx, n_streams) and (K,).
    """
    power = cfg.effective_power
    prefactor = 1.0 / cfg.effective_noise
    n_k = cfg.n_subcarriers
    precoders = np.zeros((n_k, cfg.n_tx, cfg.n_streams), dtype=complex)
    rates = np.zeros(n_k)
    for k in range(n_k):
        h = channels.matrices[k]
        f_hat, _, _ = eigenmode_precoder(h, cfg.n_streams, power, cfg.effective_noise)
        w = optimal_combiner(h, f_hat)
        precoders[k] = f_hat
        rates[k] = achievable_rate(h, f_hat, w, prefactor)
    return precoders, rates


@dataclass(frozen=True)
class DesignResult:
    """Everything a design run produced, stage by stage."""

    config: SystemConfig
    channels: ChannelSet
    grid: BeamGrid
    eigen_precoders: np.ndarray   # (K, n_tx, n_streams)
    eigen_rates: np.ndarray       # (K,)
    jcas_subcarriers: np.ndarray  # (n_jcas,) ascending
    covariances: dict             # subcarrier -> CovarianceSolution
    refinements: dict             # subcarrier -> RcgResult
    precoders: np.ndarray         # (K, n_tx, n_streams) final
    combiners: np.ndarray         # (K, n_rx, n_streams)
    rates: np.ndarray             # (K,) final

    @property
    def avg_rate(self) -> float:
        return float(np.mean(self.rates))

    @property
    def eigen_avg_rate(self) -> float:
        return float(np.mean(self.eigen_rates))


def run_design(
    cfg: SystemConfig,
    channels: ChannelSet | None = None,
    grid: BeamGrid | None = None,
    covariances: dict[int, CovarianceSolution] | None = None,
) -> DesignResult:
    """Run the full design for one channel realization.

    ``channels``, ``grid``, and ``covariances`` may be supplied to reuse work
    across runs (the sweep does); anything missing is computed here. Provided
    covariances must have been solved at ``cfg.effective_power`` on this grid.
    """
    if grid is None:
        grid = build_grid(cfg)
    if channels is None:
        channels = generate_rayleigh(cfg.n_subcarriers, cfg.n_rx, cfg.n_tx, cfg.seed)
    if channels.matrices.shape != (cfg.n_subcarriers, cfg.n_rx, cfg.n_tx):
        raise ValueError(
            f"channel set shape {channels.matrices.shape} does not match the "
            f"configured ({cfg.n_subcarriers}, {cfg.n_rx}, {cfg.n_tx})"
        )

    power = cfg.effective_power
    n_k = cfg.n_subcarriers

    eigen_precoders, eigen_rates = eigen_stage(cfg, channels)
    jcas = select_jcas_subcarriers(eigen_rates, cfg.n_jcas)

    if covariances is None:
        covariances = {}
    missing = [k for k in jcas if k not in covariances]
    if missing:
        covariances = dict(covariances)
        covariances.update(solve_radar_covariance(grid, power, missing))

    refinements = {}
    for k in jcas:
        try:
            refinements[int(k)] = solve_rcg(
                f0=eigen_precoders[k],
                cov=covariances[int(k)].matrix,
                f_comm=eigen_precoders[k],
                rho=cfg.rho,
                power=power,
            )
        except SolverError as exc:
            raise SolverError(
                f"subcarrier {k}: {exc}",
                last_iterate=exc.last_iterate,
                residuals=exc.residuals,
            ) from exc

    precoders = assemble_final_precoders(eigen_precoders, refinements)
    prefactor = 1.0 / cfg.effective_noise
    combiners = np.zeros((n_k, cfg.n_rx, cfg.n_streams), dtype=complex)
    rates = np.zeros(n_k)
    for k in range(n_k):
        h = channels.matrices[k]
        w = optimal_combiner(h, precoders[k])
        combiners[k] = w
        rates[k] = achievable_rate(h, precoders[k], w, prefactor)

    return DesignResult(
        config=cfg,
        channels=channels,
        grid=grid,
        eigen_precoders=eigen_precoders,
        eigen_rates=eigen_rates,
        jcas_subcarriers=jcas,
        covariances={int(k): covariances[int(k)] for k in jcas},
        refinements=refinements,
        precoders=precoders,
        combiners=combiners,
        rates=rates,
    )


def build_run_manifest(result: DesignResult) -> dict:
    """JSON-ready summary of one design run (no arrays beyond per-k scalars)."""
    cfg_dict = asdict(result.config)
    cfg_dict["target_angles"] = list(cfg_dict["target_angles"])
    return {
        "config": cfg_dict,
        "jcas_subcarriers": [int(k) for k in result.jcas_subcarriers],
        "eigen_avg_rate": result.eigen_avg_rate,
        "avg_rate": result.avg_rate,
        "rates": [float(r) for r in result.rates],
        "covariance": {
            str(k): {
                "iterations": sol.iterations,
                "objective": sol.objective,
            }
            for k, sol in result.covariances.items()
        },
        "refinement": {
            str(k): {
                "iterations": res.iterations,
                "objective": res.objective,
                "converged": bool(res.converged),
                "stop_reason": res.stop_reason,
            }
            for k, res in result.refinements.items()
        },
    }
