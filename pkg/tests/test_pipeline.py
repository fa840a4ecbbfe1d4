"""Subcarrier selection, refinement assembly, and full design runs."""

import json
from dataclasses import replace

import numpy as np
import pytest

from jcasbeam.beamgrid import build_grid
from jcasbeam.channel import generate_rayleigh
from jcasbeam.covariance import solve_radar_covariance
from jcasbeam.manifold import tradeoff_objective
from jcasbeam.pipeline import (
    assemble_final_precoders,
    build_run_manifest,
    eigen_stage,
    run_design,
    select_jcas_subcarriers,
)


def test_selection_picks_lowest_rates():
    picked = select_jcas_subcarriers([3.0, 1.0, 2.0], 1)
    np.testing.assert_array_equal(picked, [1])
    picked = select_jcas_subcarriers([3.0, 1.0, 2.0], 2)
    np.testing.assert_array_equal(picked, [1, 2])


def test_selection_tie_breaks_to_lower_index():
    picked = select_jcas_subcarriers([1.0, 1.0, 2.0], 1)
    np.testing.assert_array_equal(picked, [0])


def test_selection_sorted_and_sized():
    rates = np.array([5.0, 1.0, 4.0, 0.5, 3.0])
    picked = select_jcas_subcarriers(rates, 3)
    assert list(picked) == sorted(picked)
    assert len(picked) == 3
    # selected mean rate can never exceed the mean of the rest
    rest = [r for i, r in enumerate(rates) if i not in set(picked)]
    assert np.mean(rates[picked]) <= np.mean(rest)


def test_selection_edge_counts():
    rates = [2.0, 1.0, 3.0]
    np.testing.assert_array_equal(select_jcas_subcarriers(rates, 0), [])
    np.testing.assert_array_equal(select_jcas_subcarriers(rates, 3), [0, 1, 2])


def test_assembly_substitutes_only_selected(small_cfg):
    res = run_design(small_cfg)
    out = assemble_final_precoders(res.eigen_precoders, res.refinements)
    jcas = set(int(k) for k in res.jcas_subcarriers)
    for k in range(small_cfg.n_subcarriers):
        if k in jcas:
            np.testing.assert_array_equal(out[k], res.refinements[k].precoder)
        else:
            np.testing.assert_array_equal(out[k], res.eigen_precoders[k])


def test_eigen_stage_shapes_and_positive_rates(small_cfg):
    channels = generate_rayleigh(
        small_cfg.n_subcarriers, small_cfg.n_rx, small_cfg.n_tx, 0
    )
    precoders, rates = eigen_stage(small_cfg, channels)
    assert precoders.shape == (6, 4, 2)
    assert rates.shape == (6,)
    assert np.all(rates > 0)
    for k in range(6):
        assert np.linalg.norm(precoders[k]) ** 2 == pytest.approx(
            small_cfg.effective_power, abs=1e-9
        )


def test_run_design_power_invariant(small_cfg):
    res = run_design(small_cfg)
    for k in range(small_cfg.n_subcarriers):
        assert np.linalg.norm(res.precoders[k]) ** 2 == pytest.approx(
            small_cfg.effective_power, abs=1e-8
        )


def test_run_design_refinement_only_on_selected(small_cfg):
    res = run_design(small_cfg)
    jcas = set(int(k) for k in res.jcas_subcarriers)
    assert set(res.refinements) == jcas
    assert set(res.covariances) == jcas
    for k in range(small_cfg.n_subcarriers):
        if k not in jcas:
            np.testing.assert_array_equal(res.precoders[k], res.eigen_precoders[k])
            assert res.rates[k] == pytest.approx(res.eigen_rates[k], abs=1e-12)


def test_run_design_refined_rates_never_improve(small_cfg):
    # Moving away from the eigenmode precoder can only cost rate.
    res = run_design(small_cfg)
    for k in res.jcas_subcarriers:
        assert res.rates[k] <= res.eigen_rates[k] + 1e-9


def test_run_design_refinement_improves_objective(small_cfg):
    res = run_design(small_cfg)
    for k in res.jcas_subcarriers:
        k = int(k)
        start = tradeoff_objective(
            res.eigen_precoders[k],
            res.covariances[k].matrix,
            res.eigen_precoders[k],
            small_cfg.rho,
        )
        assert res.refinements[k].objective <= start + 1e-12


def test_run_design_rho_zero_keeps_eigen(small_cfg):
    res = run_design(replace(small_cfg, rho=0.0))
    np.testing.assert_allclose(res.precoders, res.eigen_precoders, atol=1e-6)
    np.testing.assert_allclose(res.rates, res.eigen_rates, atol=1e-6)


def test_run_design_no_sensing(small_cfg):
    res = run_design(replace(small_cfg, n_jcas=0))
    assert len(res.jcas_subcarriers) == 0
    assert res.refinements == {}
    np.testing.assert_array_equal(res.precoders, res.eigen_precoders)


def test_run_design_deterministic(small_cfg):
    a = run_design(small_cfg)
    b = run_design(small_cfg)
    np.testing.assert_array_equal(a.precoders, b.precoders)
    np.testing.assert_array_equal(a.rates, b.rates)
    np.testing.assert_array_equal(a.jcas_subcarriers, b.jcas_subcarriers)


def test_run_design_rejects_mismatched_channels(small_cfg):
    bad = generate_rayleigh(small_cfg.n_subcarriers, 3, small_cfg.n_tx, 0)
    with pytest.raises(ValueError, match="does not match"):
        run_design(small_cfg, channels=bad)


def test_run_design_accepts_precomputed_covariances(small_cfg):
    grid = build_grid(small_cfg)
    ref = run_design(small_cfg, grid=grid)
    covs = solve_radar_covariance(
        grid, small_cfg.effective_power, [int(k) for k in ref.jcas_subcarriers]
    )
    res = run_design(small_cfg, grid=grid, covariances=covs)
    np.testing.assert_allclose(res.precoders, ref.precoders, atol=1e-12)
    extra_key = int(ref.jcas_subcarriers[0])
    assert res.covariances[extra_key].iterations == covs[extra_key].iterations


def test_run_design_reuses_supplied_channels(small_cfg):
    channels = generate_rayleigh(
        small_cfg.n_subcarriers, small_cfg.n_rx, small_cfg.n_tx, 99
    )
    res = run_design(small_cfg, channels=channels)
    assert res.channels is channels


def test_manifest_is_json_ready(small_cfg):
    res = run_design(small_cfg)
    manifest = build_run_manifest(res)
    text = json.dumps(manifest)
    back = json.loads(text)
    assert back["config"]["n_tx"] == small_cfg.n_tx
    assert back["config"]["target_angles"] == list(small_cfg.target_angles)
    assert back["jcas_subcarriers"] == [int(k) for k in res.jcas_subcarriers]
    assert back["avg_rate"] == pytest.approx(res.avg_rate)
    assert len(back["rates"]) == small_cfg.n_subcarriers
    for k in res.jcas_subcarriers:
        entry = back["refinement"][str(int(k))]
        assert entry["objective"] >= 0
        assert entry["stop_reason"]
        assert back["covariance"][str(int(k))]["iterations"] >= 1


def test_avg_rate_properties(small_cfg):
    res = run_design(small_cfg)
    assert res.avg_rate == pytest.approx(float(np.mean(res.rates)))
    assert res.eigen_avg_rate == pytest.approx(float(np.mean(res.eigen_rates)))
    assert res.avg_rate <= res.eigen_avg_rate + 1e-9
