import math

import numpy as np
import pytest

from src.experiments.entanglement import (check_separability, run_distillation, conditional_squeezed_state,
                                          squeezed_diagonal, DistillationExperiment, SeparabilityCheck)
from src.experiments.identity import run_identity_check, identity_dimension
from src.experiments.molmer import MolmerExperiment, run_molmer, detect_packet
from src.experiments.phase_locking import PhaseLockingExperiment, run_phase_locking, pearson_statistic
from src.experiments.records import MeasurementRecord
from src.experiments.teleportation import TeleportationExperiment, run_teleportation
from src.fock.metrics import log_negativity
from src.fock.states import phase_grid
from src.utils.errors import InvalidArgumentError, TruncationError, CapacityError


def _se(report):
    return report.summary["se_fidelity"]


# records

def test_record_rejects_out_of_order_packets():
    record = MeasurementRecord()
    record.append(2, "plus")
    with pytest.raises(InvalidArgumentError):
        record.append(1, "minus")
    with pytest.raises(InvalidArgumentError):
        record.append(3, "left")
    with pytest.raises(InvalidArgumentError):
        record.append(3, float("nan"))
    record.append(3, 0.25)
    assert record.counts() == {"plus": 1, "minus": 0}
    assert list(record.to_frame().columns) == ["packet", "outcome", "arm"]


def test_report_dict_has_schema_header():
    report = run_identity_check([1.0])
    data = report.to_dict()
    assert data["schema_version"] == "1.0"
    assert data["conventions"]["vacuum_variance"] == "1/2"
    assert data["traces"] == ["identity"]


# identity

def test_identity_check_passes():
    report = run_identity_check([0.5, 1.0, 2.0])
    assert report.passed
    assert report.summary["max_trace_distance"] < 1e-10
    assert report.summary["beam_correlation_distance"] > 0.1
    assert [row["dim"] for row in report.summary["checks"]] == [identity_dimension(m) for m in (0.5, 1.0, 2.0)]


# Molmer interference

def test_detector_means_follow_fringe():
    rng = np.random.default_rng(0)
    counts = np.array([detect_packet(rng, 1.0, 1.0, [0.0]) for _ in range(4000)])
    # in phase: every photon leaves through the plus port
    assert counts[:, 0, 1].sum() == 0
    assert counts[:, 0, 0].mean() == pytest.approx(2.0, abs=0.1)


def test_dark_beams_leave_posterior_uniform():
    report = run_molmer(0.0, 0.0, 5, 20, seed=1)
    assert report.summary["mean_detections"] == 0
    assert report.summary["final_R_mean"] == pytest.approx(0.0, abs=1e-12)
    assert report.warnings
    assert len(report.traces["resultant"]) == 0


def test_molmer_collapse():
    report = run_molmer(1.0, 1.0, 20, 300, seed=2024)
    assert report.summary["median_R_at_checkpoints"]["3"] > 0.5
    assert report.summary["median_R_at_checkpoints"]["10"] > 0.9
    assert report.passed


def test_molmer_known_phase_rates():
    report = MolmerExperiment(1.0, 1.0, 10, 400, seed=5, phase_model="fixed", fixed_delta=math.pi / 3).run()
    for row in report.summary["detector_rates"]:
        assert abs(row["plus_z"]) < 4.5
        assert abs(row["minus_z"]) < 4.5


def test_molmer_is_deterministic():
    first = run_molmer(1.0, 0.5, 6, 30, seed=99).to_dict()
    second = run_molmer(1.0, 0.5, 6, 30, seed=99).to_dict()
    assert first == second


def test_molmer_global_phase_is_irrelevant():
    mixed = MolmerExperiment(1.0, 1.0, 10, 400, seed=11).run().summary
    pinned = MolmerExperiment(1.0, 1.0, 10, 400, seed=12, phase_model="pinned").run().summary
    spread = 3 * math.hypot(mixed["final_R_se"], pinned["final_R_se"])
    assert abs(mixed["final_R_mean"] - pinned["final_R_mean"]) < spread


def test_molmer_rejects_negative_magnitude():
    with pytest.raises(InvalidArgumentError):
        run_molmer(-1.0, 1.0, 5, 10, seed=0)


def test_molmer_posterior_trace_has_grid_columns():
    report = run_molmer(1.0, 1.0, 3, 5, seed=3, grid_points=64)
    assert report.traces["posterior"].shape[1] == 65


# phase locking

def test_pearson_statistic_ignores_empty_arms():
    stat = pearson_statistic(np.array([5, 0]), np.array([10, 0]), np.array([0.5, 0.9]))
    assert stat == pytest.approx(0.0)


def test_phase_lock_persists_and_control_fails():
    report = run_phase_locking(2.0, 20, 100, seed=7, predictive_samples=100)
    assert report.summary["exchangeable_pass_rate"] >= 0.9
    assert report.summary["control_pass_rate"] <= 0.05
    assert report.passed


def test_counting_lock_is_calibrated():
    report = PhaseLockingExperiment(2.0, 12, 100, seed=8, predictive_samples=100, lock="counting").run()
    assert report.summary["exchangeable_pass_rate"] >= 0.9


def test_phase_lock_needs_enough_predictive_samples():
    with pytest.raises(InvalidArgumentError):
        PhaseLockingExperiment(2.0, 8, 10, seed=0, predictive_samples=50)
    PhaseLockingExperiment(2.0, 8, 10, seed=0, predictive_samples=99)


def test_single_packet_flags_insufficient_data():
    report = run_phase_locking(2.0, 1, 5, seed=1)
    assert report.summary["insufficient_data"]
    assert report.verdicts == {"sufficient_data": False}
    assert not report.passed


# separability and distillation

def test_separability_dichotomy():
    report = check_separability(0.4, 14)
    assert report.passed
    assert report.summary["mixture_pt_min_eig"] >= -1e-10
    assert report.summary["pure_pt_min_eig"] < -0.01
    assert report.summary["max_deviation_from_diagonal"] < 1e-12
    assert report.summary["cross_formalism_gap"] < 0.02


def test_vacuum_is_trivially_separable():
    report = check_separability(0.0, 6)
    assert report.passed
    assert "components_entangled" not in report.verdicts


def test_separability_needs_enough_levels():
    with pytest.raises(TruncationError):
        check_separability(1.5, 10)


def test_conditional_state_of_delta_posterior_is_pure_squeezing():
    angles = phase_grid(32)
    weights = np.zeros(32)
    weights[4] = 1.0
    state = conditional_squeezed_state(0.3, 10, angles, weights)
    assert log_negativity(state) == pytest.approx(2 * 0.3 / math.log(2), abs=0.02)
    uniform = conditional_squeezed_state(0.3, 10, angles, np.full(32, 1 / 32))
    assert np.allclose(uniform.entries, squeezed_diagonal(0.3, 10).entries, atol=1e-12)


def test_distillation_without_local_oscillator():
    report = run_distillation(0.3, 2.0, 0, 10, seed=3, trials=3, grid_points=64)
    assert report.summary["unconditioned_log_negativity"] == pytest.approx(0.0, abs=1e-10)
    assert "distillable_entanglement" not in report.verdicts


def test_distillation_recovers_entanglement():
    report = run_distillation(0.3, 2.0, 8, 10, seed=4, trials=20, grid_points=128)
    benchmark = 2 * 0.3 / math.log(2)
    assert report.summary["final_mean_log_negativity"] >= 0.9 * benchmark
    assert report.verdicts["nondecreasing_in_packets"]
    assert report.summary["final_mean_R"] > 0.95
    # the same (r, D) is separable before Alice measures
    assert check_separability(0.3, 10).verdicts["mixture_separable"]


# teleportation

def test_classical_teleportation_limit():
    report = run_teleportation(0.0, 1.0, "shared-reference", 2000, 12, seed=1, grid_points=16)
    assert report.summary["mean_fidelity"] == pytest.approx(0.5, abs=max(0.02, 3 * _se(report)))


def test_squeezed_teleportation_fidelity_and_phase_independence():
    r = math.log(4) / 2
    report = run_teleportation(r, 1.0, "shared-reference", 2000, 16, seed=2, grid_points=16)
    assert report.summary["mean_fidelity"] == pytest.approx(0.8, abs=max(0.02, 3 * _se(report)))
    assert report.summary["anova_p_value"] > 1e-4
    assert report.summary["bob_marginal_distance_quadrature"] < 1e-3
    assert report.summary["bob_marginal_distance_monte_carlo"] < 0.1


def test_phase_offset_degrades_fidelity():
    r = math.log(4) / 2
    report = run_teleportation(r, 1.0, "phase-offset", 500, 16, seed=3, offset=math.pi, grid_points=16)
    assert report.summary["degradation_vs_shared"] > 0.1
    assert report.verdicts["misaligned_reference_degrades"]


def test_independent_reference_degrades_fidelity():
    r = math.log(4) / 2
    report = run_teleportation(r, 1.0, "independent-reference", 500, 16, seed=4, grid_points=16)
    assert report.summary["degradation_vs_shared"] > 0.1


def test_fixed_phase_matches_mixture():
    r = math.log(4) / 2
    mixed = run_teleportation(r, 1.0, "shared-reference", 1000, 16, seed=5, grid_points=16)
    fixed = run_teleportation(r, 1.0, "shared-reference", 1000, 16, seed=6, phase_model="fixed")
    spread = 3 * math.hypot(_se(mixed), _se(fixed))
    assert abs(mixed.summary["mean_fidelity"] - fixed.summary["mean_fidelity"]) < spread


def test_displaced_number_state_input():
    report = run_teleportation(math.log(4) / 2, 0.5, "shared-reference", 300, 16, seed=8, input_photons=1,
                               grid_points=16)
    assert 0.0 < report.summary["mean_fidelity"] < 1.0
    assert "fidelity_matches_closed_form" not in report.verdicts


def test_teleportation_truncation_failure():
    with pytest.raises(TruncationError):
        run_teleportation(0.3, 3.0, "shared-reference", 10, 6, seed=0)


def test_teleportation_rejects_unknown_mode():
    with pytest.raises(InvalidArgumentError):
        TeleportationExperiment(0.3, 1.0, "telepathy", 10, 10, seed=0)


def test_two_mode_experiments_check_capacity():
    with pytest.raises(CapacityError):
        DistillationExperiment(0.3, 2.0, 0, 25, 1, seed=1)
    with pytest.raises(CapacityError):
        SeparabilityCheck(0.3, 21)
    with pytest.raises(CapacityError):
        TeleportationExperiment(0.3, 1.0, "shared-reference", 2, 100, seed=1)
    with pytest.raises(CapacityError):
        conditional_squeezed_state(0.3, 21, phase_grid(8), np.full(8, 1 / 8))
