"""Tests for the domain types, instance validation and instance files."""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from core import read_instance, write_instance
from core.exceptions import (
    ConfigError,
    DimensionMismatchError,
    DuplicateEntryError,
    EntrywiseError,
    IndexOutOfRangeError,
    InstanceError,
    NegativeCountError,
)
from core.instance import GroundTruth, validate_instance
from core.types import (
    AnomalyMask,
    DetectorConfig,
    GenerationSpec,
    ModelParams,
    SparseObservations,
    TheoreticalConstants,
    ThetaDomain,
)


class TestSparseObservations:
    def test_canonical_row_major_order(self, small_obs):
        assert small_obs.entries == [(0, 0, 1), (0, 2, 3), (1, 3, 0), (2, 1, 4), (2, 3, 7)]
        assert small_obs.size == 5
        assert small_obs.shape == (3, 4)

    def test_arrays_are_read_only(self, small_obs):
        with pytest.raises(ValueError):
            small_obs.counts[0] = 9

    def test_zero_filled_and_mask(self, small_obs):
        dense = small_obs.zero_filled()
        assert dense[2, 3] == 7.0
        assert dense[1, 1] == 0.0
        assert small_obs.observed_mask().sum() == 5
        assert small_obs.observed_fraction == pytest.approx(5 / 12)

    def test_from_dense(self):
        counts = np.array([[1, 2], [3, 4]])
        observed = np.array([[True, False], [False, True]])
        obs = SparseObservations.from_dense(counts, observed)
        assert obs.entries == [(0, 0, 1), (1, 1, 4)]

    def test_duplicate_entry(self):
        with pytest.raises(DuplicateEntryError):
            SparseObservations.from_entries(2, 2, [(0, 1, 1), (0, 1, 2)])

    def test_negative_count(self):
        with pytest.raises(NegativeCountError):
            SparseObservations.from_entries(2, 2, [(0, 1, -1)])

    def test_fractional_count(self):
        with pytest.raises(NegativeCountError):
            SparseObservations(n=2, m=2, rows=[0], cols=[0], counts=[1.5])

    def test_index_out_of_range(self):
        with pytest.raises(IndexOutOfRangeError):
            SparseObservations.from_entries(2, 2, [(2, 0, 1)])

    def test_length_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            SparseObservations(n=2, m=2, rows=[0, 1], cols=[0], counts=[1, 1])

    def test_errors_share_a_root(self):
        assert issubclass(DuplicateEntryError, InstanceError)
        assert issubclass(InstanceError, EntrywiseError)
        assert not issubclass(InstanceError, ValueError)

    def test_equality_compares_arrays(self, small_obs):
        again = SparseObservations.from_entries(3, 4, small_obs.entries)
        assert again == small_obs


class TestAnomalyMask:
    def test_set_semantics(self):
        mask = AnomalyMask.from_pairs(3, 3, [(1, 2), (0, 0), (1, 2)])
        assert len(mask) == 2
        assert mask.positions == frozenset({(0, 0), (1, 2)})

    def test_indicator_aligned_with_observations(self, small_obs):
        mask = AnomalyMask.from_pairs(3, 4, [(2, 3), (1, 1)])
        assert small_obs.size == 5
        assert mask.indicator(small_obs).tolist() == [False, False, False, False, True]

    def test_dense_round_trip(self):
        dense = np.zeros((4, 5), dtype=bool)
        dense[1, 3] = dense[3, 0] = True
        assert np.array_equal(AnomalyMask.from_dense(dense).to_dense(), dense)

    def test_shape_mismatch(self, small_obs):
        with pytest.raises(DimensionMismatchError):
            AnomalyMask.empty(4, 4).indicator(small_obs)


class TestConfigModels:
    def test_p_a_bounded_away_from_one(self):
        with pytest.raises(ValidationError):
            ModelParams(p_a=0.99, alpha=(0.1,))

    def test_params_vector(self):
        params = ModelParams.from_vector([0.1, 0.4])
        assert params.p_a == 0.1 and params.alpha == (0.4,)
        assert params.as_vector().tolist() == [0.1, 0.4]

    def test_moments_below_identifiability(self):
        with pytest.raises(ValidationError):
            DetectorConfig(anomaly_model="exp-onset", moments=1)

    def test_default_moments(self):
        assert DetectorConfig().resolved_moments(1) == 4

    def test_fixed_band_needs_delta(self):
        with pytest.raises(ValidationError):
            DetectorConfig(band_mode="fixed")
        assert DetectorConfig(band_mode="fixed", fixed_delta=0.1).fixed_delta == 0.1

    def test_unknown_model(self):
        with pytest.raises(ConfigError):
            DetectorConfig(anomaly_model="nope")

    def test_gamma_range(self):
        with pytest.raises(ValidationError):
            DetectorConfig(gamma=0.0)
        with pytest.raises(ValidationError):
            DetectorConfig(gamma=1.5)

    def test_theta_domain_bounds(self):
        domain = ThetaDomain(p_a=(0.0, 0.5), alpha=[(0.1, 0.9)])
        assert domain.bounds(((0.0, 1.0),)) == [(0.0, 0.5), (0.1, 0.9)]
        with pytest.raises(ValidationError):
            ThetaDomain(p_a=(0.5, 0.1))

    def test_generation_rank(self):
        with pytest.raises(ValidationError):
            GenerationSpec(n=3, m=5, rank=4, mean_level=1.0, p_o=1.0, p_a=0.0)


class TestTheoreticalConstants:
    def test_delta_uses_larger_dimension(self):
        consts = TheoreticalConstants(kappa=2.0, mu=1.5, l_bound=3.0, k_lip=1.0, c1=0.5)
        expected = (4.0 ** 3) * 16.0 * 1.5 * 2 * 9.0 * math.sqrt(math.log(200) / (0.5 * 200))
        assert consts.delta(2, 50, 200, 0.5) == pytest.approx(expected, rel=1e-12)
        assert consts.delta(2, 200, 50, 0.5) == pytest.approx(expected, rel=1e-12)
        assert consts.half_width(2, 50, 200, 0.5) == pytest.approx(0.5 * expected, rel=1e-12)

    def test_from_rate_matrix(self, low_rank_counts):
        consts = TheoreticalConstants.from_rate_matrix(low_rank_counts, rank=2)
        s = np.linalg.svd(low_rank_counts, compute_uv=False)
        assert consts.kappa == pytest.approx(s[0] / s[1])
        assert consts.l_bound == pytest.approx(low_rank_counts.max() + 1.0)
        assert consts.mu >= 1.0


class TestInstances:
    def test_validate_rejects_rate_shape(self, small_obs):
        truth = (np.ones((2, 2)), AnomalyMask.empty(3, 4), ModelParams(p_a=0.0))
        with pytest.raises(DimensionMismatchError):
            validate_instance(small_obs, truth)

    def test_validate_rejects_negative_rates(self, small_obs):
        truth = (-np.ones((3, 4)), AnomalyMask.empty(3, 4), ModelParams(p_a=0.0))
        with pytest.raises(EntrywiseError):
            validate_instance(small_obs, truth)

    def test_require_truth(self, small_obs):
        with pytest.raises(InstanceError):
            validate_instance(small_obs).require_truth()

    def test_files_round_trip(self, small_instance, tmp_path):
        write_instance(small_instance, tmp_path / "inst")
        loaded = read_instance(tmp_path / "inst")
        assert loaded == small_instance
        assert isinstance(loaded.truth, GroundTruth)
        assert np.array_equal(loaded.truth.rates, small_instance.truth.rates)

    def test_missing_manifest(self, tmp_path):
        with pytest.raises(ConfigError):
            read_instance(tmp_path)

    def test_bad_header(self, small_instance, tmp_path):
        write_instance(small_instance, tmp_path)
        (tmp_path / "observations.csv").write_text("r,c,x\n0,0,1\n")
        with pytest.raises(ConfigError):
            read_instance(tmp_path)
