import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import oracle_epr_table

from qsteer import noise
from qsteer.channels import depolarizing
from qsteer.noise import (
    CountRecord,
    NoiseSpec,
    estimate_kernel,
    exact_tables,
    jitter_offsets,
    sample_counts,
    simulate,
    visibility_for_fidelity,
    werner_epr_kernel,
    werner_fidelity,
    werner_pair,
)
from qsteer.witness import JointProbabilityTable, correlation_mask, kernel

V_LAB = 0.976


class TestWerner:
    def test_fidelity(self):
        assert werner_fidelity(V_LAB) == pytest.approx(0.982, abs=1e-12)
        assert visibility_for_fidelity(0.982) == pytest.approx(V_LAB, abs=1e-12)

    def test_pure_limit(self):
        np.testing.assert_allclose(werner_pair(1.0).data[[0, 0, 3, 3], [0, 3, 0, 3]], 0.5)

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            werner_pair(1.1)

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_kernel_against_full_matrix(self, n):
        pairs = [werner_pair(V_LAB)] * n
        d = 2**n
        p1, p2 = oracle_epr_table(pairs, 1), oracle_epr_table(pairs, 2)
        value = p1[correlation_mask("epr", 1, d)].sum() + p2[correlation_mask("epr", 2, d)].sum()
        assert werner_epr_kernel(V_LAB, n) == pytest.approx(value, abs=1e-12)
        assert simulate("epr", d, NoiseSpec(visibility=V_LAB)).kernel == pytest.approx(value, abs=1e-12)

    def test_lab_fidelity_d16(self):
        r = simulate("epr", 16, NoiseSpec(visibility=V_LAB))
        assert r.kernel == pytest.approx(1.9057142, abs=1e-7)
        assert r.steerable


class TestSampling:
    TABLE = JointProbabilityTable(1, np.array([[0.5, 0.0], [0.0, 0.5]]))

    def test_counts_sum(self):
        rec = sample_counts(self.TABLE, 1000, seed=1)
        assert rec.counts.sum() == 1000
        assert rec.counts[0, 1] == rec.counts[1, 0] == 0

    def test_certain_cell(self):
        t = JointProbabilityTable(2, np.array([[0.0, 1.0], [0.0, 0.0]]))
        np.testing.assert_array_equal(sample_counts(t, 7, seed=0).counts, [[0, 7], [0, 0]])

    def test_deterministic(self):
        a, b = sample_counts(self.TABLE, 500, seed=3), sample_counts(self.TABLE, 500, seed=3)
        np.testing.assert_array_equal(a.counts, b.counts)
        assert not np.array_equal(a.counts, sample_counts(self.TABLE, 500, seed=4).counts)

    def test_settings_use_different_streams(self):
        t2 = JointProbabilityTable(2, self.TABLE.entries)
        assert not np.array_equal(sample_counts(self.TABLE, 500, 5).counts, sample_counts(t2, 500, 5).counts)

    def test_rejects_zero_shots(self):
        with pytest.raises(ValueError):
            sample_counts(self.TABLE, 0, seed=0)

    def test_record_validation(self):
        with pytest.raises(ValueError):
            CountRecord(1, np.array([[1, 0], [0, 1]]), 3, 0)
        with pytest.raises(ValueError):
            CountRecord(1, np.array([[-1, 0], [0, 2]]), 1, 0)


class TestEstimator:
    def test_stderr_formula(self):
        r1 = CountRecord(1, np.array([[40, 10], [10, 40]]), 100, 0)
        r2 = CountRecord(2, np.array([[50, 0], [0, 50]]), 100, 0)
        value, stderr = estimate_kernel((r1, r2), "epr")
        # setting 1 masked sum 0.8; setting 2 (a + b = 0 mod 2) also 1.0
        assert value == pytest.approx(1.8)
        assert stderr == pytest.approx(np.sqrt(0.8 * 0.2 / 100))

    def test_order_enforced(self):
        r = CountRecord(1, np.array([[1, 0], [0, 1]]), 2, 0)
        with pytest.raises(ValueError):
            estimate_kernel((r, r), "epr")

    def test_convergence_rate(self):
        tables = exact_tables("epr", 4, NoiseSpec(visibility=0.8))
        truth = kernel("epr", *tables)
        rms = {}
        for shots in (10**3, 10**5):
            errs = [
                estimate_kernel([sample_counts(t, shots, seed) for t in tables], "epr")[0] - truth
                for seed in range(200)
            ]
            rms[shots] = np.sqrt(np.mean(np.square(errs)))
        assert 6 < rms[10**3] / rms[10**5] < 16

    def test_coverage(self):
        inside = 0
        for seed in range(200):
            r = simulate("ss", 8, NoiseSpec(channel=depolarizing(0.2)), shots=10**4, seed=seed)
            truth = simulate("ss", 8, NoiseSpec(channel=depolarizing(0.2))).kernel
            inside += abs(r.kernel - truth) <= 3 * r.stderr
        assert inside >= 194


class TestJitter:
    def test_none_without_jitter(self):
        assert jitter_offsets(3, 0.0, seed=1) is None

    def test_shapes_and_determinism(self):
        a = jitter_offsets(3, 0.01, seed=9)
        b = jitter_offsets(3, 0.01, seed=9)
        assert len(a) == 2 and [len(x) for x in a[0]] == [1, 2, 4]
        for pa, pb in zip(a, b):
            for x, y in zip(pa, pb):
                np.testing.assert_array_equal(x, y)

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.sampled_from([2, 4, 8]), st.sampled_from(["epr", "ss"]))
    def test_tables_stay_normalized(self, seed, d, kind):
        t1, t2 = exact_tables(kind, d, NoiseSpec(angle_jitter=0.05), seed=seed)
        assert t2.entries.sum() == pytest.approx(1.0, abs=1e-9)
        assert kernel(kind, t1, t2) <= 2.0 + 1e-9

    def test_jitter_lowers_kernel(self):
        values = [simulate("epr", 8, NoiseSpec(angle_jitter=0.05), seed=s).kernel for s in range(10)]
        assert max(values) < 2.0
        assert min(values) > 1.8


class TestSimulate:
    def test_exact_mode_draws_nothing(self, monkeypatch):
        def boom(*args, **kwargs):
            raise AssertionError("exact mode must not construct a generator")

        monkeypatch.setattr(noise, "rng_for", boom)
        r = simulate("epr", 8)
        assert r.kernel == pytest.approx(2.0, abs=1e-12) and r.stderr == 0.0

    def test_finite_shots_reproducible(self):
        a = simulate("ss", 4, NoiseSpec(visibility=1.0), shots=1000, seed=12)
        b = simulate("ss", 4, NoiseSpec(visibility=1.0), shots=1000, seed=12)
        assert a == b

    def test_reduced_dim_rejected_for_epr(self):
        with pytest.raises(ValueError):
            simulate("epr", 4, reduced_dim=2)

    def test_bad_kind(self):
        with pytest.raises(ValueError):
            simulate("bogus", 4)

    def test_reduced_dim_with_channel(self):
        r = simulate("ss", 8, NoiseSpec(channel=depolarizing(1.0)), reduced_dim=2)
        assert r.kernel == pytest.approx(2 / 8, abs=1e-12)

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            NoiseSpec(visibility=-0.1)
        with pytest.raises(ValueError):
            NoiseSpec(angle_jitter=-1.0)
