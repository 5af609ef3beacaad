import csv

import numpy as np
import pytest

from enkfda.observation import (
    ObservationSetup,
    every_third_removed,
    first_coordinate,
    selection_matrix,
    write_observations_csv,
)


class TestOperators:
    def test_every_third_small(self):
        h = every_third_removed(3)
        assert h.shape == (2, 3)
        assert np.array_equal(h, np.eye(3)[[0, 1]])

    def test_every_third_spec_dimension(self):
        h = every_third_removed(60)
        assert h.shape == (40, 60)
        removed = [i for i in range(60) if not h[:, i].any()]
        assert removed == list(range(2, 60, 3))

    def test_orthonormal_rows_and_projection(self):
        h = every_third_removed(12)
        assert np.array_equal(h @ h.T, np.eye(8))
        p = h.T @ h
        assert np.array_equal(p @ p, p)

    def test_indivisible_dimension_rejected(self):
        with pytest.raises(ValueError):
            every_third_removed(5)

    def test_first_coordinate(self):
        h = first_coordinate()
        u = np.array([1.5, -2.0, 7.0])
        assert h @ u == pytest.approx(1.5)
        assert h @ h.T == pytest.approx(1.0)
        p = h.T @ h
        assert np.array_equal(p @ u, [1.5, 0.0, 0.0])

    def test_selection_rejects_duplicates(self):
        with pytest.raises(ValueError):
            selection_matrix(4, [1, 1])

    def test_empty_selection_allowed(self):
        h = selection_matrix(4, [])
        assert h.shape == (0, 4)


class TestObserve:
    def test_noiseless(self):
        setup = ObservationSetup(first_coordinate(), eps=0.0, seed=0)
        u = np.array([2.0, 3.0, 4.0])
        assert np.array_equal(setup.observe(u, 5), [2.0])

    def test_repeated_calls_bit_identical(self):
        setup = ObservationSetup(every_third_removed(6), eps=0.3, seed=42)
        u = np.arange(6.0)
        y1 = setup.observe(u, 9)
        y2 = setup.observe(u, 9)
        assert np.array_equal(y1, y2)
        assert not np.array_equal(y1, setup.observe(u, 10))

    def test_noise_moments(self):
        # sample covariance of (y - Hu)/eps over many steps close to R = I
        k = 3
        setup = ObservationSetup(selection_matrix(5, [0, 2, 4]), eps=0.7, seed=3)
        u = np.zeros(5)
        n = 40_000
        draws = np.array([setup.observe(u, j) for j in range(n)]) / 0.7
        cov = draws.T @ draws / n
        assert np.linalg.norm(cov - np.eye(k)) <= 0.02 * np.linalg.norm(np.eye(k))
        assert np.abs(draws.mean(axis=0)).max() <= 0.02

    def test_shaped_noise_covariance(self):
        r = np.array([[2.0, 0.5], [0.5, 1.0]])
        setup = ObservationSetup(selection_matrix(4, [0, 1]), eps=1.0, noise_cov=r, seed=8)
        n = 40_000
        draws = np.array([setup.observe(np.zeros(4), j) for j in range(n)])
        cov = draws.T @ draws / n
        assert np.linalg.norm(cov - r) <= 0.03 * np.linalg.norm(r)

    def test_non_positive_definite_rejected(self):
        with pytest.raises(ValueError):
            ObservationSetup(selection_matrix(3, [0, 1]), eps=0.1,
                             noise_cov=np.diag([1.0, 0.0]))

    def test_sequence_is_pure_function_of_seed_and_truth(self):
        setup_a = ObservationSetup(every_third_removed(6), eps=0.2, seed=5)
        setup_b = ObservationSetup(every_third_removed(6), eps=0.2, seed=5)
        truth = np.random.default_rng(0).standard_normal((7, 6))
        assert np.array_equal(setup_a.observe_sequence(truth), setup_b.observe_sequence(truth))


def test_observation_csv_round_trip(tmp_path):
    setup = ObservationSetup(every_third_removed(6), eps=0.2, seed=5)
    truth = np.random.default_rng(1).standard_normal((5, 6))
    ys = setup.observe_sequence(truth)
    path = tmp_path / "obs.csv"
    write_observations_csv(path, ys)
    with open(path) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["step"] + [f"y_{i}" for i in range(1, 5)]
    loaded = np.array([[float(v) for v in row[1:]] for row in rows[1:]])
    assert np.array_equal(loaded, ys)
