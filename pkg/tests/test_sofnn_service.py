# tests/test_sofnn_service.py
import numpy as np
import pytest

from app.core.exceptions import DataError, ModelFileError, NumericalError
from app.models.sofnn_models import SofnnParams
from app.services import sofnn_service
from app.services.sofnn_service import RecursiveLeastSquares, SofnnModel


def params(**overrides):
    values = dict(delta=0.04, sigma0=0.01, k_rmse=0.05, k_d=[0.1], epochs=1)
    values.update(overrides)
    return SofnnParams(**values)


def sine_samples(n=200):
    X = np.linspace(0.0, 1.0, n).reshape(-1, 1)
    return X, 0.5 + 0.4 * np.sin(2 * np.pi * X[:, 0])


class TestRecursiveLeastSquares:

    def test_converges_to_batch_solution(self):
        rng = np.random.default_rng(12)
        phi = rng.uniform(-1.0, 1.0, size=(300, 3))
        y = phi @ np.array([0.3, -0.2, 0.1]) + rng.normal(0.0, 0.01, size=300)
        rls = RecursiveLeastSquares(3)
        for row, target in zip(phi, y):
            rls.update(row, target)
        batch, *_ = np.linalg.lstsq(phi, y, rcond=None)
        np.testing.assert_allclose(rls.theta, batch, atol=1e-5)

    def test_grow_keeps_existing_state(self):
        rls = RecursiveLeastSquares(2)
        rls.update(np.array([1.0, 0.5]), 2.0)
        theta, P = rls.theta.copy(), rls.P.copy()
        rls.grow(3)
        np.testing.assert_array_equal(rls.theta[:2], theta)
        np.testing.assert_array_equal(rls.P[:2, :2], P)
        assert rls.P[4, 4] == 1e4
        assert rls.P[0, 4] == 0.0


class TestStructure:

    def test_default_width_rule_is_fixed(self):
        assert params().width_rule == "fixed"

    def test_nearest_width_rule(self):
        model = SofnnModel(1, params(width_rule="nearest"))
        model.add_neuron(np.array([0.2]))
        model.add_neuron(np.array([0.5]))
        model.add_neuron(np.array([0.55]))
        np.testing.assert_allclose(model.widths[:, 0], [0.01, 0.3, 0.3])

    def test_fixed_width_rule(self):
        model = SofnnModel(2, params(width_rule="fixed"))
        model.add_neuron(np.array([0.2, 0.2]))
        model.add_neuron(np.array([0.9, 0.1]))
        assert (model.widths == 0.01).all()

    def test_covering_needs_every_input(self):
        model = SofnnModel(2, params(k_d=[0.1, 0.2]))
        model.add_neuron(np.array([0.5, 0.5]))
        assert model.covering_neuron(np.array([0.55, 0.65])) == 0
        assert model.covering_neuron(np.array([0.65, 0.55])) is None

    def test_normalized_firing_sums_to_one(self):
        model = SofnnModel(2, params())
        for x in ([0.1, 0.1], [0.5, 0.9], [0.9, 0.2]):
            model.add_neuron(np.array(x))
        # far from every centre the unnormalised firing underflows
        psi = model.normalized_firing(np.array([[0.0, 1.0], [0.3, 0.5], [1.0, 0.0]]))
        np.testing.assert_allclose(psi.sum(axis=1), 1.0)

    def test_prune_removes_silent_neurons(self):
        model = SofnnModel(1, params(width_rule="fixed"))
        model.add_neuron(np.array([0.0]))
        model.add_neuron(np.array([0.5]))
        model.theta = np.array([1.0, 2.0, 3.0, 4.0])
        assert model.prune(np.array([[0.0], [0.01]])) == 1
        np.testing.assert_array_equal(model.centers, [[0.0]])
        np.testing.assert_array_equal(model.theta, [1.0, 2.0])

    def test_empty_model_cannot_predict(self):
        with pytest.raises(NumericalError):
            SofnnModel(1, params()).predict([0.5])

    def test_k_d_length_must_match(self):
        with pytest.raises(ValueError):
            params(k_d=[0.1, 0.2]).for_inputs(3)

    def test_firing_sums_to_one_everywhere(self):
        rng = np.random.default_rng(21)
        model = SofnnModel(3, params(sigma0=0.02))
        for x in rng.uniform(0.0, 1.0, size=(12, 3)):
            model.add_neuron(x)
        points = rng.uniform(-4.0, 5.0, size=(1000, 3))
        psi = model.normalized_firing(points)
        assert np.abs(psi.sum(axis=1) - 1.0).max() <= 1e-12
        assert (psi >= 0.0).all()

    def test_nearest_neuron(self):
        model = SofnnModel(2, params())
        model.add_neuron(np.array([0.1, 0.1]))
        model.add_neuron(np.array([0.8, 0.7]))
        assert model.nearest_neuron(np.array([0.6, 0.9])) == 1
        assert model.nearest_neuron(np.array([0.3, 0.0])) == 0

    def test_neuron_cap_scales_with_samples(self):
        assert params().max_neurons(441, 2) == 49
        assert params().max_neurons(60, 6) == 2
        assert params().max_neurons(2, 1) == 1
        assert params(rows_per_parameter=0).max_neurons(10, 1) is None


class TestTraining:

    def test_fits_sine(self):
        X, y = sine_samples()
        model, log = sofnn_service.train(X, y, params(epochs=3))
        assert log.final_rmse <= 0.05
        assert 1 <= model.n_neurons <= 60
        assert len(log.rmse_so_far) == 200 * log.epochs_run

    def test_single_sample(self):
        model, log = sofnn_service.train([[0.5]], [0.7], params())
        assert model.n_neurons == 1
        assert model.predict([0.5]) == pytest.approx(0.7, abs=1e-9)

    def test_conflicting_duplicates_average(self):
        model, log = sofnn_service.train([[0.3], [0.3]], [0.2, 0.8], params())
        assert model.n_neurons == 1
        assert log.widenings == [1]
        assert model.predict([0.3]) == pytest.approx(0.5, abs=1e-9)

    def test_deterministic(self):
        X, y = sine_samples(80)
        first, _ = sofnn_service.train(X, y, params())
        second, _ = sofnn_service.train(X, y, params())
        np.testing.assert_array_equal(first.centers, second.centers)
        np.testing.assert_array_equal(first.widths, second.widths)
        np.testing.assert_array_equal(first.theta, second.theta)

    def test_bad_samples(self):
        with pytest.raises(DataError):
            sofnn_service.train(np.zeros((0, 1)), [], params())
        with pytest.raises(DataError):
            sofnn_service.train([[1.5]], [0.2], params())
        with pytest.raises(NumericalError):
            sofnn_service.train([[0.5]], [float("nan")], params())

    def test_fits_two_input_surface_in_one_pass(self):
        grid = np.linspace(0.0, 1.0, 21)
        X = np.array([[a, b] for a in grid for b in grid])
        y = np.sin(np.pi * X[:, 0]) * np.sin(np.pi * X[:, 1])
        model, log = sofnn_service.train(X, y, params())
        assert log.epochs_run == 1
        assert log.final_rmse <= 0.05
        assert model.n_neurons <= 60

    def test_neuron_count_never_drops_within_a_pass(self):
        X, y = sine_samples(150)
        _, log = sofnn_service.train(X, y, params())
        assert np.all(np.diff(log.neuron_counts) >= 0)
        assert log.neuron_counts[-1] == sum(log.additions)

    def test_output_is_continuous(self):
        X, y = sine_samples()
        model, _ = sofnn_service.train(X, y, params(sigma0=0.05, k_d=[0.2]))
        points = np.random.default_rng(5).uniform(0.0, 1.0, size=(200, 1))
        moved = model.predict_many(points + 1e-9) - model.predict_many(points)
        assert np.abs(moved).max() < 1e-6

    def test_online_consequents_match_batch_least_squares(self):
        rng = np.random.default_rng(8)
        X = rng.uniform(0.0, 1.0, size=(4000, 2))
        y = 0.2 + 0.3 * X[:, 0] - 0.1 * X[:, 1] + rng.normal(0.0, 0.01, size=4000)
        model, log = sofnn_service.train(X, y, params(k_d=[1.0], batch_refit=False))
        assert model.n_neurons == 1
        assert log.ridge_penalty == [None]
        design = np.column_stack([np.ones(len(X)), X])
        batch, *_ = np.linalg.lstsq(design, y, rcond=None)
        np.testing.assert_allclose(model.predict_many(X), design @ batch, atol=1e-6)

    def test_cap_widens_instead_of_growing(self):
        X = np.linspace(0.0, 1.0, 12).reshape(-1, 1)
        y = np.where(np.arange(12) % 2 == 0, 0.1, 0.9)
        model, log = sofnn_service.train(X, y, params(k_d=[0.01]))
        assert model.n_neurons <= params().max_neurons(12, 1) == 2
        assert log.capped[0] > 0

    def test_refit_shrinks_toward_shared_linear_rule(self):
        rng = np.random.default_rng(9)
        X = rng.uniform(0.0, 1.0, size=(40, 1))
        y = 0.3 + 0.5 * X[:, 0] + rng.normal(0.0, 0.05, size=40)
        model = SofnnModel(1, params(sigma0=0.1))
        for center in (0.1, 0.4, 0.7, 0.95):
            model.add_neuron(np.array([center]))
        penalty = model.refit(X, y)
        assert penalty > 0.0
        spread = model.consequents().std(axis=0)
        assert (spread < 1.0).all()
        residual = y - model.predict_many(X)
        assert np.sqrt(np.mean(residual ** 2)) < 0.07


class TestModelFile:

    def test_saved_model_predicts_identically(self, tmp_path):
        X, y = sine_samples(60)
        model, _ = sofnn_service.train(X, y, params())
        path = str(tmp_path / "model.json")
        sofnn_service.save_model(model, path)
        loaded = sofnn_service.load_model(path)
        np.testing.assert_array_equal(loaded.predict_many(X), model.predict_many(X))
        assert loaded.params == model.params

    def test_corrupt_file(self, tmp_path):
        path = tmp_path / "model.json"
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(ModelFileError):
            sofnn_service.load_model(str(path))

    def test_version_mismatch(self, tmp_path):
        model, _ = sofnn_service.train([[0.5]], [0.7], params())
        record = sofnn_service.to_model_file(model).model_copy(update={"version": 99})
        with pytest.raises(ModelFileError):
            sofnn_service.from_model_file(record)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ModelFileError):
            sofnn_service.load_model(str(tmp_path / "none.json"))
