import numpy as np
import pytest
from scipy.stats import binom

from qmlkit.embedding import (
    EmbeddingModel,
    GramMatrix,
    LabeledDataset1D,
    TrainConfig,
    classify,
    dataset_from_json,
    dataset_to_json,
    embed,
    gradient,
    gram,
    loss,
    overlap_exact,
    swap_test,
    synth_dataset,
    train_embedding,
)
from qmlkit.states import PureState

ZERO_MODEL = EmbeddingModel((0.0, 0.0, 0.0))


def states_with_overlap(v: float) -> tuple[PureState, PureState]:
    phi = np.arccos(np.sqrt(v))
    a = PureState(np.array([1.0, 0.0], dtype=complex))
    b = PureState(np.array([np.cos(phi), np.sin(phi)], dtype=complex))
    return a, b


def fd_gradient(model: EmbeddingModel, dataset: LabeledDataset1D, h: float = 1e-5) -> np.ndarray:
    out = np.zeros(3)
    for k in range(3):
        plus, minus = list(model.thetas), list(model.thetas)
        plus[k] += h
        minus[k] -= h
        out[k] = (
            loss(EmbeddingModel(tuple(plus)), dataset)
            - loss(EmbeddingModel(tuple(minus)), dataset)
        ) / (2 * h)
    return out


class TestEmbed:
    def test_zero_angles_collapse_to_single_rotation(self):
        # four same-axis X rotations by x compose to RX(4x), whose action
        # on |0> is (cos 2x, -i sin 2x) in the half-angle convention
        for x in (-1.3, 0.2, 0.9, 2.4):
            state = embed(x, ZERO_MODEL)
            expected = np.array([np.cos(2 * x), -1j * np.sin(2 * x)])
            np.testing.assert_allclose(state.amplitudes, expected, atol=1e-12)

    def test_zero_input_leaves_only_y_rotations(self):
        thetas = (0.4, -1.2, 0.7)
        state = embed(0.0, EmbeddingModel(thetas))
        total = sum(thetas)
        expected = np.array([np.cos(total / 2), np.sin(total / 2)])
        np.testing.assert_allclose(state.amplitudes, expected, atol=1e-12)

    def test_output_normalized(self):
        rng = np.random.default_rng(0)
        for _ in range(30):
            model = EmbeddingModel(tuple(rng.uniform(-np.pi, np.pi, 3)))
            state = embed(rng.uniform(-5, 5), model)
            assert abs(np.linalg.norm(state.amplitudes) - 1.0) <= 1e-12

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            embed(np.nan, ZERO_MODEL)
        with pytest.raises(ValueError):
            EmbeddingModel((0.0, np.inf, 0.0))


class TestOverlapExact:
    def test_self_overlap(self):
        state = embed(0.37, ZERO_MODEL)
        assert overlap_exact(state, state) == pytest.approx(1.0, abs=1e-12)

    def test_orthogonal_states(self):
        a = PureState(np.array([1.0, 0.0]))
        b = PureState(np.array([0.0, 1.0]))
        assert overlap_exact(a, b) == 0.0

    def test_zero_angle_closed_form(self):
        for xi, xj in ((0.1, 0.5), (-0.7, 0.3), (1.0, 2.2)):
            value = overlap_exact(embed(xi, ZERO_MODEL), embed(xj, ZERO_MODEL))
            assert value == pytest.approx(np.cos(2 * (xj - xi)) ** 2, abs=1e-12)


class TestSwapTest:
    def test_identical_states_certain(self):
        state = embed(0.5, ZERO_MODEL)
        for seed in range(5):
            assert swap_test(state, state, shots=50, seed=seed) == 1.0

    def test_orthogonal_states_near_zero(self):
        a, b = states_with_overlap(0.0)
        assert swap_test(a, b, shots=1_000_000, seed=1) <= 0.01

    def test_zero_shots_rejected(self):
        a, b = states_with_overlap(0.5)
        with pytest.raises(ValueError):
            swap_test(a, b, shots=0, seed=0)

    def test_deterministic_given_seed(self):
        a, b = states_with_overlap(0.3)
        assert swap_test(a, b, 100, seed=5) == swap_test(a, b, 100, seed=5)

    def test_estimates_cover_binomial_interval(self):
        # the exact central 99% interval for the ancilla counts must
        # capture at least 99% of seeded estimates (it holds >= 99% of
        # the probability mass by construction)
        v = 0.5
        a, b = states_with_overlap(v)
        shots = 100
        p0 = 0.5 * (1 + v)
        lo = binom.ppf(0.005, shots, p0)
        hi = binom.ppf(0.995, shots, p0)
        est_lo = max(0.0, 2 * lo / shots - 1)
        est_hi = 2 * hi / shots - 1
        inside = sum(
            est_lo <= swap_test(a, b, shots, seed) <= est_hi for seed in range(1000)
        )
        assert inside >= 990

    @pytest.mark.parametrize("v", [0.1, 0.36, 0.64])
    def test_unbiased_above_clamp_region(self, v):
        # at 10^4 shots the zero-clamp never triggers for v >= 0.1, so
        # the seed-averaged estimate converges to the true overlap
        a, b = states_with_overlap(v)
        estimates = [swap_test(a, b, 10_000, seed) for seed in range(1000)]
        assert abs(np.mean(estimates) - v) <= 1.5e-3


class TestGram:
    def test_exact_diagonal_is_one(self):
        ds = synth_dataset(5, seed=0)
        g = gram(ds, ZERO_MODEL)
        np.testing.assert_array_equal(np.diag(g.matrix), np.ones(10))

    def test_ten_points_shape_and_symmetry(self):
        ds = synth_dataset(5, seed=1)
        g = gram(ds, ZERO_MODEL, mode="exact")
        assert g.dim == 10
        np.testing.assert_array_equal(g.matrix, g.matrix.T)
        assert g.matrix.min() >= 0.0 and g.matrix.max() <= 1.0

    def test_sampled_converges_to_exact(self):
        ds = synth_dataset(3, seed=2)
        exact = gram(ds, ZERO_MODEL).matrix
        sampled = gram(ds, ZERO_MODEL, mode="sampled", shots=100_000, seed=3).matrix
        assert np.max(np.abs(sampled - exact)) <= 0.02

    def test_sampled_deterministic(self):
        ds = synth_dataset(3, seed=2)
        a = gram(ds, ZERO_MODEL, mode="sampled", shots=100, seed=7).matrix
        b = gram(ds, ZERO_MODEL, mode="sampled", shots=100, seed=7).matrix
        np.testing.assert_array_equal(a, b)

    def test_sampled_estimates_quantized_by_shots(self):
        # 100 draws per entry: every estimate is a multiple of 1/50
        ds = synth_dataset(3, seed=2)
        g = gram(ds, ZERO_MODEL, mode="sampled", shots=100, seed=7).matrix
        np.testing.assert_allclose(np.round(g * 50) / 50, g, atol=1e-12)

    def test_sampled_requires_seed(self):
        with pytest.raises(ValueError):
            gram(synth_dataset(2, seed=0), ZERO_MODEL, mode="sampled", shots=10)

    def test_unknown_mode_rejected(self):
        with pytest.raises(ValueError):
            gram(synth_dataset(2, seed=0), ZERO_MODEL, mode="approx")

    def test_accepts_raw_points(self):
        g = gram(np.array([0.0, 0.25]), ZERO_MODEL)
        assert g.dim == 2

    def test_gram_matrix_validation(self):
        with pytest.raises(ValueError):
            GramMatrix(np.array([[1.0, 0.2], [0.3, 1.0]]))  # asymmetric
        with pytest.raises(ValueError):
            GramMatrix(np.array([[1.0, 1.2], [1.2, 1.0]]))  # out of range


class TestLoss:
    def test_identical_same_class_points(self):
        ds = LabeledDataset1D(np.array([0.3, 0.3, 0.9]), ("A", "A", "B"))
        model = ZERO_MODEL
        # same-class pair overlaps exactly 1, so only the cross term remains
        value = loss(model, ds)
        cross = np.mean(
            [
                overlap_exact(embed(0.3, model), embed(0.9, model)),
                overlap_exact(embed(0.3, model), embed(0.9, model)),
            ]
        )
        assert value == pytest.approx(cross, abs=1e-12)

    def test_perfectly_separated_classes(self):
        # x = 0 embeds to |0>, x = pi/4 embeds to -i|1>: orthogonal classes
        ds = LabeledDataset1D(np.array([0.0, 0.0, np.pi / 4, np.pi / 4]), ("A", "A", "B", "B"))
        assert loss(ZERO_MODEL, ds) == pytest.approx(0.0, abs=1e-12)

    def test_coincident_classes(self):
        ds = LabeledDataset1D(np.array([0.3, 0.3, 0.3, 0.3]), ("A", "A", "B", "B"))
        assert loss(ZERO_MODEL, ds) == pytest.approx(1.0, abs=1e-12)

    def test_single_point_class_drops_same_term(self):
        ds = LabeledDataset1D(np.array([0.0, np.pi / 4]), ("A", "B"))
        assert loss(ZERO_MODEL, ds) == pytest.approx(0.0, abs=1e-12)

    def test_range(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            ds = LabeledDataset1D(rng.uniform(-3, 3, 6), ("A", "A", "A", "B", "B", "B"))
            model = EmbeddingModel(tuple(rng.uniform(-np.pi, np.pi, 3)))
            assert 0.0 <= loss(model, ds) <= 2.0


class TestGradient:
    def test_matches_finite_differences(self):
        rng = np.random.default_rng(6)
        for _ in range(10):
            model = EmbeddingModel(tuple(rng.uniform(-np.pi, np.pi, 3)))
            ds = LabeledDataset1D(rng.uniform(-3, 3, 6), ("A", "A", "A", "B", "B", "B"))
            np.testing.assert_allclose(gradient(model, ds), fd_gradient(model, ds), atol=1e-6)

    def test_stationary_at_zero_angles(self):
        # every pair overlap has a purely imaginary angle derivative at
        # theta = 0, so the analytic gradient vanishes for any dataset
        ds = LabeledDataset1D(np.array([-1.2, -0.4, 0.4, 1.2]), ("A", "B", "B", "A"))
        assert np.max(np.abs(gradient(ZERO_MODEL, ds))) <= 1e-8
        assert np.max(np.abs(fd_gradient(ZERO_MODEL, ds))) <= 1e-8

    def test_loss_periodic_in_each_angle(self):
        ds = LabeledDataset1D(np.array([-1.0, 0.2, 0.8, 2.0]), ("A", "B", "B", "A"))
        model = EmbeddingModel((0.3, -1.1, 2.0))
        base = loss(model, ds)
        for k in range(3):
            shifted = list(model.thetas)
            shifted[k] += 2 * np.pi
            assert abs(loss(EmbeddingModel(tuple(shifted)), ds) - base) <= 1e-12


class TestTrain:
    def test_zero_learning_rate_is_flat(self):
        ds = synth_dataset(4, seed=3)
        model, curve = train_embedding(ds, TrainConfig(learning_rate=0.0, epochs=5, seed=8))
        np.testing.assert_allclose(curve, curve[0], atol=0)
        rng = np.random.default_rng(8)
        np.testing.assert_allclose(model.thetas, rng.uniform(-np.pi, np.pi, 3), atol=0)

    def test_deterministic(self):
        ds = synth_dataset(4, seed=3)
        config = TrainConfig(learning_rate=0.1, epochs=10, seed=1)
        model_a, curve_a = train_embedding(ds, config)
        model_b, curve_b = train_embedding(ds, config)
        assert model_a.thetas == model_b.thetas
        np.testing.assert_array_equal(curve_a, curve_b)

    def test_loss_decreases_on_benchmark(self):
        ds = synth_dataset(10, seed=11)
        model, curve = train_embedding(ds, TrainConfig(learning_rate=0.1, epochs=50, seed=0))
        assert loss(model, ds) <= curve[0]


class TestSynthDataset:
    def test_class_regions(self):
        ds = synth_dataset(10, seed=4)
        points = np.asarray(ds.points)
        labels = np.asarray(ds.labels)
        assert np.all(np.abs(points[labels == "B"]) <= 1.0)
        outer = np.abs(points[labels == "A"])
        assert np.all((outer >= 1.5) & (outer <= 3.0))

    def test_not_threshold_separable(self):
        ds = synth_dataset(8, seed=5)
        points = np.asarray(ds.points)
        labels = np.asarray(ds.labels)
        a, b = points[labels == "A"], points[labels == "B"]
        assert a[a > 0].min() > b.max() and a[a < 0].max() < b.min()

    def test_even_split_of_outer_class(self):
        ds = synth_dataset(10, seed=6)
        a = np.asarray(ds.points)[np.asarray(ds.labels) == "A"]
        assert (a < 0).sum() == 5 and (a > 0).sum() == 5

    def test_deterministic(self):
        np.testing.assert_array_equal(
            synth_dataset(5, seed=7).points, synth_dataset(5, seed=7).points
        )

    def test_rejects_tiny_classes(self):
        with pytest.raises(ValueError):
            synth_dataset(1, seed=0)


class TestClassify:
    def test_tie_goes_to_class_a(self):
        # both classes sit on the same embedded state, so every overlap
        # mean ties and the deterministic rule picks A
        ds = LabeledDataset1D(np.array([0.2, 0.2]), ("A", "B"))
        assert classify(np.array([0.9]), ZERO_MODEL, ds) == ("A",)

    def test_recovers_training_labels_when_separated(self):
        ds = LabeledDataset1D(np.array([0.0, 0.0, np.pi / 4, np.pi / 4]), ("A", "A", "B", "B"))
        preds = classify(ds.points, ZERO_MODEL, ds)
        assert preds == ds.labels


class TestDatasetJson:
    def test_round_trip(self):
        ds = synth_dataset(3, seed=9)
        restored = dataset_from_json(dataset_to_json(ds))
        np.testing.assert_array_equal(restored.points, ds.points)
        assert restored.labels == ds.labels

    def test_rejects_malformed(self):
        with pytest.raises(ValueError):
            dataset_from_json('{"x": 1}')
        with pytest.raises(ValueError):
            dataset_from_json('[{"x": 1}]')


class TestDatasetValidation:
    def test_single_class_rejected(self):
        with pytest.raises(ValueError):
            LabeledDataset1D(np.array([0.1, 0.2]), ("A", "A"))

    def test_unknown_label_rejected(self):
        with pytest.raises(ValueError):
            LabeledDataset1D(np.array([0.1, 0.2]), ("A", "C"))

    def test_non_finite_point_rejected(self):
        with pytest.raises(ValueError):
            LabeledDataset1D(np.array([0.1, np.nan]), ("A", "B"))
