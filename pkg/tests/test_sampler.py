import numpy as np
import pytest
from scipy import integrate, stats

from maxlinear import (
    AcceptanceTooRareError,
    DimensionMismatchError,
    RngStream,
    ZeroMassBelowBoundError,
    conditional_law,
    draw_conditional,
    draw_conditional_batch,
    max_linear_apply,
    predict,
    rejection_oracle,
    run_prediction,
    standard_frechet,
    truncated_draw,
    validate_model,
)
from maxlinear.experiments import ones_lower_triangular_model, random_consistent_instance
from maxlinear.sampler import PredictionTask, _truncated_matrix


def test_rng_stream_reproducible_and_split():
    a = RngStream(17, 0).generator().random(5)
    b = RngStream(17, 0).generator().random(5)
    assert np.array_equal(a, b)
    c = RngStream(17, 1).generator().random(5)
    assert not np.array_equal(a, c)
    assert RngStream(17).substream(3) == RngStream(17, 3)


def test_truncated_draw_respects_bound():
    m = standard_frechet(1.0)
    gen = RngStream(1).generator()
    draws = np.array([truncated_draw(m, 0.8, gen) for _ in range(500)])
    assert np.all((draws > 0) & (draws < 0.8))


def test_truncated_draw_matches_truncated_cdf():
    m = standard_frechet(1.0)
    gen = RngStream(2).generator()
    draws = np.array([truncated_draw(m, 1.0, gen) for _ in range(100_000)])
    trunc = lambda z: np.exp(-1.0 / np.clip(z, 1e-300, 1.0)) / np.exp(-1.0)
    assert stats.kstest(draws, trunc).statistic < 0.01


def test_truncated_draw_unbounded_limit():
    m = standard_frechet(1.0)
    gen = RngStream(3).generator()
    draws = np.array([truncated_draw(m, 1e12, gen) for _ in range(100_000)])
    assert stats.kstest(draws, lambda z: np.exp(-1.0 / z)).statistic < 0.01


def test_truncated_draw_zero_mass():
    m = standard_frechet(1.0)
    with pytest.raises(ZeroMassBelowBoundError):
        truncated_draw(m, 1e-3, RngStream(0))  # exp(-1000) underflows
    with pytest.raises(ValueError):
        truncated_draw(m, -1.0, RngStream(0))


def test_truncated_matrix_heterogeneous_path():
    margins = (standard_frechet(1.0), standard_frechet(2.0))
    gen = RngStream(9).generator()
    vals = _truncated_matrix(margins, np.array([0, 1]), np.array([0.7, 1.3]), gen, 400)
    assert vals.shape == (400, 2)
    assert np.all(vals[:, 0] < 0.7) and np.all(vals[:, 1] < 1.3)
    assert np.all(vals > 0)


def triangular_law(x):
    model = ones_lower_triangular_model()
    return model, conditional_law(model, np.asarray(x, dtype=float))


def test_draw_case_i_degenerate():
    model, law = triangular_law([1.0, 2.0, 3.0])
    for k in range(20):
        s = draw_conditional(law, RngStream(k))
        assert np.array_equal(s.z, [1.0, 2.0, 3.0])


def test_draw_case_ii_pattern():
    model, law = triangular_law([1.0, 1.0, 3.0])
    seen = set()
    for k in range(200):
        s = draw_conditional(law, RngStream(k))
        assert s.z[0] == 1.0 and s.z[2] == 3.0
        assert 0.0 < s.z[1] < 1.0
        seen.add(round(s.z[1], 12))
    assert len(seen) > 150  # z_2 really is random


def test_draw_case_iii_pattern():
    model, law = triangular_law([1.0, 1.0, 1.0])
    z2 = []
    for k in range(200):
        s = draw_conditional(law, RngStream(k))
        assert s.z[0] == 1.0
        assert 0.0 < s.z[1] < 1.0 and 0.0 < s.z[2] < 1.0
        z2.append(s.z[1])
    # independence smoke check: no constant coordinates
    assert np.std(z2) > 0


def test_chosen_column_always_candidate():
    gen = np.random.default_rng(13)
    for _ in range(20):
        model, x, _ = random_consistent_instance(gen, 4, 7)
        law = conditional_law(model, x)
        s = draw_conditional(law, RngStream(int(gen.integers(1 << 30))))
        for k in range(law.rank):
            assert s.chosen[k] in law.structure.J[k]
            assert s.z[s.chosen[k]] == law.z_hat[s.chosen[k]]


def test_exactness_every_draw():
    gen = np.random.default_rng(29)
    for _ in range(50):
        model, x, _ = random_consistent_instance(gen, 5, 9)
        law = conditional_law(model, x)
        Z, _ = draw_conditional_batch(law, 20, RngStream(int(gen.integers(1 << 30))))
        for z in Z:
            assert np.allclose(max_linear_apply(model.A, z), x, rtol=1e-9)


def test_batch_determinism():
    _, law = triangular_law([1.0, 1.0, 3.0])
    Z1, c1 = draw_conditional_batch(law, 50, RngStream(77, 4))
    Z2, c2 = draw_conditional_batch(law, 50, RngStream(77, 4))
    assert np.array_equal(Z1, Z2) and np.array_equal(c1, c2)


def test_scenario_frequencies_match_weights():
    # symmetric two-candidate class: empirical pick frequency ~ 0.5
    model = validate_model([[1.0, 1.0]], [standard_frechet(1.0)] * 2)
    law = conditional_law(model, np.array([1.0]))
    N = 100_000
    _, chosen = draw_conditional_batch(law, N, RngStream(5))
    freq = (chosen[:, 0] == 0).mean()
    band = 3.0 * np.sqrt(0.25 / N)
    assert abs(freq - 0.5) <= band


def test_asymmetric_scenario_frequencies():
    # zhat = (1, 2) with unit Frechet: weights (2/3, 1/3)
    model = validate_model([[1.0, 0.5]], [standard_frechet(1.0)] * 2)
    law = conditional_law(model, np.array([1.0]))
    assert np.allclose(law.weights[0], [2.0 / 3.0, 1.0 / 3.0])
    N = 100_000
    _, chosen = draw_conditional_batch(law, N, RngStream(6))
    freq = (chosen[:, 0] == 0).mean()
    band = 3.0 * np.sqrt((2.0 / 3.0) * (1.0 / 3.0) / N)
    assert abs(freq - 2.0 / 3.0) <= band


def test_predict_consistency():
    model, law = triangular_law([1.0, 1.0, 3.0])
    s = draw_conditional(law, RngStream(8))
    assert np.allclose(predict(model.A, s), [1.0, 1.0, 3.0], rtol=1e-9)
    assert np.array_equal(predict(np.zeros((2, 3)), s), [0.0, 0.0])
    with pytest.raises(DimensionMismatchError):
        predict(np.ones((1, 4)), s)


def test_predicted_coordinate_mean_matches_quadrature():
    # case (ii), B = [[0,1,0]]: output is Z_2 | Z_2 < 1
    model, law = triangular_law([1.0, 1.0, 3.0])
    Z, _ = draw_conditional_batch(law, 100_000, RngStream(12))
    m = standard_frechet(1.0)
    num, _ = integrate.quad(lambda z: z * m.pdf(z), 0.0, 1.0)
    expected = num / m.cdf(1.0)
    assert np.mean(Z[:, 1]) == pytest.approx(expected, rel=0.01)


def test_rejection_oracle_basics():
    model = ones_lower_triangular_model()
    x = np.array([1.0, 1.0, 3.0])
    eps = 0.05
    acc = rejection_oracle(model, x, eps, 200, RngStream(21))
    assert acc.shape == (200, 3)
    # accepted coordinates never exceed the inflated upper bounds
    from maxlinear import compute_upper_bounds

    z_cap = compute_upper_bounds(model, x * (1 + eps))
    assert np.all(acc <= z_cap * (1 + 1e-12))


def test_rejection_oracle_budget_error():
    model = ones_lower_triangular_model()
    with pytest.raises(AcceptanceTooRareError) as err:
        rejection_oracle(
            model, np.array([1.0, 1.0, 3.0]), 0.001, 10_000,
            RngStream(1), max_proposals=50_000,
        )
    assert 0.0 <= err.value.acceptance_rate < 1.0


def test_rejection_oracle_epsilon_validation():
    model = ones_lower_triangular_model()
    with pytest.raises(ValueError):
        rejection_oracle(model, np.array([1.0, 1.0, 3.0]), 0.5, 10, RngStream(0))


def test_run_prediction_with_free_columns():
    # last column never observed: it must be drawn unconditionally
    A = np.array([[1.0, 1.0, 0.0]])
    B = np.array([[0.0, 0.0, 1.0], [1.0, 0.0, 0.0]])
    margins = (standard_frechet(1.0),) * 3
    task = PredictionTask(A=A, B=B, margins=margins, x=np.array([2.0]),
                          num_samples=20_000, seed=3)
    result = run_prediction(task)
    assert result.free_columns.tolist() == [2]
    assert result.conditioned_columns.tolist() == [0, 1]
    # free coordinate unconditional: KS against the plain Frechet CDF
    ks = stats.kstest(result.Z[:, 2], lambda z: np.exp(-1.0 / z)).statistic
    assert ks < 0.015
    # observed constraint reproduced through the conditioned columns
    assert np.allclose(np.max(result.Z[:, :2], axis=1), 2.0, rtol=1e-9)


def test_run_prediction_shape_errors():
    margins = (standard_frechet(1.0),) * 2
    with pytest.raises(DimensionMismatchError):
        run_prediction(PredictionTask(
            A=np.ones((1, 2)), B=np.ones((1, 3)), margins=margins,
            x=np.array([1.0]), num_samples=1, seed=0,
        ))
    with pytest.raises(DimensionMismatchError):
        run_prediction(PredictionTask(
            A=np.ones((1, 2)), B=np.ones((1, 2)), margins=margins[:1],
            x=np.array([1.0]), num_samples=1, seed=0,
        ))
