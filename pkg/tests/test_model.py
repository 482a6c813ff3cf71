import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from maxlinear import (
    DimensionMismatchError,
    MarginCountMismatchError,
    NegativeEntryError,
    ZeroColumnError,
    ZeroRowError,
    load_model,
    max_linear_apply,
    max_linear_apply_batch,
    save_model,
    standard_frechet,
    validate_model,
    validate_observations,
)

TRIL3 = np.tril(np.ones((3, 3)))


def margins(p, alpha=1.0):
    return [standard_frechet(alpha)] * p


def test_validate_accepts_triangular_example():
    model = validate_model(TRIL3, margins(3))
    assert model.n == 3 and model.p == 3
    assert not model.A.flags.writeable


def test_validate_rejects_negative_and_nonfinite():
    with pytest.raises(NegativeEntryError):
        validate_model([[1.0, -0.1], [0.5, 1.0]], margins(2))
    with pytest.raises(NegativeEntryError):
        validate_model([[1.0, np.nan], [0.5, 1.0]], margins(2))


def test_validate_rejects_zero_rows_and_columns():
    with pytest.raises(ZeroRowError):
        validate_model([[0.0, 0.0], [1.0, 1.0]], margins(2))
    with pytest.raises(ZeroColumnError):
        validate_model([[1.0, 0.0], [1.0, 0.0]], margins(2))


def test_validate_rejects_margin_mismatch():
    with pytest.raises(MarginCountMismatchError):
        validate_model(TRIL3, margins(2))


def test_apply_triangular_identityish():
    # increasing z reproduces itself through the lower-triangular ones
    assert np.array_equal(max_linear_apply(TRIL3, np.array([1.0, 2.0, 3.0])), [1.0, 2.0, 3.0])


def test_apply_shape_errors():
    with pytest.raises(DimensionMismatchError):
        max_linear_apply(TRIL3, np.ones(4))
    with pytest.raises(DimensionMismatchError):
        max_linear_apply_batch(TRIL3, np.ones((5, 4)))


def test_batch_matches_single():
    gen = np.random.default_rng(0)
    A = gen.random((4, 6))
    Z = gen.random((20, 6)) + 0.01
    batch = max_linear_apply_batch(A, Z)
    for k in range(20):
        assert np.allclose(batch[k], max_linear_apply(A, Z[k]))


@given(
    A=arrays(np.float64, (3, 4), elements=st.floats(0.1, 10.0)),
    z=arrays(np.float64, 4, elements=st.floats(0.01, 100.0)),
    c=st.floats(0.01, 100.0),
)
@settings(max_examples=100, deadline=None)
def test_apply_homogeneous(A, z, c):
    # max-linearity: A (c z) = c (A z)
    assert np.allclose(max_linear_apply(A, c * z), c * max_linear_apply(A, z), rtol=1e-12)


def test_validate_observations():
    x = validate_observations([1.0, 2.0], 2)
    assert not x.flags.writeable
    with pytest.raises(DimensionMismatchError):
        validate_observations([1.0, 2.0], 3)
    with pytest.raises(ValueError):
        validate_observations([1.0, 0.0], 2)
    with pytest.raises(ValueError):
        validate_observations([1.0, np.inf], 2)


def test_model_file_roundtrip(tmp_path):
    model = validate_model(TRIL3, margins(3, alpha=2.0))
    path = tmp_path / "model.json"
    save_model(model, path)
    copy = load_model(path)
    assert np.array_equal(copy.A, model.A)
    assert copy.margins == model.margins
