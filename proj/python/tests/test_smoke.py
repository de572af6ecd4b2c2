import numpy as np
import pytest

import latnet


def make_low_rank_series(n=10, r=2, T=80, seed=0):
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.standard_normal((n, r)))
    z = np.zeros((r, r))
    slices = []
    for _ in range(T + 30):
        z = 0.8 * z + rng.standard_normal((r, r))
        slices.append(q @ z @ q.T)
    return q, slices[30:]


def test_generate_shapes_and_determinism():
    a = latnet.generate(n=6, T=20, seed=3)
    b = latnet.generate(n=6, T=20, seed=3)
    assert len(a["series"]) == 20
    assert a["series"][0].shape == (6, 6)
    assert a["loading"].shape == (6, 3)
    np.testing.assert_array_equal(a["series"][5], b["series"][5])


def test_fit_recovers_noiseless_space():
    q, slices = make_low_rank_series()
    fit = latnet.fit_symmetric(slices, r=2, h0=1)
    assert fit["loadings_row"].shape == (10, 2)
    assert latnet.space_distance(fit["loadings_row"], q) < 1e-6


def test_rank_selection():
    # noisy draws: an exactly singular spectrum would shrink the search bound
    # below the true rank by design
    data = latnet.generate(n=20, T=400, seed=1)
    assert latnet.estimate_rank(data["series"]) == 3


def test_build_m_is_symmetric_psd():
    data = latnet.generate(n=8, T=60, seed=5)
    m = latnet.build_m(data["series"], h0=2)
    assert m.shape == (8, 8)
    np.testing.assert_allclose(m, m.T, atol=1e-8 * abs(m).max())
    assert np.linalg.eigvalsh(m).min() >= -1e-8 * abs(m).max()


def test_varimax_and_simplify():
    rotated, rotation = latnet.varimax(np.eye(4)[:, :2])
    np.testing.assert_allclose(rotation.T @ rotation, np.eye(2), atol=1e-10)
    values, dropped = latnet.simplify_loadings(np.array([[0.8, 0.1, 0.1]]))
    np.testing.assert_allclose(values, [[1.0, 0.0, 0.0]])
    assert dropped == []


def test_cluster_entities():
    loading = np.array([[1.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.0, 1.0]])
    labels = latnet.cluster_entities(loading, k=2)
    assert labels[0] == labels[1]
    assert labels[2] == labels[3]
    assert labels[0] != labels[2]


def test_validation_error_surfaces_as_value_error():
    bad = [np.full((3, 3), np.nan)] * 5
    with pytest.raises(ValueError):
        latnet.fit_symmetric(bad, r=1, h0=1)
