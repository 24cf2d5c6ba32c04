import numpy as np
import pytest
from numpy.testing import assert_allclose

from weylbilliard.ensembles import (
    EnsembleKind,
    EnsembleSpec,
    RandomStream,
    cpe_diagonal,
    cpe_phases,
    ginibre,
    ginibre_stack,
    haar_stack,
    haar_unitary,
    local_stack,
    random_local,
    sample_gamma,
    sample_gamma_stack,
    wishart,
)
from weylbilliard.linalg import is_unitary
from weylbilliard.schmidt import schmidt_vector
from weylbilliard.weyl import chamber_class, is_canonical


def test_stream_reproducible():
    a = RandomStream(42).generator.normal(size=5)
    b = RandomStream(42).generator.normal(size=5)
    assert np.array_equal(a, b)
    c = RandomStream(43).generator.normal(size=5)
    assert not np.array_equal(a, c)


def test_substreams_are_order_independent():
    """substream(k) draws the same numbers whether or not others were used."""
    s = RandomStream(7)
    direct = s.substream(3).generator.normal(size=4)
    s2 = RandomStream(7)
    s2.substream(0).generator.normal(size=100)
    s2.substream(1).generator.normal(size=1)
    again = s2.substream(3).generator.normal(size=4)
    assert np.array_equal(direct, again)


def test_substreams_nest():
    s = RandomStream(7)
    a = s.substream(1).substream(2).generator.normal(size=3)
    b = RandomStream(7).substream(1).substream(2).generator.normal(size=3)
    assert np.array_equal(a, b)
    assert s.substream(1).substream(2).path == (1, 2)


def test_ginibre_moments():
    g = ginibre_stack(8, 400, RandomStream(1)).ravel()
    assert abs(g.mean()) < 0.02
    assert np.mean(np.abs(g) ** 2) == pytest.approx(1.0, abs=0.02)


def test_haar_unitary_is_unitary():
    for d in (2, 4, 9):
        assert is_unitary(haar_unitary(d, RandomStream(d)))


def test_haar_stack_column_statistics():
    """First-column amplitudes are uniform on the sphere: E|u_i0|^2 = 1/d."""
    us = haar_stack(4, 4000, RandomStream(2))
    p = np.abs(us[:, :, 0]) ** 2
    assert_allclose(p.mean(axis=0), 0.25, atol=0.01)
    # eigenphases should not cluster near the positive axis (a bare-QR bug)
    phases = np.angle(np.linalg.eigvals(us[:500]))
    assert abs(np.exp(1j * phases).mean()) < 0.05


def test_cpe_diagonal_structure():
    m = cpe_diagonal(9, RandomStream(3)).matrix
    assert_allclose(m, np.diag(np.diagonal(m)))
    assert_allclose(np.abs(np.diagonal(m)), 1.0, atol=1e-12)


def test_cpe_phases_are_uniform():
    th = cpe_phases(16, 2000, RandomStream(4)).ravel()
    assert abs(np.exp(1j * th).mean()) < 0.02


def test_wishart_is_normalized_and_positive():
    w = wishart(10, RandomStream(5))
    assert np.trace(w).real == pytest.approx(1.0)
    assert_allclose(w, w.conj().T, atol=1e-14)
    assert np.linalg.eigvalsh(w).min() > 0


def test_random_local_has_trivial_content():
    y = random_local(RandomStream(6))
    lam = schmidt_vector(y.matrix)
    assert_allclose(lam, [1, 0, 0, 0], atol=1e-12)


def test_local_stack_shape_and_unitarity():
    ys = local_stack(20, RandomStream(7))
    assert ys.shape == (20, 4, 4)
    for y in ys[:5]:
        assert is_unitary(y)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_sample_gamma_lands_in_stratum(m):
    alphas = sample_gamma_stack(m, 500, RandomStream(m))
    assert alphas.shape == (500, 3)
    for a in alphas[:50]:
        assert is_canonical(a)
        assert chamber_class(a).m == m
    assert np.all(alphas[:, :m] > 0)
    assert np.all(alphas[:, m:] == 0)


def test_sample_gamma_marginals():
    """Active components are iid uniform on [0, pi/4], then sorted."""
    a = sample_gamma_stack(2, 40_000, RandomStream(8))
    # max of two uniforms has mean 2/3 of the range, min has 1/3
    assert a[:, 0].mean() == pytest.approx(np.pi / 4 * 2 / 3, abs=0.003)
    assert a[:, 1].mean() == pytest.approx(np.pi / 4 / 3, abs=0.003)


def test_sample_gamma_single():
    a = sample_gamma(3, RandomStream(9))
    assert a.shape == (3,)
    assert chamber_class(a).m == 3


def test_ensemble_spec_validation():
    EnsembleSpec(EnsembleKind.CUE, subsystem_dim=3, samples=10, seed=0)
    EnsembleSpec(EnsembleKind.GAMMA, subsystem_dim=2, samples=10, seed=0,
                 chamber=2)
    with pytest.raises(ValueError):
        EnsembleSpec(EnsembleKind.GAMMA, subsystem_dim=3, samples=10, seed=0,
                     chamber=2)
    with pytest.raises(ValueError):
        EnsembleSpec(EnsembleKind.GAMMA, subsystem_dim=2, samples=10, seed=0)
