import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from swgalerkin.mesh import Mesh, make_mesh, quasiuniform_mesh_a, quasiuniform_mesh_b, uniform_mesh


def test_uniform_examples():
    np.testing.assert_array_equal(uniform_mesh(4).breakpoints, [0, 0.25, 0.5, 0.75, 1])
    np.testing.assert_array_equal(uniform_mesh(1).breakpoints, [0, 1])
    m = uniform_mesh(60)
    assert m.h_max == pytest.approx(1 / 60, rel=1e-14)
    assert m.quasiuniformity_ratio == pytest.approx(1.0, rel=1e-12)


def test_mesh_a_examples():
    np.testing.assert_allclose(quasiuniform_mesh_a(4).breakpoints, [0, 0.3, 0.5, 0.8, 1.0], atol=1e-15)
    np.testing.assert_allclose(quasiuniform_mesh_a(2).breakpoints, [0, 0.6, 1.0], atol=1e-15)
    assert quasiuniform_mesh_a(160).quasiuniformity_ratio == pytest.approx(1.5, rel=1e-12)


def test_mesh_b_examples():
    m = quasiuniform_mesh_b(3)
    assert m.h == pytest.approx(0.4)
    np.testing.assert_allclose(m.breakpoints, [0, 0.2, 0.8, 1.0], atol=1e-15)
    m = quasiuniform_mesh_b(9)
    h = 2 / 17
    lengths = m.element_lengths
    np.testing.assert_allclose(lengths[::2], h / 2, rtol=1e-12)
    np.testing.assert_allclose(lengths[1::2], 1.5 * h, rtol=1e-12)
    assert (lengths[::2].size, lengths[1::2].size) == (5, 4)
    assert 5 * h / 2 + 4 * 1.5 * h == pytest.approx(1.0, abs=1e-15)
    assert m.quasiuniformity_ratio == pytest.approx(3.0, rel=1e-12)


@pytest.mark.parametrize("ctor, N", [(uniform_mesh, 0), (quasiuniform_mesh_a, 3), (quasiuniform_mesh_b, 4),
                                     (quasiuniform_mesh_b, 0)])
def test_invalid_N(ctor, N):
    with pytest.raises(ValueError):
        ctor(N)


def test_make_mesh_unknown_family():
    with pytest.raises(ValueError):
        make_mesh("graded", 4)


def test_mesh_rejects_bad_breakpoints():
    with pytest.raises(ValueError):
        Mesh(np.array([0.0, 0.5, 0.5, 1.0]))
    with pytest.raises(ValueError):
        Mesh(np.array([0.1, 1.0]))


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=1, max_value=50_000))
def test_constructor_invariants(n):
    meshes = [uniform_mesh(n), quasiuniform_mesh_a(2 * n), quasiuniform_mesh_b(2 * n - 1)]
    for m in meshes:
        x = m.breakpoints
        assert x[0] == 0.0 and x[-1] == 1.0
        assert np.all(np.diff(x) > 0)
        assert abs(m.element_lengths.sum() - 1.0) < 1e-13
    assert meshes[0].quasiuniformity_ratio < 1 + 1e-9
    assert meshes[1].h_max == pytest.approx(1.2 / (2 * n), rel=1e-12)
    if 2 * n - 1 > 1:
        assert meshes[1].quasiuniformity_ratio <= 1.5 + 1e-9
        assert meshes[2].h_max == pytest.approx(3 / (2 * (2 * n - 1) - 1), rel=1e-12)
        assert meshes[2].quasiuniformity_ratio <= 3 + 1e-9


def test_csv_roundtrip(tmp_path):
    m = quasiuniform_mesh_b(5)
    m.to_csv(tmp_path / "mesh.csv")
    x = np.loadtxt(tmp_path / "mesh.csv", skiprows=1)
    np.testing.assert_array_equal(x, m.breakpoints)


def test_locate_right_end():
    m = uniform_mesh(4)
    np.testing.assert_array_equal(m.locate([0.0, 0.25, 0.3, 1.0]), [0, 1, 1, 3])
