import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subfn.errors import DomainError, ParseError, ShapeError
from subfn.semigroup import (ExtensionPolicy, HeatSemigroup, MatrixSemigroup,
                             StateVector, apply, apply_many, dirichlet_laplacian,
                             generator_apply, increment, periodic_grid, read_matrix_csv,
                             read_state_csv, sup_norm, write_matrix_csv, write_state_csv)

H = 0.05
XS = -20.0 + H * np.arange(801)


def edge_grid(values):
    return StateVector.grid1d(values, H, "constant_edge", -20.0)


def test_state_vector_validation():
    with pytest.raises(DomainError):
        StateVector.finite([1.0, np.nan])
    with pytest.raises(ShapeError):
        StateVector(np.zeros((2, 2)), "finite")
    with pytest.raises(ShapeError):
        StateVector(np.zeros(3), "grid3d")
    with pytest.raises(DomainError):
        StateVector.grid1d(np.zeros(3), 0.0)
    with pytest.raises(ValueError):
        StateVector.grid1d(np.zeros(3), 1.0, "reflecting")
    with pytest.raises(ShapeError):
        StateVector.finite([1.0]).coords()


def test_state_vector_arithmetic():
    a = StateVector.finite([1.0, 2.0])
    b = StateVector.finite([0.5, -1.0])
    np.testing.assert_array_equal((a - b).samples, [0.5, 3.0])
    np.testing.assert_array_equal((2 * a + (-b)).samples, [1.5, 5.0])
    with pytest.raises(ShapeError):
        a + StateVector.finite([1.0, 2.0, 3.0])
    with pytest.raises(ShapeError):
        periodic_grid(np.cos, 8) + edge_grid(np.zeros(8))
    with pytest.raises(ValueError):
        a.samples[0] = 3.0


def test_sup_norm():
    assert sup_norm(StateVector.finite([1.0, -3.0, 2.0])) == 3.0
    assert sup_norm(StateVector.finite(np.zeros(4))) == 0.0
    assert sup_norm(periodic_grid(np.cos)) <= 1.0


def test_matrix_examples():
    x = StateVector.finite([1.0, 1.0])
    T0 = MatrixSemigroup(np.zeros((2, 2)))
    assert apply(T0, 3.0, x).samples.tolist() == [1.0, 1.0]
    assert generator_apply(T0, x).samples.tolist() == [0.0, 0.0]
    T = MatrixSemigroup(np.diag([1.0, 2.0]))
    np.testing.assert_allclose(apply(T, math.log(2.0), x).samples, [0.5, 0.25], rtol=1e-15)
    assert generator_apply(T, x).samples.tolist() == [1.0, 2.0]
    np.testing.assert_allclose(increment(T, math.log(2.0), x).samples, [0.5, 0.75])


def test_matrix_validation():
    with pytest.raises(DomainError):
        MatrixSemigroup([[1.0, 2.0], [0.0, 1.0]])
    with pytest.raises(DomainError):
        MatrixSemigroup(-np.eye(2))
    with pytest.raises(ShapeError):
        MatrixSemigroup(np.ones((2, 3)))
    T = MatrixSemigroup(np.eye(2))
    with pytest.raises(ShapeError):
        apply(T, 1.0, StateVector.finite([1.0, 2.0, 3.0]))
    with pytest.raises(ShapeError):
        apply(T, 1.0, periodic_grid(np.cos, 2))
    with pytest.raises(DomainError):
        apply(T, -1.0, StateVector.finite([1.0, 2.0]))
    with pytest.raises(DomainError):
        apply_many(T, [0.5, -1.0], StateVector.finite([1.0, 2.0]))


def test_matrix_semigroup_law_and_contraction(matrix_testbed, unit_vector):
    _, T = matrix_testbed
    for t in (0.1, 0.5, 1.0):
        for s in (0.1, 0.5, 1.0):
            lhs = apply(T, t, apply(T, s, unit_vector))
            assert sup_norm(lhs - apply(T, t + s, unit_vector)) <= 1e-10
    norms = [sup_norm(apply(T, t, unit_vector)) for t in np.arange(0, 10.001, 0.01)]
    assert max(norms) <= sup_norm(unit_vector) * (1 + 1e-12)


def test_matrix_generator_consistency(matrix_testbed, unit_vector):
    _, T = matrix_testbed
    Ax = generator_apply(T, unit_vector)
    errs = [sup_norm(unit_vector.with_samples((unit_vector.samples
                                               - apply(T, h, unit_vector).samples) / h) - Ax)
            for h in (1e-2, 5e-3, 2.5e-3)]
    for e1, e2 in zip(errs, errs[1:]):
        assert 0.35 <= e2 / e1 <= 0.65


def test_dirichlet_laplacian_is_spd():
    A = dirichlet_laplacian(8, 0.5)
    assert np.allclose(A, A.T)
    assert np.linalg.eigvalsh(A).min() > 0
    assert A[0, 0] == 8.0


def test_heat_preserves_constants():
    T = HeatSemigroup(1)
    for x in (edge_grid(np.full(XS.size, 2.5)), periodic_grid(lambda s: 0 * s + 2.5)):
        for t in (1e-6, 0.01, 1.0, 50.0):
            np.testing.assert_allclose(apply(T, t, x).samples, 2.5, rtol=1e-12)


def test_heat_gaussian_closed_form():
    y = apply(HeatSemigroup(1), 1.0, edge_grid(np.exp(-XS ** 2 / 4)))
    assert abs(y.samples[400] - math.sqrt(0.5)) < 1e-4
    exact = math.sqrt(0.5) * np.exp(-XS ** 2 / 8)
    assert sup_norm(y.samples - exact) < 1e-4


def test_heat_periodic_fourier_mode():
    c = periodic_grid(np.cos)
    for t in (0.1, 1.0, 3.0):
        assert sup_norm(apply(HeatSemigroup(1), t, c) - math.exp(-t) * c) < 1e-4


def test_heat_edge_matches_direct_convolution():
    # against an independent direct sum over the nearest-extended grid
    x = edge_grid(np.tanh(XS) + np.exp(-XS ** 2))
    t = 0.3
    M = int(6 * math.sqrt(2 * t) / H)
    m = np.arange(-M, M + 1)
    K = np.exp(-(m * H) ** 2 / (4 * t))
    K /= K.sum()
    padded = np.pad(x.samples, M, mode="edge")
    direct = np.convolve(padded, K, mode="valid")
    assert sup_norm(apply(HeatSemigroup(1), t, x).samples - direct) < 1e-13


def test_heat_small_time_fallback():
    x = periodic_grid(np.sin, 64)
    t = (x.spacing / 8) ** 2 / 2
    lap = -generator_apply(HeatSemigroup(1), x).samples
    np.testing.assert_allclose(apply(HeatSemigroup(1), t, x).samples, x.samples + t * lap)
    np.testing.assert_allclose(increment(HeatSemigroup(1), t, x).samples, -t * lap)


@pytest.mark.parametrize("make", [lambda: periodic_grid(np.cos),
                                  lambda: edge_grid(np.tanh(XS) + np.exp(-XS ** 2))])
def test_heat_semigroup_law_and_contraction(make):
    x = make()
    T = HeatSemigroup(1)
    for t in (0.1, 0.5, 1.0):
        for s in (0.1, 0.5, 1.0):
            lhs = apply(T, t, apply(T, s, x))
            assert sup_norm(lhs - apply(T, t + s, x)) <= 1e-3 * sup_norm(x)
    times = np.concatenate(([0.0], np.arange(0.01, 10.001, 0.01)))
    assert np.max(np.abs(apply_many(T, times, x))) <= sup_norm(x) * (1 + 1e-12)


def test_heat_strong_continuity():
    x = edge_grid(np.exp(-XS ** 2))
    d = [sup_norm(apply(HeatSemigroup(1), t, x) - x) for t in (1e-1, 1e-2, 1e-3)]
    assert d[0] > d[1] > d[2]


def test_heat_increment_matches_difference():
    for x in (periodic_grid(np.cos), edge_grid(np.exp(-XS ** 2))):
        times = [1e-7, 1e-3, 0.5, 4.0]
        inc = HeatSemigroup(1).increment_many(times, x)
        diff = x.samples - HeatSemigroup(1).apply_many(times, x)
        np.testing.assert_allclose(inc, diff, atol=1e-14)


def test_heat_generator():
    c = periodic_grid(np.cos)
    err = sup_norm(generator_apply(HeatSemigroup(1), c) - c)
    assert err < (2 * math.pi / 512) ** 2


def test_heat_2d():
    n = 64
    h = 2 * math.pi / n
    g = h * np.arange(n)
    X, Y = np.meshgrid(g, g, indexing="ij")
    x = StateVector.grid2d(np.cos(X) * np.cos(2 * Y), h, "periodic")
    T = HeatSemigroup(2)
    assert sup_norm(apply(T, 0.2, x) - math.exp(-5 * 0.2) * x) < 1e-3
    inc = T.increment_many([0.2], x)[0]
    np.testing.assert_allclose(inc, x.samples - apply(T, 0.2, x).samples, atol=1e-14)
    e = StateVector.grid2d(np.ones((20, 20)), 0.1, "constant_edge")
    np.testing.assert_allclose(apply(T, 0.3, e).samples, 1.0, rtol=1e-13)
    gen = generator_apply(T, x)
    assert sup_norm(gen - 5 * x) < 5 * h * h
    with pytest.raises(ShapeError):
        apply(T, 1.0, periodic_grid(np.cos))
    with pytest.raises(DomainError):
        HeatSemigroup(3)


def test_state_csv_round_trip(tmp_path):
    states = [
        StateVector.finite([1 / 3, -2e-300, math.pi]),
        StateVector.grid1d(np.sin(np.arange(5.0)), 0.1, "periodic", -0.2),
        StateVector.grid2d(np.arange(12.0).reshape(3, 4) / 7, 0.25, "constant_edge",
                           (1.0, -1.0)),
    ]
    for x in states:
        path = tmp_path / "x.csv"
        write_state_csv(x, path)
        ext = x.extension.value if x.extension else "constant_edge"
        back = read_state_csv(path, extension=ext)
        assert back.kind == x.kind
        assert back.samples.tobytes() == x.samples.tobytes()
        if x.kind != "finite":
            assert back.extension == x.extension
            assert abs(back.spacing - x.spacing) <= 1e-12 * x.spacing


@pytest.mark.parametrize("text", [
    "",
    "a,b\n1,2\n",
    "x,value\n0,1\n",
    "x,value\n0,1\n1,2\n3,3\n",
    "i,value\n0,abc\n",
    "x,y,value\n0,0,1\n0,1,1\n1,0,1\n",
    "x,y,value\n0,0,1\n0,2,1\n1,0,1\n1,2,1\n",
])
def test_state_csv_rejects_bad_input(text):
    with pytest.raises(ParseError):
        read_state_csv(io.StringIO(text))


def test_matrix_csv(tmp_path):
    A = dirichlet_laplacian(4)
    path = tmp_path / "A.csv"
    write_matrix_csv(A, path)
    np.testing.assert_array_equal(read_matrix_csv(path), A)
    for bad in ("1,2\n3,4\n", "1,2,3\n", "1,x\nx,1\n"):
        with pytest.raises(ParseError):
            read_matrix_csv(io.StringIO(bad))


@settings(max_examples=40, deadline=None)
@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(0.0, 3.0))
def test_heat_is_linear(a, b, t):
    u = periodic_grid(np.cos, 64)
    v = periodic_grid(lambda s: np.sin(3 * s) ** 2, 64)
    T = HeatSemigroup(1)
    lhs = apply(T, t, a * u + b * v)
    rhs = a * apply(T, t, u) + b * apply(T, t, v)
    assert sup_norm(lhs - rhs) <= 1e-13 * (1 + abs(a) + abs(b))


def test_extension_policy_values():
    assert ExtensionPolicy("periodic") is ExtensionPolicy.PERIODIC
