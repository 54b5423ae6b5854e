import numpy as np
import pytest
from hypothesis import given

from tds import (GltiModel, ModelArray, SumJunction, append, cases, connect, feedback, inverse,
                 lft, parallel, pure_delay, series, stack, static_gain, tf)
from tds.errors import ConnectError, DimensionError, IllPosedError

from conftest import random_glti, rel_err, seeds


def _omegas(rng, k=50):
    return 10 ** rng.uniform(-2, 2, size=k)


def _pair(rng, same_shape=False, chain=False):
    g1 = random_glti(rng)
    if same_shape:
        g2 = random_glti(rng, p=g1.n_outputs, m=g1.n_inputs)
    elif chain:
        g2 = random_glti(rng, m=g1.n_outputs)
    else:
        g2 = random_glti(rng, p=g1.n_inputs, m=g1.n_outputs)
    return g1, g2


@given(seeds)
def test_series_homomorphism(seed):
    rng = np.random.default_rng(seed)
    g1, g2 = _pair(rng, chain=True)
    g = series(g1, g2)
    assert isinstance(g, GltiModel)
    assert g.n_channels == g1.n_channels + g2.n_channels
    for w in _omegas(rng):
        s = 1j * w
        assert rel_err(g.evaluate(s), g2.evaluate(s) @ g1.evaluate(s)) < 1e-10


@given(seeds)
def test_parallel_homomorphism(seed):
    rng = np.random.default_rng(seed)
    g1, g2 = _pair(rng, same_shape=True)
    g = parallel(g1, g2)
    assert g.n_channels == g1.n_channels + g2.n_channels
    for w in _omegas(rng):
        s = 1j * w
        assert rel_err(g.evaluate(s), g1.evaluate(s) + g2.evaluate(s)) < 1e-10


@given(seeds)
def test_feedback_homomorphism(seed):
    rng = np.random.default_rng(seed)
    g1, g2 = _pair(rng)
    # keep the static loop well conditioned
    g2 = GltiModel(g2.A, g2.B1, g2.B2, g2.C1, g2.C2, 0.1 * g2.D11, 0.1 * g2.D12, g2.D21,
                   g2.D22, g2.tau)
    sign = float(rng.choice([-1.0, 1.0]))
    g = feedback(g1, g2, sign)
    assert g.n_channels == g1.n_channels + g2.n_channels
    for w in _omegas(rng):
        s = 1j * w
        G, H = g1.evaluate(s), g2.evaluate(s)
        ref = np.linalg.solve(np.eye(G.shape[0]) - sign * G @ H, G)
        assert rel_err(g.evaluate(s), ref) < 1e-10


@given(seeds)
def test_append_and_lft_homomorphism(seed):
    rng = np.random.default_rng(seed)
    g1 = random_glti(rng, p=3, m=3)
    g2 = random_glti(rng, p=1, m=1)
    a = append(g1, g2)
    k = lft(g1, 0.2 * g2, 1, 1)
    for w in _omegas(rng, 20):
        s = 1j * w
        G1, G2 = g1.evaluate(s), 0.2 * g2.evaluate(s)
        ref = np.zeros((4, 4), dtype=complex)
        ref[:3, :3], ref[3:, 3:] = G1, g2.evaluate(s)
        assert rel_err(a.evaluate(s), ref) < 1e-10
        lref = G1[:2, :2] + G1[:2, 2:] @ G2 @ np.linalg.solve(np.eye(1) - G1[2:, 2:] @ G2, G1[2:, :2])
        assert rel_err(k.evaluate(s), lref) < 1e-9


@given(seeds)
def test_inverse_homomorphism(seed):
    rng = np.random.default_rng(seed)
    g = random_glti(rng, p=2, m=2)
    g = GltiModel(g.A, g.B1, g.B2, g.C1, g.C2, g.D11 + 3 * np.eye(2), g.D12, g.D21, g.D22, g.tau)
    gi = inverse(g)
    for w in _omegas(rng, 10):
        s = 1j * w
        assert rel_err(gi.evaluate(s) @ g.evaluate(s), np.eye(2)) < 1e-9


def test_inverse_needs_feedthrough():
    with pytest.raises(IllPosedError):
        inverse(tf(1.0, [1.0, 1.0]))


def test_series_dimension_check():
    with pytest.raises(DimensionError):
        series(static_gain(np.ones((2, 1))), static_gain(np.ones((1, 1))))


def test_pi_loop_connect_matches_manual(tank):
    C = cases.pi_controller().with_names(["e"], ["u"])
    blocks = [tank, C, SumJunction((1, -1), ("r", "y"), "e")]
    T = connect(blocks, ["r"], ["y"])
    manual = cases.pi_loop()
    for w in np.logspace(-4, 0, 50):
        assert rel_err(T.evaluate(1j * w), manual.evaluate(1j * w)) < 1e-10


def test_smith_connect_matches_closed_form(tank):
    T = cases.smith_loop()
    for w in np.logspace(-4, 0, 50):
        s = 1j * w
        P = tank.evaluate(s)[0, 0]
        Gp = 5.6 / (40.2 * s + 1)
        Dp = np.exp(-93.9 * s)
        C = 0.5 * (1 + 1 / (40 * s))
        F = 1 / (20 * s + 1)
        ref = P * C / (1 + C * Gp + C * F * (P - Dp * Gp))
        assert T.evaluate(s)[0, 0] == pytest.approx(ref, rel=1e-10)


def test_connect_maps_model_arrays(smith_array):
    assert isinstance(smith_array, ModelArray) and smith_array.array_dim == 3
    single = cases.smith_loop(cases.tank_plant(5.0, 38.0, 90.0))
    s = 0.03j
    assert rel_err(smith_array[1].evaluate(s), single.evaluate(s)) < 1e-12


def test_connect_rejects_double_driver():
    a = static_gain(1.0, ["x"], ["y"])
    b = static_gain(2.0, ["x"], ["y"])
    with pytest.raises(ConnectError):
        connect([a, b], ["x"], ["y"])


def test_connect_rejects_undriven_signal():
    a = static_gain(1.0, ["x"], ["y"])
    with pytest.raises(ConnectError):
        connect([a], ["r"], ["y"])


def test_connect_rejects_unknown_output():
    a = static_gain(1.0, ["x"], ["y"])
    with pytest.raises(ConnectError):
        connect([a], ["x"], ["nope"])


def test_connect_names_are_case_sensitive():
    a = static_gain(1.0, ["x"], ["y"])
    with pytest.raises(ConnectError):
        connect([a], ["X"], ["y"])


def test_connect_external_input_as_output():
    a = static_gain(2.0, ["x"], ["y"])
    g = connect([a], ["x"], ["y", "x"])
    np.testing.assert_allclose(g.evaluate(0.0), [[2.0], [1.0]])


def test_connect_algebraic_loop_is_ill_posed():
    a = static_gain(1.0, ["e"], ["y"])
    s = SumJunction((1, 1), ("r", "y"), "e")
    with pytest.raises(IllPosedError):
        connect([a, s], ["r"], ["y"])


def test_stack_requires_equal_shapes():
    with pytest.raises(DimensionError):
        stack(static_gain(1.0), static_gain(np.ones((2, 1))))


def test_sum_junction_model():
    g = SumJunction((1, -1, -1), ("a", "b", "c"), "e").to_model()
    np.testing.assert_array_equal(g.D11, [[1, -1, -1]])


def test_delay_count_preserved_before_normalize():
    g = series(pure_delay(1.0), series(pure_delay(2.0), pure_delay(1.0)))
    assert g.n_delays == 3
