import numpy as np
import pytest
import hypothesis.strategies as st
from hypothesis import given
from scipy.signal import freqs

from tds import (DelayDdeForm, GltiModel, from_delay_dde, make_tf, normalize, pure_delay,
                 ss, static_gain, tf, to_glti)
from tds.errors import DimensionError, IllPosedError, ModelError
from tds.model import close_delays, is_normalized, lft_eval

from conftest import random_glti, rel_err, seeds


def _omegas(rng, k=50):
    return 10 ** rng.uniform(-2, 2, size=k)


def _direct_ss(A, B, C, D, s):
    n = A.shape[0]
    return D + C @ np.linalg.solve(s * np.eye(n) - A, B)


def test_lft_eval_without_channels_is_m11():
    M11 = np.array([[2.0 + 1j]])
    out = lft_eval(M11, np.zeros((1, 0)), np.zeros((0, 1)), np.zeros((0, 0)), np.zeros((0, 0)))
    assert out == M11


def test_lft_eval_scalar():
    # 1 + 2 * th * 3 / (1 - 0.5 th)
    th = 0.4
    out = lft_eval([[1.0]], [[2.0]], [[3.0]], [[0.5]], [[th]])
    assert out[0, 0] == pytest.approx(1 + 6 * th / (1 - 0.5 * th))


def test_lft_eval_singular_raises():
    with pytest.raises(IllPosedError) as exc:
        lft_eval([[0.0]], [[1.0]], [[1.0]], [[1.0]], [[1.0]])
    assert exc.value.theta is not None


def test_model_validates_shapes():
    with pytest.raises(DimensionError):
        GltiModel(np.eye(2), np.ones((3, 1)), None, np.ones((1, 2)), None, np.zeros((1, 1)),
                  None, None, None)
    with pytest.raises(ModelError):
        pure_delay(-1.0)


def test_arrays_are_read_only(tank):
    with pytest.raises(ValueError):
        tank.A[0, 0] = 1.0


def test_tank_plant_structure(tank):
    assert tank.n_states == 1 and tank.n_delays == 1
    assert tank.tau[0] == pytest.approx(93.9)
    s = 0.013j
    assert tank.evaluate(s)[0, 0] == pytest.approx(5.6 / (40.2 * s + 1) * np.exp(-93.9 * s), rel=1e-12)


@given(seeds)
def test_tf_realization_matches_defining_formula(seed):
    rng = np.random.default_rng(seed)
    p, m = rng.integers(1, 3, size=2)
    num, den = [], []
    for _ in range(p):
        nr, dr = [], []
        for _ in range(m):
            order = rng.integers(0, 4)
            dr.append(np.concatenate([[1.0], rng.uniform(0.5, 3, size=order)]))
            nr.append(rng.normal(size=rng.integers(1, order + 2)))
        num.append(nr)
        den.append(dr)
    t = make_tf(num, den, io_delay=rng.uniform(0, 2, size=(p, m)),
                input_delay=rng.uniform(0, 1, size=m), output_delay=rng.uniform(0, 1, size=p))
    g = to_glti(t)
    for w in _omegas(rng):
        assert rel_err(g.evaluate(1j * w), t.evaluate(1j * w)) < 1e-10


def test_tf_against_scipy_freqs():
    g = tf([1.0, 2.0], [1.0, 3.0, 5.0, 1.0])
    w = np.logspace(-2, 2, 60)
    _, h = freqs([1.0, 2.0], [1.0, 3.0, 5.0, 1.0], worN=w)
    got = np.array([g.evaluate(1j * x)[0, 0] for x in w])
    assert rel_err(got, h) < 1e-12


def test_static_tf_has_no_states():
    g = tf(3.0, 2.0)
    assert g.n_states == 0 and g.D11[0, 0] == 1.5


def test_improper_tf_rejected():
    with pytest.raises(ModelError):
        tf([1.0, 0.0, 0.0], [1.0, 1.0])


@given(seeds)
def test_dde_embedding_matches_quasipolynomial(seed):
    rng = np.random.default_rng(seed)
    n, m, p = rng.integers(1, 4), rng.integers(1, 3), rng.integers(1, 3)
    terms = []
    for _ in range(rng.integers(1, 4)):
        theta = float(rng.choice([0.5, 1.0, 1.7]))
        use = rng.integers(0, 2, size=4)
        terms.append((theta,
                      rng.normal(size=(n, n)) if use[0] else None,
                      rng.normal(size=(n, m)) if use[1] else None,
                      rng.normal(size=(p, n)) if use[2] else None,
                      rng.normal(size=(p, m)) if use[3] else None))
    d = DelayDdeForm.build(rng.normal(size=(n, n)), rng.normal(size=(n, m)),
                           rng.normal(size=(p, n)), rng.normal(size=(p, m)), terms)
    g = from_delay_dde(d)
    for w in _omegas(rng):
        assert rel_err(g.evaluate(1j * w), d.evaluate(1j * w)) < 1e-10


def test_dde_retarded_scalar():
    # x' = -x(t-1): characteristic 1/(s + e^{-s})
    d = DelayDdeForm.build([[0.0]], [[1.0]], [[1.0]], [[0.0]], [(1.0, [[-1.0]], None, None, None)])
    g = from_delay_dde(d)
    s = 0.7j
    assert g.evaluate(s)[0, 0] == pytest.approx(1 / (s + np.exp(-s)), rel=1e-12)
    assert g.D22.any() == False  # noqa: E712


@given(seeds)
def test_normalize_idempotent_and_response_preserving(seed):
    rng = np.random.default_rng(seed)
    g = random_glti(rng, q=rng.integers(1, 5), d22=0.2)
    # force duplicate and zero delays
    tau = g.tau.copy()
    if tau.size >= 2:
        tau[1] = tau[0]
    tau[-1] = 0.0 if rng.uniform() < 0.5 else tau[-1]
    g = GltiModel(g.A, g.B1, g.B2, g.C1, g.C2, g.D11, g.D12, g.D21, g.D22, tau)
    n1 = normalize(g)
    n2 = normalize(n1)
    assert is_normalized(n1)
    assert n1.n_channels <= g.n_channels
    for f in ("A", "B1", "B2", "C1", "C2", "D11", "D12", "D21", "D22", "tau"):
        np.testing.assert_array_equal(getattr(n1, f), getattr(n2, f))
    assert n1.delay_widths == n2.delay_widths
    for w in _omegas(rng, 20):
        assert rel_err(n1.evaluate(1j * w), g.evaluate(1j * w)) < 1e-12


def test_normalize_merges_equal_delays():
    g = pure_delay(2.0) * 3.0 + pure_delay(2.0)
    n = normalize(g)
    assert list(n.tau) == [2.0] and n.delay_widths == (2,)
    assert n.evaluate(0.3j)[0, 0] == pytest.approx(4 * np.exp(-0.6j))
    assert g.n_channels == 2


@given(seeds)
def test_delay_free_models_match_state_space(seed):
    rng = np.random.default_rng(seed)
    g = random_glti(rng, q=0)
    h = ss(g.A, g.B1, g.C1, g.D11)
    n = normalize(h)
    for w in _omegas(rng, 10):
        s = 1j * w
        ref = _direct_ss(g.A, g.B1, g.C1, g.D11, s) if g.n_states else g.D11
        assert rel_err(n.evaluate(s), ref) < 1e-12
        assert rel_err(close_delays(n).evaluate(s), ref) < 1e-12


def test_close_delays_dc(tank):
    z = close_delays(tank)
    assert z.n_delays == 0
    assert z.evaluate(0.0)[0, 0] == pytest.approx(5.6)


def test_arithmetic_operators(tank):
    s = 0.02j
    P = tank.evaluate(s)[0, 0]
    assert (2 * tank).evaluate(s)[0, 0] == pytest.approx(2 * P)
    assert (tank + 1).evaluate(s)[0, 0] == pytest.approx(P + 1)
    assert (1 - tank).evaluate(s)[0, 0] == pytest.approx(1 - P)
    assert (tank / 2).evaluate(s)[0, 0] == pytest.approx(P / 2)
    assert (-tank).evaluate(s)[0, 0] == pytest.approx(-P)


def test_names_validated():
    with pytest.raises(DimensionError):
        static_gain([[1.0, 2.0]], input_names=["a"])
