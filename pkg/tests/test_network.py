import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phnet.exceptions import ConfigError, ShapeError
from phnet.network import (
    MlpNetwork,
    forward,
    init_weights,
    jacobian,
    parameter_count,
    tansig,
    unpack,
)

# tanh(0.5) from a 30-digit mpmath evaluation
TANH_HALF = 0.462117157260009758502318483644


def straight_line_forward(net, x):
    """Loop-by-loop evaluation kept independent of the vectorized path."""
    hidden = []
    for j in range(net.n_hidden):
        s = net.b1[j]
        for k in range(net.n_in):
            s += net.W1[j][k] * x[k]
        hidden.append(math.tanh(s))
    out = []
    for o in range(net.n_out):
        s = net.b2[o]
        for j in range(net.n_hidden):
            s += net.W2[o][j] * hidden[j]
        out.append(s)
    return out


def central_differences(net, X, step=1e-6):
    p0 = net.pack()
    cols = []
    for i in range(p0.size):
        up, dn = p0.copy(), p0.copy()
        up[i] += step
        dn[i] -= step
        cols.append((forward(net.with_params(up), X).ravel() - forward(net.with_params(dn), X).ravel()) / (2 * step))
    return np.stack(cols, axis=1)


def random_net(r, n_in, n_hidden, n_out=1):
    return MlpNetwork(
        r.normal(size=(n_hidden, n_in)),
        r.normal(size=n_hidden),
        r.normal(size=(n_out, n_hidden)),
        r.normal(size=n_out),
    )


def test_tansig_values():
    assert tansig(0.0) == 0.0
    assert abs(tansig(20.0) - 1.0) <= 1e-12
    assert tansig(50.0) == 1.0 and tansig(-1e308) == -1.0
    assert abs(tansig(0.5) - TANH_HALF) <= 1e-15


def test_tansig_no_overflow():
    with np.errstate(all="raise"):
        y = tansig(np.array([-1e300, -710.0, 0.0, 710.0, 1e300]))
    np.testing.assert_array_equal(y, [-1.0, -1.0, 0.0, 1.0, 1.0])


@settings(max_examples=200)
@given(st.floats(-1e6, 1e6, allow_nan=False))
def test_tansig_odd(x):
    assert abs(tansig(-x) + tansig(x)) <= 1e-15


def test_tansig_monotone(rng):
    x = np.sort(rng.uniform(-10, 10, size=1000))
    assert np.all(np.diff(tansig(x)) >= 0)
    np.testing.assert_allclose(tansig(x), np.tanh(x), rtol=0, atol=2e-16 * 4)


def test_parameter_count():
    net = init_weights(17, 10, 1, seed=0)
    assert net.parameter_count == 10 * 17 + 10 + 10 + 1 == parameter_count(17, 10, 1)


def test_forward_zero_network(rng):
    net = MlpNetwork(np.zeros((4, 3)), np.zeros(4), np.zeros((1, 4)), np.zeros(1))
    assert forward(net, rng.normal(size=3))[0] == 0.0


def test_forward_constant_hidden_layer(rng):
    b, w, c = np.array([0.3, -1.2]), np.array([[0.7, 2.0]]), np.array([0.25])
    net = MlpNetwork(np.zeros((2, 5)), b, w, c)
    expected = 0.7 * tansig(0.3) + 2.0 * tansig(-1.2) + 0.25
    assert forward(net, rng.normal(size=5))[0] == pytest.approx(expected, abs=1e-15)


def test_forward_matches_straight_line(rng):
    for _ in range(20):
        net = random_net(rng, 3, 4, 1)
        x = rng.normal(size=3)
        np.testing.assert_allclose(forward(net, x), straight_line_forward(net, x), rtol=1e-13, atol=1e-14)
    net = random_net(rng, 5, 3, 2)
    X = rng.normal(size=(7, 5))
    np.testing.assert_allclose(forward(net, X), [straight_line_forward(net, x) for x in X], rtol=1e-13, atol=1e-14)


def test_forward_shape_error():
    with pytest.raises(ShapeError):
        forward(init_weights(3, 2, 1), np.ones(4))


def test_forward_positively_homogeneous_in_output_layer(rng):
    net = random_net(rng, 4, 5)
    x = rng.normal(size=4)
    assert forward(net.scaled_output(2.0), x)[0] == 2.0 * forward(net, x)[0]


def test_pack_unpack_bijection(rng):
    net = random_net(rng, 6, 4, 2)
    p = net.pack()
    again = unpack(p, 6, 4, 2)
    assert again.pack().tobytes() == p.tobytes()
    for a, b in ((net.W1, again.W1), (net.b1, again.b1), (net.W2, again.W2), (net.b2, again.b2)):
        assert a.tobytes() == b.tobytes()
    with pytest.raises(ShapeError):
        unpack(p[:-1], 6, 4, 2)


def test_pack_order():
    net = MlpNetwork([[1.0, 2.0], [3.0, 4.0]], [5.0, 6.0], [[7.0, 8.0]], [9.0])
    np.testing.assert_array_equal(net.pack(), np.arange(1.0, 10.0))


def test_jacobian_zero_network():
    net = MlpNetwork(np.zeros((3, 2)), np.zeros(3), np.zeros((1, 3)), np.zeros(1))
    J = jacobian(net, np.array([[0.4, -0.3]]))
    db2 = J[0, -1]
    dW2 = J[0, 3 * 2 + 3:3 * 2 + 3 + 3]
    assert db2 == 1.0
    np.testing.assert_array_equal(dW2, 0.0)
    np.testing.assert_array_equal(J[0, :9], 0.0)


def test_jacobian_single_path_hand_chain_rule():
    # only hidden unit 0 is connected; it sits at tansig's origin (net input 0)
    W1 = np.array([[0.0, 0.0], [0.0, 0.0]])
    b1 = np.zeros(2)
    W2 = np.array([[1.5, 0.0]])
    net = MlpNetwork(W1, b1, W2, [0.0])
    x = np.array([0.8, -2.0])
    J = jacobian(net, x[None, :])[0]
    # dy/dW1[0,k] = W2[0,0] * (1 - tanh(0)^2) * x_k = 1.5 * x_k
    np.testing.assert_array_equal(J[0:2], [1.5 * 0.8, 1.5 * -2.0])
    np.testing.assert_array_equal(J[2:4], 0.0)  # unit 1 has no outgoing weight
    assert J[4] == 1.5  # dy/db1[0]
    assert J[5] == 0.0
    np.testing.assert_array_equal(J[6:8], [0.0, 0.0])  # tanh(0) for both units
    assert J[8] == 1.0


def test_jacobian_matches_finite_differences(rng):
    net = random_net(rng, 4, 3, 2)
    X = rng.uniform(-1, 1, size=(5, 4))
    J = jacobian(net, X)
    assert J.shape == (10, net.parameter_count)
    fd = central_differences(net, X)
    assert np.all(np.abs(J - fd) <= np.maximum(1e-6 * np.abs(fd), 1e-8))


def test_jacobian_errors():
    net = init_weights(2, 2, 1)
    with pytest.raises(ShapeError):
        jacobian(net, np.empty((0, 2)))
    with pytest.raises(ShapeError):
        jacobian(net, np.ones((3, 5)))


def test_init_weights_deterministic_and_bounded():
    a = init_weights(4, 6, 1, seed=5)
    b = init_weights(4, 6, 1, seed=5)
    assert a.pack().tobytes() == b.pack().tobytes()
    assert np.all(np.abs(a.W1) <= 0.5)
    assert np.all(np.abs(a.W2) <= 1 / math.sqrt(6))
    assert np.all(a.b1 == 0) and np.all(a.b2 == 0)
    assert np.any(init_weights(4, 6, 1, seed=6).pack() != a.pack())


@pytest.mark.parametrize("args", [(0, 3, 1), (3, 0, 1), (3, 3, 0), (-1, 2, 1), (2.5, 2, 1)])
def test_init_weights_bad_counts(args):
    with pytest.raises(ConfigError):
        init_weights(*args)


def test_network_rejects_non_finite():
    with pytest.raises(ValueError):
        MlpNetwork([[np.inf]], [0.0], [[1.0]], [0.0])


def test_network_is_immutable(rng):
    net = random_net(rng, 2, 2)
    with pytest.raises(ValueError):
        net.W1[0, 0] = 1.0
