"""Single-hidden-layer perceptron: tansig hidden units, linear output.

Parameters are flattened in a fixed order, used by every optimizer and by the
model file::

    W1 (n_hidden x n_in, row-major), b1 (n_hidden),
    W2 (n_out x n_hidden, row-major), b2 (n_out)
"""

from dataclasses import dataclass, replace

import numpy as np

from .exceptions import ConfigError, ShapeError

SATURATION = 20.0


def tansig(x):
    """Hyperbolic-tangent sigmoid ``2 / (1 + exp(-2x)) - 1``.

    Evaluated on ``|x|`` and sign-restored, so it is exactly odd and the
    exponential never overflows. Beyond ``|x| > 20`` the result is +-1.
    """
    x = np.asarray(x, dtype=np.float64)
    ax = np.minimum(np.abs(x), SATURATION)
    y = 2.0 / (1.0 + np.exp(-2.0 * ax)) - 1.0
    y = np.where(np.abs(x) > SATURATION, 1.0, y)
    return np.copysign(y, x) if y.ndim else float(np.copysign(y, x))


def tansig_derivative_from_output(h):
    return 1.0 - h * h


@dataclass(frozen=True)
class MlpNetwork:
    W1: np.ndarray
    b1: np.ndarray
    W2: np.ndarray
    b2: np.ndarray

    def __post_init__(self):
        W1 = np.array(self.W1, dtype=np.float64, ndmin=2)
        W2 = np.array(self.W2, dtype=np.float64, ndmin=2)
        b1 = np.array(self.b1, dtype=np.float64).reshape(-1)
        b2 = np.array(self.b2, dtype=np.float64).reshape(-1)
        n_hidden = W1.shape[0]
        if b1.shape != (n_hidden,) or W2.shape[1] != n_hidden or b2.shape != (W2.shape[0],):
            raise ShapeError(
                f"inconsistent layer shapes W1{W1.shape} b1{b1.shape} W2{W2.shape} b2{b2.shape}"
            )
        for name, arr in (("W1", W1), ("b1", b1), ("W2", W2), ("b2", b2)):
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} contains NaN or Inf")
            arr.flags.writeable = False
        object.__setattr__(self, "W1", W1)
        object.__setattr__(self, "b1", b1)
        object.__setattr__(self, "W2", W2)
        object.__setattr__(self, "b2", b2)

    @property
    def n_in(self):
        return self.W1.shape[1]

    @property
    def n_hidden(self):
        return self.W1.shape[0]

    @property
    def n_out(self):
        return self.W2.shape[0]

    @property
    def parameter_count(self):
        return parameter_count(self.n_in, self.n_hidden, self.n_out)

    def pack(self):
        return np.concatenate([self.W1.ravel(), self.b1, self.W2.ravel(), self.b2])

    def with_params(self, params):
        return unpack(params, self.n_in, self.n_hidden, self.n_out)

    def scaled_output(self, c):
        return replace(self, W2=c * self.W2, b2=c * self.b2)


def parameter_count(n_in, n_hidden, n_out):
    return n_hidden * n_in + n_hidden + n_out * n_hidden + n_out


def unpack(params, n_in, n_hidden, n_out):
    p = np.asarray(params, dtype=np.float64)
    expected = parameter_count(n_in, n_hidden, n_out)
    if p.shape != (expected,):
        raise ShapeError(f"parameter vector has shape {p.shape}, expected ({expected},)")
    i = 0
    W1 = p[i:i + n_hidden * n_in].reshape(n_hidden, n_in)
    i += n_hidden * n_in
    b1 = p[i:i + n_hidden]
    i += n_hidden
    W2 = p[i:i + n_out * n_hidden].reshape(n_out, n_hidden)
    i += n_out * n_hidden
    return MlpNetwork(W1, b1, W2, p[i:])


def init_weights(n_in, n_hidden, n_out=1, seed=0):
    """Uniform weights in ``[-1/sqrt(fan_in), 1/sqrt(fan_in)]``, zero biases."""
    for name, v in (("n_in", n_in), ("n_hidden", n_hidden), ("n_out", n_out)):
        if int(v) != v or v <= 0:
            raise ConfigError(f"{name} must be a positive integer, got {v!r}")
    rng = np.random.default_rng(seed)
    lim1 = 1.0 / np.sqrt(n_in)
    lim2 = 1.0 / np.sqrt(n_hidden)
    W1 = rng.uniform(-lim1, lim1, size=(n_hidden, n_in))
    W2 = rng.uniform(-lim2, lim2, size=(n_out, n_hidden))
    return MlpNetwork(W1, np.zeros(n_hidden), W2, np.zeros(n_out))


def _as_batch(net, X):
    X = np.asarray(X, dtype=np.float64)
    single = X.ndim == 1
    X = np.atleast_2d(X)
    if X.ndim != 2 or X.shape[1] != net.n_in:
        raise ShapeError(f"network expects {net.n_in} inputs, got array of shape {X.shape}")
    return X, single


def forward(net, X):
    """Network output for one normalized input vector or a batch of them."""
    X, single = _as_batch(net, X)
    H = tansig(X @ net.W1.T + net.b1)
    Y = H @ net.W2.T + net.b2
    return Y[0] if single else Y


def jacobian(net, X):
    """Derivatives of every output with respect to every parameter.

    Row ``i * n_out + o`` holds d(output o of sample i)/d(params) in packed
    order, obtained by backpropagating through the hidden layer.
    """
    X, _ = _as_batch(net, X)
    n = X.shape[0]
    if n == 0:
        raise ShapeError("jacobian needs a non-empty batch")
    n_in, n_h, n_out = net.n_in, net.n_hidden, net.n_out
    H = tansig(X @ net.W1.T + net.b1)  # (n, n_h)
    dH = tansig_derivative_from_output(H)

    J = np.zeros((n, n_out, net.parameter_count))
    # error signal reaching each hidden pre-activation, per output
    delta = net.W2[None, :, :] * dH[:, None, :]  # (n, n_out, n_h)
    i = 0
    J[:, :, i:i + n_h * n_in] = (delta[:, :, :, None] * X[:, None, None, :]).reshape(
        n, n_out, n_h * n_in
    )
    i += n_h * n_in
    J[:, :, i:i + n_h] = delta
    i += n_h
    for o in range(n_out):
        J[:, o, i + o * n_h:i + (o + 1) * n_h] = H
    i += n_out * n_h
    J[:, np.arange(n_out), i + np.arange(n_out)] = 1.0
    return J.reshape(n * n_out, -1)
