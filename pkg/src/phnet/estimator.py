"""scikit-learn compatible wrapper around the network and its trainers."""

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted, validate_data

from .dataset import MinMaxNormalizer
from .network import forward, init_weights
from .training import TrainConfig, train


class MLPRegressorLM(RegressorMixin, BaseEstimator):
    """One-hidden-layer tansig/linear perceptron trained by Levenberg-Marquardt.

    Inputs and targets are min-max scaled to [-1, 1] on the data passed to
    ``fit``; ``predict`` returns values in the original target units.

    Parameters
    ----------
    n_hidden : int, default=10
        Number of tansig hidden units.
    max_epochs, mse_goal, lambda_init, lambda_up, lambda_down, lambda_max,
    min_grad_norm, algorithm, learning_rate
        Forwarded to :class:`~phnet.training.TrainConfig`. ``mse_goal`` is on
        the normalized target scale.
    random_state : int, default=0
        Seeds the weight initialization.

    Attributes
    ----------
    network_ : MlpNetwork
    report_ : TrainReport
    input_normalizer_, target_normalizer_ : MinMaxNormalizer
    """

    def __init__(
        self,
        n_hidden=10,
        max_epochs=200,
        mse_goal=0.0025,
        lambda_init=1e-3,
        lambda_up=10.0,
        lambda_down=0.1,
        lambda_max=1e10,
        min_grad_norm=1e-10,
        algorithm="levenberg_marquardt",
        learning_rate=0.01,
        random_state=0,
    ):
        self.n_hidden = n_hidden
        self.max_epochs = max_epochs
        self.mse_goal = mse_goal
        self.lambda_init = lambda_init
        self.lambda_up = lambda_up
        self.lambda_down = lambda_down
        self.lambda_max = lambda_max
        self.min_grad_norm = min_grad_norm
        self.algorithm = algorithm
        self.learning_rate = learning_rate
        self.random_state = random_state

    def train_config(self):
        return TrainConfig(
            max_epochs=self.max_epochs,
            mse_goal=self.mse_goal,
            lambda_init=self.lambda_init,
            lambda_up=self.lambda_up,
            lambda_down=self.lambda_down,
            lambda_max=self.lambda_max,
            min_grad_norm=self.min_grad_norm,
            seed=self.random_state,
            algorithm=self.algorithm,
            learning_rate=self.learning_rate,
        )

    def fit(self, X, y):
        cfg = self.train_config()
        X, y = validate_data(self, X, y, multi_output=True, y_numeric=True, dtype=np.float64)
        self.y_ndim_ = y.ndim
        Y = y[:, None] if y.ndim == 1 else y
        self.input_normalizer_ = MinMaxNormalizer().fit(X)
        self.target_normalizer_ = MinMaxNormalizer().fit(Y)
        net = init_weights(X.shape[1], self.n_hidden, Y.shape[1], seed=self.random_state)
        self.network_, self.report_ = train(
            net,
            self.input_normalizer_.transform(X),
            self.target_normalizer_.transform(Y),
            cfg,
        )
        return self

    def predict_normalized(self, X):
        """Raw network output, on the normalized target scale."""
        check_is_fitted(self, "network_")
        X = validate_data(self, X, reset=False, dtype=np.float64)
        return forward(self.network_, self.input_normalizer_.transform(X))

    def predict(self, X):
        check_is_fitted(self, "network_")
        Y = self.target_normalizer_.inverse_transform(self.predict_normalized(X))
        return Y.ravel() if self.y_ndim_ == 1 else Y

    def __sklearn_tags__(self):
        tags = super().__sklearn_tags__()
        tags.target_tags.multi_output = True
        return tags
