"""pH prediction with a Levenberg-Marquardt trained single-hidden-layer perceptron."""

__version__ = "0.1.0"
