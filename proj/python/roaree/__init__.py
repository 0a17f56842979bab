"""Python bindings for the roaree optimizer benchmark."""

from ._roaree import (  # noqa: F401
    ConfigError,
    DomainError,
    InsufficientDataError,
    Optimizer,
    RoareeError,
    ShapeError,
    directional_accuracy,
    generate_synthetic_csv,
    grid_sweep,
    regression_metrics,
    rosenbrock,
    run_training,
    split_sizes,
    surrogate_derivative,
    surrogate_eval,
)

SURROGATES = ("tanh", "atan", "softsign", "sigmoid", "erf", "norm")
METHODS = ("sgd", "momentum", "nesterov", "rmsprop", "adagrad", "adam", "adamw", "lion", "roaree")
