"""Neural move prediction for Go: data pipeline, training, evaluation, and
a TCP inference server speaking the engine's evaluator wire protocol."""

__version__ = "0.1.0"
