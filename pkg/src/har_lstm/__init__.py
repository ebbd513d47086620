"""Human activity recognition from raw tri-axial accelerometer streams.

End-to-end pipeline: raw-file ingestion, sliding-window segmentation, a
stacked-LSTM classifier trained from scratch (hand-derived backpropagation
through time, Adam, L2 regularization), confusion-matrix evaluation, and
online sliding-window inference.
"""

__version__ = "0.1.0"

from .labels import ActivityLabel, CLASS_NAMES, NUM_CLASSES

__all__ = ["ActivityLabel", "CLASS_NAMES", "NUM_CLASSES", "__version__"]
