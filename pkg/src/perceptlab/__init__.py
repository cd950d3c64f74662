"""perceptlab: contour stimuli, classifier evaluation, minimal-crop search, 2-IFC experiments."""

__version__ = "0.1.0"
