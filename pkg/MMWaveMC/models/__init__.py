"""Numerical models: channel, sampling, estimators and evaluation metrics."""
