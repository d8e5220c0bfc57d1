"""Output stores for study results."""
