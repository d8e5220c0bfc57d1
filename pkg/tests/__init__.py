"""MMWaveMC test suite."""
