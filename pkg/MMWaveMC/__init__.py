"""MMWaveMC - matrix-completion channel estimation for switch-based mmWave MIMO.

MMWaveMC synthesizes geometric mmWave channels, samples them through the
switch-driven uniform spatial sampling protocol, recovers them with the
singular value projection (SVP) estimator or an OMP compressive-sensing
baseline, and evaluates the estimates by NMSE and by the spectral
efficiency they deliver after antenna selection.

Example:
    >>> from MMWaveMC import __version__
    >>> print(__version__)
    '0.1.0'
"""

from MMWaveMC.constants import VERSION

__version__ = VERSION
__all__ = ["__version__"]
