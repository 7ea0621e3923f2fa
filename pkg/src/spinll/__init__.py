"""Spin-chain Landau-Lifshitz toolkit.

Symbolic ladder-operator algebra, field-tensor duality, exact and mean-field
dynamics of a driven XXX chain, and ring-down spin-wave resonance spectra.
"""

__version__ = "0.1.0"

from .chain import ChainConfig
from .errors import ConfigError, GuardError, ParseError, PipelineError, SpinLLError

__all__ = ["ChainConfig", "ConfigError", "GuardError", "ParseError", "PipelineError",
           "SpinLLError", "__version__"]
