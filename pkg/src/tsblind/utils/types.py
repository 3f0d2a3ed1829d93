# Use future annotations for better handling of forward references.
from __future__ import annotations

import sys
from numbers import Integral, Real
from typing import Any, Literal, Optional, Sequence, Union

import numpy as np
from numpy.random import Generator
from packaging.specifiers import SpecifierSet

# Enum-style option types, validated with validate_literal_type.
SimulationMethods = Literal["auto", "circulant-embedding", "dense-cholesky"]

SolverTypes = Literal["cholesky", "levinson"]

# How a horizon-truncated precision operator is realised.
PrecisionTypes = Literal["finite", "symbol"]

LowerBoundModes = Literal["estimate"]

ModelNames = Literal["white", "ar1", "ma1"]

# Check Python version for compatibility issues.
sys_version = sys.version.split(" ")[0]
new_typing_available = sys_version in SpecifierSet(">=3.10")


if new_typing_available:
    RngTypes = Optional[Union[Generator, Integral]]

    IndexSetTypes = Union[Integral, Sequence[Integral], np.ndarray]

    LowerBoundTypes = Optional[Union[Real, LowerBoundModes]]

else:
    RngTypes = Any
    IndexSetTypes = Any
    LowerBoundTypes = Any
