"""Shared fixtures: interchange topologies and a small synthetic dataset."""

import numpy as np
import pytest

from ramp_stdae import (
    InterchangeSpec,
    MovementDef,
    SynthConfig,
    default_interchange,
    generate,
)


@pytest.fixture(scope="session")
def four_leg():
    """The built-in 8-direction, 12-movement interchange at 5-min intervals."""
    return default_interchange(300)


@pytest.fixture(scope="session")
def tiny_spec():
    """Smallest legal topology: 2 directions, 1 movement."""
    return InterchangeSpec(
        name="tiny",
        directions=("A", "B"),
        movements=(MovementDef(id="ab", upstream="A", downstream="B", label="A to B"),),
        interval_sec=300,
    )


@pytest.fixture(scope="session")
def small_data(four_leg):
    """Six noise-free days on the four-leg interchange."""
    cfg = SynthConfig(days=6, noise_std=0.0, seed=11)
    return generate(four_leg, cfg)
