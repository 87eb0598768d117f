"""Shared fixtures: the expensive designs are solved once per session."""

import numpy as np
import pytest

from maxflat.design import DesignSpec, design_filterbank
from maxflat.tracker import TRACKER_CONFIGS, tracker_design, tracker_spec


@pytest.fixture(scope="session")
def bw1_spec():
    """The K = 9 causal smoother/differentiator bank of the detection study."""
    return DesignSpec(f_s=1000.0, f_wb=0.05, f_nb=0.07,
                      k_w_dc=3, k_w_nb=3, k_w_pi=0, k_t=3,
                      group_delay="optimal")


@pytest.fixture(scope="session")
def bw1_design(bw1_spec):
    return design_filterbank(bw1_spec)


@pytest.fixture(scope="session")
def tracker_designs():
    return {tag: tracker_design(tag) for tag in TRACKER_CONFIGS}


@pytest.fixture(scope="session")
def tracker_specs():
    return {tag: tracker_spec(tag) for tag in TRACKER_CONFIGS}


@pytest.fixture()
def rng():
    return np.random.default_rng(12345)
