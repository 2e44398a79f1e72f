"""Shared fixtures and helpers for the test suite."""

import numpy as np
import pytest

from osm2d import (ArrayGeometry, ImagingGrid, Medium, Scatterer, Scene,
                   normalize)


@pytest.fixture(scope="session")
def medium():
    return Medium()


@pytest.fixture(scope="session")
def geom():
    return ArrayGeometry()


@pytest.fixture(scope="session")
def grid():
    return ImagingGrid()


@pytest.fixture(scope="session")
def two_disk_scene(medium):
    from osm2d import fresnel_two_disk_scene
    return fresnel_two_disk_scene(medium)


def point_scene(center, medium, radius=0.015, eps_rel=3.0):
    return Scene(scatterers=(Scatterer(center=center, radius=radius,
                                       eps=eps_rel * medium.eps_b),),
                 medium=medium)


def relative_l2(map_a, map_b):
    """Scale-free relative L2 distance: both maps are max-normalized first."""
    a = normalize(map_a).values
    b = normalize(map_b).values
    return float(np.linalg.norm(a - b) / np.linalg.norm(b))
