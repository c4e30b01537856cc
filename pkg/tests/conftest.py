import numpy as np
import pytest

from etlqr import EtmDesign, LqrWeights, VehicleParams, build_plant, synthesize


@pytest.fixture(scope="session")
def vehicle():
    return VehicleParams(m=1421.0, mu=0.6, vx=18.0, iz=2570.0, cf=170550.0,
                         cr=137844.0, lf=1.191, lr=1.513, rho=0.001)


@pytest.fixture(scope="session")
def plant(vehicle):
    return build_plant(vehicle)


@pytest.fixture(scope="session")
def weights():
    return LqrWeights(Q=np.diag([30.0, 10.0, 1.0, 1.0]), r=1000.0)


@pytest.fixture(scope="session")
def design_improved():
    return EtmDesign(z_bar=1.0, epsilon=1.0, theta_l=8.0, theta_r=0.1)


@pytest.fixture(scope="session")
def design_original():
    return EtmDesign(z_bar=1.0, epsilon=1.0, theta_l=1.0, theta_r=1.0)


@pytest.fixture(scope="session")
def syn_improved(plant, weights, design_improved):
    return synthesize(plant, weights, design_improved)


@pytest.fixture(scope="session")
def syn_original(plant, weights, design_original):
    return synthesize(plant, weights, design_original)
