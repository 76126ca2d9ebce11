import pytest

from cpdyn import params as P


@pytest.fixture
def unit_two_level():
    return P.SystemParams(mu_A=(1.0, 0.0, 0.5), k0=1.0, pol_B=P.TwoLevel(1.0, 2.0),
                          hbar_c=1.0, c=1.0)


@pytest.fixture
def unit_static():
    return P.SystemParams(mu_A=(1.0, 0.0, 0.5), k0=1.0, pol_B=P.StaticConstant(1.0),
                          hbar_c=1.0, c=1.0)
