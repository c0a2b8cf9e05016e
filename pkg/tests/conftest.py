import pytest

from hrtwist import Lognormal, SumProblem, Weibull

# Frozen reference values, computed before the build with independent
# high-precision tools (50-digit quadrature / normal-tail evaluation).
LN6_SIGMA = 1.3815510557964275          # 6 dB in natural-log units
LN6_SF_100 = 4.2906033319683746e-4      # survival of Lognormal(0, LN6_SIGMA) at 100
LN6_LAMBDA_100 = 7.753913012102223      # cumulative hazard at 100
LN6_ONSET = 0.2057833                   # concavity onset, regression constant
LN1_ONSET = 0.6181332                   # same for Lognormal(0, 1)

LN_PAIR_A_20DB = 7.753840980008583      # min of hazard sum, two iid 6 dB comps
LN_PAIR_THETA_20DB = 0.7420633199524571

LN_PAIR_TAIL_20DB = 9.2894328997e-4     # P(X1+X2 > 100), iid Lognormal 0/6 dB
WB_PAIR_TAIL_20DB = 1.0469642975e-4     # P(X1+X2 > 100), iid Weibull(0.5, 1)
WB_PAIR_TAIL_30DB = 3.82435982357e-14   # P(X1+X2 > 1000), iid Weibull(0.5, 1)


@pytest.fixture
def weibull_half():
    return Weibull(0.5, 1.0)


@pytest.fixture
def lognormal_std():
    return Lognormal(0.0, 1.0)


@pytest.fixture
def lognormal_6db():
    return Lognormal.from_db(0.0, 6.0)


@pytest.fixture
def weibull_pair_20db():
    return SumProblem.from_db((Weibull(0.5, 1.0), Weibull(0.5, 1.0)), 20.0)


@pytest.fixture
def lognormal_pair_20db():
    comps = (Lognormal.from_db(0.0, 6.0), Lognormal.from_db(0.0, 6.0))
    return SumProblem.from_db(comps, 20.0)


def weibull_pair(gamma_db):
    return SumProblem.from_db((Weibull(0.5, 1.0), Weibull(0.5, 1.0)), gamma_db)


def lognormal_pair(gamma_db):
    comps = (Lognormal.from_db(0.0, 6.0), Lognormal.from_db(0.0, 6.0))
    return SumProblem.from_db(comps, gamma_db)


def random_component(rng):
    """A random subexponential component for property-style sweeps."""
    if rng.random() < 0.5:
        return Weibull(rng.uniform(0.3, 0.95), rng.uniform(0.5, 3.0))
    return Lognormal(rng.uniform(-1.0, 1.0), rng.uniform(0.5, 2.0))
