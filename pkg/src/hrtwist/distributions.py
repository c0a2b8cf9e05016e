"""Component distribution families with numerically stable tail math.

Weibull (shape < 1) and Log-normal components expose density, survival,
quantile, hazard rate and cumulative hazard, all usable deep in the far
tail: survival-related quantities are computed in log space so that no
intermediate ever forms ``1 - F(x)`` directly.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special

from .errors import DomainError, ParameterError, UnsupportedFamilyError

# decibel <-> natural-log scaling for log-normal parameters
DB_SCALE = np.log(10.0) / 10.0


def db_to_linear(value_db):
    """Convert a decibel quantity to linear scale, 10^(value/10)."""
    return 10.0 ** (np.asarray(value_db, dtype=float) / 10.0)


def linear_to_db(value):
    value = np.asarray(value, dtype=float)
    if np.any(value <= 0.0):
        raise DomainError("linear value must be positive to express in dB")
    return 10.0 * np.log10(value)


# ---------------------------------------------------------------------------
# standard-normal tail utilities
# ---------------------------------------------------------------------------

def norm_pdf(z):
    z = np.asarray(z, dtype=float)
    return np.exp(-0.5 * z * z) / np.sqrt(2.0 * np.pi)


def norm_cdf(z):
    return special.ndtr(z)


def norm_sf(z):
    return special.ndtr(-np.asarray(z, dtype=float))


def log_norm_sf(z):
    """log of the standard-normal survival function, stable for large z."""
    return special.log_ndtr(-np.asarray(z, dtype=float))


def norm_ppf(u):
    u = np.asarray(u, dtype=float)
    if np.any((u <= 0.0) | (u >= 1.0)):
        raise DomainError("probability must lie in (0, 1)")
    return special.ndtri(u)


def norm_isf_exp(log_sf):
    """z such that the normal survival function equals exp(log_sf)."""
    return -special.ndtri_exp(np.asarray(log_sf, dtype=float))


# ---------------------------------------------------------------------------
# parameter records
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WeibullParams:
    shape: float
    scale: float

    def __post_init__(self):
        if not (self.shape > 0.0 and np.isfinite(self.shape)):
            raise ParameterError(f"Weibull shape must be positive, got {self.shape}")
        if not (self.scale > 0.0 and np.isfinite(self.scale)):
            raise ParameterError(f"Weibull scale must be positive, got {self.scale}")

    @property
    def subexponential(self) -> bool:
        return self.shape < 1.0


@dataclass(frozen=True)
class LognormalParams:
    mu: float
    sigma: float
    mu_db: float | None = None
    sigma_db: float | None = None

    def __post_init__(self):
        if not (self.sigma > 0.0 and np.isfinite(self.sigma)):
            raise ParameterError(f"Log-normal sigma must be positive, got {self.sigma}")
        # dB fields, when present, must agree with the natural-log fields
        if self.mu_db is not None:
            expect = DB_SCALE * self.mu_db
            if abs(self.mu - expect) > 1e-12 * max(1.0, abs(expect)):
                raise ParameterError(
                    f"mu={self.mu} inconsistent with mu_db={self.mu_db}")
        if self.sigma_db is not None:
            expect = DB_SCALE * self.sigma_db
            if abs(self.sigma - expect) > 1e-12 * abs(expect):
                raise ParameterError(
                    f"sigma={self.sigma} inconsistent with sigma_db={self.sigma_db}")

    @classmethod
    def from_db(cls, mu_db: float, sigma_db: float) -> "LognormalParams":
        return cls(mu=DB_SCALE * mu_db, sigma=DB_SCALE * sigma_db,
                   mu_db=mu_db, sigma_db=sigma_db)


# ---------------------------------------------------------------------------
# distributions
# ---------------------------------------------------------------------------

def _require_positive(x):
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0.0) or np.any(~np.isfinite(x)):
        raise DomainError("x must be positive and finite")
    return x


def _require_nonnegative(x):
    x = np.asarray(x, dtype=float)
    if np.any(x < 0.0) or np.any(~np.isfinite(x)):
        raise DomainError("x must be nonnegative and finite")
    return x


class Distribution:
    """Common surface shared by the component families.

    Subclasses implement ``log_pdf``, ``log_survival`` and
    ``quantile_from_log_sf``; everything else derives from those three so
    the identities pdf = hazard_rate * exp(-hazard_function) and
    hazard_function = -log_survival hold by construction.
    """

    family: str

    def log_pdf(self, x):
        raise NotImplementedError

    def log_survival(self, x):
        raise NotImplementedError

    def quantile_from_log_sf(self, log_sf):
        """Inverse of log_survival: x with log_survival(x) = log_sf <= 0."""
        raise NotImplementedError

    def concavity_onset(self) -> float:
        raise NotImplementedError

    def pdf(self, x):
        return np.exp(self.log_pdf(x))

    def survival(self, x):
        return np.exp(self.log_survival(x))

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(x < 0.0):
            raise DomainError("x must be nonnegative")
        out = -np.expm1(self.log_survival(np.maximum(x, np.finfo(float).tiny)))
        return np.where(x == 0.0, 0.0, out)

    def hazard_rate(self, x):
        return np.exp(self.log_pdf(x) - self.log_survival(x))

    def hazard_function(self, x):
        x = _require_nonnegative(x)
        out = -self.log_survival(np.maximum(x, np.finfo(float).tiny))
        return np.where(x == 0.0, 0.0, out)

    def quantile(self, u):
        u = np.asarray(u, dtype=float)
        if np.any((u <= 0.0) | (u >= 1.0)):
            raise DomainError("probability must lie in (0, 1)")
        return self.quantile_from_log_sf(np.log1p(-u))

    def to_dict(self) -> dict:
        raise NotImplementedError


class Weibull(Distribution):
    """Weibull component; subexponential when shape < 1."""

    family = "weibull"

    def __init__(self, shape: float, scale: float):
        self.params = WeibullParams(float(shape), float(scale))

    @property
    def shape(self) -> float:
        return self.params.shape

    @property
    def scale(self) -> float:
        return self.params.scale

    def log_pdf(self, x):
        x = _require_positive(x)
        k, b = self.shape, self.scale
        t = x / b
        return np.log(k / b) + (k - 1.0) * np.log(t) - t ** k

    def log_survival(self, x):
        x = _require_positive(x)
        return -((x / self.scale) ** self.shape)

    def hazard_rate(self, x):
        x = _require_positive(x)
        k, b = self.shape, self.scale
        return (k / b) * (x / b) ** (k - 1.0)

    def quantile_from_log_sf(self, log_sf):
        log_sf = np.asarray(log_sf, dtype=float)
        return self.scale * (-log_sf) ** (1.0 / self.shape)

    def concavity_onset(self) -> float:
        # (x/b)^k is concave on all of (0, inf) iff k < 1
        if self.shape >= 1.0:
            raise UnsupportedFamilyError(
                "hazard function not eventually concave under this family "
                f"restriction (Weibull shape {self.shape} >= 1)")
        return 0.0

    def to_dict(self) -> dict:
        return {"family": self.family, "shape": self.shape, "scale": self.scale}

    def __repr__(self):
        return f"Weibull(shape={self.shape}, scale={self.scale})"


@lru_cache(maxsize=None)
def _lognormal_onset_unit_median(sigma: float) -> float:
    """Concavity onset of the cumulative hazard for Lognormal(mu=0, sigma).

    Smallest abscissa beyond which the relative second difference of the
    cumulative hazard stays nonpositive, located by a geometric-grid scan
    plus bisection.  Values for mu != 0 follow by the scaling x -> e^mu x.
    """
    h = 1e-5

    def second_diff(x):
        lam = lambda y: -special.log_ndtr(-np.log(y) / sigma)
        return (lam(x * (1 + h)) - 2.0 * lam(x) + lam(x * (1 - h))) / (x * h) ** 2

    grid = np.geomspace(1e-10, 1e6, 3201)
    signs = np.array([second_diff(x) for x in grid])
    positive = np.where(signs > 0.0)[0]
    if len(positive) == 0:
        return 0.0
    lo, hi = grid[positive[-1]], grid[positive[-1] + 1]
    for _ in range(80):
        mid = np.sqrt(lo * hi)
        if second_diff(mid) <= 0.0:
            hi = mid
        else:
            lo = mid
    return float(hi)


class Lognormal(Distribution):
    """Log-normal component: log X ~ Normal(mu, sigma^2)."""

    family = "lognormal"

    def __init__(self, mu: float, sigma: float,
                 mu_db: float | None = None, sigma_db: float | None = None):
        self.params = LognormalParams(float(mu), float(sigma), mu_db, sigma_db)

    @classmethod
    def from_db(cls, mu_db: float, sigma_db: float) -> "Lognormal":
        p = LognormalParams.from_db(mu_db, sigma_db)
        return cls(p.mu, p.sigma, p.mu_db, p.sigma_db)

    @property
    def mu(self) -> float:
        return self.params.mu

    @property
    def sigma(self) -> float:
        return self.params.sigma

    def _z(self, x):
        return (np.log(x) - self.mu) / self.sigma

    def log_pdf(self, x):
        x = _require_positive(x)
        z = self._z(x)
        return -np.log(x * self.sigma * np.sqrt(2.0 * np.pi)) - 0.5 * z * z

    def log_survival(self, x):
        x = _require_positive(x)
        return special.log_ndtr(-self._z(x))

    def quantile_from_log_sf(self, log_sf):
        log_sf = np.asarray(log_sf, dtype=float)
        z = norm_isf_exp(log_sf)
        return np.exp(self.mu + self.sigma * z)

    def concavity_onset(self) -> float:
        return float(np.exp(self.mu)) * _lognormal_onset_unit_median(self.sigma)

    def to_dict(self) -> dict:
        d = {"family": self.family, "mu": self.mu, "sigma": self.sigma}
        if self.params.mu_db is not None:
            d["mu_db"] = self.params.mu_db
        if self.params.sigma_db is not None:
            d["sigma_db"] = self.params.sigma_db
        return d

    def __repr__(self):
        return f"Lognormal(mu={self.mu}, sigma={self.sigma})"


def distribution_from_dict(d: dict) -> Distribution:
    """Construct a component from its serialized form (natural or dB)."""
    family = d.get("family")
    if family == "weibull":
        try:
            return Weibull(d["shape"], d["scale"])
        except KeyError as exc:
            raise ParameterError(f"weibull component missing field {exc}") from exc
    if family == "lognormal":
        if "mu_db" in d and "sigma_db" in d:
            ln = Lognormal.from_db(d["mu_db"], d["sigma_db"])
            if "mu" in d or "sigma" in d:
                # both forms present: dB takes precedence, natural must agree
                LognormalParams(d.get("mu", ln.mu), d.get("sigma", ln.sigma),
                                d["mu_db"], d["sigma_db"])
            return ln
        try:
            return Lognormal(d["mu"], d["sigma"])
        except KeyError as exc:
            raise ParameterError(f"lognormal component missing field {exc}") from exc
    raise ParameterError(f"unknown distribution family: {family!r}")
