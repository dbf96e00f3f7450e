"""Desk-scale stand-in for the high-frequency coastal monitoring dataset.

The generator is a frozen set of constants chosen to give plausible ranges.
Chlorophyll is log-linear in the drivers, and its log-scale scatter is
small in cold water and widens sharply in warm water. It makes no claim
about any real ecosystem.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from ..core.models import Table
from ..errors import InvalidParameter

COLUMNS = ("temp", "sal", "uvb", "chla")
TARGET = "chla"
MIN_ROWS = 100


@dataclass(frozen=True)
class BundledParams:
    # water temperature, deg C: annual sinusoid
    temp_mean: float = 16.0
    temp_amplitude: float = 7.0
    temp_phase_days: float = 110.0
    temp_noise: float = 0.8
    # salinity, PSU: falls as the water warms
    sal_mean: float = 37.5
    sal_per_degree: float = -0.12
    sal_noise: float = 0.25
    # UVB, mW/m^2: gamma-skewed, modulated by season
    uvb_shape: float = 2.0
    uvb_scale: float = 60.0
    uvb_season_weight: float = 0.4
    # chlorophyll-a, ug/L: log-linear in the drivers
    chla_log_base: float = 0.0
    chla_log_per_degree: float = 0.12
    chla_log_per_psu: float = -0.15
    chla_log_per_uvb: float = 0.0015
    # log-scale scatter, a logistic step from cold to warm water
    chla_scatter_cold: float = 0.03
    chla_scatter_warm: float = 0.7
    chla_scatter_midpoint: float = 18.0
    chla_scatter_width: float = 1.5
    chla_floor: float = 0.05


BUNDLED = BundledParams()


def make_bundled_dataset(
    n: int = 12657,
    seed: int = 0,
    missing_fraction: float = 0.02,
    params: BundledParams = BUNDLED,
) -> Table:
    if n < MIN_ROWS:
        raise InvalidParameter("n", n, f"must be >= {MIN_ROWS}")
    if not 0.0 <= missing_fraction < 1.0:
        raise InvalidParameter("missing_fraction", missing_fraction, "must lie in [0, 1)")

    p = params
    rng = np.random.default_rng(seed)
    day = np.arange(n) * 365.0 / n
    season = np.sin(2.0 * np.pi * (day - p.temp_phase_days) / 365.0)

    temp = p.temp_mean + p.temp_amplitude * season + rng.normal(0.0, p.temp_noise, n)
    sal = (
        p.sal_mean
        + p.sal_per_degree * (temp - p.temp_mean)
        + rng.normal(0.0, p.sal_noise, n)
    )
    uvb = rng.gamma(p.uvb_shape, p.uvb_scale, n) * (
        1.0 - p.uvb_season_weight + p.uvb_season_weight * (season + 1.0) / 2.0
    )

    log_signal = (
        p.chla_log_base
        + p.chla_log_per_degree * (temp - p.temp_mean)
        + p.chla_log_per_psu * (sal - p.sal_mean)
        + p.chla_log_per_uvb * (uvb - p.uvb_shape * p.uvb_scale)
    )
    scatter = p.chla_scatter_cold + (p.chla_scatter_warm - p.chla_scatter_cold) * expit(
        (temp - p.chla_scatter_midpoint) / p.chla_scatter_width
    )
    chla = np.exp(log_signal + scatter * rng.normal(0.0, 1.0, n))
    chla = np.maximum(chla, p.chla_floor)

    values = np.column_stack([temp, sal, uvb, chla])
    values[rng.random(values.shape) < missing_fraction] = np.nan
    return Table(COLUMNS, values, TARGET)
