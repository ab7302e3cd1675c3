"""Synthetic block-factor markets with known cluster structure.

Stands in for proprietary index data in tests and demos: each block of
assets loads on its own factor plus a market-wide factor, giving controlled
within-block and across-block correlations.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidInputError
from .market_graph import PriceMatrix

__all__ = ["block_factor_market"]


def block_factor_market(
    block_sizes,
    n_periods: int,
    within_corr: float = 0.9,
    across_corr: float = 0.1,
    daily_vol: float = 0.01,
    drift: float = 0.0002,
    seed: int = 0,
) -> tuple[PriceMatrix, np.ndarray]:
    """Simulate prices for correlated asset blocks.

    Asset returns follow ``a * block_factor + c * market_factor + e * noise``
    with loadings chosen so that same-block pairs correlate at
    ``within_corr`` and cross-block pairs at ``across_corr`` in expectation.

    Returns
    -------
    (prices, block_of)
        A PriceMatrix with ``n_periods + 1`` rows, and the ground-truth
        block index of each asset.
    """
    sizes = [int(s) for s in block_sizes]
    if not sizes or any(s < 1 for s in sizes):
        raise InvalidInputError("block_sizes must be positive integers")
    if not 0.0 <= across_corr < within_corr < 1.0:
        raise InvalidInputError("need 0 <= across_corr < within_corr < 1")
    if n_periods < 2:
        raise InvalidInputError("need at least 2 periods")

    n_assets = sum(sizes)
    block_of = np.repeat(np.arange(len(sizes)), sizes)
    rng = np.random.default_rng(seed)

    a = np.sqrt(within_corr - across_corr)
    c = np.sqrt(across_corr)
    e = np.sqrt(1.0 - within_corr)

    block_factors = rng.standard_normal((n_periods, len(sizes)))
    market_factor = rng.standard_normal(n_periods)
    noise = rng.standard_normal((n_periods, n_assets))
    standardized = (
        a * block_factors[:, block_of]
        + c * market_factor[:, None]
        + e * noise
    )
    returns = drift + daily_vol * standardized
    # Returns this small never approach -1, so prices stay positive.
    levels = 100.0 * np.vstack([np.ones(n_assets), np.cumprod(1.0 + returns, axis=0)])

    asset_ids = tuple(f"B{block_of[i]}_{i:03d}" for i in range(n_assets))
    timestamps = tuple(f"t{row:05d}" for row in range(n_periods + 1))
    return PriceMatrix(prices=levels, asset_ids=asset_ids, timestamps=timestamps), block_of
