"""From prices to a market graph.

Walks the first stage of the pipeline: simple returns, the unbiased sample
covariance, and the absolute-correlation weight matrix with its degree and
Laplacian companions. Run as: python demos/01_market_graph_basics.py
"""

import numpy as np

from portcut import (
    block_factor_market,
    market_graph_from_covariance,
    sample_covariance,
    simple_returns,
)

np.set_printoptions(precision=3, suppress=True)

# A small synthetic market: two blocks of assets driven by separate factors,
# plus a weak market-wide factor. Block membership is known, which makes it
# easy to see structure in the graph below.
prices, block_of = block_factor_market([3, 3], n_periods=750, within_corr=0.85,
                                       across_corr=0.1, seed=42)
print("price rows x assets:", prices.prices.shape)
print("assets:", prices.asset_ids)
print("ground-truth blocks:", block_of)

# Returns: one row fewer than prices, entry (t, i) = p[t+1]/p[t] - 1.
returns = simple_returns(prices)
print("\nreturn rows:", returns.n_periods)
print("first three return rows:\n", returns.returns[:3])

# Unbiased sample covariance (divisor T-1).
sigma = sample_covariance(returns)
print("\ncovariance:\n", sigma.sigma * 1e4, " (x 1e-4)")

# The market graph: weights are absolute correlations, diagonal fixed at 0.
graph = market_graph_from_covariance(sigma, asset_ids=prices.asset_ids)
print("\nweights |rho|:\n", graph.weights)
print("\nnote the block structure: within-block entries cluster near 0.85,")
print("across-block entries near 0.1")

# Degrees sum each vertex's weights; the Laplacian is diag(degrees) - W.
print("\ndegrees:", graph.degrees)
print("Laplacian row sums (zero vector is in the null space):",
      graph.laplacian @ np.ones(graph.n_vertices))

evals = np.linalg.eigvalsh(graph.laplacian)
print("Laplacian eigenvalues (all nonnegative):", evals)
print("\nlambda2 =", evals[1], "- small because the two blocks separate easily")
