"""Seeded noisy power law and its least-squares fit via numpy.linalg.lstsq."""
import json
import sys

import numpy as np

rng = np.random.default_rng(20240611)
k_true, alpha_true, sigma = -0.35, 4.0, 0.05
x = np.unique(np.round(np.geomspace(50, 50000, 20)))
y = alpha_true * x**k_true * np.exp(rng.normal(0.0, sigma, x.size))

A = np.column_stack([np.log(x), np.ones_like(x)])
(k, log_alpha), *_ = np.linalg.lstsq(A, np.log(y), rcond=None)
fitted = A @ np.array([k, log_alpha])
ssr = float(np.sum((np.log(y) - fitted) ** 2))
sst = float(np.sum((np.log(y) - np.log(y).mean()) ** 2))

out = {
    "k_true": k_true,
    "x": x.tolist(),
    "y": y.tolist(),
    "k": float(k),
    "log_alpha": float(log_alpha),
    "r2": 1.0 - ssr / sst,
}
json.dump(out, open(sys.argv[1] if len(sys.argv) > 1 else "scaling_ols.json", "w"), indent=1)
