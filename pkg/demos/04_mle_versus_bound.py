# %% [markdown]
# # Does a real estimator reach the bound?
#
# A grid-plus-golden-section maximum-likelihood estimator is run on simulated
# echoes. At high SNR its MSE tracks the bound. At low SNR it breaks away:
# the estimate is confined to [-pi/2, pi/2], so its MSE saturates while the
# bound keeps growing as 1/P0. This takes about half a minute.

# %%
import numpy as np

from irs_crlb import Scenario, generate_channel
from irs_crlb.evaluator import monte_carlo_mse
from irs_crlb.optimizer import minimize_crlb

sc = Scenario()
ch = generate_channel(sc, np.random.default_rng(0))
design = minimize_crlb(sc, ch, np.random.default_rng(1))

# %%
print(" P0 (dBm)      bound        MSE   MSE/bound")
for p_dbm in (0, 10, 20, 25, 30, 40):
    d = design.scaled(10 ** (p_dbm / 10) / 1000)
    pt = monte_carlo_mse(sc.with_power(d.R_x.trace().real), ch, d, 200, np.random.default_rng(p_dbm))
    print(f"{p_dbm:>9}  {pt.crlb:.3e}  {pt.mse:.3e}  {pt.mse / pt.crlb:9.2f}")
