# %% [markdown]
# # Closed forms against the see-saw
#
# Isotropic and Werner states have closed-form gains. The see-saw, started
# from random measurements, should land on them.

# %%
import numpy as np

from metrogain import SeeSawConfig, noisy_max_entangled, optimize_gain, werner_state
from metrogain.analytic import iso_gain, iso_threshold, werner_gain, werner_threshold

cfg = SeeSawConfig(trials=5)
for d in (3, 4, 5):
    dev = max(abs(optimize_gain(noisy_max_entangled(d, 1 - p), cfg).gain - iso_gain(d, p)) for p in np.linspace(0.1, 1, 10))
    dev_w = max(abs(optimize_gain(werner_state(d, f), cfg).gain - werner_gain(d, f)) for f in np.linspace(-1, -0.1, 10))
    print(f"d={d}: isotropic threshold p_iso={iso_threshold(d):.4f}, Werner threshold phi={werner_threshold(d):.4f}, "
          f"max deviation {max(dev, dev_w):.1e}")
