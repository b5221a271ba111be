# %% [markdown]
# # Pure states and GHZ states
#
# Every entangled pure state is useful: pairing consecutive Schmidt levels
# with sigma_x on both sides already beats the separable limit of 8.

# %%
import numpy as np

from metrogain import SchmidtVector, gain_for_H, ghz_state, paper_hamiltonian, pure_from_schmidt, qfi
from metrogain.activation import ncopy_qfi_bound

rng = np.random.default_rng(1)
for _ in range(5):
    s = SchmidtVector.normalized(rng.uniform(0.05, 1, 3))
    H = paper_hamiltonian("schmidt_obs3", sigma=s)
    rho = pure_from_schmidt(s, 3, 3)
    print(np.round(s.coefficients, 3), "QFI", round(qfi(rho, H), 3), "gain", round(gain_for_H(rho, H), 3))

# %% [markdown]
# Many copies of a weakly entangled state approach the maximum QFI of 16.

# %%
print([round(ncopy_qfi_bound((0.9, 0.436), n), 3) for n in (1, 2, 5, 10, 15)])

# %% [markdown]
# N-party GHZ states reach gain N.

# %%
for N in (2, 3, 4):
    print(N, gain_for_H(ghz_state(N, 4, 4), paper_hamiltonian("ghz_opt", N=N, d=4, m=4)))
