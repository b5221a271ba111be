# %% [markdown]
# # Activation: an ancilla or a second copy makes a useless state useful
#
# Slightly above the single-copy threshold the noisy 3x3 state is useless.
# Attaching a pure qubit to one party, or taking two copies, changes that.

# %%
from metrogain import BisectionConfig, add_ancilla, gain_for_H, noisy_max_entangled, optimize_gain, paper_hamiltonian, robustness_threshold, tensor_states

p = 0.37
rho = noisy_max_entangled(3, p)
print("single copy, optimized:", round(optimize_gain(rho).gain, 4))

anc = add_ancilla(rho)  # qubit joins party A as the leading factor
print("with ancilla, fixed H :", round(gain_for_H(anc, paper_hamiltonian("anc_3x3")), 4))
print("with ancilla, optimized:", round(optimize_gain(anc).gain, 4))

two = tensor_states(rho, rho)  # parties AA' | BB', 81 dimensions
print("two copies, fixed H   :", round(gain_for_H(two, paper_hamiltonian("tc_3x3")), 4))

# %% [markdown]
# Thresholds for the fixed Hamiltonians.

# %%
def fixed(name):
    H = paper_hamiltonian(name)
    return lambda r: gain_for_H(r, H)


cfg = BisectionConfig(0.3, 0.45, 1e-5)
print("ancilla  :", round(robustness_threshold(lambda q: add_ancilla(noisy_max_entangled(3, q)), cfg, fixed("anc_3x3")), 4))
print("two copies:", round(robustness_threshold(lambda q: tensor_states(noisy_max_entangled(3, q), noisy_max_entangled(3, q)), cfg, fixed("tc_3x3")), 4))
