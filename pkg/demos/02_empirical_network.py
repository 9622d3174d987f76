"""
Empirical network and the likelihood ceiling
============================================

Latent roots are summed out of the network.  What remains factorises over
the manifest nodes, each conditioned on its empirical parents: the nodes
that precede it in its c-component together with their internal parents.
"""

import numpy as np

from latentbn import (
    c_components,
    empirical_parents,
    empirical_structure,
    fit_empirical,
    lambda_star,
    make_network,
    synthetic,
)

# Y0 -> Z1 -> Z2 -> Z3, with a second latent Y confounding Z2 and Z3.
net = make_network(
    {"Y0": 2, "Y": 2, "Z1": 2, "Z2": 2, "Z3": 2},
    {
        "Y0": ([], [0.5, 0.5]),
        "Y": ([], [0.3, 0.7]),
        "Z1": (["Y0"], [[0.6, 0.2], [0.4, 0.8]]),
        "Z2": (["Z1", "Y"], [[0.9, 0.4, 0.3, 0.1], [0.1, 0.6, 0.7, 0.9]]),
        "Z3": (["Z2", "Y"], [[0.8, 0.1, 0.35, 0.6], [0.2, 0.9, 0.65, 0.4]]),
    },
)

# %%
# c-components, and the empirical parents of each manifest node.
print("c-components:", [[net.name_of(v) for v in block] for block in c_components(net)])
for z in net.manifest:
    print(net.name_of(z), "<-", [net.name_of(w) for w in empirical_parents(net, z)])

# %%
# Fit the empirical network to a sample.  Its log-likelihood lambda* is the
# largest value any parameterisation of the latent network can reach.
rng = np.random.default_rng(0)
data = synthetic.sample_dataset(net, 500, rng)
structure = empirical_structure(net)
emp = fit_empirical(structure, data)
print("lambda* =", lambda_star(emp, data))

# %%
# With the network's own distribution as data weights, the empirical CPTs
# recover P(z | w) exactly.
exact = synthetic.exact_weights_dataset(net, total=1.0)
emp = fit_empirical(structure, exact)
print("P(Z3 | Z1, Z2) columns:\n", np.round(emp.params[net.id_of("Z3")], 4))
