"""
Deterministic canonical form of a small network
===============================================

A latent root Y with a single manifest child Z.  Canonicalising adds a root
U_Z whose states enumerate every function from Y's states to Z's states;
Z becomes a deterministic function of (Y, U_Z) and the joint over (Y, Z)
is unchanged.
"""

import math

import numpy as np

from latentbn import canonicalize, make_network, verify_reconstruction

net = make_network(
    {"Y": 2, "Z": 2},
    {"Y": ([], [0.2, 0.8]), "Z": (["Y"], [[0.3, 0.4], [0.7, 0.6]])},
)

# %%
# U_Z has 2**2 = 4 states.  State u decodes to the function (f(Y=0), f(Y=1)),
# with the first parent configuration as the most significant digit.
c = canonicalize(net)
enc = c.encodings[1]
prior = c.prior(1)
for u in range(enc.size):
    print(f"u={u}  f={enc.decode_all(u)}  P(u)={prior[u]:.2f}")

# %%
# The new CPT of Z only contains zeros and ones.  Columns run over (Y, U_Z)
# with U_Z varying fastest.
print(c.network.cpts[1].table.astype(int))

# %%
# Summing the prior over the functions that send Y=0 to Z=0 gives back the
# original entry P(Z=0 | Y=0).
rebuilt = math.fsum(prior[u] for u in range(enc.size) if enc.decode(u, 0) == 0)
print("P(Z=0 | Y=0) rebuilt:", rebuilt)
report = verify_reconstruction(net, c)
print("max deviation over all CPT entries:", report.max_deviation)
assert np.isclose(rebuilt, 0.3, atol=1e-12)
