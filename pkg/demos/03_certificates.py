"""
Certifying a global likelihood maximum
======================================

A parameterisation is globally optimal exactly when its inferred
conditionals P(z | w) match the data frequencies.  The certificate reports
the log-likelihood l, the ceiling lambda*, their gap and the largest
compatibility residual.
"""

from latentbn import WeightedDataset, certify_global_optimum, make_network

net = make_network(
    {"Y": 2, "Z": 2},
    {"Y": ([], [0.2, 0.8]), "Z": (["Y"], [[0.3, 0.4], [0.7, 0.6]])},
)

# %%
# The network gives P(Z=0) = 0.2 * 0.3 + 0.8 * 0.4 = 0.38.  Data with those
# frequencies are compatible, so the gap is zero.
good = WeightedDataset([1], {(0,): 0.38, (1,): 0.62})
cert = certify_global_optimum(net, good)
print(cert.verdict, f"gap={cert.gap:.2e}", f"residual={cert.max_residual:.2e}")

# %%
# Uniform data are not compatible: the residual is 0.12 and the gap is the
# weighted KL divergence between the data and the model.
flat = WeightedDataset([1], {(0,): 0.5, (1,): 0.5})
cert = certify_global_optimum(net, flat)
print(cert.verdict, f"gap={cert.gap:.4f}", f"residual={cert.max_residual:.4f}")
for key, value in cert.to_dict().items():
    print(f"  {key}: {value}")
