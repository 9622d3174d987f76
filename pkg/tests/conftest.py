import itertools
import math

import numpy as np
import pytest

from latentbn import synthetic
from latentbn.model import make_network


def two_node():
    return make_network(
        {"Y": 2, "Z": 2},
        {"Y": ([], [0.2, 0.8]), "Z": (["Y"], [[0.3, 0.4], [0.7, 0.6]])},
    )


def chain(z2_table=((0.6, 0.1), (0.4, 0.9))):
    return make_network(
        {"Y": 2, "Z1": 2, "Z2": 2},
        {
            "Y": ([], [0.35, 0.65]),
            "Z1": (["Y"], [[0.8, 0.3], [0.2, 0.7]]),
            "Z2": (["Z1"], z2_table),
        },
    )


def confounded_pair():
    """Y -> Z1, Y -> Z2, Z1 -> Z2."""
    return make_network(
        {"Y": 2, "Z1": 2, "Z2": 2},
        {
            "Y": ([], [0.4, 0.6]),
            "Z1": (["Y"], [[0.9, 0.25], [0.1, 0.75]]),
            "Z2": (["Y", "Z1"], [[0.7, 0.2, 0.5, 0.05], [0.3, 0.8, 0.5, 0.95]]),
        },
    )


def instrument():
    """Y0 -> Z1 -> Z2 -> Z3 with Y confounding Z2 and Z3."""
    return make_network(
        {"Y0": 2, "Y": 2, "Z1": 2, "Z2": 2, "Z3": 2},
        {
            "Y0": ([], [0.5, 0.5]),
            "Y": ([], [0.3, 0.7]),
            "Z1": (["Y0"], [[0.6, 0.2], [0.4, 0.8]]),
            "Z2": (["Z1", "Y"], [[0.9, 0.4, 0.3, 0.1], [0.1, 0.6, 0.7, 0.9]]),
            "Z3": (["Z2", "Y"], [[0.8, 0.1, 0.35, 0.6], [0.2, 0.9, 0.65, 0.4]]),
        },
    )


@pytest.fixture
def two_node_net():
    return two_node()


def brute_joint(net):
    """{full assignment tuple: probability}, using plain loops over CPT entries."""
    cards = net.cards
    out = {}
    for x in itertools.product(*(range(c) for c in cards)):
        p = 1.0
        for cpt in net.cpts:
            col = 0
            for q in cpt.parents:
                col = col * cards[q] + x[q]
            p *= float(cpt.table[x[cpt.child], col])
        out[x] = p
    return out


def brute_manifest(net):
    """{manifest tuple (ascending id order): probability}."""
    out = {}
    for x, p in brute_joint(net).items():
        key = tuple(x[v] for v in net.manifest)
        out[key] = out.get(key, 0.0) + p
    return out


def brute_conditional(pz, manifest, z_var, w_vars):
    """P(z | w) table {(z_state, w_states): value} from a manifest distribution dict."""
    num, den = {}, {}
    iz = manifest.index(z_var)
    iw = [manifest.index(w) for w in w_vars]
    for key, p in pz.items():
        w = tuple(key[i] for i in iw)
        num[(key[iz], w)] = num.get((key[iz], w), 0.0) + p
        den[w] = den.get(w, 0.0) + p
    return {k: (v / den[k[1]] if den[k[1]] > 0 else math.nan) for k, v in num.items()}


def random_spec(rng, max_roots=4, max_internal=5, max_card=3, max_parents=3):
    return synthetic.GeneratorSpec(
        n_roots=int(rng.integers(1, max_roots + 1)),
        n_internal=int(rng.integers(1, max_internal + 1)),
        max_parents=max_parents,
        max_cardinality=max_card,
        alpha=float(rng.choice([0.5, 1.0, 3.0])),
        seed=int(rng.integers(2**32)),
    )


def random_net(rng, **kw):
    return synthetic.random_network(random_spec(rng, **kw))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
