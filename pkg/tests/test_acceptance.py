"""Exit criteria for the package.

Each test prints one ``[PASS]``/``[FAIL]`` line with its measured worst case
and runtime.  Run alone with ``pytest tests/test_acceptance.py -v``.
"""

import math
import time
from contextlib import contextmanager

import numpy as np
import pytest

from conftest import two_node, random_spec
from latentbn import canonical, em, empirical, likelihood, synthetic
from latentbn.model import Cpt, WeightedDataset


@contextmanager
def criterion(capsys, label, budget_s):
    state = {"detail": ""}
    start = time.perf_counter()
    ok = False
    try:
        yield state
        ok = True
    finally:
        elapsed = time.perf_counter() - start
        ok = ok and elapsed < budget_s
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {label}: {state['detail']} ({elapsed:.2f}s / {budget_s}s)")
    assert elapsed < budget_s, f"{label} took {elapsed:.1f}s, budget {budget_s}s"


def full_joint_tensor(net):
    """P(X) as an n-axis array, multiplying each CPT broadcast onto its own axes."""
    cards = net.cards
    n = len(cards)
    out = np.ones(cards)
    for cpt in net.cpts:
        axes = list(cpt.parents) + [cpt.child]
        t = cpt.table.T.reshape([cards[a] for a in axes])
        order = np.argsort(axes)
        t = np.transpose(t, order)
        shape = [cards[a] if a in axes else 1 for a in range(n)]
        out = out * t.reshape(shape)
    return out


def perturb(net, rng, min_tv=0.05):
    z = int(rng.choice(net.internal))
    cpt = net.cpts[z]
    col = int(rng.integers(cpt.n_columns))
    p = cpt.table[:, col]
    while True:
        q = rng.dirichlet(np.ones(p.size))
        tv = 0.5 * np.abs(q - p).sum()
        if tv >= min_tv:
            break
    t = min(1.0, 2 * min_tv / tv)
    new = (1 - t) * p + t * q
    new /= new.sum()
    table = np.array(cpt.table)
    table[:, col] = new
    return net.replace_cpts([Cpt(z, cpt.parents, table)]), 0.5 * np.abs(new - p).sum()


def test_ac1_canonical_golden(capsys):
    with criterion(capsys, "AC1 golden canonicalisation of the two-node example", 1.0) as st:
        net = two_node()
        c = canonical.canonicalize(net)
        prior = c.prior(1)
        err = float(np.max(np.abs(prior - [0.12, 0.18, 0.28, 0.42])))
        assert err <= 1e-12
        np.testing.assert_array_equal(
            c.network.cpts[1].table, [[1, 1, 0, 0, 1, 0, 1, 0], [0, 0, 1, 1, 0, 1, 0, 1]]
        )
        enc = c.encodings[1]
        recon = math.fsum(prior[u] for u in range(enc.size) if enc.decode(u, 0) == 0)
        assert abs(recon - 0.3) <= 1e-12
        report = canonical.verify_reconstruction(net, c, tol=1e-12)
        assert report.ok
        st["detail"] = f"prior error {err:.1e}, P(Z=0|Y=0) rebuilt as {recon!r}"


def test_ac2_factorisation_soundness(capsys):
    with criterion(capsys, "AC2 empirical factorisation of P(Z)", 120) as st:
        rng = np.random.default_rng(2)
        worst = 0.0
        for _ in range(500):
            net = synthetic.random_network(random_spec(rng, max_roots=4, max_internal=5, max_card=3))
            joint = full_joint_tensor(net)
            pz = joint.sum(axis=tuple(net.latent)).ravel()
            s = empirical.empirical_structure(net)
            tables = likelihood.conditional_tables(net, s)
            states = np.array(list(np.ndindex(*[net.cards[z] for z in net.manifest])))
            prod = np.ones(len(states))
            for k, z in enumerate(s.manifest):
                t = tables[z]
                den = t.sum(axis=0)
                cond = np.divide(t, den, out=np.zeros_like(t), where=den > 0)
                prod *= cond[states[:, k], s.columns(z, states)]
            worst = max(worst, float(np.max(np.abs(prod - pz))))
        assert worst <= 1e-9
        st["detail"] = f"500 networks, max |prod P(z|w) - P(z)| = {worst:.1e}"


def test_ac3_dominance(capsys):
    with criterion(capsys, "AC3 l <= lambda*", 300) as st:
        rng = np.random.default_rng(3)
        worst = -math.inf
        for i in range(1000):
            net = synthetic.random_network(random_spec(rng))
            if i % 2:
                d = synthetic.sample_dataset(net, int(rng.integers(1, 200)), rng)
            else:
                d = synthetic.random_weights_dataset(net, rng, total=float(rng.uniform(0.5, 500)))
            cert = likelihood.certify_global_optimum(net, d)
            excess = cert.log_likelihood - cert.lambda_star
            worst = max(worst, excess)
            assert excess <= 1e-9
        st["detail"] = f"1000 pairs, max l - lambda* = {worst:.1e}"


def test_ac4_iff(capsys):
    with criterion(capsys, "AC4 compatibility iff l = lambda*", 180) as st:
        rng = np.random.default_rng(4)
        worst_gap = worst_res = 0.0
        min_perturbed = math.inf
        excluded = 0
        for _ in range(200):
            net = synthetic.random_network(random_spec(rng))
            d = synthetic.exact_weights_dataset(net, total=100.0)
            cert = likelihood.certify_global_optimum(net, d)
            worst_gap = max(worst_gap, abs(cert.gap))
            worst_res = max(worst_res, cert.max_residual)
            assert cert.gap <= 1e-9 and cert.max_residual <= 1e-9
            other, tv = perturb(net, rng)
            assert tv >= 0.05 - 1e-12
            cert2 = likelihood.certify_global_optimum(other, d)
            if cert2.max_residual <= 1e-6:
                excluded += 1
                continue
            min_perturbed = min(min_perturbed, cert2.max_residual)
            assert cert2.gap > 0
        assert excluded == 0
        st["detail"] = (
            f"exact data: max |gap| {worst_gap:.1e}, max residual {worst_res:.1e}; "
            f"perturbed: min residual {min_perturbed:.2e}, {excluded} excluded"
        )


def test_ac5_canonical_equivalence(capsys):
    with criterion(capsys, "AC5 likelihood of B equals likelihood of canonical B'", 120) as st:
        rng = np.random.default_rng(5)
        worst = 0.0
        for i in range(200):
            net = synthetic.random_network(random_spec(rng, max_parents=2))
            c = canonical.canonicalize(net)
            if i % 2:
                d = synthetic.sample_dataset(net, 100, rng)
            else:
                d = synthetic.random_weights_dataset(net, rng)
            a = likelihood.log_likelihood(net, d)
            b = canonical.canonical_log_likelihood(c, d)
            worst = max(worst, abs(a - b))
            assert abs(a - b) <= 1e-9
        st["detail"] = f"200 pairs, max |l - l'| = {worst:.1e}"


def test_ac6_em(capsys):
    with criterion(capsys, "AC6 EM monotone, bounded, reaches the ceiling when saturated", 300) as st:
        rng = np.random.default_rng(6)
        worst_drop = 0.0
        worst_excess = -math.inf
        for _ in range(100):
            net = synthetic.random_network(random_spec(rng, max_roots=2, max_internal=3, max_card=3))
            d = synthetic.sample_dataset(net, int(rng.integers(10, 100)), rng)
            cfg = em.EmConfig(restarts=2, seed=int(rng.integers(2**31)), max_iterations=300)
            fitted, trace, cert = em.em_fit(net, d, cfg)
            ll = trace.log_likelihoods
            drop = max((a - b for a, b in zip(ll, ll[1:])), default=0.0)
            worst_drop = max(worst_drop, drop)
            worst_excess = max(worst_excess, ll[-1] - cert.lambda_star)
            assert trace.is_monotone(1e-12)
            assert ll[-1] <= cert.lambda_star + 1e-9
        d = WeightedDataset([1], {(0,): 0.38, (1,): 0.62})
        _, trace, cert = em.em_fit(two_node(), d, em.EmConfig(restarts=10, seed=0))
        lam = 0.38 * math.log(0.38) + 0.62 * math.log(0.62)
        fig_err = abs(trace.log_likelihoods[-1] - lam)
        assert fig_err <= 1e-6 and cert.optimal
        st["detail"] = (
            f"100 runs, worst step decrease {worst_drop:.1e}, max l - lambda* {worst_excess:.1e}; "
            f"two-node |l - lambda*| = {fig_err:.1e}"
        )


def test_ac7_lambda_star_maximal(capsys):
    with criterion(capsys, "AC7 lambda* dominates random multinomial parameters", 60) as st:
        rng = np.random.default_rng(7)
        worst = -math.inf
        for _ in range(50):
            net = synthetic.random_network(random_spec(rng, max_roots=2, max_internal=3, max_card=2))
            d = synthetic.random_weights_dataset(net, rng, total=float(rng.uniform(1, 100)))
            s = empirical.empirical_structure(net)
            e = empirical.fit_empirical(s, d)
            lam = empirical.lambda_star(e, d)
            for _ in range(1000):
                params = {z: rng.dirichlet(np.ones(t.shape[0]), size=t.shape[1]).T for z, t in e.params.items()}
                value = empirical.multinomial_log_likelihood(e.with_params(params), d)
                worst = max(worst, value - lam)
                assert value <= lam + 1e-12
        st["detail"] = f"50 datasets x 1000 draws, max lambda(theta) - lambda* = {worst:.1e}"


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
