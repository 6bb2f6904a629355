import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import connected_graphs
from gwdict.approx import (
    SNR_CAP_DB,
    approximation_curve,
    l0,
    localize,
    nmse,
    nonlinear_approx,
    omp,
    pc_sparsity_bound,
    ps_sparsity_bound,
    reconstruct,
    snr_db,
)
from gwdict.dictionary import build_pc_dict, build_ps_dict, delta_dict, fourier_dict
from gwdict.graph import build_graph
from gwdict.multires import analyze, decompose, wavelet_basis
from gwdict.signals import gen_graph, gen_pc, gen_pieces
from oracles import min_exact_support


class TestMetrics:
    def test_examples(self):
        x = np.array([1.0, -2.0, 3.0])
        assert nmse(x, x) == 0.0 and snr_db(x, x) == SNR_CAP_DB
        assert nmse(np.zeros(3), x) == 1.0 and snr_db(np.zeros(3), x) == 0.0
        assert nmse(2 * x, x) == 1.0 and snr_db(2 * x, x) == 0.0

    def test_zero_reference_rejected(self):
        with pytest.raises(ValueError):
            nmse(np.ones(3), np.zeros(3))

    def test_snr_is_log_of_nmse(self):
        x = np.ones(4)
        assert snr_db(x * 1.1, x) == pytest.approx(-10 * np.log10(0.01))

    def test_l0_threshold(self):
        assert l0([0.0, 1e-11, 1e-9, -3.0]) == 2


class TestNonlinearApprox:
    def test_examples(self, path4, rng):
        w = wavelet_basis(decompose(path4))
        _, rep = nonlinear_approx(w, w.toarray()[:, 0], 1)
        assert rep.nmse == pytest.approx(0.0, abs=1e-30)
        _, rep = nonlinear_approx(w, np.array([1.0, 1.0, 0.0, 0.0]), 2)
        assert rep.nmse == pytest.approx(0.0, abs=1e-30)
        _, rep = nonlinear_approx(w, rng.standard_normal(4), 4)
        assert rep.nmse == pytest.approx(0.0, abs=1e-28)

    def test_budget_range(self, path4):
        w = wavelet_basis(decompose(path4))
        for m in (0, 5):
            with pytest.raises(ValueError):
                nonlinear_approx(w, np.ones(4), m)

    def test_ties_prefer_lower_column(self):
        x_hat, _ = nonlinear_approx(np.eye(3), np.array([1.0, 1.0, 1.0]), 1)
        np.testing.assert_array_equal(x_hat, [1.0, 0.0, 0.0])

    @settings(max_examples=20, deadline=None)
    @given(connected_graphs(min_nodes=3, max_nodes=16), st.integers(0, 2**32 - 1))
    def test_best_m_term_beats_random_subsets(self, g, seed):
        rng = np.random.default_rng(seed)
        w = wavelet_basis(decompose(g))
        dense = w.toarray()
        x = rng.standard_normal(g.n)
        a = analyze(w, x)
        for m in range(1, g.n + 1):
            _, rep = nonlinear_approx(w, x, m)
            for _ in range(200 // g.n + 1):
                keep = rng.choice(g.n, size=m, replace=False)
                assert rep.nmse <= nmse(dense[:, keep] @ a[keep], x) + 1e-12


class TestOmp:
    def test_single_atom_signal(self, path4):
        d = build_pc_dict(decompose(path4))
        code = omp(d, 3 * d.atom(2), 5)
        assert code.iterations == 1 and code.support == (2,)
        assert nmse(reconstruct(d, code), 3 * d.atom(2)) <= 1e-30

    def test_path4_pc_signal_within_bound(self, path4):
        tree = decompose(path4)
        d = build_pc_dict(tree)
        x = np.array([3.0, 3.0, 5.0, 5.0])
        bound = pc_sparsity_bound(path4, tree, x)
        assert bound == 3
        code = omp(d, x, bound, 1e-9)
        assert code.iterations <= bound
        assert nmse(reconstruct(d, code), x) <= 1e-12
        best = min_exact_support(d.toarray(), x, max_size=3)
        assert best is not None and best <= code.iterations

    def test_orthogonal_signal_exhausts_budget(self, path4):
        root = build_pc_dict(decompose(path4)).toarray()[:, :1]
        x = np.array([1.0, -1.0, 1.0, -1.0])
        code = omp(root, x, 3)
        assert code.iterations == 0
        assert nmse(reconstruct(root, code), x) == 1.0

    def test_zero_signal_rejected(self, path4):
        with pytest.raises(ValueError):
            omp(np.eye(4), np.zeros(4), 2)

    def test_duplicate_atoms_are_skipped(self):
        d = np.array([[1.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
        code = omp(d, np.array([2.0, 1.0]), 3)
        assert code.support == (0, 2)

    def test_ties_go_to_lower_index(self):
        code = omp(np.eye(3), np.array([1.0, 1.0, 1.0]), 1)
        assert code.support == (0,)

    @settings(max_examples=40, deadline=None)
    @given(connected_graphs(min_nodes=2, max_nodes=40), st.integers(0, 2**32 - 1), st.integers(1, 4))
    def test_residual_properties(self, g, seed, k):
        rng = np.random.default_rng(seed)
        d = build_ps_dict(decompose(g), k)
        x = rng.standard_normal(g.n)
        code = omp(d, x, g.n, 1e-12)
        hist = np.array(code.residual_history)
        assert np.all(np.diff(hist) <= 1e-12 * hist[0])
        assert len(set(code.support)) == len(code.support) == len(code.coefficients)
        r = x - reconstruct(d, code)
        assert np.linalg.norm(r) == pytest.approx(code.residual_norm, abs=1e-12)
        chosen = d.toarray()[:, list(code.support)]
        assert np.abs(chosen.T @ r).max(initial=0.0) <= 1e-8


class TestLocalize:
    def test_noise_free_recovers_exactly(self):
        tree = decompose(gen_graph("grid", rows=6, cols=6))
        d = build_ps_dict(tree, 3)
        x = d.toarray()[:, 5] * 2 - d.toarray()[:, 6]
        x_hat, rep = localize(d, x, truth=x)
        assert rep.snr_db == SNR_CAP_DB
        assert rep.budget <= 3

    def test_immediate_stop_gives_zero(self):
        d = build_pc_dict(decompose(gen_graph("path", n=8)))
        x = np.arange(8.0)
        x_hat, rep = localize(d, x, tol=1.0, truth=x)
        np.testing.assert_array_equal(x_hat, 0)
        assert rep.snr_db == 0.0

    def test_sigma_sets_stopping_rule(self, rng):
        tree = decompose(gen_graph("grid", rows=8, cols=8))
        d = build_ps_dict(tree, 3)
        x = np.zeros(64)
        x[list(tree.nodes[3].piece.nodes)] = 4.0
        y = x + 0.3 * rng.standard_normal(64)
        _, rep = localize(d, y, sigma=0.3, truth=x)
        assert rep.budget < 64
        assert rep.snr_db > snr_db(y, x)


class TestCurves:
    def test_best_is_nonincreasing(self, rng):
        g = gen_graph("grid", rows=6, cols=6)
        tree = decompose(g)
        x = gen_pc(gen_pieces(tree, 4, rng), rng, n=g.n).values + 0.1 * rng.standard_normal(g.n)
        for d in (build_pc_dict(tree), build_ps_dict(tree, 2), fourier_dict(g)):
            curve = approximation_curve(d, x, range(1, 37))
            e = [r.nmse for r in curve]
            assert all(b <= a + 1e-12 for a, b in zip(e, e[1:]))

    def test_best_never_worse_than_either(self, rng):
        g = gen_graph("erdos_renyi", seed=3, n=30)
        d = build_ps_dict(decompose(g), 2)
        x = rng.standard_normal(30)
        budgets = [1, 3, 7, 15]
        best = approximation_curve(d, x, budgets, "best")
        for strat in ("nla", "omp"):
            other = approximation_curve(d, x, budgets, strat)
            assert all(b.nmse <= o.nmse for b, o in zip(best, other))

    def test_omp_curve_matches_direct_runs(self, rng):
        g = gen_graph("ring", n=20)
        d = build_pc_dict(decompose(g))
        x = rng.standard_normal(20)
        for rep in approximation_curve(d, x, [1, 4, 9], "omp"):
            code = omp(d, x, rep.budget, 0.0)
            assert rep.nmse == pytest.approx(nmse(reconstruct(d, code), x), rel=1e-8, abs=1e-14)

    def test_orthonormal_nla_matches_keep_largest(self, rng):
        d = delta_dict(10)
        x = rng.standard_normal(10)
        rep = approximation_curve(d, x, [3], "nla")[0]
        kept = np.sort(x**2)[::-1][:3].sum()
        assert rep.nmse == pytest.approx(1 - kept / (x @ x))

    def test_rejects_unknown_strategy(self):
        with pytest.raises(ValueError):
            approximation_curve(np.eye(2), np.ones(2), [1], "magic")


class TestBounds:
    def test_pc_examples(self, path4):
        tree = decompose(path4)
        assert pc_sparsity_bound(path4, tree, np.ones(4)) == 1
        assert pc_sparsity_bound(path4, tree, [1, 1, 0, 0]) == 3
        assert pc_sparsity_bound(path4, tree, [1, 0, 1, 0]) == 7

    def test_ps_examples(self):
        g = gen_graph("path", n=16)
        tree = decompose(g)
        assert tree.depth == 4
        assert ps_sparsity_bound(g, tree, np.ones(16), 3) == 1
        x_pc = np.r_[np.ones(8), 2 * np.ones(8)]
        assert ps_sparsity_bound(g, tree, x_pc, 3) == 25
        assert ps_sparsity_bound(g, tree, x_pc, 1) == 1 + 2 * 1 * 4


def _all_small_graphs():
    out = [build_graph(n, [(i, i + 1) for i in range(n - 1)]) for n in range(2, 11)]
    out += [gen_graph("ring", n=n) for n in range(3, 11)]
    out += [gen_graph("star", leaves=k) for k in range(2, 10)]
    out += [gen_graph("erdos_renyi", seed=s, n=6 + s % 5, p=0.45) for s in range(10)]
    return out


@pytest.mark.parametrize("g", _all_small_graphs(), ids=lambda g: f"n{g.n}e{g.n_edges}")
def test_exhaustive_minimal_support_within_bound(g):
    rng = np.random.default_rng(g.n * 100 + g.n_edges)
    tree = decompose(g)
    dense = build_pc_dict(tree).toarray()
    w = wavelet_basis(tree)
    for c in range(1, min(g.n, 4) + 1):
        x = gen_pc(gen_pieces(tree, c, rng), rng, distinct=True, n=g.n).values
        bound = pc_sparsity_bound(g, tree, x)
        assert l0(analyze(w, x)) <= bound
        best = min_exact_support(dense, x, max_size=min(bound, g.n))
        assert best is not None and best <= bound
        code = omp(dense, x, bound, 1e-9)
        assert code.iterations <= bound and code.residual_norm <= 1e-9 * np.linalg.norm(x)
