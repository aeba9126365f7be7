import numpy as np
import pytest
from numpy.testing import assert_allclose

from nnha import (
    Coloring,
    FormatError,
    Graph,
    ParameterError,
    QaoaParams,
    RydbergModel,
    SearchBox,
    cut_value,
    dfo_maximize,
    estimate_objective,
    greedy_flip,
    kings_subgraph,
    load_angle_table,
    maxcut_objective,
    mis_cluster_objective,
    mis_greedy_objective,
    nested_optimize_spectral,
    qaoa_angle_setup,
    qaoa_expectation,
    qaoa_state,
    random_regular,
    spectral_lambda_objective,
)
from nnha.samplers import QuenchParams, quench_sample


# --- dfo_maximize ------------------------------------------------------------


def test_dfo_concave_quadratic():
    box = SearchBox(lower=[0.0], upper=[1.0], initial=[0.85], max_iters=30)
    result = dfo_maximize(lambda x: -((x[0] - 0.3) ** 2), box, seed=3)
    assert result.evaluations <= 30
    assert abs(result.best_params[0] - 0.3) < 0.02


def test_dfo_flat_objective_returns_initial():
    box = SearchBox(lower=[0.0, 0.0], upper=[1.0, 1.0], initial=[0.4, 0.6],
                    max_iters=20)
    result = dfo_maximize(lambda x: 2.5, box, seed=1)
    assert_allclose(result.best_params, [0.4, 0.6])
    assert len(result.history) == result.evaluations


def test_dfo_noisy_quadratic_median_accuracy():
    box = SearchBox(lower=[0.0], upper=[1.0], initial=[0.9], max_iters=30)
    errors = []
    for seed in range(20):
        rng = np.random.default_rng(2000 + seed)
        result = dfo_maximize(
            lambda x: -((x[0] - 0.3) ** 2) + 0.05 * rng.normal(), box, seed=seed
        )
        errors.append(abs(result.best_params[0] - 0.3))
    assert np.median(errors) < 0.1


def test_dfo_never_leaves_box():
    lower = np.array([-1.0, 2.0])
    upper = np.array([1.0, 5.0])
    box = SearchBox(lower=lower, upper=upper, initial=[0.9, 4.9], max_iters=40)
    seen = []

    def objective(x):
        seen.append(x.copy())
        return float(np.sum(x))

    dfo_maximize(objective, box, seed=5)
    seen = np.array(seen)
    assert np.all(seen >= lower - 1e-12)
    assert np.all(seen <= upper + 1e-12)


def test_dfo_history_records_tuple_objectives():
    box = SearchBox(lower=[0.0], upper=[1.0], initial=[0.5], max_iters=10)
    result = dfo_maximize(lambda x: (float(x[0]), 0.25, 100), box, seed=0)
    assert all(rec.shots == 100 for rec in result.history)
    assert all(rec.stderr == 0.25 for rec in result.history)
    assert result.evaluations <= 10


def test_search_box_validation():
    with pytest.raises(ParameterError):
        SearchBox(lower=[0.0], upper=[0.0], initial=[0.0])
    with pytest.raises(ParameterError):
        SearchBox(lower=[0.0], upper=[1.0], initial=[2.0])


# --- estimate_objective ---------------------------------------------------------


def test_maxcut_objective_guarantee_bound():
    g = random_regular(12, 3, seed=0)
    spec = maxcut_objective(g, p=0, shots=100)
    mean, stderr = estimate_objective(spec, np.array([]), seed=1)
    assert mean / g.num_edges >= 2 / 3
    assert stderr >= 0.0


def test_estimate_objective_deterministic_in_seed():
    g = random_regular(10, 3, seed=1)
    spec = maxcut_objective(g, p=1, shots=30)
    params = np.array([0.6, 0.4])
    assert estimate_objective(spec, params, seed=9) == estimate_objective(
        spec, params, seed=9
    )


def test_constant_reservoir_mis_objective_low_spread():
    g = kings_subgraph(3, 3, 0.2, seed=2)
    model = RydbergModel()
    spec = mis_greedy_objective(g, model, shots=40)
    # tiny protocol: nearly no evolution, so shots are ~all-zeros and the
    # spread reflects greedy tie randomness only
    mean, stderr = estimate_objective(
        spec, np.array([0.02, -10.0, -5.0]), seed=3
    )
    assert mean >= 1.0
    assert stderr < 0.2


def test_estimate_objective_matches_enumeration_oracle():
    # oracle: full 2^n distribution, flip-averaged per bit string
    g = random_regular(6, 3, seed=3)
    p = 1
    params = np.array([0.7, 0.35])
    qp = QaoaParams(betas=params[p:], gammas=params[:p])
    psi = qaoa_state(g, qp)
    prob = np.abs(psi) ** 2
    rng = np.random.default_rng(0)
    expected = 0.0
    for z in range(1 << 6):
        if prob[z] < 1e-12:
            continue
        bits = (z >> np.arange(6)) & 1
        flips = [
            cut_value(g, greedy_flip(g, Coloring.from_bits(bits), rng))
            for _ in range(40)
        ]
        expected += prob[z] * np.mean(flips)
    spec = maxcut_objective(g, p=1, shots=4000)
    mean, stderr = estimate_objective(spec, params, seed=8)
    assert abs(mean - expected) < 4 * max(stderr, 0.01)


# --- angle setup -----------------------------------------------------------------


def test_angle_setup_p0_empty():
    g = Graph(2, [(0, 1)])
    qp = qaoa_angle_setup(g, 0)
    assert qp.p == 0 and qp.betas == () and qp.gammas == ()


def test_angle_setup_single_edge_reaches_full_cut():
    g = Graph(2, [(0, 1)])
    qp = qaoa_angle_setup(g, 1, seed=5)
    assert qaoa_expectation(g, qp) > 1.0 - 1e-3


def test_angle_setup_depth_never_hurts():
    g = random_regular(12, 3, seed=6)
    v1 = qaoa_expectation(g, qaoa_angle_setup(g, 1, seed=7, starts=2))
    v2 = qaoa_expectation(g, qaoa_angle_setup(g, 2, seed=7, starts=2))
    assert v2 >= v1 - 1e-9


def test_angle_table_round_trip(tmp_path):
    path = tmp_path / "angles.txt"
    path.write_text("# nu p gammas betas\n3 1 0.616 0.393\n3 2 0.5 0.7 0.4 0.2\n")
    table = load_angle_table(path)
    assert table[(3, 1)].gammas == (0.616,)
    assert table[(3, 2)].betas == (0.4, 0.2)
    g = Graph(2, [(0, 1)])
    qp = qaoa_angle_setup(g, 1, mode="table", table_path=path, nu=3)
    assert qp.gammas == (0.616,)
    with pytest.raises(ParameterError):
        qaoa_angle_setup(g, 3, mode="table", table_path=path, nu=3)


def test_angle_table_malformed(tmp_path):
    path = tmp_path / "angles.txt"
    path.write_text("3 2 0.5 0.7 0.4\n")
    with pytest.raises(FormatError):
        load_angle_table(path)


def test_triangle_free_angle_anchor():
    # On a triangle-free nu-regular graph every edge shares the tree-like
    # p=1 environment, so the optimized cut fraction equals the closed form
    # 1/2 + (1 / (2 sqrt(nu))) * ((nu - 1) / nu)^((nu - 1) / 2) exactly.
    g = random_regular(16, 3, seed=6)  # seed 6 has no triangles
    adj = [set(g.neighbors(v).tolist()) for v in range(g.n)]
    assert sum(len(adj[i] & adj[j]) for i, j in g.edges) == 0
    qp = qaoa_angle_setup(g, 1, seed=900, starts=3)
    anchor = 0.5 + (1.0 / (2.0 * np.sqrt(3.0))) * (2.0 / 3.0)
    assert abs(qaoa_expectation(g, qp) / g.num_edges - anchor) < 1e-3


def test_ensemble_angle_value_matches_frozen_oracle():
    # Frozen by exact state-vector optimization over this seeded ensemble
    # (independently cross-checked against a dense angle grid + simplex
    # polish).  Triangle-free graphs attain ~0.6924 per edge at p=1; random
    # 3-regular 16-vertex graphs average ~1.3 triangles, which lowers the
    # ensemble mean to ~0.684.
    fracs = []
    for s in range(6):
        g = random_regular(16, 3, seed=s)
        qp = qaoa_angle_setup(g, 1, seed=500 + s, starts=3)
        fracs.append(qaoa_expectation(g, qp) / g.num_edges)
    assert abs(float(np.mean(fracs)) - 0.6793) < 0.005


# --- lambda objective and nested optimization -------------------------------------


def _kcut_setup(seed=0):
    g = kings_subgraph(2, 3, 0.0, seed=seed)
    model = RydbergModel()
    quenches = [QuenchParams(t=0.3, delta=4.0), QuenchParams(t=0.6, delta=9.0)]
    shot_sets = [quench_sample(g, q, model, 60, seed=i) for i, q in enumerate(quenches)]
    return g, model, shot_sets


def test_lambda_objective_uses_cached_shots():
    g, _, shot_sets = _kcut_setup()
    spec = spectral_lambda_objective(g, shot_sets, k=3, reps=3)
    mean, stderr = estimate_objective(spec, np.array([1.0, 0.5]), seed=1)
    assert 0 <= mean <= g.num_edges


def test_nested_optimize_single_outer_budget():
    g = kings_subgraph(2, 3, 0.0, seed=1)
    params = nested_optimize_spectral(
        g, RydbergModel(), outer_budget=1, inner_budget=8, seed=2,
        k=3, n_ansatz=2, shots=40, reps=2,
    )
    assert len(params.quenches) == 2
    assert len(params.lambdas) == 2
    assert all(0.0 <= q.t <= 4.0 for q in params.quenches)
    assert all(0.0 <= q.delta <= 15.0 for q in params.quenches)
    assert all(-1.0 <= lam <= 1.0 for lam in params.lambdas)


def test_nested_optimize_matches_classical_baseline():
    # trend check: the optimized hybrid should at least keep pace with the
    # greedy-post-processed random baseline
    from nnha import classical_limit_kcut

    g = kings_subgraph(2, 3, 0.0, seed=4)
    params = nested_optimize_spectral(
        g, RydbergModel(), outer_budget=2, inner_budget=10, seed=5,
        k=3, n_ansatz=2, shots=60, reps=3,
    )
    spec = spectral_lambda_objective(
        g, [quench_sample(g, q, RydbergModel(), 60, seed=i)
            for i, q in enumerate(params.quenches)],
        k=3, reps=10,
    )
    nested_mean, _ = estimate_objective(spec, np.array(params.lambdas), seed=6)
    classical = [cut_value(g, classical_limit_kcut(g, 3, seed=100 + s))
                 for s in range(10)]
    assert nested_mean >= np.mean(classical) - 0.5


def test_mis_cluster_objective_returns_trajectory_values():
    g = kings_subgraph(3, 3, 0.2, seed=3)
    spec = mis_cluster_objective(g, RydbergModel(), epochs=2, reservoir_shots=32)
    mean, stderr = estimate_objective(spec, np.array([0.5, -10.0, 20.0]), seed=4)
    assert mean >= 1.0
