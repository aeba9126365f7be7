import warnings

import numpy as np
import pytest

from nnha import (
    AnnealRun,
    Graph,
    IndependentSet,
    ParameterError,
    Reservoir,
    SandpileState,
    brute_force_mis,
    classical_reservoir,
    kings_subgraph,
    merge_solutions,
    metropolis_accept,
    mis_status,
    random_regular,
    run_cluster_sa,
    sandpile_cluster,
    uniform_sample,
)


# --- sandpile ----------------------------------------------------------------


def test_sandpile_single_edge_cluster_sizes():
    g = Graph(2, [(0, 1)])
    sizes = []
    state = SandpileState.fresh(g, dissipation=0.05, seed=0)
    for _ in range(400):
        cluster = sandpile_cluster(g, state)
        sizes.append(len(cluster))
    # one vertex topples; the shed grain ping-pongs until a dissipation draw
    # kills it, so clusters have size 1 (first grain destroyed) or 2
    assert set(sizes) == {1, 2}
    assert np.mean(np.array(sizes) == 1) < 0.2  # destruction chance is only 5%


def test_sandpile_full_dissipation_single_vertex_clusters():
    g = random_regular(10, 3, seed=1)
    state = SandpileState.fresh(g, dissipation=1.0, seed=2)
    for _ in range(200):
        assert len(sandpile_cluster(g, state)) == 1


def test_sandpile_isolated_vertex_trivial_cluster():
    g = Graph(1, [])
    state = SandpileState.fresh(g, seed=3)
    cluster = sandpile_cluster(g, state)
    assert list(cluster) == [0]


def test_sandpile_clusters_nonempty_connected_and_stabilized():
    g = kings_subgraph(5, 5, 0.2, seed=4)
    state = SandpileState.fresh(g, seed=5)
    for _ in range(300):
        cluster = sandpile_cluster(g, state)
        assert len(cluster) >= 1
        members = set(cluster.tolist())
        if len(members) > 1:
            # connected in g: every member touches another member
            for v in members:
                assert members.intersection(g.neighbors(v).tolist())
        positive = g.degrees > 0
        assert np.all(state.grains[positive] < g.degrees[positive])


def test_sandpile_heavy_tail_small():
    g = kings_subgraph(8, 8, 0.0, seed=6)
    state = SandpileState.fresh(g, seed=7)
    sizes = [len(sandpile_cluster(g, state)) for _ in range(3000)]
    assert min(sizes) == 1
    assert max(sizes) >= 30


def test_sandpile_state_persists_across_draws():
    g = random_regular(12, 3, seed=8)
    state = SandpileState.fresh(g, seed=9)
    for _ in range(50):
        sandpile_cluster(g, state)
    assert state.grains.sum() > 0


# --- merge -------------------------------------------------------------------


def _iset(g, members):
    return IndependentSet.from_members(g, members)


def test_merge_empty_cluster_keeps_solution(path3):
    chi = _iset(path3, {0, 2})
    out = merge_solutions(path3, chi, _iset(path3, {1}), [], seed=0)
    assert out.members == {0, 2}


def test_merge_full_cluster_replaces(path3):
    chi = _iset(path3, {0, 2})
    chi_prime = _iset(path3, {1})
    out = merge_solutions(path3, chi, chi_prime, [0, 1, 2], seed=0)
    assert out.members == {1}


def test_merge_boundary_repair(path3):
    chi = _iset(path3, {0, 2})
    chi_prime = _iset(path3, {1})
    outcomes = set()
    for seed in range(30):
        out = merge_solutions(path3, chi, chi_prime, [1], seed=seed)
        ind, mx, _ = mis_status(path3, out.members)
        assert ind and mx
        outcomes.add(frozenset(out.members))
    assert outcomes <= {frozenset({0, 2}), frozenset({1})}


# --- metropolis -------------------------------------------------------------


def test_metropolis_improvements_always_accepted():
    for beta in (0.0, 1.0, np.inf):
        assert metropolis_accept(1, beta, seed=0)
        assert metropolis_accept(0, beta, seed=0)


def test_metropolis_infinite_beta_rejects_decrease():
    assert not metropolis_accept(-1, np.inf, seed=0)


def test_metropolis_rate_matches_closed_form():
    beta = np.log(2.0)
    rng = np.random.default_rng(10)
    accepts = sum(metropolis_accept(-1, beta, rng) for _ in range(10_000))
    rate = accepts / 10_000
    assert abs(rate - 0.5) < 3 * np.sqrt(0.25 / 10_000)


def test_metropolis_rejects_negative_beta():
    with pytest.raises(ParameterError):
        metropolis_accept(1, -0.5, seed=0)


# --- reservoir ---------------------------------------------------------------


def test_reservoir_cycles_with_warning():
    pool = Reservoir(uniform_sample(4, 3, seed=0).shots)
    draws = pool.draws(np.random.default_rng(1))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        seen = [tuple(next(draws)) for _ in range(7)]
    assert len(seen) == 7
    assert any("reshuffling" in str(w.message) for w in caught)


def test_constant_reservoir_silent():
    pool = classical_reservoir(Graph(3, []))
    draws = pool.draws(np.random.default_rng(0))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        rows = [next(draws) for _ in range(5)]
    assert not caught
    assert not np.any(rows)


# --- run_cluster_sa -----------------------------------------------------------


def _toy_instance(seed=0):
    g = kings_subgraph(3, 4, 0.2, seed=seed)
    return g


def test_run_infinite_beta_monotone_objective():
    g = _toy_instance(1)
    run = AnnealRun(classical_reservoir(g), epochs=3, beta_schedule=(np.inf,))
    best, trajectory = run_cluster_sa(g, run, seed=2)
    objectives = [rec.objective for rec in trajectory]
    assert all(b >= a for a, b in zip(objectives, objectives[1:]))
    assert best.size == objectives[-1]


def test_run_intermediate_solutions_always_valid():
    g = _toy_instance(3)
    pool = Reservoir(uniform_sample(g.n, 64, seed=4).shots)
    run = AnnealRun(pool, epochs=2, beta_schedule=(1.0,))
    _, trajectory = run_cluster_sa(g, run, seed=5)
    # re-run manually tracking validity via the accepted objective record
    assert all(rec.objective >= 1 for rec in trajectory)
    best, _ = run_cluster_sa(g, run, seed=5)
    ind, mx, _ = mis_status(g, best.members)
    assert ind and mx


def test_run_reaches_brute_force_on_toy():
    g = _toy_instance(6)
    opt, _ = brute_force_mis(g)
    run = AnnealRun(classical_reservoir(g), epochs=6, beta_schedule=(np.inf,))
    best, _ = run_cluster_sa(g, run, seed=7)
    assert best.size <= opt
    assert best.size >= opt - 1


def test_run_seed_determinism():
    g = _toy_instance(8)
    pool = Reservoir(uniform_sample(g.n, 32, seed=9).shots)
    run = AnnealRun(pool, epochs=2, beta_schedule=(np.inf,))
    best_a, traj_a = run_cluster_sa(g, run, seed=11)
    best_b, traj_b = run_cluster_sa(g, run, seed=11)
    assert best_a.members == best_b.members
    assert traj_a == traj_b


def test_run_full_dissipation_single_vertex_updates():
    g = _toy_instance(10)
    run = AnnealRun(classical_reservoir(g), epochs=2, beta_schedule=(np.inf,),
                    dissipation=1.0)
    _, trajectory = run_cluster_sa(g, run, seed=12)
    assert all(rec.cluster_size == 1 for rec in trajectory)


def test_run_beta_schedule_validation():
    g = _toy_instance(11)
    with pytest.raises(ParameterError):
        AnnealRun(classical_reservoir(g), epochs=2, beta_schedule=(1.0, 2.0, 3.0))
    with pytest.raises(ParameterError):
        AnnealRun(classical_reservoir(g), epochs=0)
    run = AnnealRun(classical_reservoir(g), epochs=2, beta_schedule=(0.5, np.inf))
    assert run.beta_schedule == (0.5, np.inf)


def test_pair_cluster_mode_hamming_two_moves():
    g = _toy_instance(14)
    run = AnnealRun(classical_reservoir(g), epochs=2, beta_schedule=(np.inf,),
                    cluster_mode="pair")
    best, trajectory = run_cluster_sa(g, run, seed=15)
    assert all(rec.cluster_size <= 2 for rec in trajectory)
    ind, mx, _ = mis_status(g, best.members)
    assert ind and mx


def test_radius_cluster_mode():
    g = _toy_instance(16)
    run = AnnealRun(classical_reservoir(g), epochs=2, beta_schedule=(np.inf,),
                    cluster_mode="radius", cluster_radius=1)
    best, trajectory = run_cluster_sa(g, run, seed=17)
    max_nbhd = 1 + int(g.degrees.max())
    assert all(1 <= rec.cluster_size <= max_nbhd for rec in trajectory)
    ind, mx, _ = mis_status(g, best.members)
    assert ind and mx


def test_cluster_mode_validation():
    g = _toy_instance(18)
    with pytest.raises(ParameterError):
        AnnealRun(classical_reservoir(g), epochs=1, cluster_mode="bogus")


def test_classical_limit_equals_greedy_resampling_inside_clusters():
    # with the all-zeros reservoir every update re-greedies the cluster region
    g = _toy_instance(12)
    run = AnnealRun(classical_reservoir(g), epochs=2, beta_schedule=(np.inf,))
    best, trajectory = run_cluster_sa(g, run, seed=13)
    ind, mx, _ = mis_status(g, best.members)
    assert ind and mx
    assert trajectory[0].objective >= 1
