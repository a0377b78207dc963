import io

import numpy as np
import pytest

import grassrec as gr


def test_rank_one_moment_anchor():
    x = np.diag([1.0, 0.0, 0.0])
    assert gr.trace_moment(gr.e1(3), 3, x) == pytest.approx(1 / 7, rel=1e-12)
    assert gr.rank1_projector_moment(1, 3, 3) == pytest.approx(1 / 7, rel=1e-12)


def test_zonal_against_monomials():
    x = np.diag([1.0, 1.0, 0.0])
    assert gr.zonal([2, 1], x) == pytest.approx(24 / 5)
    assert gr.zonal([1, 1, 1], np.eye(3)) == pytest.approx(2.0)


def test_haar_draws_have_the_spectrum():
    p = gr.haar_sample([1.0, 0.5, 0.0, 0.0], seed=3)
    assert np.allclose(p, p.T)
    assert np.allclose(np.sort(np.linalg.eigvalsh(p)), [0.0, 0.0, 0.5, 1.0])


def test_cubature_roundtrip(tmp_path):
    ens = gr.build_cubature(gr.e1(3), 2, seed=5)
    assert ens["max_residual"] <= 1e-8
    assert gr.verify_strength(ens["spectrum"], ens["atoms"], ens["weights"], 2)["passed"]
    path = str(tmp_path / "ens.txt")
    gr.save_ensemble(path, ens["spectrum"], ens["atoms"], ens["weights"], 2)
    back = gr.load_ensemble(path)
    assert back["t"] == 2
    assert np.allclose(back["weights"], ens["weights"])


def test_recovery_and_isometry():
    rng = np.random.default_rng(0)
    d = 5
    x = rng.standard_normal(d)
    atoms = gr.haar_samples(gr.e1(d), 4 * d, seed=11)
    b = gr.measure(x, atoms)
    assert np.allclose(b, [x @ p @ x for p in atoms])
    res = gr.solve(atoms, b, float(x @ x), tol=1e-9, max_iter=20000)
    assert res["converged"]
    assert gr.recovery_error(res["x_hat"], x) < 1e-6
    iso = gr.isometry_constants(atoms, x)
    assert 0 < iso["alpha"] <= iso["beta_exact"] <= iso["beta_bound"] + 1e-12


def test_golfing_and_guarantee():
    x = np.ones(6)
    rep = gr.golfing_certificate(x, gr.e1(6), seed=2)
    assert rep["in_span"]
    assert rep["gamma_measured"] <= 2 / (100 * 6)
    holds, lhs, rhs = gr.deterministic_guarantee(0.25, 1.0, 0.1, 0.2)
    assert holds and lhs == pytest.approx(2.0) and rhs == pytest.approx(8.0)


def test_errors_map_to_python():
    with pytest.raises(ValueError):
        gr.trace_moment([1.0, 1.0, 0.0, 0.0], 4, np.eye(4))
    with pytest.raises(ValueError):
        gr.golfing_certificate(np.ones(4), gr.e1(4), c0=1.0)


def test_sweep_is_deterministic():
    cfg = "d_list = 4\nk_list = 1\nn_list = 8, 16\ntrials = 2\nseed = 9\n"
    a = gr.run_sweep(cfg)
    assert a == gr.run_sweep(cfg)
    rows = a.strip().splitlines()
    assert rows[0].startswith("d,k,n,t,trial,seed")
    assert len(rows) == 5
