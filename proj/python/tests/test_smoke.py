import math
import os

import numpy as np
import pytest

import bmfl

MODELS = os.environ.get("BMFL_MODELS_DIR", os.path.join(os.path.dirname(__file__), "..", "..", "models"))


def model(stem):
    return bmfl.load_model(os.path.join(MODELS, stem + ".json"))


def test_basis_and_product_state():
    basis = bmfl.OccupationBasis(2, 4)
    assert len(basis) == 5
    assert basis.state(0) == [4, 0]
    assert basis.index_of([4, 0]) == 0
    assert bmfl.OccupationBasis.dimension(3, 4) == 15

    u = np.array([1, 1], dtype=complex) / math.sqrt(2)
    psi = bmfl.product_state(basis, u)
    assert np.linalg.norm(psi) == pytest.approx(1.0, abs=1e-12)
    # |amplitude|^2 follows the binomial distribution in the occupations
    weights = [abs(a) ** 2 for a in psi]
    assert weights[0] == pytest.approx(1 / 16, abs=1e-12)


def test_ground_state_matches_dense_diagonalization():
    spec = model("dimer_repulsive")
    basis = bmfl.OccupationBasis(spec.modes, 4)
    H = bmfl.assemble(spec, basis).toarray()
    evals = np.linalg.eigvalsh(H)
    g = bmfl.ground_state(spec, 4)
    assert g.energy == pytest.approx(evals[0], abs=1e-10)
    assert g.residual < 1e-9
    gamma1 = bmfl.reduce(basis, g.state.amplitudes, 1)
    assert np.trace(gamma1).real == pytest.approx(1.0, abs=1e-12)
    assert bmfl.consistency_defect(bmfl.to_mixed(g.state), 1, 1) < 1e-12


def test_hartree_minimum():
    h = bmfl.minimize(model("dimer_repulsive"), 1.0)
    assert h.converged
    assert h.energy == pytest.approx(-0.75, abs=1e-8)
    h = bmfl.minimize(model("dimer_attractive"), 1.0)
    assert h.energy == pytest.approx(-2.25, abs=1e-8)
    masses = sorted(abs(x) ** 2 for x in h.minimizer)
    assert masses[0] == pytest.approx((2 - math.sqrt(3)) / 4, abs=1e-6)


def test_sweep_converges_toward_hartree():
    report = bmfl.mean_field_sweep(model("dimer_repulsive"), [2, 4, 8, 16])
    assert report.hartree_energy == pytest.approx(-0.75, abs=1e-8)
    gaps = [row.gap_to_limit for row in report.rows]
    assert gaps == sorted(gaps, reverse=True)
    assert report.rows[-1].overlap1 > 0.97


def test_localization_statistic():
    spec = model("dimer_repulsive")
    state = bmfl.to_mixed(bmfl.ground_state(spec, 4).state)
    P = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)
    profile = bmfl.localized_trace_profile(state, P)
    assert sum(profile) == pytest.approx(1.0, abs=1e-10)
    mean = bmfl.mass_statistic(state, P, lambda x: x)
    gamma1 = bmfl.reduce(state, 1)
    assert mean == pytest.approx(gamma1[0, 0].real, abs=1e-10)
    check = bmfl.binomial_ratio_check(10, 2)
    assert check.nonnegative and check.max_difference <= check.bound


def test_definetti_measure():
    mu = bmfl.make_measure(2, [
        bmfl.MeasureAtom(0.6, np.array([1, 0], dtype=complex)),
        bmfl.MeasureAtom(0.4, np.array([0, 1], dtype=complex)),
    ])
    assert bmfl.hierarchy_trace(mu, 2) == pytest.approx(1.0, abs=1e-12)
    assert bmfl.finite_N_match(mu, 4, 2) < 1e-10
    gamma2 = bmfl.hierarchy(mu, 2)
    assert gamma2.shape == (3, 3)


def test_gibbs_free_energy():
    spec = model("dimer_repulsive")
    res = bmfl.free_energy(spec, 3, 2.0)
    assert res.free_energy <= bmfl.ground_energy(spec, 3) + 1e-12
    assert np.trace(res.gamma1).real == pytest.approx(1.0, abs=1e-10)
    # free bosons: closed form -log(e^{2b} + 1 + e^{-2b})/b at N = 2
    free = model("dimer_free")
    beta = 0.7
    expect = -math.log(math.exp(2 * beta) + 1 + math.exp(-2 * beta)) / beta
    assert bmfl.free_energy(free, 2, beta).free_energy == pytest.approx(expect, abs=1e-12)


def test_error_mapping():
    with pytest.raises(ValueError):
        bmfl.parse_model("not json", "inline")
    with pytest.raises(ValueError):
        bmfl.free_energy(model("dimer_free"), 3, 0.0)
    with pytest.raises(bmfl.CapacityError):
        bmfl.OccupationBasis(12, 200)
    assert issubclass(bmfl.ConvergenceError, RuntimeError)
    crippled = bmfl.minimize(model("chain4_trapped"), 1.0,
                             bmfl.MinimizeOptions(restarts=0, max_iterations=1))
    assert not crippled.converged
