import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cubedec.chains import Cochain
from cubedec.errors import RankDecisionError, SolverError
from cubedec.hodge import (RankDecision, _solve, decompose, harmonic_basis_1forms,
                           harmonic_dimension, harmonic_spectrum)
from cubedec.operators import apply_d, apply_delta
from cubedec.torus import build_torus, grad

from oracles import dense_hodge_projection


def _check_split(split, w, tol=1e-10):
    norm = np.linalg.norm(w)
    assert np.linalg.norm(split.reconstruction().values - w) <= tol * norm
    for v in split.orthogonality().values():
        assert abs(v) <= tol * norm ** 2


def test_exact_input(rng):
    m = build_torus(3, 3)
    ops = m.operators("float")
    w = grad(m, Cochain(0, rng.standard_normal(m.count(0))))
    split = decompose(w, ops)
    scale = w.norm()
    assert split.coexact.norm() <= 1e-10 * scale
    assert split.harmonic.norm() <= 1e-10 * scale
    assert np.linalg.norm(split.exact.values - w.values) <= 1e-10 * scale


def test_harmonic_input():
    m = build_torus(3, 3)
    ops = m.operators("float")
    phi = harmonic_basis_1forms(m)[0]
    split = decompose(phi, ops)
    assert split.exact.norm() <= 1e-10 and split.coexact.norm() <= 1e-10
    assert np.allclose(split.harmonic.values, phi.values)


@pytest.mark.parametrize("n,k", [(2, 0), (2, 1), (2, 2), (3, 1), (3, 2), (3, 3)])
def test_matches_dense_projectors(n, k, rng):
    m = build_torus(n, 3)
    ops = m.operators("float")
    w = rng.standard_normal(m.count(k))
    split = decompose(Cochain(k, w), ops)
    exact, coexact, harmonic, _ = dense_hodge_projection(ops, k, w)
    assert np.max(np.abs(split.exact.values - exact)) <= 1e-8
    assert np.max(np.abs(split.coexact.values - coexact)) <= 1e-8
    assert np.max(np.abs(split.harmonic.values - harmonic)) <= 1e-8
    _check_split(split, w)


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=15, deadline=None)
def test_split_properties(seed):
    m = build_torus(2, 4)
    ops = m.operators("float")
    w = np.random.default_rng(seed).standard_normal(m.count(1))
    split = decompose(Cochain(1, w), ops)
    _check_split(split, w)
    h = split.harmonic
    assert np.abs(apply_d(h, ops).values).max() <= 1e-9
    assert np.abs(apply_delta(h, ops).values).max() <= 1e-9
    again = decompose(h, ops)
    assert again.exact.norm() <= 2e-10 * np.linalg.norm(w)
    assert again.coexact.norm() <= 2e-10 * np.linalg.norm(w)
    assert np.allclose(again.harmonic.values, h.values, atol=2e-10 * np.linalg.norm(w))


def test_closed_form_has_no_coexact_part(rng):
    m = build_torus(3, 3)
    ops = m.operators("float")
    w = grad(m, Cochain(0, rng.standard_normal(m.count(0)))) + 0.7 * harmonic_basis_1forms(m)[2]
    split = decompose(w, ops)
    assert split.coexact.norm() <= 1e-10 * w.norm()
    assert np.allclose(split.harmonic.values, 0.7 * harmonic_basis_1forms(m)[2].values)


def test_integer_input_and_solver_stats(rng):
    m = build_torus(2, 3)
    ops = m.operators("exact")
    w = Cochain(1, rng.integers(-5, 6, m.count(1)))
    split = decompose(w, ops)
    assert split.solver_iterations > 0 and split.residual_norm <= 1e-12
    _check_split(split, w.values.astype(float))


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_solver_error_reports_residual():
    import scipy.sparse as sp
    A = sp.csr_matrix(np.array([[1.0, 0.0], [0.0, 0.0]]))
    with pytest.raises(SolverError) as info:
        _solve(A, np.array([1.0, 1.0]), project_constants=False)
    assert info.value.residual > 0


def test_basis_properties():
    for n in (1, 2, 3):
        m = build_torus(n, 4)
        ops = m.operators("exact")
        basis = harmonic_basis_1forms(m)
        assert len(basis) == n
        for phi in basis:
            assert not apply_d(phi, ops).values.any()
            assert not apply_delta(phi, ops).values.any()
        gram = np.array([[a.values @ b.values for b in basis] for a in basis])
        assert np.array_equal(gram, 4 ** n * np.eye(n, dtype=int))


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("N", [3, 4, 5])
def test_harmonic_dimension_one_forms(n, N):
    assert harmonic_dimension(build_torus(n, N).operators("float"), 1) == n


def test_harmonic_dimension_other_degrees():
    ops = build_torus(3, 3).operators("float")
    assert harmonic_dimension(ops, 0) == 1
    assert harmonic_dimension(ops, 2) == 3
    assert harmonic_dimension(ops, 3) == 1
    _, _, _, dense = dense_hodge_projection(ops, 2, np.zeros(ops.size(2)))
    assert dense == 3


def test_rank_decision_reports_gap():
    decision = harmonic_spectrum(build_torus(2, 3).operators("float"), 1)
    assert isinstance(decision, RankDecision)
    assert decision.dimension == 2
    assert decision.gap > 1e9


def test_ambiguous_rank_raises():
    import scipy.sparse as sp
    from cubedec.operators import build_operators
    ops = build_operators(build_torus(1, 3).complex, "float")
    ops._laplacians[0] = sp.csr_matrix(np.diag([1.0, 1e-7, 0.0]))
    with pytest.raises(RankDecisionError) as info:
        harmonic_dimension(ops, 0)
    assert info.value.gap is not None
