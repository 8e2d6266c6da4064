"""Acceptance suite: nine end-to-end criteria with their tolerances and time budgets.

Each test prints one PASS/FAIL line; the lines are repeated in the pytest
terminal summary under "acceptance criteria".
"""

import itertools

import numpy as np

from acceptance_log import criterion
from oracles import dense_hodge_projection

from cubedec.chains import Chain, Cochain, pairing
from cubedec.complex import (CubicComplex, OrientedCube, boundary_cube, boundary_simplex,
                             make_simplex, simplicial_decomposition, validate_complex)
from cubedec.hodge import decompose, harmonic_basis_1forms, harmonic_dimension
from cubedec.operators import apply_d, apply_delta, delta_via_star, hodge_star
from cubedec.torus import (CirculationCertificate, build_torus, curl, div2,
                           divergence_theorem_check, grad, line_integral,
                           potential_from_gradient, stokes_check)

MESHES = [(n, N) for n in (1, 2, 3) for N in (3, 4, 5)]


def _is_zero(M) -> bool:
    M = M.tocsr()
    M.eliminate_zeros()
    return M.nnz == 0


def test_1_exact_chain_complex_identities():
    with criterion(1, "boundary-boundary, d-d and delta-delta vanish exactly", 5.0):
        for n, N in MESHES:
            ops = build_torus(n, N).operators("exact")
            for k in range(1, n):
                assert ops.boundary[k].dtype == np.int64
                assert _is_zero(ops.boundary[k] @ ops.boundary[k + 1]), (n, N, k)
            for k in range(n - 1):
                assert _is_zero(ops.d[k + 1] @ ops.d[k]), (n, N, k)
            for k in range(1, n):
                assert _is_zero(ops.delta[k] @ ops.delta[k + 1]), (n, N, k)


def test_2_adjointness():
    with criterion(2, "<d w, e> = <w, delta e> on 100 random pairs per degree and mesh", 5.0):
        rng = np.random.default_rng(2)
        pairs = 100
        for n, N in MESHES:
            mesh = build_torus(n, N)
            exact, flt = mesh.operators("exact"), mesh.operators("float")
            for k in range(n):
                W = rng.integers(-1000, 1001, (mesh.count(k), pairs))
                E = rng.integers(-1000, 1001, (mesh.count(k + 1), pairs))
                lhs = np.einsum("ij,ij->j", exact.d[k] @ W, E)
                rhs = np.einsum("ij,ij->j", W, exact.delta[k + 1] @ E)
                assert np.array_equal(lhs, rhs)
                Wf = rng.standard_normal((mesh.count(k), pairs))
                Ef = rng.standard_normal((mesh.count(k + 1), pairs))
                lhs = np.einsum("ij,ij->j", flt.d[k] @ Wf, Ef)
                rhs = np.einsum("ij,ij->j", Wf, flt.delta[k + 1] @ Ef)
                scale = np.maximum(np.abs(lhs), np.linalg.norm(flt.d[k] @ Wf, axis=0)
                                   * np.linalg.norm(Ef, axis=0))
                assert np.all(np.abs(lhs - rhs) <= 1e-12 * scale)
                # the single-form API agrees with the batched products
                w, e = Cochain(k, W[:, 0]), Cochain(k + 1, E[:, 0])
                assert apply_d(w, exact).values @ e.values == w.values @ apply_delta(e, exact).values


def _all_faces():
    return [(x, t) for x in itertools.product(range(4), repeat=3) for t in range(3)]


def test_3_discrete_stokes_and_divergence():
    with criterion(3, "Stokes and divergence theorems exact on T^3_4", 10.0):
        mesh = build_torus(3, 4)
        rng = np.random.default_rng(3)
        faces, cells = _all_faces(), list(itertools.product(range(4), repeat=3))
        for trial in range(50):
            sign = 1 if trial % 2 == 0 else -1
            j = Cochain(1, rng.integers(-100, 101, mesh.count(1)))
            chosen = rng.choice(len(faces), size=int(rng.integers(1, 40)), replace=False)
            res = stokes_check(mesh, j, [(faces[i][0], faces[i][1], sign) for i in chosen])
            assert res.equal and res.same_sign and type(res.lhs) is int and res.lhs == res.rhs
            psi = Cochain(2, rng.integers(-100, 101, mesh.count(2)))
            chosen = rng.choice(len(cells), size=int(rng.integers(1, 20)), replace=False)
            res = divergence_theorem_check(mesh, psi, [(cells[i], sign) for i in chosen])
            assert res.equal and res.same_sign and type(res.lhs) is int and res.lhs == res.rhs
        j = Cochain(1, rng.integers(-100, 101, mesh.count(1)))
        psi = Cochain(2, rng.integers(-100, 101, mesh.count(2)))
        full_div = divergence_theorem_check(mesh, psi, [(c, 1) for c in cells])
        assert full_div.lhs == 0 and full_div.rhs == 0
        # all faces of one type tile closed 2-tori, so their boundary vanishes
        full_curl = stokes_check(mesh, j, [(x, 2, 1) for x in itertools.product(range(4), repeat=3)])
        assert full_curl.lhs == 0 and full_curl.rhs == 0
        assert np.array_equal(curl(mesh, j).values, apply_d(j, mesh.operators("exact")).values)
        assert np.array_equal(div2(mesh, psi).values, apply_d(psi, mesh.operators("exact")).values)


def test_4_duality_signs():
    with criterion(4, "star-star = (-1)^{k(n-k)} and delta = (-1)^{nk+1} star d star", 5.0):
        for n in (1, 2, 3):
            mesh = build_torus(n, 3)
            exact = mesh.operators("exact")
            flt = mesh.operators("float")
            for k in range(n + 1):
                size = mesh.count(k)
                eye = np.eye(size, dtype=np.int64)
                for i in range(size):
                    back = hodge_star(hodge_star(Cochain(k, eye[i]), exact), exact)
                    assert back.primal and np.array_equal(back.values, (-1) ** (k * (n - k)) * eye[i])
                if k == 0:
                    continue
                transpose = flt.delta[k].toarray()
                for i in range(size):
                    via_star = delta_via_star(Cochain(k, eye[i].astype(float)), flt).values
                    assert np.max(np.abs(via_star - transpose[:, i]), initial=0.0) <= 1e-12


def test_5_hodge_decomposition():
    with criterion(5, "Hodge split of 20 random 1-forms on T^2_3 and T^3_3", 30.0):
        rng = np.random.default_rng(5)
        for n in (2, 3):
            mesh = build_torus(n, 3)
            ops = mesh.operators("float")
            for _ in range(20):
                w = rng.standard_normal(mesh.count(1))
                norm = np.linalg.norm(w)
                split = decompose(Cochain(1, w), ops)
                assert np.linalg.norm(split.reconstruction().values - w) <= 1e-10 * norm
                for value in split.orthogonality().values():
                    assert abs(value) <= 1e-10 * norm ** 2
                exact, coexact, harmonic, _ = dense_hodge_projection(ops, 1, w)
                assert np.max(np.abs(split.exact.values - exact)) <= 1e-8
                assert np.max(np.abs(split.coexact.values - coexact)) <= 1e-8
                assert np.max(np.abs(split.harmonic.values - harmonic)) <= 1e-8


def test_6_harmonic_dimension():
    with criterion(6, "dim of harmonic 1-forms is n; coordinate fields closed and coclosed", 20.0):
        for n, N in MESHES:
            mesh = build_torus(n, N)
            assert harmonic_dimension(mesh.operators("float"), 1) == n, (n, N)
            ops = mesh.operators("exact")
            basis = harmonic_basis_1forms(mesh)
            assert len(basis) == n
            for phi in basis:
                assert phi.values.dtype == np.int64
                assert not apply_d(phi, ops).values.any()
                assert not apply_delta(phi, ops).values.any()


def _random_path(rng, start, end, N, detours):
    """Lattice path from start to end with random detours that cancel out."""
    pos = list(start)
    pts = [tuple(pos)]
    steps = []
    for i in range(3):
        delta = (end[i] - start[i]) % N
        steps += [(i, 1)] * delta
    for _ in range(detours):
        i = int(rng.integers(0, 3))
        steps += [(i, 1), (i, -1)]
    order = rng.permutation(len(steps))
    for idx in order:
        i, s = steps[idx]
        pos[i] = (pos[i] + s) % N
        pts.append(tuple(pos))
    assert pts[-1] == tuple(end)
    return pts


def test_7_potential_reconstruction():
    with criterion(7, "potentials of 50 gradients exact; path independence; certificates", 10.0):
        mesh = build_torus(3, 4)
        rng = np.random.default_rng(7)
        base = (0, 0, 0)
        for _ in range(50):
            h = Cochain(0, rng.integers(-1000, 1001, mesh.count(0)))
            j = grad(mesh, h)
            pot = potential_from_gradient(mesh, j, base)
            assert isinstance(pot, Cochain)
            shift = pot.values - h.values
            assert np.all(shift == shift[0])
            H = mesh.to_grid(pot)[0]
            for _ in range(10):
                end = tuple(int(v) for v in rng.integers(0, 4, 3))
                path = _random_path(rng, base, end, 4, int(rng.integers(0, 6)))
                assert line_integral(mesh, j, mesh.path_chain(path)) == H[end] - H[base]
        for phi in harmonic_basis_1forms(mesh):
            cert = potential_from_gradient(mesh, phi, base)
            assert isinstance(cert, CirculationCertificate)
            assert cert.circulation == 4
            assert pairing(phi, cert.chain) == 4


def test_8_boundary_example():
    with criterion(8, "boundary of (v0,v1,v2,v3) and its two decompositions", 1.0):
        v0, v1, v2, v3 = 10, 11, 12, 13
        square = OrientedCube.from_cycle(v0, v1, v2, v3)
        edge = lambda a, b: OrientedCube.from_corners((a, b))
        worked = Chain.from_terms(1, [(edge(v0, v1), 1), (edge(v1, v2), 1), (edge(v2, v3), 1),
                                      (edge(v3, v0), 1)])
        assert boundary_cube(square) == worked

        def simplicial(simplices):
            acc = Chain(1)
            for s in simplices:
                acc = acc + boundary_simplex(s)
            return acc

        worked_simplicial = Chain.from_terms(1, [(make_simplex(e), 1) for e in
                                                 [(v0, v1), (v1, v2), (v2, v3), (v3, v0)]])
        kuhn = simplicial_decomposition(square)
        assert simplicial(kuhn) == worked_simplicial
        alternative = [make_simplex((v0, v2, v3)), make_simplex((v0, v1, v2))]
        assert simplicial(alternative) == worked_simplicial
        assert simplicial(simplicial_decomposition(square, anchor=v1)) == worked_simplicial


def test_9_manifold_validation():
    with criterion(9, "torus validates; free square and flipped cell are rejected", 5.0):
        for n, N in MESHES:
            report = validate_complex(build_torus(n, N).complex)
            assert report.ok, (n, N, report.problems)
        single = CubicComplex.from_top_cells([OrientedCube.from_cycle(0, 1, 2, 3)])
        report = validate_complex(single)
        assert not report.manifold and not report.ok
        torus = build_torus(3, 3).complex
        cells = [list(level) for level in torus.cells]
        cells[3][0] = -cells[3][0]
        report = validate_complex(CubicComplex(cells))
        assert report.manifold and not report.orientable and not report.ok
