"""Commutant-basis checks.

The two independent oracles here are (a) the closed-form count
(n+1)(n+2)(n+3)/6 for the algebra commuting with all qubit permutations and
(b) a sum-of-squared-multiplicities count for the algebra commuting with
collective rotations, computed by fusing spin-1/2 ladders.  Both are
evaluated without touching the implementation under test.
"""

import numpy as np
import pytest

from symtomo.operators import hilbert_schmidt_inner, pauli_string
from symtomo.symmetry import (
    SymmetrySpec,
    compute_commutant_basis,
    group_generators,
    permutation_basis_size,
    project_onto_basis,
    reconstruct,
    symmetrize,
    transposition_permutation,
)


def collective_commutant_dim(n):
    """sum of m_j^2 with m_j the multiplicity of total spin j among n spin-1/2s."""
    mult = {0.5: 1}
    for _ in range(n - 1):
        new = {}
        for j, m in mult.items():
            for jj in ({j + 0.5} if j == 0 else {j - 0.5, j + 0.5}):
                new[jj] = new.get(jj, 0) + m
        mult = new
    return sum(m * m for m in mult.values())


def random_member(basis, seed):
    rng = np.random.default_rng(seed)
    return reconstruct(
        type(project_onto_basis(np.eye(basis.dim) / basis.dim, basis))(
            basis, rng.standard_normal(basis.size)
        )
    )


@pytest.mark.parametrize("n,expected", [(2, 10), (3, 20), (4, 35), (5, 56), (6, 84), (7, 120)])
def test_permutation_sizes_match_closed_form(n, expected):
    assert permutation_basis_size(n) == expected
    basis = compute_commutant_basis(SymmetrySpec.permutation(n))
    assert basis.size == expected
    assert basis.dim == 2**n


@pytest.mark.parametrize("n", [2, 3, 4])
def test_collective_sizes_match_spin_fusion_oracle(n):
    want = collective_commutant_dim(n)
    assert want == {2: 2, 3: 5, 4: 14}[n]
    basis = compute_commutant_basis(SymmetrySpec.collective(n))
    assert basis.size == want


def test_elements_are_hermitian_and_orthonormal():
    for spec in (SymmetrySpec.permutation(3), SymmetrySpec.collective(3)):
        basis = compute_commutant_basis(spec)
        for s in basis.elements:
            assert np.allclose(s, s.conj().T, atol=1e-10)
        gram = np.einsum("iab,jab->ij", basis.elements.conj(), basis.elements)
        assert np.allclose(gram, np.eye(basis.size), atol=1e-9)


def test_elements_commute_with_generators():
    for spec in (
        SymmetrySpec.permutation(2),
        SymmetrySpec.permutation(3),
        SymmetrySpec.collective(2),
        SymmetrySpec.collective(3),
    ):
        basis = compute_commutant_basis(spec)
        for g in group_generators(spec):
            if spec.uses_unitary_generators:
                for s in basis.elements:
                    assert np.allclose(g @ s @ g.conj().T, s, atol=1e-9)
            else:
                for s in basis.elements:
                    assert np.allclose(g @ s - s @ g, 0, atol=1e-9)


def test_orbit_route_agrees_with_null_space_route():
    # feed the permutation generators through the generic unitary path and
    # compare the spanned subspaces via their orthogonal projectors
    for n in (2, 3):
        fast = compute_commutant_basis(SymmetrySpec.permutation(n))
        gens = group_generators(SymmetrySpec.permutation(n))
        slow = compute_commutant_basis(SymmetrySpec.custom_unitaries(gens))
        assert fast.size == slow.size
        b1 = fast.elements.reshape(fast.size, -1)
        b2 = slow.elements.reshape(slow.size, -1)
        p1 = b1.conj().T @ b1
        p2 = b2.conj().T @ b2
        assert np.allclose(p1, p2, atol=1e-8)


def test_collective_two_qubit_span_is_identity_and_swap():
    basis = compute_commutant_basis(SymmetrySpec.collective(2))
    swap = np.eye(4)[[0, 2, 1, 3]].astype(complex)
    for target in (np.eye(4, dtype=complex), swap):
        back = reconstruct(project_onto_basis(target / np.linalg.norm(target), basis))
        assert np.allclose(back, target / np.linalg.norm(target), atol=1e-9)


def test_custom_lie_diagonal_algebra():
    # a single J_z generator on one qubit leaves exactly the diagonal matrices
    spec = SymmetrySpec.custom_lie([np.diag([0.5, -0.5]).astype(complex)])
    basis = compute_commutant_basis(spec)
    assert basis.size == 2
    for s in basis.elements:
        assert np.allclose(s, np.diag(np.diag(s)), atol=1e-10)


def test_custom_unitary_parity_symmetry():
    # commutant of {Z (x) Z} = operators block-diagonal in parity: 8 of 16 dims
    spec = SymmetrySpec.custom_unitaries([pauli_string("ZZ")])
    basis = compute_commutant_basis(spec)
    assert basis.size == 8
    zz = pauli_string("ZZ")
    for s in basis.elements:
        assert np.allclose(zz @ s @ zz, s, atol=1e-10)


def test_project_reconstruct_round_trip():
    rng = np.random.default_rng(31)
    basis = compute_commutant_basis(SymmetrySpec.permutation(3))
    a = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
    rho = (a @ a.conj().T) / np.trace(a @ a.conj().T)
    sym = symmetrize(rho, basis)
    coeffs = project_onto_basis(sym, basis)
    assert np.allclose(reconstruct(coeffs), sym, atol=1e-10)
    # projection is idempotent and never increases the HS norm
    assert np.allclose(symmetrize(sym, basis), sym, atol=1e-10)
    assert hilbert_schmidt_inner(sym, sym) <= hilbert_schmidt_inner(rho, rho) + 1e-12


def test_symmetrize_fixes_symmetric_states():
    basis = compute_commutant_basis(SymmetrySpec.permutation(2))
    ghz = np.zeros((4, 4), dtype=complex)
    ghz[0, 0] = ghz[0, 3] = ghz[3, 0] = ghz[3, 3] = 0.5
    assert np.allclose(symmetrize(ghz, basis), ghz, atol=1e-10)


def test_transposition_permutation_swaps_bits():
    perm = transposition_permutation(3, 0)  # swap qubits 0 and 1 of three
    # |011> (qubit0=0, qubit1=1, qubit2=1) maps to |101>
    assert perm[int("011", 2)] == int("101", 2)
    assert perm[int("000", 2)] == int("000", 2)
    assert perm[int("111", 2)] == int("111", 2)
    with pytest.raises(ValueError):
        transposition_permutation(3, 2)


def test_deterministic_output():
    a = compute_commutant_basis(SymmetrySpec.permutation(3))
    b = compute_commutant_basis(SymmetrySpec.permutation(3))
    assert np.array_equal(a.elements, b.elements)


def test_coefficients_are_real_for_hermitian_input():
    rng = np.random.default_rng(37)
    basis = compute_commutant_basis(SymmetrySpec.collective(3))
    for seed in range(5):
        h = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
        h = h + h.conj().T
        coeffs = project_onto_basis(h, basis)
        assert np.all(np.isreal(coeffs.alpha))
