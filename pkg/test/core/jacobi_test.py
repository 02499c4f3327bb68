"""Compare the Jacobi eigensolver with ``scipy.linalg.eigh``."""
from test.automated_test import check_sizes_and_values
from test.core.graphs import block_diagonal, random_symmetric

import pytest
import torch
from pytest import mark, raises
from scipy.linalg import eigh

from domclust.core.jacobi import jacobi_eigh
from domclust.utils.errors import EigensolverError

SIZES = [1, 2, 5, 16, 64]
SIZE_IDS = [f"n={n}" for n in SIZES]


def _symmetric(n: int, seed: int) -> torch.Tensor:
    generator = torch.Generator().manual_seed(seed)
    matrix = random_symmetric(n, generator)
    return matrix + torch.diag(torch.randn(n, generator=generator, dtype=torch.float64))


@mark.parametrize("n", SIZES, ids=SIZE_IDS)
def test_eigenvalues_match_scipy(n):
    matrix = _symmetric(n, seed=n)
    eigvals, _ = jacobi_eigh(matrix)
    expected = torch.from_numpy(eigh(matrix.numpy(), eigvals_only=True))

    check_sizes_and_values(eigvals, expected, atol=1e-8, rtol=1e-8)


@mark.parametrize("n", SIZES, ids=SIZE_IDS)
def test_reconstruction(n):
    matrix = _symmetric(n, seed=10 + n)
    eigvals, eigvecs = jacobi_eigh(matrix)

    assert (eigvals[1:] >= eigvals[:-1]).all()
    check_sizes_and_values(
        eigvecs.T @ eigvecs, torch.eye(n, dtype=torch.float64), atol=1e-8
    )
    check_sizes_and_values(
        eigvecs @ torch.diag(eigvals) @ eigvecs.T, matrix, atol=1e-8, rtol=1e-8
    )


def test_diagonal_input_needs_no_sweep():
    matrix = torch.diag(torch.tensor([3.0, -1.0, 2.0], dtype=torch.float64))
    eigvals, eigvecs = jacobi_eigh(matrix, max_sweeps=0)

    assert eigvals.tolist() == [-1.0, 2.0, 3.0]
    check_sizes_and_values(eigvecs.abs().sum(dim=0), torch.ones(3, dtype=torch.float64))


def test_repeated_eigenvalues():
    """Two equal blocks have degenerate eigenvalues."""
    matrix = block_diagonal([3, 3])
    eigvals, eigvecs = jacobi_eigh(matrix)
    expected = torch.tensor([-1.0, -1.0, -1.0, -1.0, 2.0, 2.0], dtype=torch.float64)

    check_sizes_and_values(eigvals, expected, atol=1e-8)
    check_sizes_and_values(eigvecs @ torch.diag(eigvals) @ eigvecs.T, matrix, atol=1e-8)


def test_sweep_cap():
    with raises(EigensolverError, match="did not converge within 0 sweeps"):
        jacobi_eigh(_symmetric(4, seed=0), max_sweeps=0)


def test_input_is_not_modified():
    matrix = _symmetric(6, seed=2)
    original = matrix.clone()
    jacobi_eigh(matrix)

    assert torch.equal(matrix, original)


@pytest.mark.fuzz
def test_random_matrices():
    for seed in range(20):
        n = 2 + seed % 30
        matrix = _symmetric(n, seed=1000 + seed)
        eigvals, _ = jacobi_eigh(matrix)
        expected = torch.from_numpy(eigh(matrix.numpy(), eigvals_only=True))
        check_sizes_and_values(eigvals, expected, atol=1e-8, rtol=1e-8)
