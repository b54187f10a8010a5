"""Small dense linear algebra shared by the exterior, calibration and curve modules

All helpers accept stacks: the last two axes hold the matrix, leading axes
are batch axes.
"""
import numpy as np


def det(M):
    """Determinant of a stack of square matrices

    Closed-form expansions are used up to 3x3; larger minors go through
    LAPACK's LU factorization with partial pivoting.

    Args:
        M (ndarray): Array of shape (..., k, k)

    Returns:
        ndarray: Determinants of shape (...)
    """
    M = np.asarray(M, dtype=float)
    k = M.shape[-1]
    if k == 0:
        return np.ones(M.shape[:-2])
    if k == 1:
        return M[..., 0, 0]
    if k == 2:
        return M[..., 0, 0] * M[..., 1, 1] - M[..., 0, 1] * M[..., 1, 0]
    if k == 3:
        return (
            M[..., 0, 0] * (M[..., 1, 1] * M[..., 2, 2] - M[..., 1, 2] * M[..., 2, 1])
            - M[..., 0, 1] * (M[..., 1, 0] * M[..., 2, 2] - M[..., 1, 2] * M[..., 2, 0])
            + M[..., 0, 2] * (M[..., 1, 0] * M[..., 2, 1] - M[..., 1, 1] * M[..., 2, 0])
        )
    return np.linalg.det(M)


def cofactors(M):
    """Cofactor matrices of a stack of square matrices

    The cofactor matrix C satisfies d det(M) / dM = C, also when M is
    singular.

    Args:
        M (ndarray): Array of shape (..., k, k)

    Returns:
        ndarray: Cofactors of shape (..., k, k)
    """
    M = np.asarray(M, dtype=float)
    k = M.shape[-1]
    C = np.empty_like(M)
    if k == 1:
        C[...] = 1.0
        return C
    index = np.arange(k)
    for row in range(k):
        keep_rows = index[index != row]
        for col in range(k):
            keep_cols = index[index != col]
            minor = M[..., keep_rows[:, None], keep_cols[None, :]]
            C[..., row, col] = (-1) ** (row + col) * det(minor)
    return C


def polar_orthonormalize(V):
    """Nearest matrix with orthonormal columns (polar factor)

    Args:
        V (ndarray): Array of shape (..., m, n) with m >= n

    Returns:
        ndarray: U @ Vt from the thin SVD of V
    """
    U, _, Vt = np.linalg.svd(V, full_matrices=False)
    return U @ Vt


def has_orthonormal_columns(V, tol=1e-10):
    """Check whether the columns of V are orthonormal within tol"""
    V = np.asarray(V, dtype=float)
    gram = np.swapaxes(V, -1, -2) @ V
    return bool(np.all(np.abs(gram - np.eye(V.shape[-1])) <= tol))


def random_orthonormal(rng, m, n, size=None):
    """Orthonormal m x n frames from Gaussian matrices

    Args:
        rng (Generator): numpy random generator
        m (int): Ambient dimension
        n (int): Number of frame vectors
        size (int): Optional batch size

    Returns:
        ndarray: Shape (m, n), or (size, m, n) when size is given
    """
    shape = (m, n) if size is None else (size, m, n)
    G = rng.standard_normal(shape)
    Q, R = np.linalg.qr(G)
    # sign fix makes the distribution uniform on the Stiefel manifold
    signs = np.sign(np.diagonal(R, axis1=-2, axis2=-1))
    signs[signs == 0] = 1.0
    return Q * signs[..., None, :]


def random_rotation(rng, m):
    """Uniform rotation in SO(m)"""
    Q = random_orthonormal(rng, m, m)
    if np.linalg.det(Q) < 0:
        Q[:, 0] = -Q[:, 0]
    return Q
