"""Largest-eigenvalue solvers for symmetric PSD matrices.

Three routes, all returning the top eigenvalue:

* ``dense``   LAPACK (``scipy.linalg.eigh``, top index only)
* ``jacobi``  cyclic Jacobi rotations, a self-contained dense oracle
* ``lanczos`` Lanczos with full reorthogonalization

``largest_eigenvalue`` picks ``dense`` up to ``DENSE_MAX_DIM`` and
``lanczos`` above it.
"""

import numpy as np
import scipy.linalg

from .errors import EigensolverError, PreconditionError

DENSE_MAX_DIM = 256
LANCZOS_MAX_ITER = 500
SYMMETRY_RTOL = 1e-10


def check_symmetric(G, rtol=SYMMETRY_RTOL):
    """Validate shape and symmetry; return the symmetrized float copy."""
    G = np.asarray(G, dtype=float)
    if G.ndim != 2 or G.shape[0] != G.shape[1] or G.shape[0] < 1:
        raise PreconditionError(f"expected a non-empty square matrix, got shape {G.shape}")
    scale = np.max(np.abs(G))
    asym = np.max(np.abs(G - G.T))
    if asym > rtol * scale:
        raise PreconditionError(
            f"matrix is not symmetric: max |G - G^T| = {asym:.3e} exceeds {rtol:g} * {scale:.3e}"
        )
    return 0.5 * (G + G.T)


def dense_lambda_max(G):
    p = G.shape[0]
    return float(scipy.linalg.eigh(G, eigvals_only=True, subset_by_index=[p - 1, p - 1])[0])


def jacobi_eigenvalues(G, tol=1e-15, max_sweeps=60):
    """All eigenvalues (ascending) by cyclic-by-row Jacobi rotations."""
    A = np.array(G, dtype=float)
    p = A.shape[0]
    if p == 1:
        return A.diagonal().copy()
    norm = np.linalg.norm(A)
    if norm == 0.0:
        return np.zeros(p)
    for _ in range(max_sweeps):
        off = np.linalg.norm(A - np.diag(A.diagonal()))
        if off <= tol * norm:
            break
        for i in range(p - 1):
            for j in range(i + 1, p):
                a_ij = A[i, j]
                if a_ij == 0.0:
                    continue
                theta = (A[j, j] - A[i, i]) / (2.0 * a_ij)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0)) if theta else 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                row_i = A[i, :].copy()
                row_j = A[j, :]
                A[i, :] = c * row_i - s * row_j
                A[j, :] = s * row_i + c * row_j
                col_i = A[:, i].copy()
                col_j = A[:, j]
                A[:, i] = c * col_i - s * col_j
                A[:, j] = s * col_i + c * col_j
                A[i, j] = A[j, i] = 0.0
    else:
        raise EigensolverError(f"Jacobi did not converge in {max_sweeps} sweeps")
    return np.sort(A.diagonal())


def jacobi_lambda_max(G):
    return float(jacobi_eigenvalues(G)[-1])


def lanczos_lambda_max(G, tol=1e-12, max_iter=LANCZOS_MAX_ITER, seed=0):
    """Top eigenvalue by Lanczos with full reorthogonalization.

    Stops when the Ritz residual ``|beta_k * y_k[-1]|`` of the top Ritz pair
    falls below ``tol * |theta|``, or when the Krylov basis spans the whole
    space (exact answer).  After a breakdown the basis is extended with a
    fresh random direction and the residual test is no longer trusted, so
    the iteration runs to the full dimension.
    """
    p = G.shape[0]
    if p == 1:
        return float(G[0, 0])
    rng = np.random.default_rng(seed)
    steps = min(p, max_iter)
    Q = np.zeros((p, steps + 1))
    alphas = np.zeros(steps)
    betas = np.zeros(steps)
    q = rng.standard_normal(p)
    Q[:, 0] = q / np.linalg.norm(q)
    scale = max(np.max(np.abs(G)), np.finfo(float).tiny)
    broke_down = False
    theta, residual = 0.0, np.inf
    for k in range(steps):
        v = G @ Q[:, k]
        alphas[k] = Q[:, k] @ v
        # two passes of classical Gram-Schmidt keep the basis orthogonal to machine precision
        basis = Q[:, : k + 1]
        v -= basis @ (basis.T @ v)
        v -= basis @ (basis.T @ v)
        beta = np.linalg.norm(v)

        T = np.diag(alphas[: k + 1]) + np.diag(betas[:k], 1) + np.diag(betas[:k], -1)
        evals, evecs = scipy.linalg.eigh(T)
        theta = evals[-1]
        residual = abs(beta * evecs[-1, -1])
        if k + 1 == p:
            return float(theta)
        if not broke_down and residual <= tol * max(abs(theta), scale * np.finfo(float).eps):
            return float(theta)

        if beta <= 1e-12 * scale:
            broke_down = True
            w = rng.standard_normal(p)
            w -= basis @ (basis.T @ w)
            w -= basis @ (basis.T @ w)
            Q[:, k + 1] = w / np.linalg.norm(w)
            betas[k] = 0.0
        else:
            Q[:, k + 1] = v / beta
            betas[k] = beta
    raise EigensolverError(
        f"Lanczos did not converge in {steps} iterations (residual {residual:.3e}, theta {theta:.6g})",
        residual=residual,
        iterations=steps,
    )


def largest_eigenvalue(G, tol=1e-12, method="auto"):
    """Largest eigenvalue of a symmetric matrix.

    Parameters
    ----------
    G : array_like, shape (p, p)
        Symmetric to within a relative ``1e-10``; it is symmetrized first.
    tol : float
        Relative residual tolerance for the Lanczos route.
    method : {"auto", "dense", "jacobi", "lanczos"}
    """
    G = check_symmetric(G)
    if method == "auto":
        method = "dense" if G.shape[0] <= DENSE_MAX_DIM else "lanczos"
    if method == "dense":
        return dense_lambda_max(G)
    if method == "jacobi":
        return jacobi_lambda_max(G)
    if method == "lanczos":
        return lanczos_lambda_max(G, tol=tol)
    raise PreconditionError(f"unknown eigensolver method {method!r}")
