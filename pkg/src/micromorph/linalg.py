"""Sparse symmetric solves and eigenvalue estimation.

Three entry points:

* :func:`cg_solve` - Jacobi-preconditioned conjugate gradients with
  breakdown detection (non-positive curvature reports a definiteness
  failure rather than silently diverging).
* :func:`extreme_generalized_eigenvalues` - both ends of the spectrum of a
  symmetric pencil (A, B) with B positive definite, via B-orthogonal
  Lanczos with full reorthogonalization; inner applications of B^{-1} use
  CG, so no sparse factorization is ever formed.  When the Krylov space
  exhausts the full dimension the result is exact up to round-off, so the
  method cannot stagnate at desk scale.
* :func:`hermitian_dense_eig` - all eigenvalues of a dense Hermitian pencil
  through the real symmetric 2n x 2n embedding [[Re, -Im], [Im, Re]], whose
  spectrum doubles each eigenvalue; the doubles are deduplicated.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .errors import DefinitenessError, NonConvergenceError

__all__ = [
    "cg_solve",
    "extreme_generalized_eigenvalues",
    "hermitian_dense_eig",
]


def _as_matrix(a):
    matrix = getattr(a, "matrix", None)
    return matrix if matrix is not None else a


def _jacobi(mat) -> np.ndarray:
    d = np.asarray(mat.diagonal()).ravel().copy()
    d[d <= 0] = 1.0
    return d


def cg_solve(
    a,
    b: np.ndarray,
    tol: float = 1e-12,
    max_iter: int | None = None,
    x0: np.ndarray | None = None,
) -> np.ndarray:
    """Solve A x = b for symmetric positive definite A.

    Stops when ||A x - b|| <= tol * ||b||.  Raises
    :class:`DefinitenessError` on non-positive curvature and
    :class:`NonConvergenceError` when the iteration budget runs out.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    mat = _as_matrix(a)
    b = np.asarray(b, dtype=float)
    n = b.size
    if max_iter is None:
        max_iter = max(10 * n, 100)
    norm_b = np.linalg.norm(b)
    if norm_b == 0.0:
        return np.zeros(n)

    inv_diag = 1.0 / _jacobi(mat)
    x = np.zeros(n) if x0 is None else np.asarray(x0, dtype=float).copy()
    r = b - mat @ x
    if np.linalg.norm(r) <= tol * norm_b:
        return x
    z = inv_diag * r
    p = z.copy()
    rz = float(r @ z)
    for _ in range(max_iter):
        q = mat @ p
        pq = float(p @ q)
        if pq <= 0.0:
            raise DefinitenessError(
                f"conjugate gradients hit non-positive curvature ({pq!r}); "
                "the operator is not positive definite"
            )
        alpha = rz / pq
        x += alpha * p
        r -= alpha * q
        if np.linalg.norm(r) <= tol * norm_b:
            return x
        z = inv_diag * r
        rz_new = float(r @ z)
        p = z + (rz_new / rz) * p
        rz = rz_new
    raise NonConvergenceError(
        f"conjugate gradients did not reach tol={tol!r} in {max_iter} iterations",
        residual=float(np.linalg.norm(r) / norm_b),
    )


def _b_normalize(v: np.ndarray, b_mat) -> tuple[np.ndarray, float]:
    bv = b_mat @ v
    nrm = float(np.sqrt(max(v @ bv, 0.0)))
    if nrm == 0.0:
        return v, 0.0
    return v / nrm, nrm


def extreme_generalized_eigenvalues(
    a,
    b,
    tol: float = 1e-8,
    seed: int = 7,
    inner_tol: float = 1e-13,
) -> tuple[float, float]:
    """Smallest and largest eigenvalue of A x = lambda B x, B positive definite.

    B-orthogonal Lanczos on B^{-1} A with full reorthogonalization; extreme
    Ritz values are accepted once they settle to relative ``tol`` between
    checkpoints, and the run is exact when the basis spans the whole space.
    """
    a_mat = _as_matrix(a)
    b_mat = _as_matrix(b)
    n = a_mat.shape[0]
    if n == 0:
        raise ValueError("empty operator")
    if n == 1:
        denom = float(b_mat @ np.ones(1) @ np.ones(1))
        lam = float(a_mat @ np.ones(1) @ np.ones(1)) / denom
        return lam, lam

    def solve_b(rhs):
        return cg_solve(b_mat, rhs, tol=inner_tol)

    rng = np.random.default_rng(seed)
    q = rng.standard_normal(n)
    q, nrm = _b_normalize(q, b_mat)
    if nrm == 0.0:
        raise DefinitenessError("B-norm of the start vector vanished")

    basis: list[np.ndarray] = [q]
    b_basis: list[np.ndarray] = [b_mat @ q]
    alphas: list[float] = []
    betas: list[float] = []
    checkpoints = {min(n, 2 ** k) for k in range(4, 14)} | {n}
    scale = 0.0

    def extremes_with_residual():
        w, s = scipy.linalg.eigh_tridiagonal(
            np.array(alphas), np.array(betas[: len(alphas) - 1])
        )
        q_arr = np.stack(basis[: len(alphas)], axis=1)
        ext = (float(w[0]), float(w[-1]))
        worst = 0.0
        for idx, lam in ((0, ext[0]), (-1, ext[1])):
            y = q_arr @ s[:, idx]
            ay = a_mat @ y
            by = b_mat @ y
            denom = max(np.linalg.norm(ay), abs(lam) * np.linalg.norm(by), 1e-300)
            worst = max(worst, float(np.linalg.norm(ay - lam * by) / denom))
        return ext, worst

    for j in range(n):
        z = solve_b(a_mat @ basis[j])
        alpha = float(z @ b_basis[j])
        alphas.append(alpha)
        z = z - alpha * basis[j]
        if j > 0:
            z = z - betas[-1] * basis[j - 1]
        # full reorthogonalization, twice for safety
        for _ in range(2):
            coeffs = np.array([z @ bq for bq in b_basis])
            for c, qi in zip(coeffs, basis):
                z = z - c * qi
        z, beta = _b_normalize(z, b_mat)
        scale = max(scale, abs(alpha), beta)
        m = j + 1
        breakdown = beta <= 1e-14 * max(scale, 1.0)
        if m >= n:
            ext, _ = extremes_with_residual()   # full space: exact
            return ext
        if m in checkpoints:
            ext, res = extremes_with_residual()
            if res <= tol:
                return ext
        if breakdown:
            # invariant subspace found: continue with a fresh direction
            z = rng.standard_normal(n)
            for _ in range(2):
                coeffs = np.array([z @ bq for bq in b_basis])
                for c, qi in zip(coeffs, basis):
                    z = z - c * qi
            z, beta2 = _b_normalize(z, b_mat)
            if beta2 == 0.0:
                ext, _ = extremes_with_residual()
                return ext
            beta = 0.0
        betas.append(beta)
        basis.append(z)
        b_basis.append(b_mat @ z)

    ext, _ = extremes_with_residual()
    return ext


def hermitian_dense_eig(h, g=None, herm_tol: float = 1e-10) -> np.ndarray:
    """All eigenvalues of H z = lambda G z for dense Hermitian H, G ~ SPD.

    Solved through the real symmetric embedding, which represents each
    complex eigenvalue twice; every second value of the ascending result is
    returned.
    """
    h = np.asarray(h, dtype=complex)
    n = h.shape[0]
    if h.shape != (n, n):
        raise ValueError("H must be square")
    scale = max(float(np.abs(h).max()), 1e-300)
    if float(np.abs(h - h.conj().T).max()) > herm_tol * scale:
        raise ValueError("H is not Hermitian within tolerance")
    if g is None:
        g = np.eye(n, dtype=complex)
    else:
        g = np.asarray(g, dtype=complex)
        gscale = max(float(np.abs(g).max()), 1e-300)
        if float(np.abs(g - g.conj().T).max()) > herm_tol * gscale:
            raise ValueError("G is not Hermitian within tolerance")

    def embed(m):
        return np.block([[m.real, -m.imag], [m.imag, m.real]])

    try:
        w = scipy.linalg.eigh(embed(h), embed(g), eigvals_only=True)
    except scipy.linalg.LinAlgError as exc:
        raise DefinitenessError(f"pencil metric is not positive definite: {exc}")
    return np.asarray(w[::2])
