"""Cyclic Jacobi eigensolvers for dense Hermitian matrices.

Rotations are applied in round-robin (tournament) order: each round
annihilates ``n/2`` disjoint off-diagonal pairs at once, which lets the
row and column updates be vectorized.  A sweep is ``n - 1`` rounds and
visits every pair exactly once.

Large matrices use the block variant: indices are grouped into blocks,
block pairs are visited in the same round-robin order, and every
``2b x 2b`` block-pair subproblem is diagonalized by the scalar method
(all subproblems of one round in a single batch).  The resulting unitary
is applied with matrix products.
"""
from __future__ import annotations

import numpy as np

__all__ = ["jacobi_eigh", "round_robin_pairs"]

BLOCK_SIZE = 16
BLOCK_MIN_DIM = 128
INNER_MAX_SWEEPS = 30
PRODUCT_MAX_DIM = 64


def round_robin_pairs(n):
    """Return the ``n_even - 1`` rounds of disjoint index pairs covering all pairs.

    Indices ``>= n`` (padding for odd ``n``) are dropped from the rounds.
    """
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        p = np.array(players[: m // 2])
        q = np.array(players[m // 2:][::-1])
        keep = (p < n) & (q < n)
        lo = np.minimum(p, q)[keep]
        hi = np.maximum(p, q)[keep]
        rounds.append((lo, hi))
        players = [players[0]] + [players[-1]] + players[1:-1]
    return rounds


def _off_norm(a):
    """Off-diagonal Frobenius norm of each matrix in a ``(..., n, n)`` stack."""
    off = a.copy()
    n = a.shape[-1]
    off.reshape(off.shape[:-2] + (n * n,))[..., :: n + 1] = 0.0
    return np.linalg.norm(off, axis=(-2, -1))


def _rotate_round(a, v, p, q, skip):
    """One round of rotations on the batch ``a`` (and ``v``), pairs ``(p, q)``.

    Entries with ``|a_pq| <= skip`` are left alone (identity rotation).
    """
    is_complex = np.iscomplexobj(a)
    b = a[:, p, q]
    r = np.abs(b)
    active = r > skip
    if not np.any(active):
        return
    rs = np.where(active, r, 1.0)
    app = np.real(a[:, p, p])
    aqq = np.real(a[:, q, q])
    theta = (aqq - app) / (2.0 * rs)
    t = np.sign(theta) / (np.abs(theta) + np.sqrt(theta * theta + 1.0))
    t[theta == 0] = 1.0
    t = np.where(active, t, 0.0)
    c = 1.0 / np.sqrt(t * t + 1.0)
    s = t * c
    # phase e^{-i phi} with b = |b| e^{i phi}; reduces the pair to a real one
    ph = np.where(active, np.conj(b) / rs if is_complex else np.sign(b), 1.0)
    if a.shape[-1] <= PRODUCT_MAX_DIM:
        # small matrices: W = [[c, s], [-s ph, c ph]] on each pair, A <- W^H A W
        w = np.broadcast_to(np.eye(a.shape[-1], dtype=a.dtype), a.shape).copy()
        w[:, p, p] = c
        w[:, p, q] = s
        w[:, q, p] = -s * ph
        w[:, q, q] = c * ph
        a[...] = np.conj(w.transpose(0, 2, 1)) @ a @ w
        if v is not None:
            v[...] = v @ w
    else:
        c3, s3, ph3 = c[:, None, :], s[:, None, :], ph[:, None, :]
        cp = a[:, :, p]
        cq = a[:, :, q] * ph3
        a[:, :, p] = cp * c3 - cq * s3
        a[:, :, q] = cp * s3 + cq * c3
        cr, sr = c[:, :, None], s[:, :, None]
        rp = a[:, p, :]
        rq = a[:, q, :] * np.conj(ph)[:, :, None]
        a[:, p, :] = cr * rp - sr * rq
        a[:, q, :] = sr * rp + cr * rq
        if v is not None:
            vp = v[:, :, p]
            vq = v[:, :, q] * ph3
            v[:, :, p] = vp * c3 - vq * s3
            v[:, :, q] = vp * s3 + vq * c3
    a[:, p, q] = np.where(active, 0.0, b)
    a[:, q, p] = np.where(active, 0.0, np.conj(b))
    a[:, p, p] = app - t * r
    a[:, q, q] = aqq + t * r


def _scalar_jacobi(a, v, threshold, skip, max_sweeps, rounds=None):
    """Scalar cyclic Jacobi on a stack; True when every matrix converged.

    ``threshold`` may be an array with one entry per matrix.
    """
    rounds = round_robin_pairs(a.shape[-1]) if rounds is None else rounds
    for _ in range(max_sweeps):
        if np.all(_off_norm(a) <= threshold):
            return True
        for p, q in rounds:
            _rotate_round(a, v, p, q, skip)
    return bool(np.all(_off_norm(a) <= threshold))


def _block_jacobi(a, v, threshold, skip, max_sweeps, block, tol):
    """Block cyclic Jacobi on a single (zero-padded) matrix.

    Subproblems are solved to ``tol`` relative to their own norm, or to
    the absolute level ``1e-3 threshold / k`` when that is larger.
    """
    npad = a.shape[0]
    k = npad // block
    base = np.arange(npad).reshape(k, block)
    rounds = round_robin_pairs(k)
    inner_rounds = round_robin_pairs(2 * block)
    for _ in range(max_sweeps):
        if _off_norm(a) <= threshold:
            return True
        for bp, bq in rounds:
            idx = np.concatenate([base[bp], base[bq]], axis=1)
            sub = a[idx[:, :, None], idx[:, None, :]]
            q = np.broadcast_to(np.eye(2 * block, dtype=a.dtype), sub.shape).copy()
            inner = np.maximum(1e-3 * threshold / k, tol * np.linalg.norm(sub, axis=(1, 2)))
            _scalar_jacobi(sub, q, inner, skip, INNER_MAX_SWEEPS, inner_rounds)
            cols = a[:, idx].transpose(1, 0, 2) @ q
            a[:, idx] = cols.transpose(1, 0, 2)
            a[idx, :] = np.conj(q.transpose(0, 2, 1)) @ a[idx, :]
            if v is not None:
                v[:, idx] = (v[:, idx].transpose(1, 0, 2) @ q).transpose(1, 0, 2)
    return bool(_off_norm(a) <= threshold)


def jacobi_eigh(a, tol=1e-14, max_sweeps=60, vectors=True, block=None):
    """Eigen-decompose a Hermitian matrix by cyclic Jacobi rotations.

    Parameters
    ----------
    a : (n, n) array_like
        Hermitian matrix; only a private copy is modified.
    tol : float
        Stop when the off-diagonal Frobenius norm is below ``tol * ||a||_F``.
    max_sweeps : int
        Hard limit on the number of (outer) sweeps.
    vectors : bool
        Accumulate eigenvectors.
    block : int, optional
        Block size of the block variant; ``0`` forces the scalar method.
        The default uses blocks of 16 from dimension 128 on.

    Returns
    -------
    w : (n,) ndarray
        Eigenvalues in ascending order.
    v : (n, n) ndarray or None
        Orthonormal eigenvectors as columns.

    Raises
    ------
    RuntimeError
        If the iteration has not converged after ``max_sweeps`` sweeps.
    """
    a = np.array(a, dtype=complex if np.iscomplexobj(a) else float, copy=True)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("square matrix required")
    a = 0.5 * (a + a.conj().T)
    if n <= 1:
        return np.real(np.diag(a)).copy(), np.eye(n, dtype=a.dtype) if vectors else None
    scale = np.linalg.norm(a)
    if scale == 0:
        return np.zeros(n), np.eye(n, dtype=a.dtype) if vectors else None
    threshold = tol * scale
    skip = threshold * 1e-3 / n
    if block is None:
        block = BLOCK_SIZE if n >= BLOCK_MIN_DIM else 0
    if block and n > 2 * block:
        # zero padding stays exactly decoupled: its rotations are all identities
        npad = -(-n // block) * block
        work = np.zeros((npad, npad), dtype=a.dtype)
        work[:n, :n] = a
        vw = np.eye(npad, dtype=a.dtype) if vectors else None
        ok = _block_jacobi(work, vw, threshold, skip, max_sweeps, block, tol)
        a = work[:n, :n]
        v = vw[:n, :n] if vectors else None
    else:
        stack = a[None]
        vs = np.eye(n, dtype=a.dtype)[None] if vectors else None
        ok = _scalar_jacobi(stack, vs, threshold, skip, max_sweeps)
        a = stack[0]
        v = vs[0] if vectors else None
    if not ok:
        raise RuntimeError(f"Jacobi iteration did not converge in {max_sweeps} sweeps")
    w = np.real(np.diag(a)).copy()
    order = np.argsort(w, kind="stable")
    w = w[order]
    if vectors:
        v = v[:, order]
    return w, v
