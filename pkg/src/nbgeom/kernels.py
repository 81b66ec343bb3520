"""Hot numeric kernels, written once and run either numba-jitted or as
plain numpy (see ``_backend``).

The heavy loop in this package is the separability census: one small
linear program per dichotomy, 65,536 of them at dimension 4.  A generic
LP library pays per-call overhead that dwarfs the solve at this size, so
the margin-feasibility program gets a dedicated dense phase-1 simplex.
Verdicts are guarded elsewhere by three independent routes: witness
re-verification at every vertex, an exhaustive integer-weight oracle,
and a scipy cross-check in the test suite.
"""

from __future__ import annotations

import numpy as np

from ._backend import USE_NUMBA, jit_compile

PIVOT_TOL = 1e-9
FEAS_TOL = 1e-7
MAX_PIVOTS = 100_000
_INT64_MAX = np.iinfo(np.int64).max


def _margin_lp_impl(A):
    """Decide feasibility of ``A @ w >= 1`` with ``w`` free.

    Phase-1 simplex with Bland's rule on the split system
    ``[A | -A | -I] x = 1, x >= 0`` started from an implicit artificial
    basis (artificial columns are never stored; once one leaves the
    basis it is gone).  Returns ``(feasible, w)``; ``w`` is meaningful
    only when feasible.
    """
    m, d = A.shape
    ncols = 2 * d + m
    T = np.zeros((m + 1, ncols + 1))
    T[:m, :d] = A
    T[:m, d : 2 * d] = -A
    for i in range(m):
        T[i, 2 * d + i] = -1.0
    T[:m, ncols] = 1.0
    # reduced costs of min(sum of artificials) under the artificial basis
    for j in range(ncols + 1):
        s = 0.0
        for i in range(m):
            s += T[i, j]
        T[m, j] = -s
    basis = np.empty(m, dtype=np.int64)
    for i in range(m):
        basis[i] = ncols + 1 + i  # labels above every stored column
    for _ in range(MAX_PIVOTS):
        entering = -1
        for j in range(ncols):  # Bland: lowest improving index enters
            if T[m, j] < -PIVOT_TOL:
                entering = j
                break
        if entering < 0:
            break
        col = T[:m, entering]
        pos = col > PIVOT_TOL
        safe = np.where(pos, col, 1.0)
        ratios = np.where(pos, T[:m, ncols] / safe, np.inf)
        rmin = ratios.min()
        if rmin == np.inf:
            break  # cannot happen: phase-1 objective is bounded below
        labels = np.where(ratios <= rmin + 1e-12, basis, _INT64_MAX)
        r = int(np.argmin(labels))  # Bland again on the leaving side
        prow = (T[r] / T[r, entering]).copy()
        colv = T[:, entering].copy()
        T -= colv.reshape(-1, 1) * prow.reshape(1, -1)
        T[r] = prow
        T[:, entering] = 0.0
        T[r, entering] = 1.0
        basis[r] = entering
    w = np.zeros(d)
    if -T[m, ncols] > FEAS_TOL:  # artificials could not be driven to zero
        return False, w
    for i in range(m):
        b = basis[i]
        if b < d:
            w[b] += T[i, ncols]
        elif b < 2 * d:
            w[b - d] -= T[i, ncols]
    return True, w


def _make_census_chunk(margin_lp):
    """Build a chunk worker bound to one margin-LP flavor."""

    def census_chunk(vertices1, masks, flags, witnesses):
        """Classify each bitmask dichotomy in ``masks``.

        ``vertices1`` is the (2^n, n+1) vertex matrix with a trailing
        ones column; ``flags[t]`` gets 1 when mask ``t`` is separable and
        ``witnesses[t]`` the witness found.
        """
        m, d = vertices1.shape
        signed = np.empty_like(vertices1)
        for t in range(masks.shape[0]):
            mask = masks[t]
            for i in range(m):
                s = 1.0 if (mask >> i) & 1 else -1.0
                for j in range(d):
                    signed[i, j] = vertices1[i, j] * s
            feasible, w = margin_lp(signed)
            if feasible:
                flags[t] = 1
                for j in range(d):
                    witnesses[t, j] = w[j]
            else:
                flags[t] = 0

    return census_chunk


def _mobius_impl(coeffs):
    """In-place subset Möbius transform over a flat 2^n array.

    Going in, ``coeffs[v]`` is the value at vertex ``v`` (variable ``i``
    on bit ``i``); coming out, ``coeffs[J]`` is the coefficient of the
    monomial over subset ``J`` in the unique multilinear interpolant.
    """
    size = coeffs.shape[0]
    step = 1
    while step < size:
        block = coeffs.reshape(-1, 2, step)
        block[:, 1, :] -= block[:, 0, :]
        step <<= 1


def _zeta_impl(coeffs):
    """Inverse of :func:`_mobius_impl`: coefficients back to vertex values."""
    size = coeffs.shape[0]
    step = 1
    while step < size:
        block = coeffs.reshape(-1, 2, step)
        block[:, 1, :] += block[:, 0, :]
        step <<= 1


# numpy flavors are the uncompiled sources themselves
margin_lp_numpy = _margin_lp_impl
census_chunk_numpy = _make_census_chunk(_margin_lp_impl)
mobius_numpy = _mobius_impl
zeta_numpy = _zeta_impl

margin_lp_numba = jit_compile(_margin_lp_impl)
# chunk closes over the jitted LP; closures cannot use the on-disk cache
census_chunk_numba = (
    jit_compile(_make_census_chunk(margin_lp_numba), cache=False)
    if margin_lp_numba is not None
    else None
)
mobius_numba = jit_compile(_mobius_impl)
zeta_numba = jit_compile(_zeta_impl)

if USE_NUMBA:
    margin_lp = margin_lp_numba
    census_chunk = census_chunk_numba
    mobius_transform = mobius_numba
    zeta_transform = zeta_numba
else:
    margin_lp = margin_lp_numpy
    census_chunk = census_chunk_numpy
    mobius_transform = mobius_numpy
    zeta_transform = zeta_numpy


def warm_up() -> None:
    """Trigger JIT compilation of every kernel (no-op on numpy)."""
    if not USE_NUMBA:
        return
    v1 = np.array([[0.0, 1.0], [1.0, 1.0]])
    margin_lp(v1)
    census_chunk(
        v1,
        np.arange(4, dtype=np.int64),
        np.zeros(4, dtype=np.uint8),
        np.zeros((4, 2)),
    )
    buf = np.zeros(4)
    mobius_transform(buf)
    zeta_transform(buf)
