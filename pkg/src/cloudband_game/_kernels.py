"""Hot numeric kernels: payoff-table fill over the full strategy product.

Two interchangeable backends fill the defender/attacker payoff matrices from
precomputed per-band probability lookup tables:

* ``numba``: an ``@njit(cache=True, nogil=True)`` cell loop (default when
  numba imports),
* ``numpy``: a vectorized fallback with the same floating-point operation
  order, so both produce bit-identical matrices.

Selection: environment variable ``CLOUDBAND_GAME_BACKEND`` set to ``numba``,
``numpy``, or ``auto`` (default). ``benchmarks/backend_bench.py`` compares the
two.
"""

from __future__ import annotations

import os

import numpy as np

BACKEND_ENV_VAR = "CLOUDBAND_GAME_BACKEND"

_backend: str | None = None
_fill_numba = None


def _fill_numpy(band_probs, d_idx, a_idx, d_cost, a_cost,
                d_loss, a_gain, wd, wa, d_out, a_out, row_lo, row_hi):
    """Vectorized fill of payoff rows [row_lo, row_hi).

    Accumulation order matches the numba kernel exactly: per-band terms in
    band order, then costs, then the cascade term.
    """
    di = d_idx[row_lo:row_hi]
    n_bands = di.shape[1]
    shape = (row_hi - row_lo, a_idx.shape[0])
    dg = np.zeros(shape, dtype=np.float64)
    ag = np.zeros(shape, dtype=np.float64)
    for k in range(n_bands):
        pk = band_probs[k][np.ix_(di[:, k], a_idx[:, k])]
        dg += pk * d_loss[k]
        ag += (1.0 - pk) * a_gain[k]
    p1 = band_probs[0][np.ix_(di[:, 0], a_idx[:, 0])]
    dg -= d_cost[row_lo:row_hi, None]
    dg -= (1.0 - p1) * wd
    ag -= a_cost[None, :]
    ag += (1.0 - p1) * wa
    d_out[row_lo:row_hi] = dg
    a_out[row_lo:row_hi] = ag


def _build_numba_fill():
    from numba import njit

    @njit(cache=True, nogil=True)
    def fill(band_probs, d_idx, a_idx, d_cost, a_cost,
             d_loss, a_gain, wd, wa, d_out, a_out, row_lo, row_hi):
        n_bands = d_idx.shape[1]
        n_cols = a_idx.shape[0]
        for i in range(row_lo, row_hi):
            for j in range(n_cols):
                dg = 0.0
                ag = 0.0
                for k in range(n_bands):
                    pk = band_probs[k, d_idx[i, k], a_idx[j, k]]
                    dg += pk * d_loss[k]
                    ag += (1.0 - pk) * a_gain[k]
                p1 = band_probs[0, d_idx[i, 0], a_idx[j, 0]]
                d_out[i, j] = dg - d_cost[i] - (1.0 - p1) * wd
                a_out[i, j] = ag - a_cost[j] + (1.0 - p1) * wa

    return fill


def _numba_fill():
    """Build (once) and return the jitted kernel; ImportError without numba."""
    global _fill_numba
    if _fill_numba is None:
        _fill_numba = _build_numba_fill()
    return _fill_numba


def active_backend() -> str:
    """Resolve the kernel backend once ('numba' or 'numpy')."""
    global _backend
    if _backend is not None:
        return _backend
    choice = os.environ.get(BACKEND_ENV_VAR, "auto").strip().lower() or "auto"
    if choice not in ("auto", "numba", "numpy"):
        raise ValueError(
            f"{BACKEND_ENV_VAR} must be 'auto', 'numba', or 'numpy', got {choice!r}"
        )
    if choice == "numpy":
        _backend = "numpy"
        return _backend
    try:
        _numba_fill()
        _backend = "numba"
    except ImportError:
        if choice == "numba":
            raise
        _backend = "numpy"
    return _backend


def _reset_backend_cache() -> None:
    # Test hook: force re-reading the environment.
    global _backend
    _backend = None


def fill_payoff_rows(band_probs, d_idx, a_idx, d_cost, a_cost,
                     d_loss, a_gain, wd, wa, d_out, a_out, row_lo, row_hi,
                     backend: str | None = None) -> None:
    """Fill payoff rows [row_lo, row_hi) with the selected backend."""
    chosen = backend or active_backend()
    if chosen == "numba":
        _numba_fill()(band_probs, d_idx, a_idx, d_cost, a_cost,
                      d_loss, a_gain, wd, wa, d_out, a_out, row_lo, row_hi)
    else:
        _fill_numpy(band_probs, d_idx, a_idx, d_cost, a_cost,
                    d_loss, a_gain, wd, wa, d_out, a_out, row_lo, row_hi)
