"""Hot kernels for vocabulary training, with numba and numpy backends.

Vocabulary training spends nearly all of its time counting adjacent
piece pairs and rewriting segmentations after each merge. Both kernels
ship in two interchangeable implementations:

* ``numba``  -- @njit loops over the CSR-style piece arrays (default).
* ``numpy``  -- vectorized fallback, no compilation step.

Selection: environment variable ``BIOTOK_NUMBA`` set to ``0`` forces the
numpy path, ``1`` requires numba (import error becomes fatal); unset
tries numba and silently falls back. Both backends return identical
results (pair keys sorted ascending); ``benchmarks/bench_vocab.py``
compares their throughput.

Data layout: ``flat`` holds piece ids for all distinct words
back-to-back (int32), ``starts`` are word boundary offsets of length
``n_words + 1`` (int64), ``freqs`` is the per-word corpus frequency
(int64). Pair keys pack two piece ids into one int64:
``(left << 32) | right``.
"""

from __future__ import annotations

import os

import numpy as np

_ENV_FLAG = os.environ.get("BIOTOK_NUMBA", "").strip()


def _position_weights(starts: np.ndarray, freqs: np.ndarray) -> np.ndarray:
    lengths = np.diff(starts)
    return np.repeat(freqs, lengths)


def _pair_mask(n: int, starts: np.ndarray) -> np.ndarray:
    """Valid pair-start positions: everything but each word's last piece."""
    mask = np.ones(n - 1, dtype=bool)
    word_last = starts[1:] - 1
    mask[word_last[word_last < n - 1]] = False
    return mask


def pair_counts_numpy(
    flat: np.ndarray, starts: np.ndarray, freqs: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Frequency-weighted counts of adjacent pairs within words."""
    n = flat.shape[0]
    if n < 2:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    mask = _pair_mask(n, starts)
    keys = (flat[:-1].astype(np.int64) << 32) | flat[1:].astype(np.int64)
    keys = keys[mask]
    if keys.size == 0:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    weights = _position_weights(starts, freqs)[: n - 1][mask]
    uniq, inverse = np.unique(keys, return_inverse=True)
    counts = np.bincount(inverse, weights=weights.astype(np.float64))
    return uniq, counts.astype(np.int64)


def piece_counts_numpy(
    flat: np.ndarray, starts: np.ndarray, freqs: np.ndarray, n_pieces: int
) -> np.ndarray:
    """Frequency-weighted occurrence count of every piece id."""
    weights = _position_weights(starts, freqs)
    return np.bincount(flat, weights=weights.astype(np.float64), minlength=n_pieces).astype(
        np.int64
    )


def merge_pair_numpy(
    flat: np.ndarray, starts: np.ndarray, left: int, right: int, new_id: int
) -> tuple[np.ndarray, np.ndarray]:
    """Greedy left-to-right replacement of (left, right) by new_id."""
    n = flat.shape[0]
    if n < 2:
        return flat, starts
    cand = np.nonzero(
        (flat[:-1] == left) & (flat[1:] == right) & _pair_mask(n, starts)
    )[0]
    if cand.size == 0:
        return flat, starts
    # Within a run of consecutive candidates (only possible when
    # left == right), greedy scanning keeps every second one.
    run_start = np.zeros(cand.size, dtype=np.int64)
    new_run = np.nonzero(np.diff(cand) > 1)[0] + 1
    run_start[new_run] = new_run
    np.maximum.accumulate(run_start, out=run_start)
    kept = cand[(np.arange(cand.size) - run_start) % 2 == 0]

    out = flat.copy()
    out[kept] = new_id
    drop = np.zeros(n, dtype=bool)
    drop[kept + 1] = True
    new_flat = out[~drop]

    lengths = np.diff(starts)
    word_of = np.repeat(np.arange(lengths.size), lengths)
    merged_per_word = np.bincount(word_of[kept], minlength=lengths.size)
    new_starts = np.zeros(starts.size, dtype=np.int64)
    np.cumsum(lengths - merged_per_word, out=new_starts[1:])
    return new_flat, new_starts


_HAVE_NUMBA = False
if _ENV_FLAG != "0":
    try:
        import numba
        from numba import njit

        _HAVE_NUMBA = True
    except ImportError:
        if _ENV_FLAG == "1":
            raise

if _HAVE_NUMBA:

    @njit(cache=True)
    def _pair_counts_hash_jit(flat, starts, freqs):
        # Open-addressing accumulation; slot order is hash-dependent,
        # the wrapper sorts the (much smaller) distinct-key arrays.
        n = flat.shape[0]
        cap = 16
        while cap < 2 * n:
            cap <<= 1
        mask = cap - 1
        table_keys = np.full(cap, -1, dtype=np.int64)
        table_counts = np.zeros(cap, dtype=np.int64)
        filled = 0
        for w in range(starts.shape[0] - 1):
            f = freqs[w]
            for p in range(starts[w], starts[w + 1] - 1):
                key = (np.int64(flat[p]) << 32) | np.int64(flat[p + 1])
                slot = np.int64((np.uint64(key) * np.uint64(0x9E3779B97F4A7C15)) >> np.uint64(33)) & mask
                while table_keys[slot] != key:
                    if table_keys[slot] == -1:
                        table_keys[slot] = key
                        filled += 1
                        break
                    slot = (slot + 1) & mask
                table_counts[slot] += f
        out_keys = np.empty(filled, dtype=np.int64)
        out_counts = np.empty(filled, dtype=np.int64)
        i = 0
        for slot in range(cap):
            if table_keys[slot] != -1:
                out_keys[i] = table_keys[slot]
                out_counts[i] = table_counts[slot]
                i += 1
        return out_keys, out_counts

    @njit(cache=True)
    def _piece_counts_jit(flat, starts, freqs, n_pieces):
        out = np.zeros(n_pieces, dtype=np.int64)
        for w in range(starts.shape[0] - 1):
            f = freqs[w]
            for p in range(starts[w], starts[w + 1]):
                out[flat[p]] += f
        return out

    @njit(cache=True)
    def _merge_pair_jit(flat, starts, left, right, new_id):
        n_words = starts.shape[0] - 1
        new_flat = np.empty(flat.shape[0], dtype=np.int32)
        new_starts = np.empty(starts.shape[0], dtype=np.int64)
        new_starts[0] = 0
        out = 0
        for w in range(n_words):
            p = starts[w]
            end = starts[w + 1]
            while p < end:
                if p + 1 < end and flat[p] == left and flat[p + 1] == right:
                    new_flat[out] = new_id
                    p += 2
                else:
                    new_flat[out] = flat[p]
                    p += 1
                out += 1
            new_starts[w + 1] = out
        return new_flat[:out], new_starts

    def pair_counts_numba(flat, starts, freqs):
        keys, counts = _pair_counts_hash_jit(flat, starts, freqs)
        order = np.argsort(keys)
        return keys[order], counts[order]

    def piece_counts_numba(flat, starts, freqs, n_pieces):
        return _piece_counts_jit(flat, starts, freqs, n_pieces)

    def merge_pair_numba(flat, starts, left, right, new_id):
        return _merge_pair_jit(
            flat, starts, np.int32(left), np.int32(right), np.int32(new_id)
        )


def get_backend(name: str):
    """Return (pair_counts, piece_counts, merge_pair) for a backend name."""
    if name == "numpy":
        return pair_counts_numpy, piece_counts_numpy, merge_pair_numpy
    if name == "numba":
        if not _HAVE_NUMBA:
            raise RuntimeError("numba backend requested but numba is not importable")
        return pair_counts_numba, piece_counts_numba, merge_pair_numba
    raise ValueError(f"unknown backend: {name!r}")


ACTIVE_BACKEND = "numba" if _HAVE_NUMBA else "numpy"
pair_counts, piece_counts, merge_pair = get_backend(ACTIVE_BACKEND)
