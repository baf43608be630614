"""Streaming coincidence detection and binning for two-channel tag streams.

The default matcher is a single two-pointer merge pass: each tag is used at
most once and the earliest compatible signal/idler pair within the window
is matched (the usual hardware-counter semantics, which avoids double
counting).  An all-pairs mode counting every in-window combination is
available for comparison.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from numba import njit

from .analysis import FringeTrace
from .errors import UnsortedStreamError

PS_PER_S = 1_000_000_000_000


@dataclass
class CoincidenceResult:
    total_coincidences: int
    matched_signal_ps: Optional[np.ndarray] = None
    matched_idler_ps: Optional[np.ndarray] = None
    window: float = 0.0
    mode: str = "greedy"


@njit(cache=True)
def _match_greedy(sig, idl, window_ps):
    # One forward pass; both inputs sorted. Matching the two earliest
    # unmatched heads whenever they are compatible yields a maximum-size
    # matching for a uniform two-sided window.
    cap = min(sig.size, idl.size)
    out_s = np.empty(cap, np.int64)
    out_i = np.empty(cap, np.int64)
    i = 0
    j = 0
    k = 0
    while i < sig.size and j < idl.size:
        dt = idl[j] - sig[i]
        if dt > window_ps:
            i += 1
        elif dt < -window_ps:
            j += 1
        else:
            out_s[k] = sig[i]
            out_i[k] = idl[j]
            k += 1
            i += 1
            j += 1
    return out_s[:k], out_i[:k]


def _timestamps(stream):
    ts = getattr(stream, "timestamps_ps", stream)
    ts = np.ascontiguousarray(ts, dtype=np.int64)
    if ts.size > 1 and np.any(np.diff(ts) < 0):
        raise UnsortedStreamError("timestamps must be nondecreasing")
    return ts


def count_coincidences(signal, idler, t_c, mode="greedy", keep_pairs=True):
    """Count signal/idler coincidences within a two-sided window ``|dt| <= t_c``.

    ``signal`` and ``idler`` are TimeTagStreams or sorted int arrays of
    picosecond timestamps; ``t_c`` is in seconds.  ``mode="greedy"`` matches
    each tag at most once; ``mode="all_pairs"`` counts every in-window
    combination (no pair list).
    """
    if t_c <= 0.0:
        raise ValueError("t_c must be > 0")
    sig = _timestamps(signal)
    idl = _timestamps(idler)
    window_ps = int(round(t_c * PS_PER_S))
    if mode == "greedy":
        out_s, out_i = _match_greedy(sig, idl, window_ps)
        return CoincidenceResult(
            total_coincidences=int(out_s.size),
            matched_signal_ps=out_s if keep_pairs else None,
            matched_idler_ps=out_i if keep_pairs else None,
            window=t_c,
            mode=mode,
        )
    if mode == "all_pairs":
        lo = np.searchsorted(idl, sig - window_ps, side="left")
        hi = np.searchsorted(idl, sig + window_ps, side="right")
        return CoincidenceResult(
            total_coincidences=int(np.sum(hi - lo)), window=t_c, mode=mode
        )
    raise ValueError(f"unknown mode {mode!r}")


def bin_counts(source, t_int, duration, stage_velocity=0.0, metadata=None):
    """Histogram tags (or matched pairs) into consecutive ``t_int`` bins.

    ``source`` may be a TimeTagStream, an int array of picosecond
    timestamps, or a CoincidenceResult (binned by the signal-side tag).
    The final partial bin is dropped.
    """
    if t_int <= 0.0 or duration <= 0.0:
        raise ValueError("t_int and duration must be > 0")
    if isinstance(source, CoincidenceResult):
        if source.matched_signal_ps is None:
            raise ValueError("CoincidenceResult carries no matched pairs to bin")
        ts = source.matched_signal_ps
    else:
        ts = getattr(source, "timestamps_ps", source)
    ts = np.asarray(ts, dtype=np.int64)
    bin_ps = int(round(t_int * PS_PER_S))
    n_bins = int(round(duration * PS_PER_S)) // bin_ps
    idx = ts // bin_ps
    idx = idx[(idx >= 0) & (idx < n_bins)]
    counts = np.bincount(idx, minlength=n_bins)[:n_bins]
    return FringeTrace(
        counts=counts,
        bin_duration=t_int,
        stage_velocity=stage_velocity,
        metadata=dict(metadata or {}),
    )


def accidental_estimate(signal, idler, t_c, offset):
    """Accidental coincidence rate [counts/s] via a delayed idler window.

    Shifting the idler stream by ``offset`` (ideally many windows wide)
    destroys true correlations, so the residual rate estimates the
    accidental formula ``C_A * C_B * t_c``.  ``t_c`` is the TOTAL window
    width here (tags match within |dt| <= t_c/2), matching that formula;
    count_coincidences takes the half-width tolerance instead.  With
    ``offset = 0`` it equals the count_coincidences rate at the same
    effective window.
    """
    sig = _timestamps(signal)
    idl = _timestamps(idler)
    offset_ps = int(round(offset * PS_PER_S))
    duration_ps = max(
        getattr(signal, "duration_ps", sig[-1] if sig.size else 0),
        getattr(idler, "duration_ps", idl[-1] if idl.size else 0),
    )
    live_ps = duration_ps - abs(offset_ps)
    if live_ps <= 0:
        raise ValueError("offset exceeds the stream duration")
    result = count_coincidences(sig, idl + offset_ps, t_c / 2.0, keep_pairs=False)
    return result.total_coincidences / (live_ps / PS_PER_S)
