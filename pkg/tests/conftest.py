import numpy as np
import pytest


def brute_greedy_count(sig, idl, window_ps):
    """O(n^2) reference matcher: for each signal tag in order, grab the
    earliest unused idler tag within the window."""
    sig = np.asarray(sig, dtype=np.int64)
    idl = np.asarray(idl, dtype=np.int64)
    unused = np.ones(idl.size, dtype=bool)
    matched = 0
    for s in sig:
        hits = np.nonzero(unused & (np.abs(idl - s) <= window_ps))[0]
        if hits.size:
            unused[hits[0]] = False
            matched += 1
    return matched


def brute_all_pairs_count(sig, idl, window_ps):
    sig = np.asarray(sig, dtype=np.int64)
    idl = np.asarray(idl, dtype=np.int64)
    return int(sum(np.sum(np.abs(idl - s) <= window_ps) for s in sig))


@pytest.fixture
def brute_matcher():
    return brute_greedy_count


@pytest.fixture
def brute_all_pairs():
    return brute_all_pairs_count


def random_tag_instance(rng, max_tags=60, spread_ps=8000):
    """Random sorted tag pair with ties and bursts thrown in."""
    n_s = int(rng.integers(0, max_tags + 1))
    n_i = int(rng.integers(0, max_tags + 1))
    sig = np.sort(rng.integers(0, spread_ps, n_s)).astype(np.int64)
    idl = np.sort(rng.integers(0, spread_ps, n_i)).astype(np.int64)
    if n_s > 4 and rng.random() < 0.3:
        sig[1:4] = sig[1]  # burst of identical timestamps
    return sig, idl
