"""Deterministic block-parallel execution.

Trials are grouped into fixed-size blocks.  Each block gets its own
counter-based (Philox) stream keyed by ``(seed, *key, block_index)``, so a
block's output depends only on its coordinates and never on which worker
ran it or how many workers there were.
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor

import numpy as np

BLOCK_SIZE = 1024
WORKERS_ENV = "LEVY_EXIT_WORKERS"


def block_rng(seed, *key):
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def resolve_workers(workers=None):
    env = os.environ.get(WORKERS_ENV)
    if env:
        return max(1, int(env))
    if workers:
        return max(1, int(workers))
    return os.cpu_count() or 1


def block_sizes(trials, block=BLOCK_SIZE):
    full, rest = divmod(int(trials), block)
    return [block] * full + ([rest] if rest else [])


def run_blocks(fn, tasks, workers=None):
    """Apply ``fn`` to each task tuple; results come back in task order."""
    workers = min(resolve_workers(workers), len(tasks)) if tasks else 1
    if workers <= 1:
        return [fn(*t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(fn, *t) for t in tasks]
        return [f.result() for f in futures]
