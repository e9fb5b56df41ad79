"""Shared fixtures.  The expensive artifacts (the 1-degree oracle sweep and
the nine seeded optimizer runs) are session-scoped so the acceptance module
and any exploratory test reuse one computation."""

import os
from concurrent.futures import ProcessPoolExecutor

import pytest

from exerseek.config import default_config
from exerseek.sim import oracle_sweep, run_simulation

PAPER_WEIGHTS = ((1.0, 5.0, 3.0, 5.0), (3.0, 5.0, 1.0, 1.0), (1.0, 1.0, 5.0, 5.0))
# trial start orientations: on the steep flanks of the two landscape basins
ESC_RUN_STARTS = (-53.0, -38.0, 41.0)


def _n_jobs() -> int:
    return max(1, min(os.cpu_count() or 1, 16))


@pytest.fixture(scope="session")
def default_sweep():
    """Ground-truth landscape at 1 degree for the default configuration."""
    return oracle_sweep(default_config(), grid_step=1.0, n_jobs=_n_jobs())


def _esc_run(args):
    w_m, theta0, seed = args
    config = default_config(w_m=w_m, theta0_deg=theta0, seed=seed, duration=120.0)
    records, status = run_simulation(config)
    return {"w_m": w_m, "theta0": theta0, "seed": seed, "status": status,
            "n_records": len(records)}


@pytest.fixture(scope="session")
def esc_runs():
    """Nine 120 s closed-loop runs: three paper weight vectors x three
    initial orientations, distinct seeds, shipped defaults throughout."""
    jobs = []
    seed = 101
    for w_m in PAPER_WEIGHTS:
        for theta0 in ESC_RUN_STARTS:
            jobs.append((w_m, theta0, seed))
            seed += 1
    with ProcessPoolExecutor(max_workers=min(9, _n_jobs())) as pool:
        return list(pool.map(_esc_run, jobs))
