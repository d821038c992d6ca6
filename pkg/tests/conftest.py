import numpy as np
import pytest

from oracles import build_job, make_planted_job, unit_rows


@pytest.fixture
def rng():
    return np.random.default_rng(20240)


@pytest.fixture
def small_job():
    """Two linked documents, 6 sentences per side, planted diagonal."""
    job, _ = make_planted_job(seed=11, n_docs=2, per_side=6, dim=16, sigma=0.05)
    return job


@pytest.fixture
def planted():
    job, gold = make_planted_job(seed=5, n_docs=3, per_side=20, dim=32, sigma=0.05)
    return job, gold


@pytest.fixture
def single_doc_job(rng):
    x = unit_rows(rng.standard_normal((10, 8))).astype(np.float32)
    y = unit_rows(rng.standard_normal((10, 8))).astype(np.float32)
    return build_job(x, y, ["D"] * 10, ["E"] * 10, [("D", "E")])
