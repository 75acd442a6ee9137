"""
Reproduction of the published oracle counts. Opt-in: set COMPOSITE_MINER_ORACLE_CSV
to a local export converted to the oracle CSV columns (see README).
"""
from pathlib import Path

import pytest

import config
from src.cluster import brute_force_cluster, cluster
from src.ingest import load_records
from src.metrics import corpus_stats
from src.model import CompositeKind

pytestmark = pytest.mark.skipif(not config.ORACLE_CSV_PATH, reason="COMPOSITE_MINER_ORACLE_CSV is not set")

EXPECTED_PER_KIND = {
    CompositeKind.METHOD_COMPOSITION: 142,
    CompositeKind.METHOD_DECOMPOSITION: 125,
    CompositeKind.CLASS_DECOMPOSITION: 55,
    CompositeKind.COMPOSITE_INLINE_METHOD: 21,
    CompositeKind.COMPOSITE_PULL_UP_METHOD: 13,
    CompositeKind.COMPOSITE_PUSH_DOWN_METHOD: 2,
    CompositeKind.COMPOSITE_PULL_UP_FIELD: 6,
    CompositeKind.COMPOSITE_PUSH_DOWN_FIELD: 2,
}


@pytest.fixture(scope="module")
def oracle():
    # the export is already restricted to core code, so no filters apply
    singles = load_records(Path(config.ORACLE_CSV_PATH), "csv").records
    return singles, cluster(singles)


def test_oracle_totals(oracle):
    singles, composites = oracle
    stats = corpus_stats(singles, composites)
    assert stats.singles_total == 1725
    assert stats.singles_in_composites == 1043
    assert stats.singles_in_composites_percent == pytest.approx(60.5, abs=0.1)
    assert stats.composites_total == 366
    assert stats.small_composite_percent >= 84.0


def test_oracle_per_kind_counts(oracle):
    singles, composites = oracle
    stats = corpus_stats(singles, composites)
    assert {kind: s.composite_count for kind, s in stats.per_kind.items()} == EXPECTED_PER_KIND
    assert max(c.size for c in composites) <= 39


@pytest.mark.slow
def test_oracle_matches_brute_force(oracle):
    singles, composites = oracle
    assert brute_force_cluster(singles) == composites
