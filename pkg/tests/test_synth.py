import json

import pytest

from src.cluster import cluster
from src.ingest import FilterConfig, apply_filters, parse_jsonl
from src.model import CompositeKind, ConfigError
from src.synth import generate_dataset, parse_mix


def test_generation_is_deterministic():
    first = generate_dataset(seed=7, singles=100, noise=0.3)
    second = generate_dataset(seed=7, singles=100, noise=0.3)
    assert first.to_jsonl() == second.to_jsonl()
    assert first.truth_json() == second.truth_json()
    assert first.to_jsonl() != generate_dataset(seed=8, singles=100, noise=0.3).to_jsonl()


@pytest.mark.parametrize("singles, noise", [(0, 0.0), (1, 0.0), (2, 0.0), (7, 0.5), (100, 0.3), (250, 0.0)])
def test_record_count(singles, noise):
    dataset = generate_dataset(seed=1, singles=singles, noise=noise)
    assert len(dataset.records) == singles
    assert len({r.id for r in dataset.records}) == singles
    assert all(len(p.members) >= 2 for p in dataset.planted)


def test_all_noise_has_no_composites():
    dataset = generate_dataset(seed=3, singles=100, noise=1.0)
    assert dataset.planted == []
    assert cluster(dataset.records) == []


def _recovered(seed, **kwargs):
    dataset = generate_dataset(seed=seed, **kwargs)
    planted = {(p.kind, p.anchor, frozenset(p.members)) for p in dataset.planted}
    found = {(c.kind, c.anchor, frozenset(c.member_ids)) for c in cluster(dataset.records)}
    return planted, found


@pytest.mark.parametrize("seed", range(100))
def test_planted_composites_are_recovered(seed):
    planted, found = _recovered(seed, singles=120, noise=0.25, multi_commit=0.3)
    assert found == planted


def test_mix_restricts_kinds():
    mix = parse_mix("composite_pull_up_field=2, class_decomposition=1")
    dataset = generate_dataset(seed=5, singles=200, mix=mix)
    assert {p.kind for p in dataset.planted} == {
        CompositeKind.COMPOSITE_PULL_UP_FIELD, CompositeKind.CLASS_DECOMPOSITION,
    }


def test_multi_commit_fraction():
    single = generate_dataset(seed=9, singles=200, multi_commit=0.0)
    assert not any(c.is_multi_commit for c in cluster(single.records))
    multi = generate_dataset(seed=9, singles=200, multi_commit=1.0)
    assert all(c.is_multi_commit for c in cluster(multi.records))


def test_output_survives_default_filters_and_reparse():
    dataset = generate_dataset(seed=11, singles=150, noise=0.2)
    records = parse_jsonl(dataset.to_jsonl().splitlines())
    assert apply_filters(records, FilterConfig()).records == records
    truth = json.loads(dataset.truth_json())
    assert len(truth["planted"]) == len(dataset.planted)
    assert {tuple(p["members"]) for p in truth["planted"]} == {tuple(p.members) for p in dataset.planted}


def test_parse_mix():
    assert parse_mix("method_composition=1") == {CompositeKind.METHOD_COMPOSITION: 1.0}
    assert parse_mix("method_composition=0.5, composite_inline_method=0,") == {
        CompositeKind.METHOD_COMPOSITION: 0.5, CompositeKind.COMPOSITE_INLINE_METHOD: 0.0,
    }


@pytest.mark.parametrize("text", [
    "", "method_composition", "bogus=1", "method_composition=abc", "method_composition=-1",
    "method_composition=0", "method_composition=nan",
])
def test_parse_mix_rejects(text):
    with pytest.raises(ConfigError):
        parse_mix(text)


@pytest.mark.parametrize("kwargs", [
    {"singles": -1}, {"singles": 10, "noise": 1.5}, {"singles": 10, "multi_commit": -0.1},
    {"singles": 10, "mix": {CompositeKind.METHOD_COMPOSITION: 0.0}},
])
def test_generate_rejects_bad_arguments(kwargs):
    with pytest.raises(ConfigError):
        generate_dataset(seed=0, **kwargs)
