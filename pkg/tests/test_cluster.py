import itertools

import pytest
from hypothesis import given, settings, strategies as st

import config
from src.cluster import ClusterKey, brute_force_cluster, cluster, keys_for, pair_clusters
from src.model import CompositeKind, ElementRef, IntegrityError, Scope
from src.testkit import colliding_records
from helpers import field, method, rec


def test_keys_for_extraction():
    record = rec("1", "extract", method("A", "m()"), method("A", "m1()"))
    assert keys_for(record) == [
        ClusterKey(CompositeKind.METHOD_COMPOSITION, method("A", "m1()"), "demo"),
        ClusterKey(CompositeKind.METHOD_DECOMPOSITION, method("A", "m()"), "demo"),
    ]


@pytest.mark.parametrize("kind, source, target, expected", [
    ("pull_up_method", method("SubFoo1", "m()"), method("SuperFoo", "m()"),
     (CompositeKind.COMPOSITE_PULL_UP_METHOD, method("SuperFoo", "m()"))),
    ("move", method("Foo", "m()"), method("Bar", "m()"),
     (CompositeKind.CLASS_DECOMPOSITION, ElementRef.for_class("Foo"))),
    ("move_rename", method("Foo", "m()"), method("Bar", "n()"),
     (CompositeKind.CLASS_DECOMPOSITION, ElementRef.for_class("Foo"))),
    ("inline", method("A", "f()"), method("B", "g()"),
     (CompositeKind.COMPOSITE_INLINE_METHOD, method("A", "f()"))),
    ("push_down_method", method("Super", "m()"), method("Sub", "m()"),
     (CompositeKind.COMPOSITE_PUSH_DOWN_METHOD, method("Super", "m()"))),
    ("pull_up_field", field("Sub", "f"), field("Super", "f"),
     (CompositeKind.COMPOSITE_PULL_UP_FIELD, field("Super", "f"))),
    ("push_down_field", field("Super", "f"), field("Sub", "f"),
     (CompositeKind.COMPOSITE_PUSH_DOWN_FIELD, field("Super", "f"))),
])
def test_keys_for_single_anchor_kinds(kind, source, target, expected):
    keys = keys_for(rec("1", kind, source, target))
    assert [(key.kind, key.element) for key in keys] == [expected]


def test_pull_up_composite():
    records = [
        rec(f"pu{i}", "pull_up_method", method(f"SubFoo{i}", "m()"), method("SuperFoo", "m()"))
        for i in (1, 2, 3)
    ]
    (composite,) = cluster(records)
    assert composite.kind is CompositeKind.COMPOSITE_PULL_UP_METHOD
    assert composite.anchor == method("SuperFoo", "m()")
    assert composite.member_ids == ["pu1", "pu2", "pu3"]
    assert composite.commits == frozenset({"a1b2c3"})
    assert composite.scope is None


def test_one_extraction_feeds_two_kinds():
    records = [
        rec("1", "extract", method("A", "m()"), method("A", "x()")),
        rec("2", "extract", method("A", "n()"), method("A", "x()")),
        rec("3", "extract_move", method("A", "m()"), method("B", "y()")),
    ]
    composites = cluster(records)
    assert [(c.kind, c.anchor, c.member_ids) for c in composites] == [
        (CompositeKind.METHOD_COMPOSITION, method("A", "x()"), ["1", "2"]),
        (CompositeKind.METHOD_DECOMPOSITION, method("A", "m()"), ["1", "3"]),
    ]
    assert composites[0].scope is Scope.INTRA_CLASS
    assert composites[1].scope is Scope.MIXED


def test_different_projects_never_share_a_composite():
    records = [
        rec("1", "pull_up_method", method("Sub1", "m()"), method("Super", "m()"), project="a"),
        rec("2", "pull_up_method", method("Sub2", "m()"), method("Super", "m()"), project="b"),
    ]
    assert cluster(records) == []


def test_overloads_are_different_anchors():
    records = [
        rec("1", "pull_up_method", method("Sub1", "m(int)"), method("Super", "m(int)")),
        rec("2", "pull_up_method", method("Sub2", "m(String)"), method("Super", "m(String)")),
    ]
    assert cluster(records) == []


def test_move_with_rename_joins_class_decomposition():
    records = [
        rec("1", "move", method("Foo", "m1()"), method("Bar", "m1()")),
        rec("2", "move_rename", method("Foo", "m2()"), method("Baz", "n2()")),
    ]
    (composite,) = cluster(records)
    assert composite.kind is CompositeKind.CLASS_DECOMPOSITION
    assert composite.anchor == ElementRef.for_class("Foo")


def test_min_size():
    records = [rec(f"{i}", "move", method("Foo", f"m{i}()"), method("Bar", f"m{i}()")) for i in range(3)]
    assert len(cluster(records, min_size=3)) == 1
    assert cluster(records, min_size=4) == []
    with pytest.raises(ValueError):
        cluster(records, min_size=1)


def test_no_constraint_on_time_or_commit():
    records = [
        rec("1", "inline", method("A", "f()"), method("B", "g()"), commit="aa", timestamp="2010-01-01T00:00:00Z"),
        rec("2", "inline", method("A", "f()"), method("C", "h()"), commit="bb", timestamp="2020-01-01T00:00:00Z"),
    ]
    (composite,) = cluster(records)
    assert composite.is_multi_commit
    assert composite.age_days == 3652


def test_empty_input():
    assert cluster([]) == []
    assert brute_force_cluster([]) == []


def test_brute_force_size_limit():
    records = colliding_records(seed=0, count=config.BRUTE_FORCE_MAX_RECORDS + 1)
    with pytest.raises(IntegrityError):
        brute_force_cluster(records)


@pytest.mark.parametrize("seed", range(20))
def test_cluster_matches_brute_force(seed):
    records = colliding_records(seed, 200)
    assert cluster(records) == brute_force_cluster(records)


@pytest.mark.slow
def test_cluster_matches_brute_force_at_scale():
    for seed in range(1000):
        records = colliding_records(seed, 500)
        assert cluster(records) == brute_force_cluster(records), f"seed {seed}"


def test_colliding_records_cover_every_kind():
    records = colliding_records(seed=3, count=500)
    assert {r.kind for r in records} == set(type(records[0].kind))
    assert {c.kind for c in cluster(records)} == set(CompositeKind)


# ---------------------------------------------------------------------------
# Properties
# ---------------------------------------------------------------------------

_records = st.builds(colliding_records, seed=st.integers(0, 2**32 - 1), count=st.integers(0, 120))


@pytest.mark.property_based
@given(records=_records, order=st.randoms(use_true_random=False))
@settings(max_examples=50, deadline=None)
def test_permutation_invariance(records, order):
    shuffled = list(records)
    order.shuffle(shuffled)
    assert cluster(shuffled) == cluster(records)


@pytest.mark.property_based
@given(records=_records)
@settings(max_examples=50, deadline=None)
def test_composite_structure(records):
    composites = cluster(records)
    for kind in CompositeKind:
        seen = set()
        for composite in (c for c in composites if c.kind is kind):
            assert composite.size >= 2
            ids = set(composite.member_ids)
            assert not ids & seen
            seen |= ids
            for r1, r2 in itertools.combinations(composite.members, 2):
                assert pair_clusters(kind, r1, r2)
    # every member of a clustered record's key group is accounted for
    clustered = {(c.kind, c.anchor, c.project): set(c.member_ids) for c in composites}
    for record in records:
        for key in keys_for(record):
            group = clustered.get((key.kind, key.element, key.project))
            if group is not None:
                assert record.id in group


@pytest.mark.property_based
@given(records=_records, shift_days=st.integers(-3000, 3000))
@settings(max_examples=30, deadline=None)
def test_age_is_translation_invariant(records, shift_days):
    from dataclasses import replace
    from datetime import timedelta

    shifted = [
        replace(r, timestamp=r.timestamp + timedelta(days=shift_days)) if r.timestamp else r for r in records
    ]
    assert [c.age_days for c in cluster(records)] == [c.age_days for c in cluster(shifted)]
