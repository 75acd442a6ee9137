import pytest

import config
from src.artifact_store import ArtifactStore


def test_layout(tmp_path):
    store = ArtifactStore(tmp_path / "out" / "nested")
    json_path = store.save_json('{"a": 1}\n')
    md_path = store.save_markdown("# Report\n")
    assert json_path == tmp_path / "out" / "nested" / config.REPORT_JSON
    assert md_path.name == config.REPORT_MARKDOWN
    assert json_path.read_text(encoding="utf-8") == '{"a": 1}\n'
    assert store.plots_dir.is_dir()


def test_dot_numbering_is_per_kind(tmp_path):
    store = ArtifactStore(tmp_path)
    assert store.next_dot_index("inline") == 1
    store.save_dot("inline", 1, "digraph {}\n")
    store.save_dot("inline", 2, "digraph {}\n")
    first_pull_up = store.save_dot("pull_up", store.next_dot_index("pull_up"), "digraph {}\n")
    assert store.next_dot_index("inline") == 3
    assert first_pull_up.name == "composite_pull_up_1.dot"
    assert sorted(p.name for p in store.dot_dir.iterdir()) == [
        "composite_inline_1.dot", "composite_inline_2.dot", "composite_pull_up_1.dot",
    ]


def test_overwrites_existing_files(tmp_path):
    store = ArtifactStore(tmp_path)
    store.save_text("notes.txt", "first\n")
    store.save_text("notes.txt", "second\n")
    assert (tmp_path / "notes.txt").read_text(encoding="utf-8") == "second\n"


def test_unwritable_output_raises_os_error(tmp_path):
    blocker = tmp_path / "blocker"
    blocker.write_text("not a directory", encoding="utf-8")
    with pytest.raises(OSError):
        ArtifactStore(blocker)


def test_write_failure_propagates(tmp_path):
    store = ArtifactStore(tmp_path)
    (tmp_path / config.REPORT_JSON).mkdir()
    with pytest.raises(OSError):
        store.save_json("{}\n")
