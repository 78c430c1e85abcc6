import numpy as np
import pytest

from sociosynth.graph import EdgeLevel, level_view
from sociosynth.io import (
    DumpFormatError,
    format_edge_list,
    parse_edge_list,
    read_edge_list,
    read_memberships,
    write_edge_list,
    write_memberships,
)
from sociosynth.pipeline import generate


@pytest.fixture(scope="module")
def gen(example):
    return generate(example, 1500, 21)


def test_header_and_line_format(gen):
    text = format_edge_list(gen.graph)
    lines = text.splitlines()
    assert lines[0] == "# sociosynth v1 n=1500 seed=21"
    for line in lines[1:]:
        u, v, level = map(int, line.split(","))
        assert u < v and level in (1, 2)
    assert text.endswith("\n") and "\r" not in text


def test_edge_list_round_trip(tmp_path, gen):
    path = tmp_path / "edges.csv"
    write_edge_list(path, gen.graph)
    dump = read_edge_list(path)
    assert (dump.n, dump.seed) == (1500, 21)
    for lv in (EdgeLevel.I, EdgeLevel.II):
        assert np.array_equal(dump.levels[lv], gen.graph.edges(lv))
    assert np.array_equal(dump.view((1, 2)).edges(), level_view(gen.graph, {1, 2}).edges())
    write_edge_list(tmp_path / "again.csv", gen.graph)
    assert path.read_bytes() == (tmp_path / "again.csv").read_bytes()


def test_level_three_lines_are_optional(gen):
    assert ",3\n" not in format_edge_list(gen.graph)
    dump = parse_edge_list(format_edge_list(gen.graph, include_level_3=True))
    assert np.array_equal(dump.view((3,)).edges(), level_view(gen.graph, {3}).edges())


def test_membership_round_trip(tmp_path, gen):
    path = tmp_path / "members.csv"
    write_memberships(path, gen.groups)
    assert path.read_text().splitlines()[0] == "node,kind,group_id"
    back = read_memberships(path)
    assert [(g.id, g.kind, g.members.tolist()) for g in back] == \
        [(g.id, g.kind, g.members.tolist()) for g in gen.groups]


@pytest.mark.parametrize("text", [
    "",
    "0,1,1\n",
    "# sociosynth v2 n=3 seed=1\n0,1,1\n",
    "# sociosynth v1 n=3 seed=1\n1,0,1\n",
    "# sociosynth v1 n=3 seed=1\n0,3,1\n",
    "# sociosynth v1 n=3 seed=1\n0,1,7\n",
    "# sociosynth v1 n=3 seed=1\n0,1,4\n",
    "# sociosynth v1 n=3 seed=1\n0;1;1\n",
])
def test_bad_dumps_are_rejected(text):
    with pytest.raises(DumpFormatError):
        parse_edge_list(text)


def test_seedless_header():
    dump = parse_edge_list("# sociosynth v1 n=2 seed=none\n0,1,1\n")
    assert dump.seed is None and dump.n == 2
