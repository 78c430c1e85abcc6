"""Plain-text graph dumps.

Edge list::

    # sociosynth v1 n=<N> seed=<S>
    u,v,level

one line per edge with ``u < v``, grouped by level then sorted. Level-3
lines are optional. Memberships are written as ``node,kind,group_id``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from .affiliation import AffiliationGroup
from .graph import EMPTY_EDGES, EdgeLevel, GraphView, SocialGraph, clique_edges, unique_edges

FORMAT_VERSION = "v1"
_HEADER = re.compile(r"#\s*sociosynth\s+(\S+)\s+n=(\d+)\s+seed=(\S+)\s*$")


class DumpFormatError(ValueError):
    pass


@dataclass
class EdgeDump:
    n: int
    seed: int | None
    levels: dict[EdgeLevel, np.ndarray]

    def view(self, levels: Iterable[int] = (1, 2)) -> GraphView:
        wanted = sorted({EdgeLevel(int(lv)) for lv in levels})
        if not wanted:
            raise ValueError("level set must not be empty")
        parts = [self.levels.get(lv, EMPTY_EDGES) for lv in wanted]
        return GraphView(self.n, np.concatenate(parts))


def _lines(edges: np.ndarray, level: int) -> list[str]:
    return [f"{u},{v},{level}" for u, v in edges.tolist()]


def format_edge_list(graph: SocialGraph, include_level_3: bool = False) -> str:
    seed = "none" if graph.seed is None else str(graph.seed)
    out = [f"# sociosynth {FORMAT_VERSION} n={graph.n} seed={seed}"]
    out += _lines(graph.edges(EdgeLevel.I), 1)
    out += _lines(graph.edges(EdgeLevel.II), 2)
    if include_level_3:
        level3 = unique_edges(clique_edges(g.members for g in graph.groups), graph.n)
        out += _lines(level3, 3)
    return "\n".join(out) + "\n"


def write_edge_list(path: str | Path, graph: SocialGraph, include_level_3: bool = False) -> None:
    Path(path).write_text(format_edge_list(graph, include_level_3), encoding="utf-8", newline="\n")


def parse_edge_list(text: str) -> EdgeDump:
    lines = text.splitlines()
    if not lines:
        raise DumpFormatError("empty edge list")
    m = _HEADER.match(lines[0])
    if not m:
        raise DumpFormatError(f"line 1: bad header {lines[0]!r}")
    if m.group(1) != FORMAT_VERSION:
        raise DumpFormatError(f"line 1: unsupported format version {m.group(1)}")
    n = int(m.group(2))
    seed = None if m.group(3) == "none" else int(m.group(3))

    rows: dict[EdgeLevel, list[tuple[int, int]]] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            u, v, level = (int(x) for x in line.split(","))
            lv = EdgeLevel(level)
        except ValueError:
            raise DumpFormatError(f"line {lineno}: expected 'u,v,level', got {line!r}") from None
        if lv == EdgeLevel.IV:
            raise DumpFormatError(f"line {lineno}: level 4 edges are not supported")
        if not (0 <= u < v < n):
            raise DumpFormatError(f"line {lineno}: need 0 <= u < v < {n}, got {u},{v}")
        rows.setdefault(lv, []).append((u, v))
    levels = {lv: unique_edges(np.array(pairs, np.int64), n) for lv, pairs in rows.items()}
    return EdgeDump(n, seed, levels)


def read_edge_list(path: str | Path) -> EdgeDump:
    return parse_edge_list(Path(path).read_text(encoding="utf-8"))


def format_memberships(groups: Iterable[AffiliationGroup]) -> str:
    out = ["node,kind,group_id"]
    for g in sorted(groups, key=lambda g: g.id):
        out += [f"{node},{g.kind},{g.id}" for node in sorted(np.asarray(g.members).tolist())]
    return "\n".join(out) + "\n"


def write_memberships(path: str | Path, groups: Iterable[AffiliationGroup]) -> None:
    Path(path).write_text(format_memberships(groups), encoding="utf-8", newline="\n")


def read_memberships(path: str | Path) -> list[AffiliationGroup]:
    members: dict[int, list[int]] = {}
    kinds: dict[int, str] = {}
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0].strip() != "node,kind,group_id":
        raise DumpFormatError("membership dump must start with 'node,kind,group_id'")
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            node, kind, gid = line.split(",")
            node_i, gid_i = int(node), int(gid)
        except ValueError:
            raise DumpFormatError(f"line {lineno}: expected 'node,kind,group_id'") from None
        if kinds.setdefault(gid_i, kind) != kind:
            raise DumpFormatError(f"line {lineno}: group {gid_i} has mixed kinds")
        members.setdefault(gid_i, []).append(node_i)
    return [AffiliationGroup(gid, kinds[gid], f"{kinds[gid]}-{gid}", np.array(ids, np.int64))
            for gid, ids in sorted(members.items())]


def write_report(path: str | Path, report: dict) -> None:
    text = json.dumps(report, indent=2, sort_keys=True)
    Path(path).write_text(text + "\n", encoding="utf-8", newline="\n")
