"""Maximum bipartite matching via Hopcroft-Karp.

Used by the single-chunk (k=1) solver, where serving a packet means
matching it to one free MU.  Iteration is over sorted vertices so the
returned matching is deterministic for a given adjacency.
"""

from __future__ import annotations

from collections import deque
from typing import Mapping

_INF = float("inf")


def maximum_bipartite_matching(
    adjacency: Mapping[int, frozenset[int]],
) -> dict[int, int]:
    """Return a maximum matching as a left-vertex -> right-vertex dict.

    ``adjacency`` maps each left vertex to its right-side neighbors.
    Unmatched left vertices are absent from the result.
    """
    left = sorted(adjacency)
    neighbors = {u: sorted(adjacency[u]) for u in left}
    match_left: dict[int, int | None] = {u: None for u in left}
    match_right: dict[int, int | None] = {}
    for u in left:
        for v in neighbors[u]:
            match_right.setdefault(v, None)
    dist: dict[int | None, float] = {}

    def bfs() -> bool:
        queue: deque[int] = deque()
        for u in left:
            if match_left[u] is None:
                dist[u] = 0
                queue.append(u)
            else:
                dist[u] = _INF
        dist[None] = _INF
        while queue:
            u = queue.popleft()
            if dist[u] < dist[None]:
                for v in neighbors[u]:
                    nxt = match_right[v]
                    if dist[nxt] == _INF:
                        dist[nxt] = dist[u] + 1
                        if nxt is not None:
                            queue.append(nxt)
        return dist[None] != _INF

    def dfs(u: int) -> bool:
        for v in neighbors[u]:
            nxt = match_right[v]
            if dist[nxt] == dist[u] + 1 and (nxt is None or dfs(nxt)):
                match_left[u] = v
                match_right[v] = u
                return True
        dist[u] = _INF
        return False

    while bfs():
        for u in left:
            if match_left[u] is None:
                dfs(u)
    return {u: v for u, v in match_left.items() if v is not None}
