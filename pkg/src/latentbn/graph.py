"""Structural queries: topological order, descendants, c-components, empirical parents."""

from __future__ import annotations

import heapq
from typing import Iterable

from .model import Network


def topological_order(net: Network) -> list[int]:
    """Kahn's algorithm, ties broken by ascending variable id."""
    indeg = [len(net.parents(v)) for v in range(len(net))]
    heap = [v for v in range(len(net)) if indeg[v] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        v = heapq.heappop(heap)
        order.append(v)
        for c in net.children(v):
            indeg[c] -= 1
            if indeg[c] == 0:
                heapq.heappush(heap, c)
    if len(order) != len(net):
        raise ValueError("graph has a cycle")
    return order


def descendants(net: Network, v: int) -> set[int]:
    if not 0 <= v < len(net):
        raise KeyError(f"unknown variable id {v}")
    seen: set[int] = set()
    stack = list(net.children(v))
    while stack:
        c = stack.pop()
        if c not in seen:
            seen.add(c)
            stack.extend(net.children(c))
    return seen


def c_components(net: Network, keep: Iterable[int] | None = None) -> list[frozenset[int]]:
    """Partition of the internal variables into c-components.

    Internal-to-internal arcs are dropped and the rest of the graph is split
    into undirected connected components.  ``keep`` restricts the graph to an
    induced subgraph first.  Blocks are sorted by their smallest id.
    """
    nodes = set(range(len(net))) if keep is None else set(keep)
    internal = {v for v in nodes if net.parents(v)}
    parent_of = list(range(len(net)))

    def find(a):
        while parent_of[a] != a:
            parent_of[a] = parent_of[parent_of[a]]
            a = parent_of[a]
        return a

    for z in internal:
        for p in net.parents(z):
            if p in nodes and p not in internal:
                parent_of[find(p)] = find(z)
    blocks: dict[int, set[int]] = {}
    for z in internal:
        blocks.setdefault(find(z), set()).add(z)
    return sorted((frozenset(b) for b in blocks.values()), key=min)


def empirical_parents(net: Network, z: int, order: list[int] | None = None) -> frozenset[int]:
    """Conditioning set of ``z`` in the factorisation of the manifest marginal.

    The graph is cut to the variables up to and including ``z`` in a fixed
    topological order (so every descendant of ``z`` is gone), the c-component
    holding ``z`` is located there, and the result is that block plus the
    internal parents of its members, minus ``z`` itself.
    """
    if not net.parents(z):
        raise ValueError(f"{net.name_of(z)} is not an internal variable")
    if order is None:
        order = topological_order(net)
    prefix = order[: order.index(z) + 1]
    block = next(b for b in c_components(net, prefix) if z in b)
    out = set(block)
    for member in block:
        out.update(p for p in net.parents(member) if net.parents(p))
    out.discard(z)
    return frozenset(out)


def empirical_structure(net: Network) -> dict[int, tuple[int, ...]]:
    """W_Z for every internal Z, each as an ascending tuple of ids."""
    order = topological_order(net)
    return {z: tuple(sorted(empirical_parents(net, z, order))) for z in net.internal}
