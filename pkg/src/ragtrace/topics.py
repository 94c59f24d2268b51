"""Hierarchical topic partitioning by greedy modularity over relationship weights.

The partition at each level is found by deterministic agglomerative modularity
optimization: start from singleton communities and repeatedly apply the positive
merge with the highest modularity gain, breaking ties by community id. Topics
large enough to matter are re-partitioned on their induced subgraph, which yields
the nested topic tree top-down. Entirely deterministic: node order is id order
and no randomness is consumed.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass

from .config import PipelineConfig
from .gateway import LLMGateway
from .models import ChatRequest, Entity, InvocationContext, Relationship, Topic

TITLE_SYSTEM_PROMPT = (
    "You name the common theme of a group of entities. Answer with a short title only."
)


def modularity(
    communities: list[list[str]], edges: list[tuple[str, str, float]]
) -> float:
    """Weighted Newman modularity of a node partition."""
    m = sum(w for _, _, w in edges)
    if m == 0:
        return 0.0
    member: dict[str, int] = {}
    for idx, community in enumerate(communities):
        for node in community:
            member[node] = idx
    internal = [0.0] * len(communities)
    degree = defaultdict(float)
    for a, b, w in edges:
        degree[a] += w
        degree[b] += w
        if member.get(a) == member.get(b):
            internal[member[a]] += w
    q = 0.0
    for idx, community in enumerate(communities):
        d_c = sum(degree[n] for n in community)
        q += internal[idx] / m - (d_c / (2 * m)) ** 2
    return q


def partition_graph(
    node_ids: list[str], edges: list[tuple[str, str, float]]
) -> list[list[str]]:
    """Greedy modularity communities; deterministic, merge-positive-only."""
    nodes = sorted(set(node_ids))
    if not nodes:
        return []
    m = sum(w for _, _, w in edges)
    if m == 0:
        return [[n] for n in nodes]

    # Community id = smallest member node id; stable under merges.
    community_of = {n: n for n in nodes}
    members: dict[str, list[str]] = {n: [n] for n in nodes}
    degree: dict[str, float] = defaultdict(float)
    # Cross-community weights, keyed by ordered community-id pair.
    cross: dict[tuple[str, str], float] = defaultdict(float)
    for a, b, w in edges:
        degree[a] += w
        degree[b] += w
        if a != b:
            key = (min(a, b), max(a, b))
            cross[key] += w
    comm_degree: dict[str, float] = {n: degree[n] for n in nodes}

    while True:
        best_gain = 1e-12
        best_pair: tuple[str, str] | None = None
        # Sorted iteration makes the smallest pair win ties deterministically.
        for (c1, c2), w in sorted(cross.items()):
            gain = w / m - (comm_degree[c1] * comm_degree[c2]) / (2 * m * m)
            if gain > best_gain:
                best_gain = gain
                best_pair = (c1, c2)
        if best_pair is None:
            break
        c1, c2 = best_pair
        keep, absorb = (c1, c2) if c1 < c2 else (c2, c1)
        members[keep].extend(members.pop(absorb))
        for node in members[keep]:
            community_of[node] = keep
        comm_degree[keep] += comm_degree.pop(absorb)
        # Re-route the absorbed community's cross weights to the kept id.
        for (a, b), w in list(cross.items()):
            if absorb not in (a, b):
                continue
            del cross[(a, b)]
            other = b if a == absorb else a
            if other == keep:
                continue
            key = (min(keep, other), max(keep, other))
            cross[key] += w
    return sorted([sorted(ms) for ms in members.values()], key=lambda c: c[0])


@dataclass
class _TreeNode:
    entity_ids: list[str]
    level: int
    children: list["_TreeNode"]


def _grow(
    entity_ids: list[str],
    edges_by_pair: dict[tuple[str, str], float],
    level: int,
    max_levels: int,
    min_split_size: int,
) -> list[_TreeNode]:
    """Partition one node set and recursively split each community."""
    edges = [(a, b, w) for (a, b), w in edges_by_pair.items()]
    communities = partition_graph(entity_ids, edges)
    nodes: list[_TreeNode] = []
    for community in communities:
        node = _TreeNode(entity_ids=community, level=level, children=[])
        if len(community) >= min_split_size and level + 1 < max_levels:
            inside = set(community)
            sub_edges = {
                pair: w for pair, w in edges_by_pair.items() if pair[0] in inside and pair[1] in inside
            }
            sub = _grow(community, sub_edges, level + 1, max_levels, min_split_size)
            if len(sub) > 1:  # a single community means no modularity gain
                node.children = sub
        nodes.append(node)
    return nodes


def partition_topics(
    entities: list[Entity],
    relationships: list[Relationship],
    max_levels: int,
    min_split_size: int,
    gateway: LLMGateway | None = None,
    config: PipelineConfig | None = None,
) -> list[Topic]:
    """Build the nested topic tree; titles come from the fallback rule or one model call each."""
    if not entities:
        return []
    entity_ids = sorted(e.id for e in entities)
    edges_by_pair: dict[tuple[str, str], float] = defaultdict(float)
    rel_by_pair: dict[tuple[str, str], list[str]] = defaultdict(list)
    for rel in relationships:
        pair = tuple(sorted((rel.source_entity_id, rel.target_entity_id)))
        edges_by_pair[pair] += rel.weight
        rel_by_pair[pair].append(rel.id)

    roots = _grow(entity_ids, dict(edges_by_pair), 0, max_levels, min_split_size)

    entity_by_id = {e.id: e for e in entities}
    topics: list[Topic] = []
    counter = 0

    def materialize(node: _TreeNode, parent_id: str | None) -> Topic:
        nonlocal counter
        topic_id = f"top-{counter:03d}"
        counter += 1
        inside = set(node.entity_ids)
        internal_rels = sorted(
            rid
            for pair, rids in rel_by_pair.items()
            if pair[0] in inside and pair[1] in inside
            for rid in rids
        )
        topic = Topic(
            id=topic_id,
            level=node.level,
            parent_id=parent_id,
            child_ids=[],
            entity_ids=list(node.entity_ids),
            relationship_ids=internal_rels,
            title="",
        )
        topics.append(topic)
        for child in node.children:
            child_topic = materialize(child, topic_id)
            topic.child_ids.append(child_topic.id)
        return topic

    for root in roots:
        materialize(root, None)

    for topic in topics:
        topic.title = _title_for(topic, entity_by_id, edges_by_pair, gateway, config)
    return topics


def _title_for(
    topic: Topic,
    entity_by_id: dict[str, Entity],
    edges_by_pair: dict[tuple[str, str], float],
    gateway: LLMGateway | None,
    config: PipelineConfig | None,
) -> str:
    inside = set(topic.entity_ids)
    degree = {eid: 0.0 for eid in topic.entity_ids}
    for (a, b), w in edges_by_pair.items():
        if a in inside and b in inside:
            degree[a] += w
            degree[b] += w
    top_entity = min(
        topic.entity_ids, key=lambda eid: (-degree[eid], entity_by_id[eid].name)
    )
    fallback = f"Topic of {entity_by_id[top_entity].name}"
    if gateway is None or config is None or not config.llm_titles:
        return fallback
    names = ", ".join(entity_by_id[eid].name for eid in topic.entity_ids)
    request = ChatRequest(
        messages=[("system", TITLE_SYSTEM_PROMPT), ("user", f"Entities: {names}")],
        temperature=config.temperature_for("summarize"),
        max_tokens=64,
    )
    response, _ = gateway.complete(
        request, InvocationContext(stage="summarize", target_refs=[topic.id])
    )
    return response.strip() or fallback
