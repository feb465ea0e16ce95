"""Partial node alignment between consecutive snapshots.

Four passes run in order, each only over nodes still unmatched:

1. identical text of at least 50 characters, unique in both snapshots;
2. identical match key and identical text;
3. one text contains the other and the unmatched remainder is shorter
   than the matched part;
4. best Jaro-Winkler similarity above 0.9 among unmatched nodes near the
   images of already matched neighbours, repeated until nothing changes.

Only nodes with text take part.
"""
from collections import Counter, deque
from dataclasses import dataclass, field

import numpy as np

from .. import kernels
from ..corpus import Snapshot

MIN_UNIQUE_CHARS = 50
JW_THRESHOLD = 0.9
HOPS = 5


def jaro_winkler(a: str, b: str, prefix_scale: float = 0.1, max_prefix: int = 4) -> float:
    """Jaro-Winkler similarity; the prefix bonus is applied unconditionally."""
    ca = np.fromiter(map(ord, a), np.int64, len(a))
    cb = np.fromiter(map(ord, b), np.int64, len(b))
    return float(kernels.jaro_winkler_codes(ca, cb, prefix_scale, max_prefix))


@dataclass
class Alignment:
    mapping: dict = field(default_factory=dict)   # key at t -> key at t+1
    passes: dict = field(default_factory=dict)    # key at t -> 1..4

    def add(self, v, w, label):
        self.mapping[v] = w
        self.passes[v] = label

    def counts(self) -> Counter:
        return Counter(self.passes.values())

    def inverse(self) -> dict:
        return {w: v for v, w in self.mapping.items()}


def match_keys(snapshot: Snapshot) -> dict:
    """Citation key for pass 2, inherited from the closest ancestor that has one."""
    out = {}
    for tree in snapshot.trees:
        stack = [(tree, None)]
        while stack:
            node, inherited = stack.pop()
            own = str(node.citekey) if node.citekey else inherited
            out[node.key] = own if own is not None else node.key
            stack.extend((c, own) for c in node.children)
    return out


def _texts(snapshot):
    return [(n.key, n.text) for n in snapshot.nodes() if n.text]


def _adjacency(snapshot, graph=None):
    adj = {}
    for node in snapshot.nodes():
        adj.setdefault(node.key, set())
        for c in node.children:
            adj[node.key].add(c.key)
            adj.setdefault(c.key, set()).add(node.key)
    if graph is not None:
        for u, v in graph.edges():
            if u in adj and v in adj and u != v:
                adj[u].add(v)
                adj[v].add(u)
    return adj


def _within(adj, sources, hops):
    seen = {s: 0 for s in sources}
    queue = deque(sources)
    while queue:
        u = queue.popleft()
        if seen[u] == hops:
            continue
        for w in adj.get(u, ()):
            if w not in seen:
                seen[w] = seen[u] + 1
                queue.append(w)
    return seen


def contains_match(a: str, b: str) -> bool:
    """One text contains the other and the leftover is shorter than the overlap."""
    short, long_ = (a, b) if len(a) <= len(b) else (b, a)
    return bool(short) and short in long_ and len(long_) - len(short) < len(short)


def align(s_t: Snapshot, s_next: Snapshot, graph_t=None, graph_next=None,
          min_chars: int = MIN_UNIQUE_CHARS, threshold: float = JW_THRESHOLD,
          hops: int = HOPS) -> Alignment:
    """Four-pass alignment of ``s_t`` onto ``s_next``.

    ``graph_t``/``graph_next`` add reference edges to the pass-4
    neighbourhoods; without them only the hierarchy is used.
    """
    result = Alignment()
    left = _texts(s_t)
    right = _texts(s_next)
    right_text = dict(right)
    taken = set()

    def free_left():
        return [(k, t) for k, t in left if k not in result.mapping]

    # pass 1
    cl = Counter(t for _, t in left)
    cr = Counter(t for _, t in right)
    by_text = {t: k for k, t in right if cr[t] == 1}
    for k, t in left:
        if len(t) >= min_chars and cl[t] == 1 and t in by_text:
            result.add(k, by_text[t], 1)
            taken.add(by_text[t])

    # pass 2
    keys_l, keys_r = match_keys(s_t), match_keys(s_next)
    pairs_r = Counter((keys_r[k], t) for k, t in right if k not in taken)
    pairs_l = Counter((keys_l[k], t) for k, t in free_left())
    index_r = {(keys_r[k], t): k for k, t in right if k not in taken}
    for k, t in free_left():
        pair = (keys_l[k], t)
        if pairs_l[pair] == 1 and pairs_r.get(pair) == 1:
            result.add(k, index_r[pair], 2)
            taken.add(index_r[pair])

    # pass 3, greedy in document order on both sides
    pool = [(k, t) for k, t in right if k not in taken]
    for k, t in free_left():
        for k2, t2 in pool:
            if k2 in taken or not (len(t) / 2 < len(t2) < 2 * len(t)):
                continue
            if contains_match(t, t2):
                result.add(k, k2, 3)
                taken.add(k2)
                break

    # pass 4
    adj_l, adj_r = _adjacency(s_t, graph_t), _adjacency(s_next, graph_next)
    changed = True
    while changed:
        changed = False
        for k, t in free_left():
            anchors = [a for a in _within(adj_l, [k], hops) if a in result.mapping]
            if not anchors:
                continue
            near = _within(adj_r, [result.mapping[a] for a in anchors], hops)
            best = None
            for k2 in sorted(near):
                t2 = right_text.get(k2)
                if not t2 or k2 in taken:
                    continue
                score = jaro_winkler(t, t2)
                if score > threshold and (best is None or score > best[0]):
                    best = (score, k2)
            if best is not None:
                result.add(k, best[1], 4)
                taken.add(best[1])
                changed = True
    return result


def check_alignment(alignment: Alignment, s_t: Snapshot, s_next: Snapshot,
                    min_chars: int = MIN_UNIQUE_CHARS, threshold: float = JW_THRESHOLD) -> list:
    """Re-verify each matched pair against its pass predicate; returns violations."""
    bad = []
    if len(set(alignment.mapping.values())) != len(alignment.mapping):
        bad.append("mapping is not injective")
    lt = {k: t for k, t in _texts(s_t)}
    rt = {k: t for k, t in _texts(s_next)}
    kl, kr = match_keys(s_t), match_keys(s_next)
    for v, w in alignment.mapping.items():
        a, b = lt.get(v), rt.get(w)
        label = alignment.passes[v]
        ok = a is not None and b is not None and {
            1: lambda: a == b and len(a) >= min_chars,
            2: lambda: a == b and kl[v] == kr[w],
            3: lambda: contains_match(a, b),
            4: lambda: jaro_winkler(a, b) > threshold,
        }[label]()
        if not ok:
            bad.append(f"{v} -> {w} fails pass {label}")
    return bad
