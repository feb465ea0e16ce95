import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional


@dataclass
class Clustering:
    """Node key -> cluster id, with token totals per cluster and doc type."""

    labels: dict
    tokens: dict = field(default_factory=dict)   # cluster -> {"statute": n, "regulation": n}
    snapshot: Optional[str] = None

    @classmethod
    def from_labels(cls, quotient, keys, labels, snapshot=None) -> "Clustering":
        mapping = {k: int(c) for k, c in zip(keys, labels)}
        tokens = {}
        for k, c in mapping.items():
            d = quotient.nodes[k]
            slot = tokens.setdefault(c, {"statute": 0, "regulation": 0})
            slot["statute"] += d.get("tokens_statute", 0)
            slot["regulation"] += d.get("tokens_regulation", 0)
        if snapshot is None and quotient.graph.get("year") is not None:
            snapshot = f"{quotient.graph.get('country')}-{quotient.graph['year']}"
        return cls(mapping, dict(sorted(tokens.items())), snapshot)

    def clusters(self) -> dict:
        out = {}
        for k, c in sorted(self.labels.items(), key=lambda kv: (kv[1], str(kv[0]))):
            out.setdefault(c, []).append(k)
        return out

    def __len__(self):
        return len(set(self.labels.values()))

    def write_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\r\n")
            w.writerow(["key", "cluster"])
            for k in sorted(self.labels, key=str):
                w.writerow([k, self.labels[k]])
        return path

    @classmethod
    def read_csv(cls, path) -> "Clustering":
        with open(Path(path), newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
        if not rows or rows[0][:2] != ["key", "cluster"]:
            raise ValueError(f"{path}: expected a key,cluster header")
        return cls({r[0]: int(r[1]) for r in rows[1:] if r})
