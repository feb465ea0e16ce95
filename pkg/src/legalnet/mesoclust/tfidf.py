"""TF-IDF term rankings with families as documents."""
import math
import re
from collections import Counter
from functools import lru_cache
from importlib import resources

_WORD = re.compile(r"[^\W\d_]{2,}")


@lru_cache(maxsize=None)
def default_stoplist() -> frozenset:
    text = (resources.files("legalnet") / "data" / "stoplist.txt").read_text(encoding="utf-8")
    return frozenset(w.strip().casefold() for w in text.splitlines() if w.strip() and not w.startswith("#"))


def terms(text: str) -> list:
    return [w.casefold() for w in _WORD.findall(text or "")]


def family_tfidf(documents: dict, k: int = 10, stoplist=None) -> dict:
    """Top-``k`` terms per document by raw tf times ln(N/df).

    ``documents`` maps a family id to its text or to a list of terms.
    Terms occurring in every document get weight 0 and are never listed.
    """
    stop = default_stoplist() if stoplist is None else frozenset(s.casefold() for s in stoplist)
    bags = {}
    for fid, doc in documents.items():
        words = terms(doc) if isinstance(doc, str) else [w.casefold() for w in doc]
        bags[fid] = Counter(w for w in words if w not in stop)
    n = len(bags)
    df = Counter(w for bag in bags.values() for w in bag)
    out = {}
    for fid, bag in bags.items():
        scored = [(w, tf * math.log(n / df[w])) for w, tf in bag.items()]
        scored = [(w, s) for w, s in scored if s > 0]
        scored.sort(key=lambda ws: (-ws[1], ws[0]))
        out[fid] = scored[:k]
    return out
