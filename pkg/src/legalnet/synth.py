"""Deterministic synthetic corpora for demos and end-to-end tests.

The generated store follows the ingestion layout
``<root>/<country>/<year>/<document>.xml``; German corpora also get a
``<root>/DE/laws.csv`` registry.  Texts mix topic words per chapter with
filler and carry citations in the forms the parsers understand.  From year
to year sections are appended to, lightly perturbed, added, and one root
document skips a year to exercise forward filling.
"""
import csv
import random
from dataclasses import dataclass, field
from pathlib import Path

from .citekeys import CiteKey
from .corpus import CONTAINER, SEQITEM, SUBSEQITEM, CorpusNode, _safe_name, serialize

FILLER = ("shall", "any", "person", "the", "under", "may", "such", "provided", "that", "each",
          "within", "days", "notice", "authority", "required", "apply", "report", "written",
          "period", "extent", "other", "terms", "whether", "relevant", "applicable")
FILLER_DE = ("die", "der", "das", "und", "nach", "wird", "ist", "eine", "einer", "soweit", "nicht",
             "Frist", "Antrag", "Behörde", "zuständige", "gilt", "Person", "innerhalb", "jeweils")
TOPICS = {
    "banking": ("bank", "deposit", "capital", "lending", "insured", "reserve"),
    "securities": ("security", "exchange", "broker", "dealer", "registration", "issuer"),
    "tax": ("income", "deduction", "taxable", "credit", "gross", "return"),
    "labor": ("employee", "wage", "employer", "overtime", "workplace", "union"),
    "environment": ("emission", "water", "pollutant", "permit", "waste", "air"),
    "aviation": ("aircraft", "airport", "pilot", "carrier", "flight", "airworthiness"),
}
TOPICS_DE = {
    "kredit": ("Kreditinstitut", "Eigenmittel", "Einlagen", "Kredit", "Institut", "Aufsicht"),
    "pruefung": ("Prüfer", "Prüfungsbericht", "Jahresabschluss", "Prüfung", "Bericht", "Anlage"),
    "schuld": ("Schuldner", "Gläubiger", "Leistung", "Vertrag", "Schadensersatz", "Forderung"),
    "sachen": ("Eigentum", "Besitz", "Grundstück", "Sache", "Hypothek", "Übertragung"),
}


@dataclass
class Section:
    key: str
    number: str
    paragraphs: list


@dataclass
class Unit:
    key: str
    level: str
    heading: str
    topic: str
    sections: list = field(default_factory=list)


@dataclass
class Document:
    key: str
    doc_type: str
    collection: str
    title: str
    heading: str
    level: str
    units: list = field(default_factory=list)
    groups: list = field(default_factory=list)   # (group key, level, heading, unit indices)


def _sentence(rng, topic_words, filler, n):
    words = [rng.choice(topic_words) if rng.random() < 0.35 else rng.choice(filler) for _ in range(n)]
    text = " ".join(words)
    return text[0].upper() + text[1:] + "."


class _Generator:
    def __init__(self, country, seed):
        self.country = country
        self.rng = random.Random(f"{country}:{seed}")
        self.docs = []
        self.counter = 0

    def fresh(self, prefix):
        self.counter += 1
        return f"{prefix}-n{self.counter}"

    def filler(self):
        return FILLER_DE if self.country == "DE" else FILLER

    def topics(self):
        return TOPICS_DE if self.country == "DE" else TOPICS

    def paragraph(self, unit):
        return _sentence(self.rng, self.topics()[unit.topic], self.filler(), self.rng.randint(12, 24))

    def all_sections(self, doc_type=None):
        for d in self.docs:
            if doc_type and d.doc_type != doc_type:
                continue
            for u in d.units:
                for s in u.sections:
                    yield d, u, s

    # citations ---------------------------------------------------------
    def cite_us(self, doc, target_doc, target):
        if target_doc is doc:
            if doc.collection == "CFR":
                return f"§ {target.number}" if self.rng.random() < 0.5 else f"§ {target.number} of this chapter"
            return f"section {target.number} of this title"
        coll = "U.S.C." if target_doc.collection == "USC" else "CFR"
        return f"{target_doc.title} {coll} {target.number}"

    def cite_de(self, doc, target_doc, target):
        label = f"§ {target.number}"
        if target_doc is doc:
            return label
        if self.rng.random() < 0.5:
            return f"{label} {target_doc.title}"
        return f"{label} des {target_doc.heading}es" if target_doc.heading.endswith("gesetz") \
            else f"{label} {target_doc.title}"

    def add_citation(self, doc, unit, sec):
        same_unit = self.rng.random() < 0.6
        pool = [(d, u, s) for d, u, s in self.all_sections() if s is not sec]
        if same_unit:
            local = [(d, u, s) for d, u, s in pool if u is unit]
            pool = local or pool
        if not pool:
            return
        d, _, target = self.rng.choice(pool)
        text = self.cite_de(doc, d, target) if self.country == "DE" else self.cite_us(doc, d, target)
        lead = ("gemäß" if self.country == "DE" else "as provided in")
        sec.paragraphs.append(f"{self.paragraph(unit)[:-1]} {lead} {text}.")

    # structure ---------------------------------------------------------
    def new_section(self, doc, unit, number):
        sec = Section(self.fresh(f"{doc.key}-s{number}"), number,
                      [self.paragraph(unit) for _ in range(self.rng.randint(1, 3))])
        unit.sections.append(sec)
        return sec

    def next_number(self, doc, unit):
        idx = doc.units.index(unit) + 1
        used = [s.number for s in unit.sections]
        n = len(used) + 1
        if doc.collection == "CFR":
            return f"{idx}.{n}"
        if self.country == "DE":
            return str(sum(len(u.sections) for u in doc.units) + 1) + ("a" if n > 6 else "")
        return f"{idx}{n:02d}"

    def grow(self, year_index):
        rng = self.rng
        for doc in self.docs:
            for unit in doc.units:
                for sec in unit.sections:
                    r = rng.random()
                    if r < 0.25:
                        sec.paragraphs[-1] = sec.paragraphs[-1] + " " + self.paragraph(unit)
                    elif r < 0.30:
                        words = sec.paragraphs[0].split()
                        if len(words) > 4:
                            words[rng.randrange(1, len(words))] = rng.choice(self.filler())
                            sec.paragraphs[0] = " ".join(words)
                for _ in range(rng.randint(0, 2 if doc.doc_type == "regulation" else 1)):
                    sec = self.new_section(doc, unit, self.next_number(doc, unit))
                    for _ in range(rng.randint(0, 3)):
                        self.add_citation(doc, unit, sec)
        for _ in range(3 + year_index):
            d, u, s = rng.choice(list(self.all_sections()))
            self.add_citation(d, u, s)

    def tree(self, doc):
        root = CorpusNode(doc.key, CONTAINER, 0, doc.level, doc.heading, doc_type=doc.doc_type)
        holders = {}
        for gkey, level, heading, idx in doc.groups:
            g = CorpusNode(gkey, CONTAINER, 1, level, heading, doc_type=doc.doc_type)
            root.children.append(g)
            for i in idx:
                holders[i] = g
        for i, unit in enumerate(doc.units):
            parent = holders.get(i, root)
            u = CorpusNode(unit.key, CONTAINER, parent.level_depth + 1, unit.level, unit.heading,
                           doc_type=doc.doc_type)
            parent.children.append(u)
            for sec in unit.sections:
                ck = CiteKey("DE" if self.country == "DE" else doc.collection, doc.title,
                             ("§" + sec.number) if self.country == "DE" else sec.number)
                s = CorpusNode(sec.key, SEQITEM, u.level_depth + 1, "section", None, ck,
                               doc_type=doc.doc_type)
                u.children.append(s)
                for j, para in enumerate(sec.paragraphs):
                    s.children.append(CorpusNode(f"{sec.key}-p{j}", SUBSEQITEM, s.level_depth + 1,
                                                 "paragraph", text=para, doc_type=doc.doc_type))
        return root


def _us(gen):
    plan = [("USC12", "statute", "USC", "12", "Banks and Banking", ["banking", "securities", "banking"]),
            ("USC26", "statute", "USC", "26", "Internal Revenue Code", ["tax", "labor", "tax"]),
            ("CFR12", "regulation", "CFR", "12", "Banks and Banking", ["banking", "securities", "labor"]),
            ("CFR40", "regulation", "CFR", "40", "Protection of Environment", ["environment", "aviation", "environment"])]
    for key, doc_type, coll, title, heading, topics in plan:
        doc = Document(key, doc_type, coll, title, heading, "title")
        for i, topic in enumerate(topics, 1):
            unit = Unit(f"{key}-ch{i}", "chapter", f"{topic.capitalize()} provisions", topic)
            doc.units.append(unit)
        gen.docs.append(doc)


def _de(gen):
    plan = [("KWG", "statute", "Kreditwesengesetz", ["kredit", "kredit"], None),
            ("BGB", "statute", "Bürgerliches Gesetzbuch", ["schuld", "schuld", "sachen"], [(0, 1), (2,)]),
            ("PrüfbV", "regulation", "Prüfungsberichtsverordnung", ["pruefung", "kredit"], None)]
    for abbrev, doc_type, name, topics, books in plan:
        doc = Document(f"DE-{abbrev}", doc_type, "DE", abbrev, name, "law")
        for i, topic in enumerate(topics, 1):
            doc.units.append(Unit(f"DE-{abbrev}-a{i}", "section_group", f"Abschnitt {i}", topic))
        if books:
            doc.groups = [(f"DE-{abbrev}-b{i}", "book", f"Buch {i}", list(idx)) for i, idx in enumerate(books, 1)]
        gen.docs.append(doc)


def generate(out_dir, seed: int = 0, first_year: int = 2000, years: int = 4,
             countries=("US", "DE")) -> Path:
    """Write a synthetic corpus; identical arguments give identical bytes."""
    out = Path(out_dir)
    for country in countries:
        gen = _Generator(country, seed)
        (_de if country == "DE" else _us)(gen)
        for doc in gen.docs:
            for unit in doc.units:
                for _ in range(4):
                    gen.new_section(doc, unit, gen.next_number(doc, unit))
        for doc in gen.docs:
            for unit in doc.units:
                for sec in unit.sections:
                    if gen.rng.random() < 0.7:
                        gen.add_citation(doc, unit, sec)
        skip = gen.docs[-1].key   # absent in the second year, back afterwards
        for y in range(years):
            if y:
                gen.grow(y)
            ydir = out / country / str(first_year + y)
            ydir.mkdir(parents=True, exist_ok=True)
            for doc in gen.docs:
                if y == 1 and years > 2 and doc.key == skip:
                    continue
                (ydir / (_safe_name(doc.key) + ".xml")).write_bytes(serialize(gen.tree(doc)))
        if country == "DE":
            with open(out / "DE" / "laws.csv", "w", newline="", encoding="utf-8") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(["abbrev", "name", "valid_from", "valid_to"])
                for doc in gen.docs:
                    w.writerow([doc.title, doc.heading, "", ""])
    return out
