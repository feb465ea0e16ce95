from dataclasses import dataclass

COLLECTIONS = ("USC", "CFR", "DE")


@dataclass(frozen=True, order=True)
class CiteKey:
    """A resolvable citation target at section level.

    US keys are ``(collection, title, section)`` with collection ``USC`` or
    ``CFR``; German keys use collection ``DE``, the law abbreviation as
    ``title`` and a section label such as ``§5a`` or ``Art229``.

    The text form ``collection/title/section`` is what the corpus XML carries
    in ``citekey`` attributes.
    """

    collection: str
    title: str
    section: str

    def __post_init__(self):
        if self.collection not in COLLECTIONS:
            raise ValueError(f"unknown collection {self.collection!r}")
        if not self.title or not self.section:
            raise ValueError("cite key needs a title and a section")

    def __str__(self):
        return f"{self.collection}/{self.title}/{self.section}"

    @classmethod
    def parse(cls, text: str) -> "CiteKey":
        head, sep, rest = text.strip().partition("/")
        title, sep2, section = rest.rpartition("/")
        if not sep or not sep2:
            raise ValueError(f"malformed cite key {text!r}")
        return cls(head, title, section)

    @property
    def country(self) -> str:
        return "DE" if self.collection == "DE" else "US"
