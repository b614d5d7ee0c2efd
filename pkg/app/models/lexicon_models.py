from typing import Dict, FrozenSet, List, Literal, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

DIMENSIONS: Tuple[str, ...] = ("Calm", "Alert", "Sure", "Vital", "Kind", "Happy")

Dimension = Literal["Calm", "Alert", "Sure", "Vital", "Kind", "Happy"]


class OfLexicon(BaseModel):
    model_config = ConfigDict(frozen=True)

    positive: FrozenSet[str]
    negative: FrozenSet[str]
    conflicts: int = 0

    @model_validator(mode="after")
    def _disjoint(self):
        if self.positive & self.negative:
            raise ValueError("positive and negative term sets overlap")
        return self

    def __len__(self) -> int:
        return len(self.positive) + len(self.negative)


class PomsEntry(BaseModel):
    model_config = ConfigDict(frozen=True)

    term: str
    dimension: Dimension
    polarity: Literal[1, -1]


class PomsBase(BaseModel):
    model_config = ConfigDict(frozen=True)

    entries: Tuple[PomsEntry, ...]

    @field_validator("entries")
    @classmethod
    def _unique_terms(cls, entries):
        terms = [entry.term for entry in entries]
        if len(set(terms)) != len(terms):
            raise ValueError("POMS base terms must be unique")
        return entries

    def __len__(self) -> int:
        return len(self.entries)

    def terms(self) -> Dict[str, PomsEntry]:
        return {entry.term: entry for entry in self.entries}


class GpomsLink(BaseModel):
    model_config = ConfigDict(frozen=True)

    base_term: str
    dimension: Dimension
    polarity: Literal[1, -1]
    weight: float = Field(gt=0.0, le=1.0)


class GpomsLexicon(BaseModel):
    model_config = ConfigDict(frozen=True)

    version: int = 1
    entries: Dict[str, Tuple[GpomsLink, ...]]

    @field_validator("entries")
    @classmethod
    def _unique_links(cls, entries):
        for term, links in entries.items():
            bases = [link.base_term for link in links]
            if len(set(bases)) != len(bases):
                raise ValueError(f"term '{term}' links the same base term twice")
        return entries

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, term: str) -> bool:
        return term in self.entries

    def pool(self, dimension: str, polarity: int) -> List[str]:
        """Terms whose every link points to the given dimension and polarity"""
        return sorted(
            term for term, links in self.entries.items()
            if all(link.dimension == dimension and link.polarity == polarity for link in links)
        )
