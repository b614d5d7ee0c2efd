# app/services/lexicon_service.py
import logging
from collections import defaultdict
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Tuple

from pydantic import ValidationError

from app.core.exceptions import LexiconLoadError, UsageError
from app.models.lexicon_models import DIMENSIONS, GpomsLexicon, GpomsLink, OfLexicon, PomsBase, PomsEntry

logger = logging.getLogger(__name__)

POLARITY_LABELS = {"positive": 1, "negative": -1}
NGRAM_MIN_TOKENS = 3
NGRAM_MAX_TOKENS = 5


def _data_lines(path: str, kind: str) -> Iterator[Tuple[int, str]]:
    """Yield (line number, stripped line) skipping blanks and # comments"""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            for line_no, line in enumerate(handle, start=1):
                line = line.strip()
                if line and not line.startswith("#"):
                    yield line_no, line
    except OSError as e:
        raise LexiconLoadError(f"Cannot read {kind} file {path}: {e}")


def _single_token(term: str, path: str, line_no: int) -> str:
    term = term.strip().lower()
    if not term or len(term.split()) != 1:
        raise LexiconLoadError(f"{path}:{line_no}: term must be a single token, got {term!r}")
    return term


def load_of_lexicon(path: str) -> OfLexicon:
    """Load "term<TAB>positive|negative" lines; terms listed with both labels are dropped"""
    labels: Dict[str, set] = defaultdict(set)
    for line_no, line in _data_lines(path, "OF lexicon"):
        fields = line.split("\t")
        if len(fields) != 2 or fields[1].strip().lower() not in POLARITY_LABELS:
            raise LexiconLoadError(f"{path}:{line_no}: expected 'term<TAB>positive|negative', got {line!r}")
        term = _single_token(fields[0], path, line_no)
        labels[term].add(fields[1].strip().lower())

    conflicted = sorted(term for term, found in labels.items() if len(found) > 1)
    if conflicted:
        logger.warning(f"⚠️ Dropped {len(conflicted)} ambiguous OF term(s): {', '.join(conflicted[:10])}")
    positive = frozenset(t for t, found in labels.items() if found == {"positive"})
    negative = frozenset(t for t, found in labels.items() if found == {"negative"})
    logger.info(f"📚 OF lexicon {path}: {len(positive)} positive, {len(negative)} negative")
    return OfLexicon(positive=positive, negative=negative, conflicts=len(conflicted))


def load_poms_base(path: str) -> PomsBase:
    """Load "term<TAB>dimension<TAB>+1|-1" lines"""
    entries: List[PomsEntry] = []
    seen = set()
    for line_no, line in _data_lines(path, "POMS base"):
        fields = line.split("\t")
        if len(fields) != 3 or fields[2].strip() not in ("+1", "-1", "1"):
            raise LexiconLoadError(f"{path}:{line_no}: expected 'term<TAB>dimension<TAB>+1|-1', got {line!r}")
        term = _single_token(fields[0], path, line_no)
        dimension = fields[1].strip().capitalize()
        if dimension not in DIMENSIONS:
            raise LexiconLoadError(f"{path}:{line_no}: unknown dimension {fields[1]!r} (expected one of {', '.join(DIMENSIONS)})")
        if term in seen:
            raise LexiconLoadError(f"{path}:{line_no}: duplicate base term {term!r}")
        seen.add(term)
        entries.append(PomsEntry(term=term, dimension=dimension, polarity=int(fields[2])))
    if not entries:
        raise LexiconLoadError(f"POMS base file {path} has no entries")
    return PomsBase(entries=tuple(entries))


def read_ngram_counts(path: str) -> List[Tuple[Tuple[str, ...], int]]:
    """Read "w1 w2 w3 [w4 [w5]]<TAB>count" lines"""
    ngrams: List[Tuple[Tuple[str, ...], int]] = []
    for line_no, line in _data_lines(path, "n-gram"):
        fields = line.split("\t")
        if len(fields) != 2:
            raise LexiconLoadError(f"{path}:{line_no}: expected 'tokens<TAB>count', got {line!r}")
        tokens = tuple(token.lower() for token in fields[0].split())
        if not NGRAM_MIN_TOKENS <= len(tokens) <= NGRAM_MAX_TOKENS:
            raise LexiconLoadError(f"{path}:{line_no}: n-gram must have {NGRAM_MIN_TOKENS}-{NGRAM_MAX_TOKENS} tokens, got {len(tokens)}")
        try:
            count = int(fields[1])
        except ValueError:
            raise LexiconLoadError(f"{path}:{line_no}: count {fields[1]!r} is not an integer")
        if count <= 0:
            raise LexiconLoadError(f"{path}:{line_no}: count must be positive, got {count}")
        ngrams.append((tokens, count))
    return ngrams


def cooccurrence_weights(base: PomsBase, ngrams: List[Tuple[Tuple[str, ...], int]]) -> Dict[str, Dict[str, Fraction]]:
    """Exact w(c, p) = joint count of c and base term p / total count of c, for every candidate c"""
    base_terms = set(base.terms())
    totals: Dict[str, int] = defaultdict(int)
    joint: Dict[str, Dict[str, int]] = defaultdict(lambda: defaultdict(int))
    for tokens, count in ngrams:
        distinct = set(tokens)
        present = distinct & base_terms
        for token in distinct - base_terms:
            totals[token] += count
            for term in present:
                joint[token][term] += count
    return {
        candidate: {term: Fraction(n, totals[candidate]) for term, n in links.items()}
        for candidate, links in joint.items()
    }


def build_gpoms_lexicon(base: PomsBase, ngrams_path: str, min_weight: float, max_terms: int) -> GpomsLexicon:
    if not 0 < min_weight <= 1:
        raise UsageError(f"min_weight must lie in (0, 1], got {min_weight}")
    if max_terms < len(base):
        raise UsageError(f"max_terms ({max_terms}) must be at least the base size ({len(base)})")

    ngrams = read_ngram_counts(ngrams_path)
    weights = cooccurrence_weights(base, ngrams)
    # decimal reading of the threshold so that 0.8 means exactly 4/5
    threshold = Fraction(repr(float(min_weight)))

    kept: Dict[str, Dict[str, Fraction]] = {}
    for candidate, links in weights.items():
        strong = {term: w for term, w in links.items() if w >= threshold}
        if strong:
            kept[candidate] = strong

    ranked = sorted(kept, key=lambda c: (-max(kept[c].values()), c))
    ranked = ranked[: max_terms - len(base)]

    poms = base.terms()
    entries: Dict[str, Tuple[GpomsLink, ...]] = {
        entry.term: (GpomsLink(base_term=entry.term, dimension=entry.dimension, polarity=entry.polarity, weight=1.0),)
        for entry in base.entries
    }
    for candidate in ranked:
        entries[candidate] = tuple(
            GpomsLink(base_term=term, dimension=poms[term].dimension, polarity=poms[term].polarity, weight=float(w))
            for term, w in sorted(kept[candidate].items())
        )

    if not ranked:
        logger.warning(f"⚠️ No candidate term reached min_weight={min_weight}; lexicon holds the {len(base)} base terms only")
    logger.info(f"🧩 GPOMS lexicon built: {len(entries)} terms from {len(ngrams)} n-grams ({len(kept)} candidates passed)")
    return GpomsLexicon(entries=entries)


def save_gpoms_lexicon(lexicon: GpomsLexicon, path: str) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(lexicon.model_dump_json(indent=2))
        handle.write("\n")


def load_gpoms_lexicon(path: str) -> GpomsLexicon:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return GpomsLexicon.model_validate_json(handle.read())
    except OSError as e:
        raise LexiconLoadError(f"Cannot read GPOMS lexicon {path}: {e}")
    except ValidationError as e:
        raise LexiconLoadError(f"GPOMS lexicon {path} is invalid: {e.errors()[0]['msg']}")


def gpoms_from_base(base: PomsBase) -> GpomsLexicon:
    """Lexicon holding only the self-mapped base terms"""
    return GpomsLexicon(entries={
        entry.term: (GpomsLink(base_term=entry.term, dimension=entry.dimension, polarity=entry.polarity, weight=1.0),)
        for entry in base.entries
    })


class LexiconService:
    """Loads the bundled (or configured) word lists once and builds GPOMS lexicons from them"""

    def __init__(self, poms_base_path: str, of_lexicon_path: str):
        self.poms_base_path = poms_base_path
        self.of_lexicon_path = of_lexicon_path
        self._base: Optional[PomsBase] = None
        self._of: Optional[OfLexicon] = None

    @property
    def base(self) -> PomsBase:
        if self._base is None:
            self._base = load_poms_base(self.poms_base_path)
        return self._base

    @property
    def of_lexicon(self) -> OfLexicon:
        if self._of is None:
            self._of = load_of_lexicon(self.of_lexicon_path)
        return self._of

    def build(self, ngrams_path: str, min_weight: float, max_terms: int) -> GpomsLexicon:
        """Expand the base terms through n-gram co-occurrence"""
        return build_gpoms_lexicon(self.base, ngrams_path, min_weight, max_terms)

    def gpoms(self, lexicon_path: Optional[str] = None) -> GpomsLexicon:
        """A saved GPOMS lexicon, or the base terms alone when no path is given"""
        if lexicon_path:
            return load_gpoms_lexicon(lexicon_path)
        logger.info("ℹ️ No GPOMS lexicon given; using the POMS base terms only")
        return gpoms_from_base(self.base)
