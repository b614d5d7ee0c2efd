# tests/conftest.py
import os

import numpy as np
import pandas as pd
import pytest

from app.core.config import settings
from app.models.lexicon_models import DIMENSIONS
from app.services import corpus_service, lexicon_service

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")
GOLDEN = os.path.join(os.path.dirname(__file__), "golden")


def fixture_path(name: str) -> str:
    return os.path.join(FIXTURES, name)


def golden_text(name: str) -> str:
    with open(os.path.join(GOLDEN, name), "r", encoding="utf-8") as handle:
        return handle.read()


@pytest.fixture
def stopwords():
    return corpus_service.load_stopwords(settings.STOPWORDS_PATH)


@pytest.fixture
def poms_base():
    return lexicon_service.load_poms_base(settings.POMS_BASE_PATH)


@pytest.fixture
def of_lexicon():
    return lexicon_service.load_of_lexicon(settings.OF_LEXICON_PATH)


@pytest.fixture
def base_gpoms(poms_base):
    return lexicon_service.gpoms_from_base(poms_base)


@pytest.fixture
def tweets_path():
    return fixture_path("tweets_small.tsv")


@pytest.fixture
def ngrams_path():
    return fixture_path("ngrams_small.tsv")


def make_panel(n: int = 120, seed: int = 0, start: str = "2008-03-03") -> pd.DataFrame:
    """Random business-day panel with the normalize column layout"""
    rng = np.random.default_rng(seed)
    index = pd.bdate_range(start, periods=n, name="date")
    closes = 10000 + np.cumsum(rng.normal(0, 50, n + 1))
    frame = pd.DataFrame(rng.normal(size=(n, 1 + len(DIMENSIONS))), index=index, columns=["OF", *DIMENSIONS])
    frame.insert(0, "D", np.diff(closes))
    frame["DJIA"] = closes[1:]
    return frame


@pytest.fixture
def panel():
    return make_panel()
