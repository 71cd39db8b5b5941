import pytest

from primesums import sieve


@pytest.fixture
def engine():
    """A private engine with small segments so tests cross many boundaries."""
    return sieve.PrimeEngine(segment_odds=1 << 12)


@pytest.fixture(autouse=True)
def _no_cache(monkeypatch):
    monkeypatch.delenv("PSA_CACHE_DIR", raising=False)
