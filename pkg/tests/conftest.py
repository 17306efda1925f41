from pathlib import Path

import pytest

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture
def corpus_path() -> Path:
    return DATA_DIR / "corpus.conllu"


@pytest.fixture
def corpus_bytes(corpus_path) -> bytes:
    return corpus_path.read_bytes()
