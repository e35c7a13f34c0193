import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from argmine.corpus import Document
from argmine.synth import SynthConfig, generate

from oracles import random_sentence


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def small_corpus() -> list[Document]:
    return generate(SynthConfig(n_docs=12, seed=5, noise_rate=0.05))


def make_random_documents(rng, n_docs: int, max_sentences: int = 6) -> list[Document]:
    docs = []
    for d in range(n_docs):
        n_sent = int(rng.integers(1, max_sentences + 1))
        sentences = tuple(random_sentence(rng) for _ in range(n_sent))
        kind = "summary" if rng.random() < 0.5 else "full_text"
        docs.append(Document(f"rand{d:03d}", kind, sentences))
    return docs


@pytest.fixture
def random_documents(rng) -> list[Document]:
    return make_random_documents(rng, 8)
