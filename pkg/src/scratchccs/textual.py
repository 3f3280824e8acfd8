"""Text drawn from project scripts, and its TF-IDF vectorization.

A project's textual output is whatever free text its blocks carry: say/think
bubbles, ask prompts, broadcast message names, and any other string literal
typed into a block slot. Per project these are folded into one document by
default; a per-element mode keeps each literal separate.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, EmptyCorpus
from .model import Project

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)

GRANULARITY_PROJECT = "project"
GRANULARITY_ELEMENT = "element"

_BROADCAST_FIELD = "BROADCAST_OPTION"
_TEXT_INPUT_KINDS = {"string", "broadcast"}


@dataclass(frozen=True)
class TextDocument:
    doc_id: str
    project_id: str
    tokens: tuple[str, ...]

    @property
    def empty(self) -> bool:
        return not self.tokens


def tokenize(text: str) -> list[str]:
    """Lowercase and split on every non-alphanumeric character."""
    return _TOKEN_RE.findall(text.lower())


def _iter_block_texts(project: Project):
    for target in project.targets:
        for block in target.blocks.values():
            if not block.shadow:
                for value in block.inputs.values():
                    if value.kind in _TEXT_INPUT_KINDS:
                        yield str(value.value)
            for name, value in block.fields.items():
                if name == _BROADCAST_FIELD:
                    yield str(value)


def extract_text_documents(
    project: Project, granularity: str = GRANULARITY_PROJECT
) -> list[TextDocument]:
    """Collect the project's textual output as token documents.

    "project" granularity concatenates everything into a single document
    (empty if the project has no text); "element" yields one document per
    string, skipping strings that tokenize to nothing.
    """
    if granularity == GRANULARITY_PROJECT:
        tokens: list[str] = []
        for text in _iter_block_texts(project):
            tokens.extend(tokenize(text))
        return [TextDocument(doc_id=project.project_id, project_id=project.project_id, tokens=tuple(tokens))]
    if granularity == GRANULARITY_ELEMENT:
        docs = []
        for text in _iter_block_texts(project):
            toks = tokenize(text)
            if toks:
                docs.append(
                    TextDocument(
                        doc_id=f"{project.project_id}:{len(docs)}",
                        project_id=project.project_id,
                        tokens=tuple(toks),
                    )
                )
        return docs
    raise ConfigError(f"unknown text granularity: {granularity!r}")


def tfidf_vectorize(docs: list[TextDocument]) -> tuple[np.ndarray, list[str]]:
    """TF-IDF matrix over the documents, with the vocabulary that indexes it.

    weight(t, d) = tf(t, d) * (ln((1 + N) / (1 + df(t))) + 1), rows with any
    weight L2-normalized. Empty documents stay as zero rows so callers can
    keep doc order aligned with projects.
    """
    if not any(doc.tokens for doc in docs):
        raise EmptyCorpus("no document contains a token")
    vocab = sorted({tok for doc in docs for tok in doc.tokens})
    index = {tok: i for i, tok in enumerate(vocab)}
    n_docs = len(docs)

    df = np.zeros(len(vocab), dtype=np.float64)
    for doc in docs:
        for tok in set(doc.tokens):
            df[index[tok]] += 1
    idf = np.log((1.0 + n_docs) / (1.0 + df)) + 1.0

    matrix = np.zeros((n_docs, len(vocab)), dtype=np.float64)
    for row, doc in enumerate(docs):
        for tok in doc.tokens:
            matrix[row, index[tok]] += 1.0
        matrix[row] *= idf
        norm = math.sqrt(float(np.dot(matrix[row], matrix[row])))
        if norm > 0.0:
            matrix[row] /= norm
    return matrix, vocab
