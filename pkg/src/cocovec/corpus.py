"""Sentence-aligned parallel corpus model.

Editions (one translation of the corpus in one language) are identified by a
4-character id: a 3-character ISO 639-3 code plus one alphanumeric character
that distinguishes editions in the same language, e.g. "enge".  Sentences are
aligned across editions by an opaque sentence id; identical id means aligned
content.  Tokenization is whitespace splitting only, no further normalization.
"""

from __future__ import annotations

import collections
from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass

Token = str
SentenceId = str

EDITION_LEN = 4


@dataclass(frozen=True)
class EditionId:
    """4-character edition identifier: 3-char ISO 639-3 code + 1 variant char."""

    iso: str
    variant: str

    def __post_init__(self) -> None:
        if len(self.iso) != 3 or not self.iso.isalnum():
            raise ValueError(f"iso code must be 3 alphanumeric characters, got {self.iso!r}")
        if len(self.variant) != 1 or not self.variant.isalnum():
            raise ValueError(f"edition variant must be 1 alphanumeric character, got {self.variant!r}")

    def render(self) -> str:
        return self.iso + self.variant

    @classmethod
    def parse(cls, text: str) -> "EditionId":
        if len(text) != EDITION_LEN:
            raise ValueError(f"edition id must be exactly {EDITION_LEN} characters, got {text!r}")
        return cls(text[:3], text[3])


def validate_edition(text: str) -> str:
    """Return `text` if it is a well-formed rendered edition id, else raise."""
    return EditionId.parse(text).render()


@dataclass(frozen=True)
class WordKey:
    """Edition-scoped word (or space-joined ngram), rendered "<edition>:<surface>".

    `edition` is the rendered 4-character edition id.  The surface must be
    non-empty and free of tabs and newlines so keys survive the TSV formats.
    """

    edition: str
    surface: str

    def __post_init__(self) -> None:
        EditionId.parse(self.edition)
        if not self.surface:
            raise ValueError("word surface must be non-empty")
        if "\t" in self.surface or "\n" in self.surface:
            raise ValueError(f"word surface must not contain tab/newline: {self.surface!r}")

    def render(self) -> str:
        return f"{self.edition}:{self.surface}"

    @classmethod
    def parse(cls, text: str) -> "WordKey":
        if len(text) < EDITION_LEN + 2 or text[EDITION_LEN] != ":":
            raise ValueError(f"not a word key (expected '<edition>:<surface>'): {text!r}")
        return cls(text[:EDITION_LEN], text[EDITION_LEN + 1 :])


def word_key(edition: str, surface: str) -> str:
    return f"{edition}:{surface}"


def key_edition(key: str) -> str:
    """Edition prefix of a rendered word key."""
    return key[:EDITION_LEN]


def key_surface(key: str) -> str:
    """Surface part of a rendered word key."""
    return key[EDITION_LEN + 1 :]


def is_word_key(text: str) -> bool:
    try:
        WordKey.parse(text)
    except ValueError:
        return False
    return True


class ParallelCorpus:
    """Immutable sentence-aligned corpus across editions.

    `sentences` maps edition -> (sentence id -> token tuple).  The global
    sentence-id index is the sorted union over editions; per-edition
    vocabularies are recounted from the token sequences at construction.
    """

    def __init__(self, editions: Sequence[str], sentences: Mapping[str, Mapping[SentenceId, Sequence[Token]]]):
        if len(set(editions)) != len(editions):
            raise ValueError("duplicate edition ids")
        for e in editions:
            validate_edition(e)
        unknown = set(sentences) - set(editions)
        if unknown:
            raise ValueError(f"sentences given for editions not in the edition list: {sorted(unknown)}")
        self.editions: tuple[str, ...] = tuple(editions)
        self._sentences: dict[str, dict[SentenceId, tuple[Token, ...]]] = {
            e: {sid: tuple(toks) for sid, toks in sorted(sentences.get(e, {}).items())} for e in editions
        }
        self.vocabulary: dict[str, collections.Counter[str]] = {
            e: collections.Counter(tok for toks in self._sentences[e].values() for tok in toks)
            for e in editions
        }
        all_ids: set[SentenceId] = set()
        for e in editions:
            all_ids.update(self._sentences[e])
        self.sentence_ids: tuple[SentenceId, ...] = tuple(sorted(all_ids))

    def sentences(self, edition: str) -> Mapping[SentenceId, tuple[Token, ...]]:
        """Sentence-id -> tokens for one edition, iterated in sentence-id order."""
        try:
            return self._sentences[edition]
        except KeyError:
            raise KeyError(f"unknown edition {edition!r}") from None

    def tokens(self, edition: str, sid: SentenceId) -> tuple[Token, ...]:
        return self.sentences(edition)[sid]

    def restrict(self, editions: Sequence[str]) -> "ParallelCorpus":
        """Sub-corpus over a subset of editions (manifest order preserved)."""
        keep = [e for e in self.editions if e in set(editions)]
        missing = set(editions) - set(self.editions)
        if missing:
            raise KeyError(f"unknown editions {sorted(missing)}")
        return ParallelCorpus(keep, {e: self._sentences[e] for e in keep})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ParallelCorpus):
            return NotImplemented
        return self.editions == other.editions and self._sentences == other._sentences

    def __repr__(self) -> str:
        return f"ParallelCorpus(editions={len(self.editions)}, sentences={len(self.sentence_ids)})"


def ngrams(sentence: Sequence[Token], max_n: int) -> list[str]:
    """All contiguous ngrams of length 1..max_n as space-joined surfaces.

    Length-major order (all unigrams, then bigrams, ...); duplicates preserved.
    """
    if max_n < 1:
        raise ValueError(f"max_n must be >= 1, got {max_n}")
    out: list[str] = []
    for n in range(1, max_n + 1):
        for i in range(len(sentence) - n + 1):
            out.append(" ".join(sentence[i : i + n]))
    return out


def contains_ngram(tokens: Sequence[Token], gram: Sequence[Token]) -> bool:
    n = len(gram)
    if n == 0 or n > len(tokens):
        return False
    g = tuple(gram)
    return any(tuple(tokens[i : i + n]) == g for i in range(len(tokens) - n + 1))


def signature(
    corpus: ParallelCorpus,
    edition: str,
    gram: str | Sequence[Token],
    within: Iterable[SentenceId] | None = None,
) -> tuple[SentenceId, ...]:
    """Sorted set of sentence ids of `edition` containing `gram` contiguously.

    `within` restricts the scan to a subcorpus; an ngram occurring twice in one
    sentence contributes that sentence once.
    """
    toks = tuple(gram.split(" ")) if isinstance(gram, str) else tuple(gram)
    sub = None if within is None else set(within)
    hits = []
    for sid, sent in corpus.sentences(edition).items():
        if sub is not None and sid not in sub:
            continue
        if contains_ngram(sent, toks):
            hits.append(sid)
    return tuple(hits)


# ---------------------------------------------------------------------------
# File formats.
#
# pbc-tsv: one line per sentence, "<sentence-id>\t<pre-tokenized text>", UTF-8,
# LF endings.  aligned-lines: plain text, one sentence per line; the zero-padded
# line index serves as the sentence id and all files of a set must have equal
# line counts.  A manifest file holds one "<edition-id>\t<path>" per line.
# ---------------------------------------------------------------------------

LINE_ID_WIDTH = 8


def _read_pbc_tsv(path: str) -> dict[SentenceId, tuple[Token, ...]]:
    out: dict[SentenceId, tuple[Token, ...]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            sid, sep, text = line.partition("\t")
            if not sep:
                raise ValueError(f"{path}:{lineno}: expected '<id>\\t<text>'")
            if not sid:
                raise ValueError(f"{path}:{lineno}: empty sentence id")
            if sid in out:
                raise ValueError(f"{path}: duplicate sentence id {sid!r}")
            out[sid] = tuple(text.split())
    return out


def _read_aligned_lines(path: str) -> list[tuple[Token, ...]]:
    with open(path, encoding="utf-8") as fh:
        return [tuple(line.rstrip("\n").split()) for line in fh]


def load_corpus(entries: Sequence[tuple[str, str]], format: str = "pbc-tsv") -> ParallelCorpus:
    """Load a parallel corpus from (edition-id, path) pairs.

    Each file holds one edition.  pbc-tsv files carry explicit sentence ids;
    aligned-lines files are aligned by line index and must have equal lengths.
    """
    editions = [validate_edition(e) for e, _ in entries]
    if format == "pbc-tsv":
        sentences = {e: _read_pbc_tsv(path) for e, path in entries}
    elif format == "aligned-lines":
        per_edition = [(e, _read_aligned_lines(path), path) for e, path in entries]
        counts = {path: len(lines) for _, lines, path in per_edition}
        if len(set(counts.values())) > 1:
            raise ValueError(f"aligned-lines files differ in line count: {counts}")
        sentences = {
            e: {format_line_id(i): toks for i, toks in enumerate(lines)} for e, lines, _ in per_edition
        }
    else:
        raise ValueError(f"unknown corpus format {format!r}")
    return ParallelCorpus(editions, sentences)


def format_line_id(index: int) -> SentenceId:
    """Zero-padded line index, so lexicographic order equals numeric order."""
    return f"{index:0{LINE_ID_WIDTH}d}"


def load_manifest(path: str, format: str = "pbc-tsv") -> ParallelCorpus:
    """Load a corpus named by a manifest of "<edition-id>\\t<path>" lines.

    Relative paths are resolved against the manifest's directory.
    """
    import os

    base = os.path.dirname(os.path.abspath(path))
    entries: list[tuple[str, str]] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            edition, sep, rel = line.partition("\t")
            if not sep:
                raise ValueError(f"{path}:{lineno}: expected '<edition-id>\\t<path>'")
            entries.append((edition, rel if os.path.isabs(rel) else os.path.join(base, rel)))
    if not entries:
        raise ValueError(f"{path}: empty manifest")
    return load_corpus(entries, format=format)


def save_pbc_tsv(corpus: ParallelCorpus, edition: str, path: str) -> None:
    """Write one edition back out in pbc-tsv form (sentence-id order)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for sid, toks in corpus.sentences(edition).items():
            fh.write(f"{sid}\t{' '.join(toks)}\n")


def save_corpus(corpus: ParallelCorpus, out_dir: str, manifest_name: str = "manifest.tsv") -> str:
    """Write every edition as pbc-tsv plus a manifest; returns the manifest path."""
    import os

    os.makedirs(out_dir, exist_ok=True)
    for e in corpus.editions:
        save_pbc_tsv(corpus, e, os.path.join(out_dir, f"{e}.tsv"))
    manifest = os.path.join(out_dir, manifest_name)
    with open(manifest, "w", encoding="utf-8", newline="\n") as fh:
        for e in corpus.editions:
            fh.write(f"{e}\t{e}.tsv\n")
    return manifest
