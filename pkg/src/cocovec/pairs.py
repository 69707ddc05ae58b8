"""Training pair corpora: (context-id, word-key) sequences.

Three flavours: S-ID pairs a word occurrence with its sentence id, C-ID pairs
a concept member with its concept id, and Co+Co is the S-ID block followed by
the C-ID block.  Pair corpora are written as two-column TSV, which doubles as
a two-token-per-line corpus for any external skipgram trainer.
"""

from __future__ import annotations

from dataclasses import dataclass

from .concepts import ConceptSet
from .corpus import ParallelCorpus, word_key

S_ID = "s-id"
C_ID = "c-id"
CO_CO = "co+co"

CONCEPT_PREFIX = "C:"


@dataclass(frozen=True)
class PairCorpus:
    """Ordered (context-id, word-key) pairs with a provenance tag."""

    pairs: tuple[tuple[str, str], ...]
    provenance: str

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)


def build_sid(corpus: ParallelCorpus, min_count: int) -> PairCorpus:
    """One (sentence-id, word-key) pair per token occurrence.

    Tokens below `min_count` corpus frequency (per edition) emit nothing.
    Order: edition manifest order, then sentence id, then token position.
    """
    if min_count < 1:
        raise ValueError(f"min_count must be >= 1, got {min_count}")
    out: list[tuple[str, str]] = []
    for edition in corpus.editions:
        vocab = corpus.vocabulary[edition]
        for sid, toks in corpus.sentences(edition).items():
            for tok in toks:
                if vocab[tok] >= min_count:
                    out.append((sid, word_key(edition, tok)))
    return PairCorpus(tuple(out), S_ID)


def build_cid(concepts: ConceptSet) -> PairCorpus:
    """One (concept-id, member-key) pair per concept member, each emitted once.

    Concepts carry globally aggregated information, so members are not repeated
    by corpus frequency and no frequency threshold applies.
    """
    out: list[tuple[str, str]] = []
    for concept in concepts:
        for member in concept.sorted_members():
            out.append((concept.id, member))
    return PairCorpus(tuple(out), C_ID)


def build_coco(corpus: ParallelCorpus, concepts: ConceptSet, sid_min_count: int) -> PairCorpus:
    """Concatenate the S-ID corpus (with its frequency threshold) and the C-ID corpus."""
    sid = build_sid(corpus, sid_min_count)
    cid = build_cid(concepts)
    return PairCorpus(sid.pairs + cid.pairs, CO_CO)


def save_pairs(pairs: PairCorpus, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for ctx, word in pairs:
            fh.write(f"{ctx}\t{word}\n")


def load_pairs(path: str) -> PairCorpus:
    """Read a pair-corpus TSV; provenance is inferred from the context-id blocks.

    Context ids starting with "C:" are concept ids.  A mix is only legal as an
    S-ID block followed by a C-ID block (the Co+Co layout).
    """
    rows: list[tuple[str, str]] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            ctx, sep, word = line.partition("\t")
            if not sep or not ctx or not word:
                raise ValueError(f"{path}:{lineno}: expected '<context-id>\\t<word-key>'")
            rows.append((ctx, word))
    is_cid = [ctx.startswith(CONCEPT_PREFIX) for ctx, _ in rows]
    if not any(is_cid):
        return PairCorpus(tuple(rows), S_ID)
    if all(is_cid):
        return PairCorpus(tuple(rows), C_ID)
    first_cid = is_cid.index(True)
    if not all(is_cid[first_cid:]):
        raise ValueError(f"{path}: sentence-id pairs after the concept-id block")
    return PairCorpus(tuple(rows), CO_CO)
