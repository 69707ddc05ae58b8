"""Concept induction by subcorpus sampling.

Repeatedly draw a random subcorpus, collect every (edition, ngram) pair whose
occurrence signature inside the subcorpus matches another pair's signature
exactly (a perfect alignment), filter by the minimum number of editions, and
accumulate the surviving member sets with set-union semantics.  A concept is
one such member set; a word key may belong to many concepts.
"""

from __future__ import annotations

import collections
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np

from .corpus import EDITION_LEN, ParallelCorpus, SentenceId, key_edition, key_surface, word_key
from .seeding import seeded_rng


@dataclass(frozen=True)
class ConceptParams:
    """Induction hyperparameters: edition threshold, ngram cap, sample budget."""

    min_editions: int = 100
    max_ngram: int = 3
    budget: int = 1000
    seed: int = 0

    def __post_init__(self) -> None:
        if self.min_editions < 2:
            raise ValueError(f"min_editions must be >= 2, got {self.min_editions}")
        if self.max_ngram < 1:
            raise ValueError(f"max_ngram must be >= 1, got {self.max_ngram}")
        if self.budget < 0:
            raise ValueError(f"budget must be >= 0, got {self.budget}")


@dataclass(frozen=True)
class Concept:
    """A set of word keys that were perfectly aligned in some sampled subcorpus."""

    id: str
    members: frozenset[str]

    @property
    def editions(self) -> frozenset[str]:
        return frozenset(key_edition(m) for m in self.members)

    def sorted_members(self) -> list[str]:
        return sorted(self.members)


class ConceptSet:
    """Deduplicated list of concepts plus the inverse word-key -> ids index."""

    def __init__(self, concepts: Sequence[Concept]):
        self.concepts: tuple[Concept, ...] = tuple(concepts)
        self.by_id: dict[str, Concept] = {}
        self.membership: dict[str, set[str]] = collections.defaultdict(set)
        for c in self.concepts:
            if c.id in self.by_id:
                raise ValueError(f"duplicate concept id {c.id!r}")
            self.by_id[c.id] = c
            for m in c.members:
                self.membership[m].add(c.id)
        self.membership = dict(self.membership)

    def __len__(self) -> int:
        return len(self.concepts)

    def __iter__(self):
        return iter(self.concepts)

    def concepts_of(self, key: str) -> set[str]:
        return self.membership.get(key, set())

    def editions(self) -> tuple[str, ...]:
        return tuple(sorted({e for c in self.concepts for e in c.editions}))

    def member_sets(self) -> set[frozenset[str]]:
        return {c.members for c in self.concepts}


def sample_subcorpus(corpus: ParallelCorpus, rng: np.random.Generator) -> set[SentenceId]:
    """Draw a subcorpus: size k with p(k) proportional to 1/k, then k distinct ids.

    Small samples dominate (they produce more perfect alignments) while large
    ones still occur, keeping every sentence reachable.
    """
    n = len(corpus.sentence_ids)
    if n == 0:
        raise ValueError("cannot sample from an empty corpus")
    if n == 1:
        return {corpus.sentence_ids[0]}
    weights = 1.0 / np.arange(1, n + 1)
    weights /= weights.sum()
    k = int(rng.choice(n, p=weights)) + 1
    picks = rng.choice(n, size=k, replace=False)
    return {corpus.sentence_ids[i] for i in picks}


def extract_perfect_alignments(
    corpus: ParallelCorpus, subcorpus: Iterable[SentenceId], max_ngram: int
) -> list[frozenset[str]]:
    """Group (edition, ngram) pairs by their exact subcorpus occurrence signature.

    Ngrams are enumerated inside the subcorpus only.  Every group with at least
    two members spanning at least two editions is returned as one member set;
    singleton groups carry no alignment signal and are dropped.  Iteration is
    positional so results do not depend on hash ordering.
    """
    sub = set(subcorpus)
    if not sub:
        raise ValueError("subcorpus must be nonempty")
    groups: dict[tuple[SentenceId, ...], list[str]] = {}
    group_editions: dict[tuple[SentenceId, ...], set[str]] = {}
    for edition in corpus.editions:
        occurrences: dict[tuple[str, ...], list[SentenceId]] = {}
        for sid, toks in corpus.sentences(edition).items():
            if sid not in sub:
                continue
            seen: set[tuple[str, ...]] = set()
            for n in range(1, max_ngram + 1):
                for i in range(len(toks) - n + 1):
                    gram = toks[i : i + n]
                    if gram in seen:
                        continue
                    seen.add(gram)
                    occurrences.setdefault(gram, []).append(sid)
        for gram, sids in occurrences.items():
            sig = tuple(sids)
            groups.setdefault(sig, []).append(word_key(edition, " ".join(gram)))
            group_editions.setdefault(sig, set()).add(edition)
    return [
        frozenset(members)
        for sig, members in groups.items()
        if len(members) >= 2 and len(group_editions[sig]) >= 2
    ]


def filter_member_set(members: Iterable[str], min_editions: int) -> bool:
    """Keep a member set iff it spans at least `min_editions` distinct editions."""
    return len({key_edition(m) for m in members}) >= min_editions


def induce_concepts(corpus: ParallelCorpus, params: ConceptParams) -> ConceptSet:
    """Run `budget` sample->extract->filter iterations and union the results.

    Deduplication is by exact member-set equality; ids are assigned "C:0",
    "C:1", ... in discovery order.  Each iteration draws from its own stream
    derived from (seed, iteration), so the outcome does not depend on how
    iterations would be scheduled.
    """
    concepts: list[Concept] = []
    seen: set[frozenset[str]] = set()
    for it in range(params.budget):
        rng = seeded_rng(params.seed, "sample", it)
        sub = sample_subcorpus(corpus, rng)
        for members in extract_perfect_alignments(corpus, sub, params.max_ngram):
            if members in seen or not filter_member_set(members, params.min_editions):
                continue
            seen.add(members)
            concepts.append(Concept(f"C:{len(concepts)}", members))
    return ConceptSet(concepts)


# ---------------------------------------------------------------------------
# Reporting.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SummaryStats:
    mean: float
    median: float
    stddev: float
    min: float
    max: float

    @classmethod
    def of(cls, values: Sequence[float]) -> "SummaryStats":
        if len(values) == 0:
            return cls(0.0, 0.0, 0.0, 0.0, 0.0)
        arr = np.asarray(values, dtype=float)
        return cls(float(arr.mean()), float(np.median(arr)), float(arr.std()), float(arr.min()), float(arr.max()))


@dataclass(frozen=True)
class ConceptStats:
    n_concepts: int
    editions: SummaryStats
    tokens: SummaryStats
    coverage: float
    coverage_frequent: float
    coverage_rare: float
    reference_edition: str

    def render_table(self) -> str:
        rows = [
            ("", "mean", "median", "stddev", "min", "max"),
            ("#editions",) + tuple(f"{v:.1f}" for v in _astuple(self.editions)),
            ("#tokens",) + tuple(f"{v:.1f}" for v in _astuple(self.tokens)),
        ]
        widths = [max(len(r[i]) for r in rows) for i in range(6)]
        lines = ["  ".join(cell.rjust(widths[i]) for i, cell in enumerate(row)) for row in rows]
        lines.append("")
        lines.append(f"#concepts: {self.n_concepts}")
        lines.append(
            f"coverage of {self.reference_edition} vocabulary: {self.coverage:.2f}"
            f"  (freq. decile {self.coverage_frequent:.2f}, rare decile {self.coverage_rare:.2f})"
        )
        return "\n".join(lines)


def _astuple(s: SummaryStats) -> tuple[float, ...]:
    return (s.mean, s.median, s.stddev, s.min, s.max)


def concept_stats(concepts: ConceptSet, corpus: ParallelCorpus, reference_edition: str) -> ConceptStats:
    """Concept size distribution plus vocabulary coverage of one reference edition.

    A vocabulary type counts as covered when its unigram word key is a member
    of some concept.  Decile coverages look at the 10% most / least frequent
    types of the reference edition.
    """
    if reference_edition not in corpus.editions:
        raise KeyError(f"unknown reference edition {reference_edition!r}")
    ed_counts = [len(c.editions) for c in concepts]
    tok_counts = [len(c.members) for c in concepts]

    vocab = corpus.vocabulary[reference_edition]
    types = sorted(vocab, key=lambda t: (-vocab[t], t))
    covered = [word_key(reference_edition, t) in concepts.membership for t in types]

    def frac(flags: Sequence[bool]) -> float:
        return sum(flags) / len(flags) if flags else 0.0

    decile = max(1, len(types) // 10) if types else 0
    return ConceptStats(
        n_concepts=len(concepts),
        editions=SummaryStats.of(ed_counts),
        tokens=SummaryStats.of(tok_counts),
        coverage=frac(covered),
        coverage_frequent=frac(covered[:decile]),
        coverage_rare=frac(covered[-decile:] if decile else []),
        reference_edition=reference_edition,
    )


# ---------------------------------------------------------------------------
# Concept file: one line per member, "C:<id>\t<edition>:<surface>".
# ---------------------------------------------------------------------------


def save_concepts(concepts: ConceptSet, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for c in concepts:
            for m in c.sorted_members():
                fh.write(f"{c.id}\t{m}\n")


def load_concepts(path: str) -> ConceptSet:
    members: dict[str, set[str]] = {}
    order: list[str] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            cid, sep, member = line.partition("\t")
            if not sep or not cid.startswith("C:"):
                raise ValueError(f"{path}:{lineno}: expected 'C:<id>\\t<word-key>'")
            if len(member) <= EDITION_LEN or member[EDITION_LEN] != ":":
                raise ValueError(f"{path}:{lineno}: malformed word key {member!r}")
            if cid not in members:
                members[cid] = set()
                order.append(cid)
            members[cid].add(member)
    return ConceptSet([Concept(cid, frozenset(members[cid])) for cid in order])
