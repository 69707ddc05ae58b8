"""Skipgram-with-negative-sampling trainer for (context-id, word) pair corpora.

Every pair line already is a complete context window, so the trainer consumes
pairs directly.  For a pair (c, w) with noise draws n_1..n_K the objective is

    L = log sigma(u_c . v_w) + sum_k log sigma(-u_c . v_{n_k})

maximized by stochastic gradient ascent; u rows live in the output table
(context ids), v rows in the input table (words), and one step updates both
sides simultaneously from the pre-step values.  Trained word vectors are the
input rows, l2-normalized; context-id rows are discarded.

The hot loop is a numba kernel; `sgns_step` is the plain-numpy reference with
identical update math, used for gradient checks.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np
from numba import njit

from .pairs import PairCorpus
from .seeding import seeded_rng
from .space import EmbeddingSpace

LR_DECAY_FACTOR = 10_000.0


@dataclass(frozen=True)
class TrainConfig:
    dim: int = 100
    iterations: int = 100
    negatives: int = 5
    initial_lr: float = 0.025
    noise_power: float = 0.75
    seed: int = 0
    subsample_t: float | None = None  # None disables the word2vec frequent-word rule

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")
        if self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations}")
        if self.negatives < 1:
            raise ValueError(f"negatives must be >= 1, got {self.negatives}")
        if not self.initial_lr > 0:
            raise ValueError(f"initial_lr must be > 0, got {self.initial_lr}")
        if not 0.0 <= self.noise_power <= 1.0:
            raise ValueError(f"noise_power must be in [0, 1], got {self.noise_power}")
        if self.subsample_t is not None and not self.subsample_t > 0:
            raise ValueError(f"subsample_t must be > 0, got {self.subsample_t}")


@dataclass(frozen=True)
class NoiseDistribution:
    """Unigram distribution over the word side, counts raised to `power`."""

    words: tuple[str, ...]
    probs: np.ndarray

    def as_dict(self) -> dict[str, float]:
        return {w: float(p) for w, p in zip(self.words, self.probs)}


def build_noise(pairs: PairCorpus, noise_power: float) -> NoiseDistribution:
    """p(w) = count(w)^power / sum count^power over the word side of the pairs."""
    if len(pairs) == 0:
        raise ValueError("cannot build a noise distribution from an empty pair corpus")
    counts: dict[str, int] = {}
    for _, w in pairs:
        counts[w] = counts.get(w, 0) + 1
    words = tuple(sorted(counts))
    raw = np.array([counts[w] for w in words], dtype=float) ** noise_power
    return NoiseDistribution(words, raw / raw.sum())


@dataclass
class TrainingState:
    """Vocabulary layout and both vector tables (context rows first, then words)."""

    config: TrainConfig
    items: tuple[str, ...]
    index: dict[str, int]
    n_contexts: int
    vin: np.ndarray
    vout: np.ndarray
    noise: NoiseDistribution
    noise_rows: np.ndarray
    noise_cdf: np.ndarray

    @property
    def words(self) -> tuple[str, ...]:
        return self.items[self.n_contexts :]

    def word_vectors(self) -> np.ndarray:
        return self.vin[self.n_contexts :]


def _check_memory(n_items: int, dim: int) -> None:
    import psutil

    needed = 2 * n_items * dim * 8
    available = psutil.virtual_memory().available
    if needed > 0.8 * available:
        raise MemoryError(
            f"vector tables need {needed / 1e9:.1f} GB ({n_items} items x dim {dim}, two tables) "
            f"but only {available / 1e9:.1f} GB are available; lower dim or shrink the corpus"
        )


def init_state(pairs: PairCorpus, config: TrainConfig) -> TrainingState:
    """Allocate tables and the noise distribution for a pair corpus.

    Input rows are uniform in [-0.5/dim, 0.5/dim); output rows start at zero.
    """
    if len(pairs) == 0:
        raise ValueError("cannot train on an empty pair corpus")
    contexts = tuple(sorted({c for c, _ in pairs}))
    noise = build_noise(pairs, config.noise_power)
    words = noise.words
    items = contexts + words
    _check_memory(len(items), config.dim)
    index = {item: i for i, item in enumerate(items)}
    rng = seeded_rng(config.seed, "init")
    vin = rng.uniform(-0.5 / config.dim, 0.5 / config.dim, size=(len(items), config.dim))
    vout = np.zeros((len(items), config.dim))
    noise_rows = np.arange(len(contexts), len(items), dtype=np.int64)
    return TrainingState(
        config=config,
        items=items,
        index=index,
        n_contexts=len(contexts),
        vin=vin,
        vout=vout,
        noise=noise,
        noise_rows=noise_rows,
        noise_cdf=np.cumsum(noise.probs),
    )


def draw_negatives(state: TrainingState, rng: np.random.Generator, shape: int | tuple[int, ...]) -> np.ndarray:
    """Noise-word row indices drawn by inverse CDF."""
    u = rng.random(shape)
    idx = np.minimum(np.searchsorted(state.noise_cdf, u, side="right"), len(state.noise_rows) - 1)
    return state.noise_rows[idx]


# --- reference update math (numpy), shared between step and gradient check ---


def _sigmoid(x: np.ndarray | float) -> np.ndarray | float:
    return 1.0 / (1.0 + np.exp(-x))


def pair_loss(state: TrainingState, ctx_row: int, word_row: int, neg_rows: Sequence[int]) -> float:
    """Objective value of one pair at the current state (higher is better)."""
    uc = state.vout[ctx_row]
    pos = -np.logaddexp(0.0, -float(uc @ state.vin[word_row]))
    neg = sum(-np.logaddexp(0.0, float(uc @ state.vin[n])) for n in neg_rows)
    return float(pos + neg)


def pair_gradients(
    state: TrainingState, ctx_row: int, word_row: int, neg_rows: Sequence[int]
) -> tuple[dict[int, np.ndarray], np.ndarray]:
    """Simultaneous gradients of the pair objective.

    Returns (input-table row gradients keyed by row, output-table gradient for
    the context row).  Duplicate negative rows accumulate.
    """
    uc = state.vout[ctx_row]
    vw = state.vin[word_row]
    a = _sigmoid(-float(uc @ vw))
    grad_in: dict[int, np.ndarray] = {word_row: a * uc.copy()}
    grad_out = a * vw.copy()
    for n in neg_rows:
        b = -_sigmoid(float(uc @ state.vin[n]))
        if n in grad_in:
            grad_in[n] = grad_in[n] + b * uc
        else:
            grad_in[n] = b * uc.copy()
        grad_out += b * state.vin[n]
    return grad_in, grad_out


def sgns_step(state: TrainingState, pair: tuple[str, str], rng: np.random.Generator, lr: float) -> None:
    """One gradient-ascent update on a (context-id, word) pair, drawing negatives."""
    ctx_row = state.index[pair[0]]
    word_row = state.index[pair[1]]
    neg_rows = draw_negatives(state, rng, state.config.negatives)
    apply_pair_update(state, ctx_row, word_row, neg_rows, lr)


def apply_pair_update(
    state: TrainingState, ctx_row: int, word_row: int, neg_rows: Sequence[int], lr: float
) -> None:
    grad_in, grad_out = pair_gradients(state, ctx_row, word_row, neg_rows)
    for row, g in grad_in.items():
        state.vin[row] += lr * g
    state.vout[ctx_row] += lr * grad_out


# --- hot loop -----------------------------------------------------------------


@njit(cache=True, nogil=True)
def _run_steps(vin, vout, ctx_idx, wrd_idx, neg, order, lrs):  # pragma: no cover - exercised via train()
    dim = vin.shape[1]
    k_neg = neg.shape[1]
    bs = np.empty(k_neg)
    acc = np.empty(dim)
    for s in range(order.shape[0]):
        p = order[s]
        c = ctx_idx[p]
        w = wrd_idx[p]
        lr = lrs[s]
        dot = 0.0
        for j in range(dim):
            dot += vout[c, j] * vin[w, j]
        a = 1.0 / (1.0 + np.exp(dot))  # sigma(-dot)
        for j in range(dim):
            acc[j] = a * vin[w, j]
        for k in range(k_neg):
            n = neg[s, k]
            nd = 0.0
            for j in range(dim):
                nd += vout[c, j] * vin[n, j]
            b = -1.0 / (1.0 + np.exp(-nd))
            bs[k] = b
            for j in range(dim):
                acc[j] += b * vin[n, j]
        for j in range(dim):
            vin[w, j] += lr * a * vout[c, j]
        for k in range(k_neg):
            n = neg[s, k]
            for j in range(dim):
                vin[n, j] += lr * bs[k] * vout[c, j]
        for j in range(dim):
            vout[c, j] += lr * acc[j]


def _subsample_keep_probs(word_counts: np.ndarray, t: float) -> np.ndarray:
    # word2vec's keep rule: (sqrt(f/t) + 1) * t/f over relative frequency f
    f = word_counts / word_counts.sum()
    return np.minimum((np.sqrt(f / t) + 1.0) * t / f, 1.0)


def train(
    pairs: PairCorpus,
    config: TrainConfig,
    workers: int = 1,
    epoch_callback: Callable[[int, TrainingState], None] | None = None,
) -> EmbeddingSpace:
    """Train over `config.iterations` shuffled passes and return the word space.

    The learning rate decays linearly from initial_lr to initial_lr/10,000 over
    the whole run.  Single-worker mode is fully deterministic given the seed;
    with workers > 1 the epoch is sharded across threads whose racy updates may
    drop but never corrupt values (asynchronous SGD).
    """
    state = init_state(pairs, config)
    n = len(pairs)
    ctx_idx = np.fromiter((state.index[c] for c, _ in pairs), dtype=np.int64, count=n)
    wrd_idx = np.fromiter((state.index[w] for _, w in pairs), dtype=np.int64, count=n)

    keep_p = None
    if config.subsample_t is not None:
        counts = np.zeros(len(state.items))
        np.add.at(counts, wrd_idx, 1.0)
        keep_p = _subsample_keep_probs(counts[state.noise_rows], config.subsample_t)

    lr_end = config.initial_lr / LR_DECAY_FACTOR
    total = config.iterations * n
    done = 0
    for epoch in range(config.iterations):
        rng = seeded_rng(config.seed, "epoch", epoch)
        order = rng.permutation(n).astype(np.int64)
        if keep_p is not None:
            mask = rng.random(n) < keep_p[wrd_idx - state.n_contexts]
            order = order[mask[order]]
        steps = len(order)
        neg = np.ascontiguousarray(draw_negatives(state, rng, (steps, config.negatives)))
        frac = (done + np.arange(steps, dtype=float)) / max(total - 1, 1)
        lrs = config.initial_lr + (lr_end - config.initial_lr) * frac
        if workers <= 1 or steps < 2 * workers:
            _run_steps(state.vin, state.vout, ctx_idx, wrd_idx, neg, order, lrs)
        else:
            _run_sharded(state, ctx_idx, wrd_idx, neg, order, lrs, workers)
        done += steps
        if epoch_callback is not None:
            epoch_callback(epoch, state)

    vectors = state.word_vectors()
    if not np.isfinite(vectors).all():
        raise FloatingPointError("training produced non-finite vectors")
    return EmbeddingSpace(state.words, vectors)


def _run_sharded(state, ctx_idx, wrd_idx, neg, order, lrs, workers: int) -> None:
    import threading

    bounds = np.linspace(0, len(order), workers + 1).astype(int)
    threads = [
        threading.Thread(
            target=_run_steps,
            args=(state.vin, state.vout, ctx_idx, wrd_idx, neg[lo:hi], order[lo:hi], lrs[lo:hi]),
        )
        for lo, hi in zip(bounds[:-1], bounds[1:])
        if hi > lo
    ]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
