"""Independent brute-force oracles used to freeze expected test values.

Everything here recomputes from first principles with plain dicts and
loops, deliberately sharing no code with the library paths it checks.
"""

from __future__ import annotations


def oracle_shatter(word: str) -> list[str]:
    return [word[0]] + ["##" + ch for ch in word[1:]]


def oracle_train(
    word_freqs: dict[str, int],
    target_size: int,
    min_pair_frequency: int = 2,
    scorer: str = "frequency",
) -> tuple[list[str], list[tuple[str, str, str]]]:
    """Recompute-everything merge simulator.

    Each iteration rebuilds all pair and piece counts from scratch,
    scores every candidate, picks the max (ties: lexicographically
    smallest (merged, left)), and rewrites every segmentation by a
    left-to-right scan. Returns (vocab tokens, merge triples).
    """
    segs = {w: oracle_shatter(w) for w in word_freqs}
    alphabet = sorted({p for pieces in segs.values() for p in pieces})
    tokens = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"] + alphabet
    merges: list[tuple[str, str, str]] = []

    while len(tokens) < target_size:
        pair_counts: dict[tuple[str, str], int] = {}
        piece_counts: dict[str, int] = {}
        for word, pieces in segs.items():
            f = word_freqs[word]
            for p in pieces:
                piece_counts[p] = piece_counts.get(p, 0) + f
            for a, b in zip(pieces, pieces[1:]):
                pair_counts[(a, b)] = pair_counts.get((a, b), 0) + f

        best_pair = None
        best_score = None
        best_strings = None
        for (a, b), count in pair_counts.items():
            if count < min_pair_frequency:
                continue
            if scorer == "frequency":
                score = float(count)
            else:
                score = count / (piece_counts[a] * piece_counts[b])
            merged = a + (b[2:] if b.startswith("##") else b)
            strings = (merged, a)
            if (
                best_score is None
                or score > best_score
                or (score == best_score and strings < best_strings)
            ):
                best_pair, best_score, best_strings = (a, b), score, strings
        if best_pair is None:
            break

        a, b = best_pair
        merged = a + (b[2:] if b.startswith("##") else b)
        for word, pieces in segs.items():
            out = []
            i = 0
            while i < len(pieces):
                if i + 1 < len(pieces) and pieces[i] == a and pieces[i + 1] == b:
                    out.append(merged)
                    i += 2
                else:
                    out.append(pieces[i])
                    i += 1
            segs[word] = out
        merges.append((a, b, merged))
        if merged not in tokens:
            tokens.append(merged)
    return tokens, merges


def oracle_greedy_dominant(
    word_freqs: dict[str, int],
    segs: dict[str, list[str]],
    chosen: tuple[str, str],
    scorer: str,
    min_pair_frequency: int,
) -> bool:
    """True iff no pair scores strictly higher than the chosen one."""
    pair_counts: dict[tuple[str, str], int] = {}
    piece_counts: dict[str, int] = {}
    for word, pieces in segs.items():
        f = word_freqs[word]
        for p in pieces:
            piece_counts[p] = piece_counts.get(p, 0) + f
        for a, b in zip(pieces, pieces[1:]):
            pair_counts[(a, b)] = pair_counts.get((a, b), 0) + f

    def score(pair):
        c = pair_counts[pair]
        if scorer == "frequency":
            return float(c)
        return c / (piece_counts[pair[0]] * piece_counts[pair[1]])

    chosen_score = score(chosen)
    return all(
        score(p) <= chosen_score
        for p, c in pair_counts.items()
        if c >= min_pair_frequency
    )


def random_word_freqs(rng, max_distinct: int = 50) -> dict[str, int]:
    """Random tiny frequency table from a small alphabet."""
    alphabet = "abcdefgh"
    n_words = 3 + rng.next_below(max_distinct - 2)
    freqs: dict[str, int] = {}
    for _ in range(n_words):
        length = 1 + rng.next_below(7)
        word = "".join(alphabet[rng.next_below(len(alphabet))] for _ in range(length))
        freqs[word] = freqs.get(word, 0) + 1 + rng.next_below(20)
    return freqs


# Fixture on which the two scorers provably pick different first merges:
# the (a, ##b) pair is the most frequent, but both of its constituents
# are inflated by twenty filler words each, so its likelihood ratio
# 100/(1000*1000) loses to (x, ##y) at 10/(10*10).
def scorer_divergence_freqs() -> dict[str, int]:
    freqs = {"ab": 100, "xy": 10}
    fillers = "cdefghijklmnopqrstuv"
    for ch in fillers:
        freqs["a" + ch] = 45
        freqs[ch + "b"] = 45
    return freqs
