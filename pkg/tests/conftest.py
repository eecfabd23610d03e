"""Shared fixtures: golden constants, corpus generators, independent oracles.

The oracles here deliberately avoid the package's own algorithms so they
can vouch for them: phrase extraction is checked against a full scan of
every span pair, and the shift-based edit cost against a shortest-path
search over all block moves.
"""

from __future__ import annotations

import heapq
import random

import pytest

from ctmt import ConstraintPair, ReservedVocab

# ---------------------------------------------------------------------------
# golden example: English-Chinese pair with two reordered constraints

GOLD_SRC = (
    "Analysts are concerned that since there is no sign yet of any slowing down "
    "of this price hike , the prospect of the British real estate market as where "
    "it is heading now is far from optimistic ."
)
GOLD_REF = (
    "分析家担心 , 由于目前还看不见 价格上涨 趋势有 减弱 的迹象 , 照此发展下去 , "
    "英国房地产市场前景堪忧 。"
)
GOLD_CONSTRAINTS = [
    (["slowing", "down"], ["减弱"]),
    (["price", "hike"], ["价格上涨"]),
]
GOLD_ENC = (
    "<C_1> slowing down <C_2> price hike <sep> <X_0> <C_1> <X_1> <C_2> <X_2> <sep> "
    "<X_0> Analysts are concerned that since there is no sign yet of any <X_1> of this "
    "<X_2> , the prospect of the British real estate market as where it is heading now "
    "is far from optimistic ."
)
GOLD_PREFIX = "<C_1> 减弱 <C_2> 价格上涨 <sep>"
GOLD_YPRIME = (
    "<C_1> 减弱 <C_2> 价格上涨 <sep> <Y_0> <C_2> <Y_1> <C_1> <Y_2> <sep> "
    "<Y_0> 分析家担心 , 由于目前还看不见 <Y_1> 趋势有 <Y_2> 的迹象 , 照此发展下去 , "
    "英国房地产市场前景堪忧 。"
)
GOLD_OUTPUT = (
    "<Y_0> <C_2> <Y_1> <C_1> <Y_2> <sep> <Y_0> 分析师们担心 , 由于目前还没有迹象显示 "
    "<Y_1> 会 <Y_2> , 英国房地产市场的前景远不乐观 。"
)
GOLD_RESULT = "分析师们担心 , 由于目前还没有迹象显示 价格上涨 会 减弱 , 英国房地产市场的前景远不乐观 。"

# golden tagged example: nested placeholder markup

MARKUP_SRC = "<ph> Each dashboard can have up to <ph> 3 </ph> filters . </ph>"
MARKUP_TAGS = ["<ph>", "<ph>", "</ph>", "</ph>"]
MARKUP_FRAGMENTS = [
    [],
    ["Each", "dashboard", "can", "have", "up", "to"],
    ["3"],
    ["filters", "."],
    [],
]
MARKUP_XPRIME = (
    "<X_0> <ph> <X_1> <ph> <X_2> </ph> <X_3> </ph> <X_4> <sep> "
    "<X_0> <X_1> Each dashboard can have up to <X_2> 3 <X_3> filters . <X_4>"
)
MARKUP_REF = "<ph> Chaque tableau de bord peut inclure jusqu'à <ph> 3 </ph> filtres . </ph>"


def gold_constraints() -> list[ConstraintPair]:
    return [ConstraintPair(src=list(s), tgt=list(t)) for s, t in GOLD_CONSTRAINTS]


@pytest.fixture
def vocab() -> ReservedVocab:
    return ReservedVocab()


TAGGED_VOCAB = ReservedVocab(
    registered_tags=frozenset({"<ph>", "</ph>", "<g>", "</g>", "<url>", "&amp;"})
)


@pytest.fixture
def tagged_vocab() -> ReservedVocab:
    return TAGGED_VOCAB


# ---------------------------------------------------------------------------
# corpus generators

WORDS = [f"w{i:02d}" for i in range(50)]


def random_sentence(rng: random.Random, max_len: int = 30, min_len: int = 1) -> list[str]:
    return [rng.choice(WORDS) for _ in range(rng.randint(min_len, max_len))]


def random_links(rng: random.Random, src_len: int, tgt_len: int) -> set[tuple[int, int]]:
    n = rng.randint(0, 2 * min(src_len, tgt_len))
    return {(rng.randrange(src_len), rng.randrange(tgt_len)) for _ in range(n)}


def make_lexical_corpus(n: int, seed: int, max_len: int = 30):
    """Random bitext plus random word alignments."""
    rng = random.Random(seed)
    pairs = []
    alignments = []
    for _ in range(n):
        x = random_sentence(rng, max_len)
        y = random_sentence(rng, max_len)
        pairs.append((x, y))
        alignments.append(random_links(rng, len(x), len(y)))
    return pairs, alignments


def _arrange_tags(
    rng: random.Random,
    pair_names: list[str],
    voids: list[str],
    depth: int,
    max_depth: int = 3,
) -> list[str]:
    """A random well-formed token stream using exactly the given tags."""

    def words() -> list[str]:
        return [rng.choice(WORDS) for _ in range(rng.randint(0, 3))]

    tokens = words()
    pair_names = list(pair_names)
    voids = list(voids)
    rng.shuffle(pair_names)
    rng.shuffle(voids)
    while pair_names:
        name = pair_names.pop()
        inner_pairs: list[str] = []
        if depth + 1 < max_depth and pair_names:
            for _ in range(rng.randint(0, len(pair_names))):
                inner_pairs.append(pair_names.pop())
        inner_voids = [voids.pop() for _ in range(rng.randint(0, len(voids)))]
        tokens += [f"<{name}>"]
        tokens += _arrange_tags(rng, inner_pairs, inner_voids, depth + 1, max_depth)
        tokens += [f"</{name}>"] + words()
    for v in voids:
        tokens += [v] + words()
    return tokens


def make_structural_corpus(n: int, seed: int, max_depth: int = 3):
    """Random tagged sentence pairs sharing per-line tag multisets."""
    rng = random.Random(seed)
    pairs = []
    for _ in range(n):
        pair_names = [rng.choice(["ph", "g"]) for _ in range(rng.randint(0, 3))]
        voids = [rng.choice(["<url>", "&amp;"]) for _ in range(rng.randint(0, 2))]
        x = _arrange_tags(rng, pair_names, voids, 0, max_depth)
        y = _arrange_tags(rng, pair_names, voids, 0, max_depth)
        pairs.append((x, y))
    return pairs


# ---------------------------------------------------------------------------
# independent oracle: phrase extraction by full span-pair scan

def brute_force_phrase_pairs(x, y, links, max_len):
    """All (src_span, tgt_span) pairs passing the consistency predicate:
    no link crosses either boundary, at least one link inside, and every
    boundary token is aligned."""
    out = set()
    src_aligned = {i for i, _ in links}
    tgt_aligned = {j for _, j in links}
    for i1 in range(len(x)):
        for i2 in range(i1 + 1, min(i1 + max_len, len(x)) + 1):
            for j1 in range(len(y)):
                for j2 in range(j1 + 1, min(j1 + max_len, len(y)) + 1):
                    inside = False
                    ok = True
                    for (i, j) in links:
                        src_in = i1 <= i < i2
                        tgt_in = j1 <= j < j2
                        if src_in != tgt_in:
                            ok = False
                            break
                        if src_in:
                            inside = True
                    if not (ok and inside):
                        continue
                    if i1 not in src_aligned or (i2 - 1) not in src_aligned:
                        continue
                    if j1 not in tgt_aligned or (j2 - 1) not in tgt_aligned:
                        continue
                    out.add(((i1, i2), (j1, j2)))
    return out


# ---------------------------------------------------------------------------
# independent oracles: edit distance with block moves

def simple_weighted_lev(hyp, ref, hw, rw):
    """Plain DP edit distance; delete/insert cost the token weight,
    substitution the heavier of the two."""
    rows = len(hyp) + 1
    cols = len(ref) + 1
    d = [[0] * cols for _ in range(rows)]
    for i in range(1, rows):
        d[i][0] = d[i - 1][0] + hw[i - 1]
    for j in range(1, cols):
        d[0][j] = d[0][j - 1] + rw[j - 1]
    for i in range(1, rows):
        for j in range(1, cols):
            sub = d[i - 1][j - 1]
            if hyp[i - 1] != ref[j - 1]:
                sub += max(hw[i - 1], rw[j - 1])
            d[i][j] = min(sub, d[i - 1][j] + hw[i - 1], d[i][j - 1] + rw[j - 1])
    return d[rows - 1][cols - 1]


def exhaustive_min_shift_cost(hyp, ref, hw, rw):
    """Exact minimum of (sum of shift costs + final edit distance) over all
    sequences of block moves, via shortest-path search on the reachable
    arrangements. Weights travel with their tokens; a move costs the
    weight of its heaviest moved token."""
    start = tuple(zip(hyp, hw))
    ref = list(ref)
    lev_cache: dict[tuple, int] = {}

    def lev(state) -> int:
        got = lev_cache.get(state)
        if got is None:
            toks = [t for t, _ in state]
            ws = [w for _, w in state]
            got = simple_weighted_lev(toks, ref, ws, rw)
            lev_cache[state] = got
        return got

    best = lev(start)
    dist = {start: 0}
    heap = [(0, start)]
    while heap:
        d, state = heapq.heappop(heap)
        if d != dist.get(state) or d >= best:
            continue
        n = len(state)
        for i1 in range(n):
            for i2 in range(i1 + 1, n + 1):
                block = state[i1:i2]
                rest = state[:i1] + state[i2:]
                cost = max(w for _, w in block)
                for k in range(len(rest) + 1):
                    if k == i1:
                        continue
                    nxt = rest[:k] + block + rest[k:]
                    nd = d + cost
                    if nd >= best or dist.get(nxt, nd + 1) <= nd:
                        continue
                    dist[nxt] = nd
                    best = min(best, nd + lev(nxt))
                    heapq.heappush(heap, (nd, nxt))
    return best


def reference_ter(hyp, ref):
    """Unweighted TER edit count: greedy best-shift loop over substrings of
    the hypothesis that occur in the reference, then plain edit distance.
    Kept free of package code on purpose."""
    ones_r = [1] * len(ref)

    def lev(seq):
        return simple_weighted_lev(seq, ref, [1] * len(seq), ones_r)

    if hyp == ref:
        return 0
    positions: dict[tuple, list[int]] = {}
    for j1 in range(len(ref)):
        for j2 in range(j1 + 1, min(j1 + 10, len(ref)) + 1):
            positions.setdefault(tuple(ref[j1:j2]), []).append(j1)

    cur = list(hyp)
    edits = lev(cur)
    shifts = 0
    while edits > 0:
        best = None
        for i1 in range(len(cur)):
            for i2 in range(i1 + 1, min(i1 + 10, len(cur)) + 1):
                hits = positions.get(tuple(cur[i1:i2]))
                if not hits:
                    continue
                rest = cur[:i1] + cur[i2:]
                seen = set()
                for j in hits:
                    k = min(j, len(rest))
                    if k in seen or k == i1:
                        continue
                    seen.add(k)
                    cand = rest[:k] + cur[i1:i2] + rest[k:]
                    e = lev(cand)
                    if e + 1 < edits and (best is None or e + 1 < best[0]):
                        best = (e + 1, e, cand)
        if best is None:
            break
        _, edits, cur = best
        shifts += 1
    return shifts + edits
