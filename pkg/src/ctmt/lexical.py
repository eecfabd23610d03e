"""Lexically constrained templates.

A sentence with N constraint phrases splits into N+1 free-token fragments
around the constraint spans. The source side serializes as
``c <sep> s <sep> e`` where ``c`` lists the constraint rewrites
(C-nonterminal followed by its phrase), ``s`` is the template
``X0 C1 X1 ... CN XN``, and ``e`` lists the fragment rewrites. The target
side mirrors this with Y-nonterminals, except that the template may order
the C-nonterminals however the target sentence does. At inference time the
constraint section ``d <sep>`` is forced as the decoder prefix and the
model produces the rest, ``t <sep> f``, which this module parses,
validates, and expands back into a plain sentence.
"""

from __future__ import annotations

from dataclasses import replace

from .errors import (
    CapacityError,
    ConstraintMatchError,
    InternalError,
    OutputParseError,
    SpanError,
)
from .types import (
    ConstraintPair,
    DerivationTable,
    Nonterminal,
    ParsedOutput,
    SerializedExample,
    Template,
    TemplateVerdict,
    TokenSeq,
)
from .vocab import ReservedVocab

Span = tuple[int, int]


def occurrences(tokens: TokenSeq, phrase: TokenSeq) -> list[Span]:
    """All spans where the phrase occurs, leftmost first."""
    width = len(phrase)
    return [
        (s, s + width)
        for s in range(len(tokens) - width + 1)
        if tokens[s : s + width] == phrase
    ]


def find_disjoint_assignment(
    tokens: TokenSeq, phrases: list[TokenSeq], node_budget: int = 100_000
) -> list[Span] | None:
    """One non-overlapping occurrence per phrase, or None if impossible.

    Phrases are placed in the given order and each tries its leftmost free
    occurrence first, so when plain greedy claiming succeeds this returns
    exactly the greedy spans; otherwise the search backtracks through the
    alternative occurrences. The budget caps backtracking on pathological
    inputs, erring toward None.
    """
    occs = [occurrences(tokens, p) for p in phrases]
    chosen: list[Span] = []
    nodes = node_budget

    def free(span: Span) -> bool:
        return all(e <= span[0] or span[1] <= b for b, e in chosen)

    def place(k: int) -> bool:
        nonlocal nodes
        if k == len(occs):
            return True
        for span in occs[k]:
            nodes -= 1
            if nodes <= 0:
                return False
            if free(span):
                chosen.append(span)
                if place(k + 1):
                    return True
                chosen.pop()
        return False

    return list(chosen) if place(0) else None


def match_constraint_spans(x: TokenSeq, constraints: list[ConstraintPair]) -> list[Span]:
    """Locate each constraint's source phrase in x.

    Constraints are placed in the given order, each preferring the
    leftmost occurrence of its phrase not overlapping the earlier choices;
    when that greedy claim dead-ends on duplicated phrases, the search
    backtracks so that any feasible disjoint assignment is found. Returned
    spans keep the input constraint order.
    """
    spans = find_disjoint_assignment(x, [c.src for c in constraints])
    if spans is not None:
        return spans
    claimed: list[Span] = []
    for c in constraints:
        span = _leftmost_free_occurrence(x, c.src, claimed)
        if span is None:
            raise ConstraintMatchError(
                f"constraint phrase {' '.join(c.src)!r} has no available occurrence"
            )
        claimed.append(span)
    raise ConstraintMatchError("no non-overlapping span assignment exists")


def _leftmost_free_occurrence(
    tokens: TokenSeq, phrase: TokenSeq, claimed: list[Span]
) -> Span | None:
    width = len(phrase)
    for start in range(len(tokens) - width + 1):
        if tokens[start : start + width] != phrase:
            continue
        end = start + width
        if all(e <= start or end <= b for b, e in claimed):
            return (start, end)
    return None


def segment(x: TokenSeq, spans: list[Span]) -> list[TokenSeq]:
    """Split x into the free fragments around ascending, disjoint spans.

    Returns len(spans)+1 fragments; fragments at the sentence boundary or
    between adjacent spans are empty.
    """
    prev_end = 0
    fragments: list[TokenSeq] = []
    for start, end in spans:
        if start < prev_end:
            raise SpanError(f"span ({start},{end}) overlaps or precedes an earlier span")
        if start > end or end > len(x):
            raise SpanError(f"span ({start},{end}) out of bounds for length {len(x)}")
        fragments.append(x[prev_end:start])
        prev_end = end
    fragments.append(x[prev_end:])
    return fragments


def _check_spans(tokens: TokenSeq, phrases: list[TokenSeq], spans: list[Span], side: str) -> None:
    for phrase, (start, end) in zip(phrases, spans):
        if start < 0 or end > len(tokens) or tokens[start:end] != phrase:
            raise SpanError(
                f"{side} span ({start},{end}) does not cover phrase {' '.join(phrase)!r}"
            )
    ordered = sorted(spans)
    for a, b in zip(ordered, ordered[1:]):
        if b[0] < a[1]:
            raise SpanError(f"{side} spans {a} and {b} overlap")


def canonical_constraints(
    x: TokenSeq,
    constraints: list[ConstraintPair],
    src_spans: list[Span] | None = None,
) -> tuple[list[ConstraintPair], list[Span], list[int]]:
    """Re-index constraints 1..N by ascending source span position.

    Spans are matched via match_constraint_spans unless supplied. Returns
    the re-indexed constraints, their ascending spans, and the permutation
    mapping canonical position to input position.
    """
    if src_spans is None:
        src_spans = match_constraint_spans(x, constraints)
    else:
        if len(src_spans) != len(constraints):
            raise SpanError("one source span is required per constraint")
        _check_spans(x, [c.src for c in constraints], src_spans, "source")
    perm = sorted(range(len(src_spans)), key=lambda i: src_spans[i])
    ordered = [replace(constraints[i], index=rank + 1) for rank, i in enumerate(perm)]
    return ordered, [src_spans[i] for i in perm], perm


def _render_source(
    x: TokenSeq,
    ordered: list[ConstraintPair],
    spans: list[Span],
    vocab: ReservedVocab,
) -> TokenSeq:
    """Render ``c <sep> s <sep> e`` for canonically ordered constraints."""
    if len(ordered) > vocab.max_index:
        raise CapacityError(
            f"{len(ordered)} constraints exceed reserved max_index {vocab.max_index}"
        )
    fragments = segment(x, spans)
    c_tokens: TokenSeq = []
    s_tokens: TokenSeq = [vocab.render(Nonterminal("X", 0))]
    e_tokens: TokenSeq = [vocab.render(Nonterminal("X", 0)), *fragments[0]]
    for n, con in enumerate(ordered, start=1):
        c_tokens += [vocab.render(Nonterminal("C", n)), *con.src]
        s_tokens += [vocab.render(Nonterminal("C", n)), vocab.render(Nonterminal("X", n))]
        e_tokens += [vocab.render(Nonterminal("X", n)), *fragments[n]]
    return c_tokens + [vocab.sep_token] + s_tokens + [vocab.sep_token] + e_tokens


def constraint_derivation(constraints: list[ConstraintPair]) -> DerivationTable:
    """The C-rules supplied by the user: C_n rewrites to the n-th target phrase."""
    return DerivationTable([(Nonterminal("C", c.index), list(c.tgt)) for c in constraints])


def build_training_pair(
    x: TokenSeq,
    y: TokenSeq,
    constraints: list[ConstraintPair],
    tgt_spans: list[Span] | None = None,
    *,
    vocab: ReservedVocab,
    src_spans: list[Span] | None = None,
) -> tuple[TokenSeq, TokenSeq]:
    """Serialize a training pair into flat (encoder, decoder-target) streams.

    Constraints are indexed 1..N by source position. The constraint
    sections always list ascending indices; the target template follows
    the order the constraints take in y. ``tgt_spans``, when given, must
    be aligned item-for-item with ``constraints``; otherwise each target
    phrase claims its leftmost free occurrence in y.
    """
    vocab.check_plain(x, "source sentence")
    vocab.check_plain(y, "target sentence")
    ordered, spans, perm = canonical_constraints(x, constraints, src_spans)
    encoder_input = _render_source(x, ordered, spans, vocab)

    if tgt_spans is None:
        t_spans = match_constraint_spans(y, [replace(c, src=c.tgt) for c in ordered])
    else:
        if len(tgt_spans) != len(constraints):
            raise SpanError("one target span is required per constraint")
        t_spans = [tgt_spans[i] for i in perm]
        _check_spans(y, [c.tgt for c in ordered], t_spans, "target")

    target_order = sorted(range(len(ordered)), key=lambda i: t_spans[i])
    q_fragments = segment(y, sorted(t_spans))

    d_tokens: TokenSeq = []
    for con in ordered:
        d_tokens += [vocab.render(Nonterminal("C", con.index)), *con.tgt]
    t_tokens: TokenSeq = [vocab.render(Nonterminal("Y", 0))]
    for slot, i in enumerate(target_order, start=1):
        t_tokens += [
            vocab.render(Nonterminal("C", ordered[i].index)),
            vocab.render(Nonterminal("Y", slot)),
        ]
    f_tokens: TokenSeq = []
    for n, fragment in enumerate(q_fragments):
        f_tokens += [vocab.render(Nonterminal("Y", n)), *fragment]

    target_output = d_tokens + [vocab.sep_token] + t_tokens + [vocab.sep_token] + f_tokens
    return encoder_input, target_output


def build_inference_input(
    x: TokenSeq,
    constraints: list[ConstraintPair],
    *,
    vocab: ReservedVocab,
    src_spans: list[Span] | None = None,
) -> SerializedExample:
    """Serialize the source side and the forced decoder prefix ``d <sep>``."""
    vocab.check_plain(x, "source sentence")
    for c in constraints:
        vocab.check_plain(c.tgt, "constraint target phrase")
    ordered, spans, _ = canonical_constraints(x, constraints, src_spans)
    encoder_input = _render_source(x, ordered, spans, vocab)
    prefix: TokenSeq = []
    for con in ordered:
        prefix += [vocab.render(Nonterminal("C", con.index)), *con.tgt]
    prefix.append(vocab.sep_token)
    return SerializedExample(encoder_input=encoder_input, decoder_prefix=prefix)


def scan_derivation_rules(
    tokens: TokenSeq, vocab: ReservedVocab, *, reject_tags: bool = False
) -> tuple[DerivationTable, list[str]]:
    """Parse a derivation region: each Y-token opens a rule running to the
    next nonterminal token or the end. Returns the table and any warnings;
    a repeated nonterminal keeps its first rule."""
    raw: list[tuple[Nonterminal, TokenSeq]] = []
    current: TokenSeq | None = None
    for tok in tokens:
        if tok == vocab.sep_token:
            raise OutputParseError("unexpected separator inside the derivation region")
        if reject_tags and vocab.is_tag(tok):
            raise OutputParseError(f"markup tag {tok!r} inside the derivation region")
        nt = vocab.parse_token(tok)
        if nt is None:
            if current is None:
                raise OutputParseError(f"free token {tok!r} before any derivation nonterminal")
            current.append(tok)
        elif nt.kind == "Y":
            current = []
            raw.append((nt, current))
        else:
            raise OutputParseError(f"{tok!r} is not allowed in the derivation region")

    warnings: list[str] = []
    rules: list[tuple[Nonterminal, TokenSeq]] = []
    seen: set[Nonterminal] = set()
    for nt, rhs in raw:
        if nt in seen:
            warnings.append(f"repeated derivation for {nt.kind}{nt.index}; kept the first rule")
            continue
        seen.add(nt)
        rules.append((nt, rhs))
    return DerivationTable(rules), warnings


def parse_output(
    tail: TokenSeq, vocab: ReservedVocab, n_constraints: int | None = None
) -> ParsedOutput:
    """Parse a model continuation ``t <sep> f`` emitted after the prefix.

    The template region before the first separator admits only Y- and
    C-nonterminals. When ``n_constraints`` is given, out-of-range
    constraint indices are reported as warnings for auditing.
    """
    if vocab.sep_token not in tail:
        raise OutputParseError("no separator between template and derivations")
    cut = tail.index(vocab.sep_token)
    elements: list[Nonterminal | str] = []
    warnings: list[str] = []
    for tok in tail[:cut]:
        nt = vocab.parse_token(tok)
        if nt is None or nt.kind == "X":
            raise OutputParseError(f"token {tok!r} is not allowed in the template region")
        if n_constraints is not None and nt.kind == "C" and nt.index > n_constraints:
            warnings.append(f"constraint index {nt.index} exceeds the {n_constraints} provided")
        elements.append(nt)
    derivation, rule_warnings = scan_derivation_rules(tail[cut + 1 :], vocab)
    return ParsedOutput(Template(elements), derivation, warnings + rule_warnings)


def validate_template(template: Template, n_constraints: int) -> TemplateVerdict:
    """Check the required shape Y0 C Y1 ... C YN with index set {1..N}.

    Any permutation of the constraint indices is accepted; duplicates,
    omissions, and out-of-range indices are not.
    """
    elems = template.elements
    if len(elems) % 2 == 0:
        return TemplateVerdict(False, f"template of {len(elems)} elements cannot alternate")
    for pos, e in enumerate(elems):
        if not isinstance(e, Nonterminal):
            return TemplateVerdict(False, f"literal token {e!r} in a lexical template")
        if pos % 2 == 0:
            if e.kind != "Y" or e.index != pos // 2:
                return TemplateVerdict(False, f"expected Y{pos // 2} at position {pos}")
        elif e.kind != "C":
            return TemplateVerdict(False, f"expected a constraint nonterminal at position {pos}")
    found = template.constraint_indices()
    required = set(range(1, n_constraints + 1))
    missing = sorted(required - set(found))
    if missing:
        return TemplateVerdict(False, f"missing constraint index {missing[0]}")
    extra = sorted(set(found) - required)
    if extra:
        return TemplateVerdict(False, f"unknown constraint index {extra[0]}")
    if len(found) != len(set(found)):
        dup = sorted(i for i in set(found) if found.count(i) > 1)
        return TemplateVerdict(False, f"duplicated constraint index {dup[0]}")
    return TemplateVerdict(True)


def reconstruct(
    template: Template,
    constraint_rules: DerivationTable,
    free_rules: DerivationTable,
) -> TokenSeq:
    """Expand a template into tokens using the available derivation rules.

    Free-token nonterminals without a rule expand to the empty fragment. A
    constraint nonterminal without a rule cannot happen for a validated
    template and is reported as an internal error.
    """
    out: TokenSeq = []
    for e in template.elements:
        if isinstance(e, str):
            out.append(e)
        elif e.kind == "C":
            fragment = constraint_rules.get(e)
            if fragment is None:
                raise InternalError(f"no derivation for constraint nonterminal C{e.index}")
            out.extend(fragment)
        else:
            fragment = free_rules.get(e)
            if fragment is not None:
                out.extend(fragment)
    return out


def decoder_prefix_of(target_output: TokenSeq, vocab: ReservedVocab) -> TokenSeq:
    """The forced prefix of a serialized target: everything through the first separator."""
    if vocab.sep_token not in target_output:
        raise SpanError("serialized target contains no separator")
    return target_output[: target_output.index(vocab.sep_token) + 1]
