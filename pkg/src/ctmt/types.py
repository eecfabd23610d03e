"""Core value types: token sequences, constraints, templates, derivations.

A sentence is a list of whitespace-free tokens (``TokenSeq``). Templates
abstract free-token fragments into indexed nonterminals while constraint
phrases and markup tags keep their own slots; derivation tables map each
nonterminal back to its fragment.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from .vocab import ReservedVocab

TokenSeq = list[str]

NT_KINDS = ("X", "Y", "C")


@dataclass(frozen=True, order=True)
class Nonterminal:
    """An indexed placeholder: X/Y for free fragments, C for constraints."""

    kind: str
    index: int

    def __post_init__(self) -> None:
        if self.kind not in NT_KINDS:
            raise ValueError(f"unknown nonterminal kind {self.kind!r}")
        if self.index < 0:
            raise ValueError("nonterminal index must be non-negative")


@dataclass
class ConstraintPair:
    """A source phrase that must be translated as a fixed target phrase."""

    src: TokenSeq
    tgt: TokenSeq
    index: int = 0

    def __post_init__(self) -> None:
        if not self.src or not self.tgt:
            raise ValueError("constraint phrases must be non-empty")
        for tok in (*self.src, *self.tgt):
            if not tok or _has_ascii_space(tok):
                raise ValueError(f"constraint token {tok!r} is empty or contains whitespace")


def _has_ascii_space(token: str) -> bool:
    return any(ch in token for ch in " \t\n\r\f\v")


@dataclass
class Template:
    """Ordered plan of a sentence: nonterminals plus literal tag tokens."""

    elements: list[Nonterminal | str]

    def nonterminals(self, kind: str | None = None) -> list[Nonterminal]:
        nts = [e for e in self.elements if isinstance(e, Nonterminal)]
        if kind is None:
            return nts
        return [nt for nt in nts if nt.kind == kind]

    def constraint_indices(self) -> list[int]:
        return [nt.index for nt in self.nonterminals("C")]

    def tags(self) -> list[str]:
        return [e for e in self.elements if isinstance(e, str)]

    def render(self, vocab: "ReservedVocab") -> TokenSeq:
        return [vocab.render(e) if isinstance(e, Nonterminal) else e for e in self.elements]


@dataclass
class DerivationTable:
    """Ordered rules rewriting one nonterminal into a token fragment."""

    rules: list[tuple[Nonterminal, TokenSeq]] = field(default_factory=list)

    def get(self, nt: Nonterminal) -> TokenSeq | None:
        for lhs, rhs in self.rules:
            if lhs == nt:
                return rhs
        return None

    def __contains__(self, nt: Nonterminal) -> bool:
        return self.get(nt) is not None

    def render(self, vocab: "ReservedVocab") -> TokenSeq:
        out: TokenSeq = []
        for lhs, rhs in self.rules:
            out.append(vocab.render(lhs))
            out.extend(rhs)
        return out


@dataclass
class SerializedExample:
    """Flattened model-facing views of one sentence pair."""

    encoder_input: TokenSeq
    decoder_prefix: TokenSeq
    target_output: TokenSeq = field(default_factory=list)


@dataclass
class TemplateVerdict:
    valid: bool
    reason: str | None = None

    def __bool__(self) -> bool:
        return self.valid


@dataclass
class ParsedOutput:
    """Result of splitting a model continuation into template and rules."""

    template: Template
    derivation: DerivationTable
    warnings: list[str] = field(default_factory=list)

    def omitted(self) -> list[Nonterminal]:
        """Free-token nonterminals of the template with no derivation rule."""
        return [nt for nt in self.template.nonterminals("Y") if self.derivation.get(nt) is None]
