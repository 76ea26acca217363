"""Pattern-based utterance understanding.

Classifies utterances into dialogue acts and extracts attribute statements
or referential expressions.  The pattern table and the value lexicon are
data files, so new linguistic forms need no code change.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources

from .kb import normalize_value

ACTS = ("greeting", "reference", "attribute_assignment", "rule_query",
        "unknown")

ARTICLES = {"the", "a", "an"}
PREPOSITIONS = {"on", "in", "at", "under", "near", "by"}

# Premodifier vocabulary for referential expressions: palette colors plus
# common size/weight adjectives.
ADJECTIVES = {
    "red", "orange", "yellow", "green", "cyan", "blue", "purple", "pink",
    "brown", "white", "gray", "grey", "black",
    "big", "large", "huge", "small", "tiny", "little",
    "heavy", "light", "new", "old", "broken",
}


class NluError(Exception):
    pass


class MissingFrameElementError(NluError):
    pass


class UngroundableReferenceError(NluError):
    pass


@dataclass(frozen=True)
class PatternRule:
    act: str
    pattern: re.Pattern
    frame: str | None = None
    attr: str | None = None
    value: str | None = None  # "{value}" = captured group, else literal


@dataclass(frozen=True)
class DialogueAct:
    kind: str
    frame: str | None = None


@dataclass(frozen=True)
class Frame:
    frame_type: str
    elements: dict


@dataclass(frozen=True)
class AttributeStatement:
    attribute: str
    value: str


@dataclass(frozen=True)
class ReferentialExpression:
    symbols: tuple[str, ...]
    location: str | None = None


def _data_text(name: str) -> str:
    return resources.files("scenerules.data").joinpath(name).read_text(
        encoding="utf-8")


def parse_pattern_line(line: str) -> PatternRule:
    # fields are separated by space-padded pipes; bare "|" stays available
    # for regex alternation inside the pattern field
    fields = {}
    for chunk in line.split(" | "):
        chunk = chunk.strip()
        if not chunk:
            continue
        key, _, rest = chunk.partition(" ")
        fields[key] = rest.strip()
    if "act" not in fields or "pattern" not in fields:
        raise NluError(f"pattern line needs 'act' and 'pattern': {line!r}")
    if fields["act"] not in ACTS:
        raise NluError(f"unknown act {fields['act']!r}")
    return PatternRule(
        act=fields["act"],
        pattern=re.compile(fields["pattern"]),
        frame=fields.get("frame"),
        attr=fields.get("attr"),
        value=fields.get("value"),
    )


def load_patterns(path: str | None = None) -> list[PatternRule]:
    text = open(path, encoding="utf-8").read() if path else \
        _data_text("patterns.txt")
    rules = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        rules.append(parse_pattern_line(line))
    return rules


def load_lexicon(path: str | None = None) -> dict[str, str]:
    text = open(path, encoding="utf-8").read() if path else \
        _data_text("lexicon.txt")
    lexicon = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        surface, sep, canonical = line.partition("->")
        if not sep:
            raise NluError(f"lexicon line missing '->': {line!r}")
        lexicon[normalize_value(surface)] = normalize_value(canonical)
    return lexicon


def _strip_articles(value: str) -> str:
    tokens = [t for t in value.split("_") if t not in ARTICLES]
    return "_".join(tokens)


class UtteranceParser:
    """Deterministic classifier/extractor over an ordered pattern table."""

    def __init__(self, patterns: list[PatternRule] | None = None,
                 lexicon: dict[str, str] | None = None):
        self.patterns = patterns if patterns is not None else load_patterns()
        self.lexicon = lexicon if lexicon is not None else load_lexicon()

    # -- classification ----------------------------------------------------

    def _match(self, utterance: str) -> tuple[PatternRule, re.Match] | None:
        text = utterance.strip().lower()
        for rule in self.patterns:
            m = rule.pattern.search(text)
            if m:
                return rule, m
        return None

    def classify(self, utterance: str) -> DialogueAct:
        if not utterance or not utterance.strip():
            raise NluError("empty utterance")
        hit = self._match(utterance)
        if hit is None:
            return DialogueAct("unknown")
        rule, _ = hit
        return DialogueAct(rule.act, rule.frame)

    # -- extraction --------------------------------------------------------

    def _extracted_value(self, rule: PatternRule, m: re.Match,
                         utterance: str) -> str:
        if rule.value == "{value}":
            captured = m.groupdict().get("value")
            if not captured:
                raise MissingFrameElementError(
                    f"missing frame element in {utterance!r}")
            value = captured
        elif rule.value:
            value = rule.value
        else:
            raise MissingFrameElementError(
                f"missing frame element in {utterance!r}")
        value = normalize_value(value)
        if rule.attr == "location":
            value = _strip_articles(value)
        return self.lexicon.get(value, value)

    def parse_assignment(self, utterance: str) -> AttributeStatement:
        hit = self._match(utterance)
        if hit is None or hit[0].act != "attribute_assignment":
            raise NluError(f"not an attribute assignment: {utterance!r}")
        rule, m = hit
        return AttributeStatement(rule.attr,
                                  self._extracted_value(rule, m, utterance))

    def parse_rule_query(self, utterance: str) -> tuple[str, str]:
        hit = self._match(utterance)
        if hit is None or hit[0].act != "rule_query":
            raise NluError(f"unrecognized query form: {utterance!r}")
        rule, m = hit
        return rule.attr, self._extracted_value(rule, m, utterance)

    def parse_reference(self, utterance: str) -> ReferentialExpression:
        text = utterance.strip().lower()
        if not text:
            raise NluError("empty utterance")
        location = None
        loc_match = re.search(
            r"\b(" + "|".join(PREPOSITIONS) + r")\s+(?:the|a|an)?\s*(\w+)\s*$",
            text)
        if loc_match:
            location = normalize_value(
                f"{loc_match.group(1)}_{loc_match.group(2)}")
            text = text[:loc_match.start()]
        tokens = [t for t in re.findall(r"[a-z']+", text)
                  if t not in ARTICLES]
        adjectives = [t for t in tokens if t in ADJECTIVES]
        nouns = [t for t in tokens if t not in ADJECTIVES]
        if not nouns:
            raise UngroundableReferenceError(
                f"ungroundable reference: {utterance!r}")
        head = normalize_value("_".join(nouns))
        symbols = tuple(normalize_value(a) for a in adjectives) + (head,)
        return ReferentialExpression(symbols, location)
