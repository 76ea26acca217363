"""EAV-to-facts translation and FOIL-style rule induction.

The knowledge base is translated, for a query (attribute, value), into
weighted target examples over opaque value symbols plus unary value facts.
Induction runs greedy sequential covering scored by the m-estimate, with a
significance gate and a consistent-clause fallback so that the engine never
invents one-example rules when no general rule exists (the four-distinct-
color-mugs situation) yet still finds every separating clause that exists.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .kb import ATTRIBUTES, KnowledgeBase, check_attribute, normalize_value


class InductionError(Exception):
    pass


class ProblemParseError(InductionError):
    pass


@dataclass(frozen=True)
class Literal:
    predicate: str  # an attribute value, doubling as the predicate name
    column: int     # index into FactBase.columns


@dataclass(frozen=True)
class Clause:
    head: str
    arity: int
    body: tuple[Literal, ...] = ()


@dataclass(frozen=True)
class ClauseStats:
    tp: float
    fp: float
    m_estimate: float


@dataclass
class FactBase:
    target_name: str
    target: tuple[str, str]          # (attribute, value)
    columns: list[str]               # attribute per argument position
    value_facts: dict[str, set[str]]  # predicate -> symbol extension
    predicate_column: dict[str, int]
    examples: list[tuple[tuple[str, ...], float]]
    symbol_value: dict[str, str] = field(default_factory=dict)
    symbol_order: list[str] = field(default_factory=list)

    def positive_mass(self) -> float:
        return sum(w for _, w in self.examples)

    def __eq__(self, other):
        if not isinstance(other, FactBase):
            return NotImplemented
        return (self.target_name == other.target_name
                and self.columns == other.columns
                and self.value_facts == other.value_facts
                and self.predicate_column == other.predicate_column
                and self.examples == other.examples)


@dataclass
class RuleSet:
    target_name: str
    target: tuple[str, str]
    columns: list[str]
    clauses: list[Clause] = field(default_factory=list)
    stats: list[ClauseStats] = field(default_factory=list)


@dataclass(frozen=True)
class InductionParams:
    m: float = 1.0
    prior: float | None = None  # default: positive mass / total mass
    min_improvement: float = 1e-6
    max_body_len: int = 3


_PREFIXES = {}


def _symbol_prefix(attr: str) -> str:
    return attr[:3]


def translate(kb: KnowledgeBase, query: tuple[str, str],
              probabilistic: bool = False,
              include_inferred: bool = False) -> FactBase:
    """Encode the KB for one query.

    Entities carrying the query attribute become examples: weight 1.0 when
    the value matches (or the vision confidence in probabilistic mode),
    weight 0.0 otherwise (closed world over the query attribute).  Entities
    lacking the attribute are excluded.  Missing non-query attributes get
    anonymous symbols that appear in no value fact.
    """
    qattr, qvalue = check_attribute(query[0]), normalize_value(query[1])

    def effective(entity):
        return {a: (v, p) for a, (v, p) in entity.assignments.items()
                if include_inferred or p.source != "inferred"}

    example_entities = []
    for entity in kb.entities():
        assigns = effective(entity)
        if qattr in assigns:
            example_entities.append((entity, assigns))
    if not example_entities:
        raise InductionError("empty example set")

    columns = [a for a in ATTRIBUTES
               if a != qattr
               and any(a in assigns for _, assigns in example_entities)]

    symbols: dict[tuple[str, str], str] = {}
    counters: dict[str, int] = {}
    symbol_value: dict[str, str] = {}
    symbol_order: list[str] = []
    value_facts: dict[str, set[str]] = {}
    predicate_column: dict[str, int] = {}
    examples: list[tuple[tuple[str, ...], float]] = []
    anon = 0

    for entity, assigns in example_entities:
        row = []
        for col_idx, attr in enumerate(columns):
            if attr in assigns:
                value = assigns[attr][0]
                key = (attr, value)
                if key not in symbols:
                    counters[attr] = counters.get(attr, 0) + 1
                    sym = f"{_symbol_prefix(attr)}{counters[attr]}"
                    symbols[key] = sym
                    symbol_value[sym] = value
                    symbol_order.append(sym)
                    value_facts.setdefault(value, set()).add(sym)
                    predicate_column[value] = col_idx
                row.append(symbols[key])
            else:
                anon += 1
                row.append(f"any{anon}")
        value, prov = assigns[qattr]
        if value == qvalue:
            weight = prov.confidence if (probabilistic
                                         and prov.source == "vision") else 1.0
        else:
            weight = 0.0
        examples.append((tuple(row), weight))

    return FactBase(target_name=qvalue, target=(qattr, qvalue),
                    columns=columns, value_facts=value_facts,
                    predicate_column=predicate_column, examples=examples,
                    symbol_value=symbol_value, symbol_order=symbol_order)


# -- coverage and scoring --------------------------------------------------

def covers(clause: Clause, example: tuple[str, ...],
           factbase: FactBase) -> bool:
    """True iff every body literal's predicate holds at its column; an
    empty body covers everything."""
    if len(example) != clause.arity:
        raise InductionError("example arity mismatch")
    for lit in clause.body:
        ext = factbase.value_facts.get(lit.predicate)
        if ext is None or example[lit.column] not in ext:
            return False
    return True


def _masses(body: tuple[Literal, ...], factbase: FactBase,
            working: list[tuple[tuple[str, ...], float]]):
    clause = Clause(factbase.target_name, len(factbase.columns), body)
    tp = fp = 0.0
    covered = []
    for i, (row, w) in enumerate(working):
        if covers(clause, row, factbase):
            tp += w
            fp += 1.0 - w
            covered.append(i)
    return tp, fp, covered


def m_estimate(clause: Clause, factbase: FactBase, m: float = 1.0,
               prior: float | None = None) -> float:
    if m < 0:
        raise InductionError("m must be >= 0")
    if prior is None:
        total = len(factbase.examples)
        prior = factbase.positive_mass() / total if total else 0.0
    if not 0.0 <= prior <= 1.0:
        raise InductionError("prior must be in [0,1]")
    tp, fp, _ = _masses(clause.body, factbase, factbase.examples)
    denom = tp + fp + m
    if denom == 0.0:
        return prior
    return (tp + m * prior) / denom


def _score(tp: float, fp: float, m: float, prior: float) -> float:
    denom = tp + fp + m
    return prior if denom == 0.0 else (tp + m * prior) / denom


def _candidate_literals(factbase: FactBase, body: tuple[Literal, ...]):
    for pred in sorted(factbase.predicate_column):
        lit = Literal(pred, factbase.predicate_column[pred])
        if lit not in body:
            yield lit


def _grow_greedy(factbase, working, m, prior, min_improvement, max_body_len):
    body: tuple[Literal, ...] = ()
    tp, fp, covered = _masses(body, factbase, working)
    score = _score(tp, fp, m, prior)
    while len(body) < max_body_len and fp > 1e-12:
        best = None
        for lit in _candidate_literals(factbase, body):
            ltp, lfp, lcov = _masses(body + (lit,), factbase, working)
            lscore = _score(ltp, lfp, m, prior)
            key = (-lscore, lit.column, lit.predicate)
            if best is None or key < best[0]:
                best = (key, lit, ltp, lfp, lcov, lscore)
        if best is None or best[5] - score < min_improvement:
            break
        _, lit, tp, fp, covered, score = best
        body = body + (lit,)
    return body, tp, fp, covered, score


def _grow_consistent(factbase, working, pos_mass, max_body_len):
    """Fallback growth restricted to literals that keep every remaining
    positive covered, greedily shedding negative mass."""
    body: tuple[Literal, ...] = ()
    tp, fp, covered = _masses(body, factbase, working)
    while len(body) < max_body_len and fp > 1e-12:
        best = None
        for lit in _candidate_literals(factbase, body):
            ltp, lfp, lcov = _masses(body + (lit,), factbase, working)
            if ltp < pos_mass - 1e-12 or lfp >= fp - 1e-12:
                continue
            key = (lfp, lit.column, lit.predicate)
            if best is None or key < best[0]:
                best = (key, lit, ltp, lfp, lcov)
        if best is None:
            break
        _, lit, tp, fp, covered = best
        body = body + (lit,)
    return body, tp, fp, covered


def induce(factbase: FactBase,
           params: InductionParams | None = None) -> RuleSet:
    """Sequential covering with greedy m-estimate clause growth.

    A grown clause is accepted when it covers positive mass, either covers
    more than one positive unit or all remaining positive mass, and is
    either clean (zero FP mass) or strictly beats the empty-theory baseline.
    When the greedy clause fails the gate, a restricted search for a clause
    covering all remaining positives is tried before giving up; one-example
    clauses on their own never enter the theory.
    """
    params = params or InductionParams()
    if not factbase.examples:
        raise InductionError("degenerate fact base: no examples")
    m = params.m
    prior = params.prior
    if prior is None:
        prior = factbase.positive_mass() / len(factbase.examples)

    working = list(factbase.examples)
    ruleset = RuleSet(factbase.target_name, factbase.target,
                      list(factbase.columns))

    while True:
        pos_mass = sum(w for _, w in working)
        if pos_mass <= 1e-12:
            break
        base_tp, base_fp, _ = _masses((), factbase, working)
        baseline = _score(base_tp, base_fp, m, prior)

        body, tp, fp, covered, score = _grow_greedy(
            factbase, working, m, prior, params.min_improvement,
            params.max_body_len)

        def acceptable(tp, fp, score):
            if tp <= 1e-12:
                return False
            if tp < 2.0 - 1e-12 and tp < pos_mass - 1e-12:
                return False  # one-example clause, not the whole remainder
            return fp <= 1e-12 or score > baseline + 1e-12

        if not acceptable(tp, fp, score):
            body, tp, fp, covered = _grow_consistent(
                factbase, working, pos_mass, params.max_body_len)
            score = _score(tp, fp, m, prior)
            if not (tp > 1e-12 and fp <= 1e-12):
                break
        clause = Clause(factbase.target_name, len(factbase.columns), body)
        ruleset.clauses.append(clause)
        ruleset.stats.append(ClauseStats(tp, fp, score))
        # remove covered positive mass; negatives stay in play
        working = [(row, w) for i, (row, w) in enumerate(working)
                   if i not in set(covered) or w <= 1e-12]

    return ruleset


# -- rendering / parsing ---------------------------------------------------

def _format_weight(w: float) -> str:
    return repr(round(w, 6))


def render_problem(factbase: FactBase, target_name: str | None = None) -> str:
    name = target_name or factbase.target_name
    arity = len(factbase.columns)
    lines = [f"% target: {name}/{arity}"]
    types = ", ".join(f"col_{i}={a}" for i, a in enumerate(factbase.columns))
    lines.append(f"% types: {types}")
    lines.append("% modes: input-only")
    for row, w in factbase.examples:
        lines.append(f"{_format_weight(w)}::{name}({', '.join(row)}).")
    for sym in factbase.symbol_order:
        lines.append(f"{factbase.symbol_value[sym]}({sym}).")
    return "\n".join(lines) + "\n"


_EXAMPLE_RE = re.compile(r"^([0-9.eE+-]+)::(\w+)\(([^)]*)\)\.$")
_FACT_RE = re.compile(r"^(\w+)\((\w+)\)\.$")


def parse_problem(text: str) -> FactBase:
    target_name, arity, columns = None, None, []
    examples = []
    value_facts: dict[str, set[str]] = {}
    symbol_value: dict[str, str] = {}
    symbol_order: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("% target:"):
            name, _, ar = line[len("% target:"):].strip().partition("/")
            target_name, arity = name.strip(), int(ar)
            continue
        if line.startswith("% types:"):
            rest = line[len("% types:"):].strip()
            for part in rest.split(",") if rest else []:
                _, _, attr = part.strip().partition("=")
                columns.append(attr.strip())
            continue
        if line.startswith("%"):
            continue
        m = _EXAMPLE_RE.match(line)
        if m:
            weight = float(m.group(1))
            row = tuple(s.strip() for s in m.group(3).split(",") if s.strip())
            examples.append((row, weight))
            continue
        m = _FACT_RE.match(line)
        if m:
            pred, sym = m.group(1), m.group(2)
            value_facts.setdefault(pred, set()).add(sym)
            symbol_value[sym] = pred
            symbol_order.append(sym)
            continue
        raise ProblemParseError(f"line {lineno}: unrecognized line {line!r}")
    if target_name is None or arity is None:
        raise ProblemParseError("missing '% target:' header")
    for row, _ in examples:
        if len(row) != arity:
            raise ProblemParseError("example arity does not match target")
    predicate_column: dict[str, int] = {}
    for row, _ in examples:
        for col, sym in enumerate(row):
            if sym in symbol_value:
                predicate_column[symbol_value[sym]] = col
    qattr = ""  # the query attribute is not recorded in the surface syntax
    return FactBase(target_name=target_name, target=(qattr, target_name),
                    columns=columns, value_facts=value_facts,
                    predicate_column=predicate_column, examples=examples,
                    symbol_value=symbol_value, symbol_order=symbol_order)


def _variables(arity: int) -> list[str]:
    names = []
    for i in range(arity):
        name = chr(ord("A") + i % 26)
        if i >= 26:
            name += str(i // 26)
        names.append(name)
    return names


def render_clause(clause: Clause) -> str:
    variables = _variables(clause.arity)
    head = clause.head if clause.arity == 0 else \
        f"{clause.head}({','.join(variables)})"
    if not clause.body:
        return f"{head} :- true."
    body = ", ".join(f"{lit.predicate}({variables[lit.column]})"
                     for lit in clause.body)
    return f"{head} :- {body}."


def render_rules(ruleset: RuleSet) -> str:
    return "\n".join(render_clause(c) for c in ruleset.clauses) + \
        ("\n" if ruleset.clauses else "")
