"""Concrete syntax for requirements, targets and access constraints.

One requirement per line:

    [target] => body

where the body is a pattern call (grant, deny, waypoint, blocking) or a
raw branching-time formula. `#` starts a comment. Operator precedence,
tightest first: not and the unary temporal operators, `and`, `or`,
`->` (right associative).

Membership shorthands, all desugared at parse time:

    a = v        value equality            a != v      its negation
    a            bare boolean attribute    a in {..}   set membership
    a <= n       numeric upper bound       a >= n      numeric lower bound
    n <= a <= m  bounded interval

An unset attribute (bottom) satisfies `a >= n` but no bounded interval;
this falls out of the desugaring, which encodes lower bounds negatively.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List, Optional, Tuple

from .formulas import (
    AU, AX, BOOLEAN, BOTTOM, ENUM, EU, EX, NEGATIVE, NUMERIC,
    POSITIVE, RESOURCE, UNKNOWN, AccessRequest, And, Atom,
    AttributeSignature, Formula, Not, Requirement, Top, Value,
    blocking, deny, disj, falsum, format_value, grant, implies,
    is_deadlock_freeness, validate_constraint, validate_target, value_key,
    waypoint,
)

RESERVED = {
    "and", "or", "not", "true", "false", "bot", "in",
    "E", "A", "U", "R", "EX", "AX", "EF", "AG",
    "grant", "deny", "waypoint", "blocking",
}

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>=>|->|!=|<=|>=|\.\.|[()\[\]{},=])
""", re.VERBOSE)


class ParseError(ValueError):
    def __init__(self, message: str, text: str, line: int, col: int):
        self.line = line
        self.col = col
        caret = " " * (col - 1) + "^"
        super().__init__("line %d, column %d: %s\n  %s\n  %s"
                         % (line, col, message, text, caret))


@dataclass
class _Token:
    kind: str       # num | ident | op | end
    value: str
    col: int


def _tokenize(text: str, line_no: int) -> List[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError("unexpected character %r" % text[pos], text, line_no, pos + 1)
        if m.lastgroup != "ws":
            tokens.append(_Token(m.lastgroup, m.group(), pos + 1))
        pos = m.end()
    tokens.append(_Token("end", "", len(text) + 1))
    return tokens


class _Parser:
    """Recursive descent over one logical line."""

    def __init__(self, text: str, sig: AttributeSignature, line_no: int = 1):
        self.text = text
        self.sig = sig
        self.line_no = line_no
        self.tokens = _tokenize(text, line_no)
        self.i = 0

    # -- token plumbing ----------------------------------------------

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def next(self) -> _Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def at(self, value: str) -> bool:
        t = self.peek()
        return t.kind in ("op", "ident") and t.value == value

    def accept(self, value: str) -> bool:
        if self.at(value):
            self.i += 1
            return True
        return False

    def expect(self, value: str) -> _Token:
        if not self.at(value):
            self.fail("expected %r" % value)
        return self.next()

    def fail(self, message: str, tok: Optional[_Token] = None):
        tok = tok or self.peek()
        raise ParseError(message, self.text, self.line_no, tok.col)

    # -- entry points ------------------------------------------------

    def requirement(self) -> Requirement:
        if self.at("=>"):
            target: Formula = Top()
        else:
            target = self.expression(False)
        self.expect("=>")
        constraint, polarity = self.body()
        if self.peek().kind != "end":
            self.fail("trailing input after requirement")
        validate_target(target, self.sig)
        validate_constraint(constraint, self.sig)
        return Requirement(target, constraint, polarity, source=self.text.strip())

    def body(self) -> Tuple[Formula, str]:
        t = self.peek()
        if t.kind == "ident" and t.value in ("grant", "deny") \
                and self.tokens[self.i + 1].value == "(":
            name = self.next().value
            self.expect("(")
            goal = self.expression(True)
            self.expect(")")
            return (grant(goal), POSITIVE) if name == "grant" else (deny(goal), NEGATIVE)
        if t.kind == "ident" and t.value in ("waypoint", "blocking") \
                and self.tokens[self.i + 1].value == "(":
            name = self.next().value
            self.expect("(")
            first = self.expression(True)
            self.expect(",")
            second = self.expression(True)
            self.expect(")")
            f = waypoint(first, second) if name == "waypoint" else blocking(first, second)
            return f, NEGATIVE
        f = self.expression(True)
        if is_deadlock_freeness(f):
            return f, NEGATIVE
        return f, UNKNOWN

    def target_only(self) -> Formula:
        f = self.expression(False)
        if self.peek().kind != "end":
            self.fail("trailing input after target")
        validate_target(f, self.sig)
        return f

    def constraint_only(self) -> Formula:
        f, _ = self.body()
        if self.peek().kind != "end":
            self.fail("trailing input after formula")
        validate_constraint(f, self.sig)
        return f

    # -- expression grammar ------------------------------------------
    # temporal: whether temporal operators are allowed (constraints).

    def expression(self, temporal: bool) -> Formula:
        left = self.disjunction(temporal)
        if self.accept("->"):
            right = self.expression(temporal)
            return implies(left, right)
        return left

    def disjunction(self, temporal: bool) -> Formula:
        f = self.conjunction(temporal)
        while self.accept("or"):
            f = disj(f, self.conjunction(temporal))
        return f

    def conjunction(self, temporal: bool) -> Formula:
        f = self.unary(temporal)
        while self.accept("and"):
            f = And(f, self.unary(temporal))
        return f

    def unary(self, temporal: bool) -> Formula:
        t = self.peek()
        if t.value == "not":
            self.next()
            return Not(self.unary(temporal))
        if t.kind == "ident" and t.value in ("EX", "AX", "EF", "AG", "E", "A"):
            if not temporal:
                self.fail("temporal operator %r not allowed in a target" % t.value)
            if t.value in ("EX", "AX", "EF", "AG"):
                self.next()
                sub = self.unary(temporal)
                if t.value == "EX":
                    return EX(sub)
                if t.value == "AX":
                    return AX(sub)
                if t.value == "EF":
                    return EU(Top(), sub)
                return Not(EU(Top(), Not(sub)))
            # E[.. U ..] / A[.. U ..] / A[.. R ..]
            quant = self.next().value
            self.expect("[")
            left = self.expression(temporal)
            sep = self.next()
            if sep.value not in ("U", "R"):
                self.fail("expected U or R inside the path operator", sep)
            if sep.value == "R" and quant == "E":
                self.fail("release is only supported under A[..]", sep)
            right = self.expression(temporal)
            self.expect("]")
            if quant == "E":
                return EU(left, right)
            if sep.value == "U":
                return AU(left, right)
            return Not(EU(Not(left), Not(right)))
        return self.primary(temporal)

    def primary(self, temporal: bool) -> Formula:
        t = self.peek()
        if t.value == "true":
            self.next()
            return Top()
        if t.value == "false":
            self.next()
            return falsum()
        if self.accept("("):
            f = self.expression(temporal)
            self.expect(")")
            return f
        if t.kind == "num":
            return self.bounded_interval()
        if t.kind == "ident":
            if t.value in RESERVED:
                self.fail("%r is a reserved word" % t.value)
            return self.atom()
        self.fail("expected a formula")

    def bounded_interval(self) -> Formula:
        lo_tok = self.next()
        lo = int(lo_tok.value)
        self.expect("<=")
        name_tok = self.next()
        if name_tok.kind != "ident" or name_tok.value in RESERVED:
            self.fail("expected an attribute name", name_tok)
        self.expect("<=")
        hi_tok = self.next()
        if hi_tok.kind != "num":
            self.fail("expected a number", hi_tok)
        hi = int(hi_tok.value)
        attr = self._numeric_attr(name_tok)
        return And(self._at_least(attr, lo), Atom(attr, frozenset(range(0, hi + 1))))

    def atom(self) -> Formula:
        name_tok = self.next()
        name = name_tok.value
        if name not in self.sig:
            self.fail("unknown attribute %r" % name, name_tok)
        decl = self.sig.get(name)
        if self.accept("="):
            return Atom(name, frozenset([self.value(decl)]))
        if self.accept("!="):
            return Not(Atom(name, frozenset([self.value(decl)])))
        if self.accept("<="):
            n = self._number()
            self._require_numeric(decl, name_tok)
            return Atom(name, frozenset(range(0, n + 1)))
        if self.accept(">="):
            n = self._number()
            self._require_numeric(decl, name_tok)
            return self._at_least(name, n)
        if self.accept("in"):
            return Atom(name, self.set_literal(decl))
        if decl.kind != BOOLEAN:
            self.fail("bare %r needs a comparison, only boolean attributes "
                      "stand alone" % name, name_tok)
        return Atom(name, frozenset([True]))

    def set_literal(self, decl) -> frozenset:
        self.expect("{")
        items: List[Value] = []
        if not self.at("}"):
            while True:
                t = self.peek()
                if t.kind == "num":
                    lo = int(self.next().value)
                    if self.accept(".."):
                        hi = self._number()
                        if hi < lo:
                            self.fail("empty range %d..%d" % (lo, hi), t)
                        items.extend(range(lo, hi + 1))
                    else:
                        items.append(lo)
                else:
                    items.append(self.value(decl))
                if not self.accept(","):
                    break
        self.expect("}")
        return frozenset(items)

    def value(self, decl) -> Value:
        t = self.next()
        if t.kind == "num":
            return int(t.value)
        if t.kind != "ident":
            self.fail("expected a value", t)
        if t.value == "true":
            return True
        if t.value == "false":
            return False
        if t.value == "bot":
            return BOTTOM
        if t.value in RESERVED:
            self.fail("%r is a reserved word" % t.value, t)
        if decl.kind == ENUM and t.value not in decl.symbols:
            self.fail("%r is not a declared symbol of %r" % (t.value, decl.name), t)
        return t.value

    def _number(self) -> int:
        t = self.next()
        if t.kind != "num":
            self.fail("expected a number", t)
        return int(t.value)

    def _numeric_attr(self, tok) -> str:
        if tok.value not in self.sig:
            self.fail("unknown attribute %r" % tok.value, tok)
        if self.sig.get(tok.value).kind != NUMERIC:
            self.fail("attribute %r is not numeric" % tok.value, tok)
        return tok.value

    def _require_numeric(self, decl, tok):
        if decl.kind != NUMERIC:
            self.fail("attribute %r is not numeric" % decl.name, tok)

    @staticmethod
    def _at_least(attr: str, n: int) -> Formula:
        return Not(Atom(attr, frozenset(range(0, n))))


# ---------------------------------------------------------------------------
# Public parsing API
# ---------------------------------------------------------------------------

def parse_requirement(text: str, sig: AttributeSignature, line_no: int = 1) -> Requirement:
    return _Parser(text, sig, line_no).requirement()


def parse_requirements(text: str, sig: AttributeSignature) -> List[Requirement]:
    out = []
    for i, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        out.append(parse_requirement(line, sig, line_no=i))
    return out


def parse_target(text: str, sig: AttributeSignature) -> Formula:
    return _Parser(text, sig).target_only()


def parse_constraint(text: str, sig: AttributeSignature) -> Formula:
    return _Parser(text, sig).constraint_only()


def parse_request(text: str, sig: AttributeSignature) -> AccessRequest:
    """Parse "attr=value, attr=value" into a request; the rest is bottom."""
    q: AccessRequest = {}
    text = text.strip()
    if text:
        for part in text.split(","):
            if "=" not in part:
                raise ValueError("request items look like attr=value, got %r" % part.strip())
            name, _, val = part.partition("=")
            name = name.strip()
            val = val.strip()
            if name not in sig or sig.get(name).cls == RESOURCE:
                raise ValueError("unknown request attribute %r" % name)
            decl = sig.get(name)
            if val == "bot":
                q[name] = BOTTOM
            elif val == "true":
                q[name] = True
            elif val == "false":
                q[name] = False
            elif re.fullmatch(r"\d+", val):
                q[name] = int(val)
            else:
                q[name] = val
            if not decl.admits(q[name]):
                raise ValueError("value %r not admissible for %r" % (val, name))
    return sig.validate_request(q)


# ---------------------------------------------------------------------------
# Printing. Never emits sugar unless the AST is exactly the shape the
# sugar desugars to, so parse(format(f)) returns f.
# ---------------------------------------------------------------------------

_PREC_ATOMIC = 4
_PREC_UNARY = 3
_PREC_AND = 2
_PREC_OR = 1
_PREC_IMPL = 0


def _is_zero_run(values: frozenset) -> Optional[int]:
    """If values == {0..n}, return n."""
    if not values or BOTTOM in values:
        return None
    if not all(isinstance(v, int) and not isinstance(v, bool) for v in values):
        return None
    n = max(values)
    return n if len(values) == n + 1 and min(values) == 0 else None


def _format_set(values: frozenset) -> str:
    parts = []
    ints = sorted(v for v in values if isinstance(v, int) and not isinstance(v, bool))
    rest = sorted((v for v in values if not isinstance(v, int) or isinstance(v, bool)),
                  key=value_key)
    i = 0
    while i < len(ints):
        j = i
        while j + 1 < len(ints) and ints[j + 1] == ints[j] + 1:
            j += 1
        parts.append(str(ints[i]) if i == j else "%d..%d" % (ints[i], ints[j]))
        i = j + 1
    parts.extend(format_value(v) for v in rest)
    return "{%s}" % ", ".join(parts)


def _atom_str(f: Atom, sig: Optional[AttributeSignature]) -> str:
    if len(f.values) == 1:
        v = next(iter(f.values))
        if v is True and sig is not None and f.attr in sig \
                and sig.get(f.attr).kind == BOOLEAN:
            return f.attr
        return "%s = %s" % (f.attr, format_value(v))
    n = _is_zero_run(f.values)
    if n is not None:
        return "%s <= %d" % (f.attr, n)
    return "%s in %s" % (f.attr, _format_set(f.values))


def _lower_bound_of(f: Formula) -> Optional[Tuple[str, int]]:
    """Match not(a in {0..n-1}) or not(a in {}), the >= desugaring."""
    if isinstance(f, Not) and isinstance(f.sub, Atom):
        if not f.sub.values:
            return f.sub.attr, 0
        n = _is_zero_run(f.sub.values)
        if n is not None:
            return f.sub.attr, n + 1
    return None


def _fmt(f: Formula, sig: Optional[AttributeSignature], prec: int) -> str:
    text, my_prec = _fmt_prec(f, sig)
    if my_prec < prec:
        return "(%s)" % text
    return text


def _fmt_prec(f: Formula, sig) -> Tuple[str, int]:
    if isinstance(f, Top):
        return "true", _PREC_ATOMIC
    if isinstance(f, Atom):
        # atoms parse as one unit, comparison suffix included
        return _atom_str(f, sig), _PREC_ATOMIC
    if isinstance(f, Not):
        if isinstance(f.sub, Top):
            return "false", _PREC_ATOMIC
        if isinstance(f.sub, Atom) and len(f.sub.values) == 1:
            v = next(iter(f.sub.values))
            return "%s != %s" % (f.sub.attr, format_value(v)), _PREC_ATOMIC
        lb = _lower_bound_of(f)
        if lb is not None:
            return "%s >= %d" % lb, _PREC_ATOMIC
        if isinstance(f.sub, EU):
            eu = f.sub
            if eu.left == Top() and isinstance(eu.right, Not):
                return "AG %s" % _fmt(eu.right.sub, sig, _PREC_UNARY), _PREC_UNARY
            if isinstance(eu.left, Not) and isinstance(eu.right, Not):
                return ("A[%s R %s]" % (_fmt(eu.left.sub, sig, 0),
                                        _fmt(eu.right.sub, sig, 0)), _PREC_ATOMIC)
        if isinstance(f.sub, And):
            a = f.sub
            if isinstance(a.left, Not) and isinstance(a.right, Not):
                return ("%s or %s" % (_fmt(a.left.sub, sig, _PREC_OR),
                                      _fmt(a.right.sub, sig, _PREC_OR + 1)), _PREC_OR)
            if isinstance(a.right, Not):
                return ("%s -> %s" % (_fmt(a.left, sig, _PREC_IMPL + 1),
                                      _fmt(a.right.sub, sig, _PREC_IMPL)), _PREC_IMPL)
        return "not %s" % _fmt(f.sub, sig, _PREC_UNARY), _PREC_UNARY
    if isinstance(f, And):
        lb = _lower_bound_of(f.left)
        if lb is not None and isinstance(f.right, Atom) and f.right.attr == lb[0]:
            hi = _is_zero_run(f.right.values)
            if hi is not None:
                return "%d <= %s <= %d" % (lb[1], lb[0], hi), _PREC_ATOMIC
        return ("%s and %s" % (_fmt(f.left, sig, _PREC_AND),
                               _fmt(f.right, sig, _PREC_AND + 1)), _PREC_AND)
    if isinstance(f, EX):
        return "EX %s" % _fmt(f.sub, sig, _PREC_UNARY), _PREC_UNARY
    if isinstance(f, AX):
        return "AX %s" % _fmt(f.sub, sig, _PREC_UNARY), _PREC_UNARY
    if isinstance(f, EU):
        if f.left == Top():
            return "EF %s" % _fmt(f.right, sig, _PREC_UNARY), _PREC_UNARY
        return ("E[%s U %s]" % (_fmt(f.left, sig, 0), _fmt(f.right, sig, 0)),
                _PREC_ATOMIC)
    if isinstance(f, AU):
        return ("A[%s U %s]" % (_fmt(f.left, sig, 0), _fmt(f.right, sig, 0)),
                _PREC_ATOMIC)
    raise TypeError("cannot format %r" % (f,))


def format_target(f: Formula, sig: Optional[AttributeSignature] = None) -> str:
    return _fmt(f, sig, 0)


def format_constraint(f: Formula, sig: Optional[AttributeSignature] = None) -> str:
    return _fmt(f, sig, 0)


def _pattern_print(f: Formula, polarity: str, sig) -> Optional[str]:
    if is_deadlock_freeness(f):
        return None  # raw temporal form reads best and keeps its polarity
    if polarity == POSITIVE and isinstance(f, EU) and f.left == Top():
        return "grant(%s)" % _fmt(f.right, sig, 0)
    if polarity == NEGATIVE and isinstance(f, Not) and isinstance(f.sub, EU):
        eu = f.sub
        if eu.left == Top() and isinstance(eu.right, And) \
                and isinstance(eu.right.right, EU) and eu.right.right.left == Top():
            return "blocking(%s, %s)" % (_fmt(eu.right.left, sig, 0),
                                         _fmt(eu.right.right.right, sig, 0))
        if isinstance(eu.left, Not) and isinstance(eu.right, And) \
                and eu.right.right == eu.left:
            return "waypoint(%s, %s)" % (_fmt(eu.left.sub, sig, 0),
                                         _fmt(eu.right.left, sig, 0))
        if eu.left == Top():
            return "deny(%s)" % _fmt(eu.right, sig, 0)
    return None


def format_requirement(r: Requirement, sig: Optional[AttributeSignature] = None) -> str:
    body = _pattern_print(r.constraint, r.polarity, sig)
    if body is None:
        body = _fmt(r.constraint, sig, 0)
    if r.target == Top():
        return "=> %s" % body
    return "%s => %s" % (_fmt(r.target, sig, 0), body)


def format_request(q: AccessRequest, sig: Optional[AttributeSignature] = None) -> str:
    from .formulas import format_value
    names = [d.name for d in sig.request_attrs()] if sig is not None else sorted(q)
    return ", ".join("%s=%s" % (n, format_value(q.get(n, BOTTOM))) for n in names)
