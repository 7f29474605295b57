"""The ``.dga`` text format.

::

    # comments start with '#'
    gen a 2
    gen b 3
    fiber x 1 stage 0
    d b = a^2
    d x = a

Expressions: ``term (('+'|'-') term)*`` with ``term := [rational '*'] factor
('*' factor)*``, ``factor := ident ['^' nat]`` and ``rational := int ['/'
nat]``.  A leading sign and bare rational terms are also accepted.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .algebra import DGAlgebra, Element, UNIT, normalize


class DgaError(ValueError):
    """Base class for input errors (exit code 2 on the command line)."""


class DgaSyntaxError(DgaError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.line, self.col = line, col
        loc = f"line {line}, col {col}: " if line else (f"col {col}: " if col else "")
        super().__init__(loc + message)


class DgaSemanticError(DgaError):
    def __init__(self, message: str, line: int = 0):
        self.line = line
        super().__init__((f"line {line}: " if line else "") + message)


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^=]))")


def _tokenize(text: str, line: int = 0, offset: int = 0):
    pos = 0
    tokens = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            col = pos + offset + 1 + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise DgaSyntaxError(f"unexpected character {text[pos:].lstrip()[:1]!r}", line, col)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start + offset + 1))
        pos = m.end()
    return tokens


class _ExprParser:
    def __init__(self, tokens, algebra: DGAlgebra, line: int, end_col: int):
        self.tokens = tokens
        self.i = 0
        self.alg = algebra
        self.line = line
        self.end_col = end_col

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None, self.end_col)

    def take(self, kind=None, value=None):
        tok = self.peek()
        if tok[0] is None or (kind and tok[0] != kind) or (value and tok[1] != value):
            want = value or kind or "token"
            got = "end of input" if tok[0] is None else repr(tok[1])
            raise DgaSyntaxError(f"expected {want}, got {got}", self.line, tok[2])
        self.i += 1
        return tok

    def expr(self) -> Element:
        sign = 1
        kind, val, _ = self.peek()
        if kind == "op" and val in "+-":
            self.i += 1
            sign = -1 if val == "-" else 1
        total = self.term() * sign
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.i += 1
                t = self.term()
                total = total + t if val == "+" else total - t
            else:
                break
        if self.peek()[0] is not None:
            tok = self.peek()
            raise DgaSyntaxError(f"unexpected {tok[1]!r}", self.line, tok[2])
        return total

    def rational(self) -> Fraction:
        _, num, _ = self.take("num")
        kind, val, _ = self.peek()
        if kind == "op" and val == "/":
            self.i += 1
            _, den, col = self.take("num")
            if int(den) == 0:
                raise DgaSyntaxError("zero denominator", self.line, col)
            return Fraction(int(num), int(den))
        return Fraction(int(num))

    def factor(self) -> tuple[int, int]:
        _, name, col = self.take("ident")
        try:
            gid = self.alg.index(name)
        except KeyError:
            raise DgaSemanticError(f"unknown generator {name!r} (col {col})", self.line) from None
        exp = 1
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.i += 1
            _, e, ecol = self.take("num")
            exp = int(e)
            if exp < 1:
                raise DgaSyntaxError("exponent must be positive", self.line, ecol)
        return gid, exp

    def term(self) -> Element:
        coeff = Fraction(1)
        factors = []
        kind = self.peek()[0]
        if kind == "num":
            coeff = self.rational()
            k, v, _ = self.peek()
            if not (k == "op" and v == "*"):
                return Element(self.alg, {UNIT: coeff})
            self.i += 1
        factors.append(self.factor())
        while True:
            k, v, _ = self.peek()
            if k == "op" and v == "*":
                self.i += 1
                factors.append(self.factor())
            else:
                break
        sign, mono = normalize(factors, self.alg.degrees)
        if not sign:
            return self.alg.zero
        return Element(self.alg, {mono: sign * coeff})


def parse_expression(text: str, algebra: DGAlgebra, line: int = 0, offset: int = 0) -> Element:
    tokens = _tokenize(text, line, offset)
    if not tokens:
        raise DgaSyntaxError("empty expression", line, offset + 1)
    return _ExprParser(tokens, algebra, line, offset + len(text) + 1).expr()


_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*$")


def parse(text: str):
    """Parse ``.dga`` text into a DGAlgebra, or a Fibration if it has fiber lines."""
    from .fibration import Fibration

    base: list[tuple[str, int]] = []
    fiber: list[tuple[str, int, int]] = []
    diffs: list[tuple[int, str, str, int]] = []
    declared: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        words = line.split()
        head = words[0]
        col = len(line) - len(line.lstrip()) + 1
        if head == "gen":
            if len(words) != 3:
                raise DgaSyntaxError("expected 'gen <ident> <nat>'", lineno, col)
            name, deg = words[1], words[2]
            _check_decl(name, deg, lineno, line, declared)
            base.append((name, int(deg)))
        elif head == "fiber":
            if len(words) != 5 or words[3] != "stage":
                raise DgaSyntaxError("expected 'fiber <ident> <nat> stage <nat>'", lineno, col)
            name, deg, stage = words[1], words[2], words[4]
            _check_decl(name, deg, lineno, line, declared)
            if not stage.isdigit():
                raise DgaSyntaxError(f"stage must be a natural number, got {stage!r}", lineno, line.index(stage, line.index("stage") + 5) + 1)
            fiber.append((name, int(deg), int(stage)))
        elif head == "d":
            m = re.match(r"\s*d\s+([A-Za-z_][A-Za-z0-9_]*)\s*=(.*)$", line)
            if not m:
                raise DgaSyntaxError("expected 'd <ident> = <expr>'", lineno, col)
            diffs.append((lineno, m.group(1), m.group(2), m.start(2)))
        else:
            raise DgaSyntaxError(f"unknown directive {head!r}", lineno, col)

    shell = DGAlgebra(base + [(n, g) for n, g, _ in fiber])
    base_names = {n for n, _ in base}
    d: dict[str, Element] = {}
    for lineno, name, expr, offset in diffs:
        if name not in declared:
            raise DgaSemanticError(f"d of undeclared generator {name!r}", lineno)
        if name in d:
            raise DgaSemanticError(f"duplicate differential for {name!r}", lineno)
        e = parse_expression(expr, shell, lineno, offset)
        want = declared[name] + 1
        if e and e.degrees() != {want}:
            got = sorted(e.degrees())
            raise DgaSemanticError(f"degree mismatch: d {name} must have degree {want}, got {got}", lineno)
        if name in base_names and any(g >= len(base) for g in e.support()):
            raise DgaSemanticError(f"d {name} of a base generator uses fiber generators", lineno)
        d[name] = e
    total = DGAlgebra(shell.generators, d)
    if not fiber:
        return total
    base_alg = DGAlgebra(base, {n: e for n, e in d.items() if n in base_names})
    return Fibration(base_alg, total, tuple(s for _, _, s in fiber))


def _check_decl(name, deg, lineno, line, declared):
    if not _IDENT.match(name):
        raise DgaSyntaxError(f"invalid identifier {name!r}", lineno, line.index(name) + 1)
    if not deg.isdigit():
        raise DgaSyntaxError(f"degree must be a natural number, got {deg!r}", lineno, line.index(deg, line.index(name) + len(name)) + 1)
    if int(deg) < 1:
        raise DgaSemanticError(f"generator {name!r} must have positive degree", lineno)
    if name in declared:
        raise DgaSemanticError(f"duplicate generator {name!r}", lineno)
    declared[name] = int(deg)


def parse_file(path) -> object:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


def dumps(obj) -> str:
    """Print a DGAlgebra or Fibration in ``.dga`` format."""
    from .fibration import Fibration

    if isinstance(obj, Fibration):
        total = obj.total
        nbase = len(obj.base.generators)
        lines = [f"gen {g.name} {g.degree}" for g in total.generators[:nbase]]
        lines += [
            f"fiber {g.name} {g.degree} stage {s}"
            for g, s in zip(total.generators[nbase:], obj.stages)
        ]
    else:
        total = obj
        lines = [f"gen {g.name} {g.degree}" for g in total.generators]
    for g in total.generators:
        dg = total.dgen(g.id)
        if dg:
            lines.append(f"d {g.name} = {dg}")
    return "\n".join(lines) + "\n"
