"""Session files and the command line front end.

A ``.gfc`` file declares spaces, maps, relations, geometric structure
and finite models, binds functor words and transformation terms to
names, and requests equality checks, roofs or diagrams.  Words are
written exactly as printed in the usual notation: ``f^* g_*`` applies
``g_*`` first.  Vertical composition of terms uses ``.`` with the left
factor applied first, and juxtaposition inside a parenthesised group
whiskers a cell by the surrounding words.

Subcommands: ``check`` runs every ``check`` statement and exits 0 when
all are equal, 1 when any is unequal, 2 when any is unknown and 3 on
errors; ``normalize`` prints a canonical re-parseable form of a bound
term; ``roof`` prints the roof factorisation data of a bound word;
``render`` writes an SVG diagram.
"""

from __future__ import annotations

import argparse
import json
import sys

from .decide import decide_equal
from .errors import GfcError, ParseError
from .oracle import FiniteFamilyModel
from .render import render_to_file
from .rewrite import alternating_reduce, roof, sgnt0_canonicalize
from .sgf import lower, upper, word
from .sgnt import FREE_INVERTIBLE, BasicCell, SgntTerm
from .spaces import Session
from .structures import GeoStructure

# Names with fixed grammatical meaning; user declarations may not
# shadow them.
RESERVED = frozenset((
    "id", "unit", "counit", "comp", "triv", "bc", "terminal", "induced",
    "pullback", "of", "all"))

_MULTI = ("->", "==", "_*", "^*")
_SINGLE = ";:,={}().'>*/-_"


class Token:
    __slots__ = ("kind", "text", "line", "col", "pos")

    def __init__(self, kind, text, line, col, pos):
        self.kind = kind
        self.text = text
        self.line = line
        self.col = col
        self.pos = pos

    def __repr__(self):
        return "%s %r" % (self.kind, self.text)


def tokenize(source):
    toks = []
    i = 0
    line = 1
    start = 0  # offset of the current line
    n = len(source)
    while i < n:
        c = source[i]
        if c == "\n":
            line += 1
            i += 1
            start = i
            continue
        if c.isspace():
            i += 1
            continue
        if c == "#":
            while i < n and source[i] != "\n":
                i += 1
            continue
        col = i - start + 1
        two = source[i:i + 2]
        if two in _MULTI:
            toks.append(Token("punct", two, line, col, i))
            i += 2
            continue
        if c.isalpha():
            j = i + 1
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            # keep a trailing underscore for the `_*` letter marker
            if source[j - 1] == "_" and j < n and source[j] == "*":
                j -= 1
            toks.append(Token("name", source[i:j], line, col, i))
            i = j
            continue
        if c.isdigit():
            j = i + 1
            while j < n and source[j].isdigit():
                j += 1
            toks.append(Token("int", source[i:j], line, col, i))
            i = j
            continue
        if c in _SINGLE:
            toks.append(Token("punct", c, line, col, i))
            i += 1
            continue
        raise ParseError("unexpected character %r" % c, line, col)
    toks.append(Token("end", "", line, n - start + 1, n))
    return toks


class Document:
    """Everything a session file declares, plus its pending requests."""

    def __init__(self):
        self.session = Session()
        self.sgfs = {}
        self.sgnts = {}
        self.squares = {}
        self.push = []
        self.pull = []
        self.mono = []
        self.acyclic_all = False
        self.acyclic_pairs = []
        self.models = []
        self.checks = []   # (statement text, lhs, rhs, line)
        self.roofs = []    # (name, line)
        self.renders = []  # (name, path, line)

    def structure(self):
        mode = "trivial"
        pairs = ()
        if self.acyclic_pairs:
            mode = "declared"
            pairs = tuple(self.acyclic_pairs)
        if self.acyclic_all:
            if not self.models:
                raise ParseError(
                    "'acyclic all;' needs a declared finite model")
            mode = "all-pairs"
        st = GeoStructure(
            self.session, push_gens=tuple(self.push),
            pull_gens=tuple(self.pull), acyclicity=mode, pairs=pairs,
            mono_class=tuple(self.mono),
            model=self.models[0] if self.models else None)
        if len(self.models) > 1:
            st.models = tuple(self.models)
        return st


class _Parser:
    def __init__(self, doc, source):
        self.doc = doc
        self.src = source
        self.toks = tokenize(source)
        self.i = 0

    # ------------------------------------------------------------------
    # token plumbing

    def peek(self, ahead=0):
        return self.toks[min(self.i + ahead, len(self.toks) - 1)]

    def next(self):
        tok = self.toks[self.i]
        if tok.kind != "end":
            self.i += 1
        return tok

    def at(self, text):
        return self.peek().text == text and self.peek().kind != "end"

    def eat(self, text):
        if self.at(text):
            self.next()
            return True
        return False

    def expect(self, text):
        tok = self.next()
        if tok.text != text or tok.kind == "end":
            raise ParseError("expected %r, found %r" % (text, tok.text or
                                                        "end of file"),
                             tok.line, tok.col)
        return tok

    def expect_name(self):
        tok = self.next()
        if tok.kind != "name":
            raise ParseError("expected a name, found %r"
                             % (tok.text or "end of file"),
                             tok.line, tok.col)
        return tok

    def fail(self, message, tok=None):
        tok = tok or self.peek()
        raise ParseError(message, tok.line, tok.col)

    def raw_until_semi(self):
        start = self.peek().pos
        while not self.at(";"):
            if self.peek().kind == "end":
                self.fail("expected ';'")
            self.next()
        end = self.peek().pos
        self.next()
        return self.src[start:end].strip()

    # ------------------------------------------------------------------
    # statements

    def run(self):
        while self.peek().kind != "end":
            self.statement()

    def statement(self):
        tok = self.expect_name()
        handler = getattr(self, "_stmt_" + tok.text, None)
        if handler is None:
            self.fail("unknown statement %r" % tok.text, tok)
        try:
            handler()
        except ParseError:
            raise
        except GfcError as exc:
            raise ParseError(str(exc), tok.line, tok.col)

    def _declare_name(self, tok):
        if tok.text in RESERVED:
            self.fail("%r is a reserved word" % tok.text, tok)
        return tok.text

    def _stmt_space(self):
        name = self._declare_name(self.expect_name())
        self.expect(";")
        self.doc.session.declare_space(name)

    def _stmt_map(self, iso=False):
        s = self.doc.session
        tok = self.expect_name()
        name = self._declare_name(tok)
        if self.eat(":"):
            src = self._space_ref()
            self.expect("->")
            dst = self._space_ref()
            self.expect(";")
            s.declare_map(name, src, dst, iso=iso)
            return
        self.expect("=")
        if iso:
            self.fail("iso declarations need explicit endpoints", tok)
        m = self._map_expr()
        self.expect(";")
        if name in s.named_maps or name in s.gen_ids:
            self.fail("map %r is already declared" % name, tok)
        s.named_maps[name] = m

    def _stmt_iso(self):
        self._stmt_map(iso=True)

    def _stmt_relation(self):
        s = self.doc.session
        src_l, lhs = self._relation_side()
        self.expect("=")
        src_r, rhs = self._relation_side()
        self.expect(";")
        if src_l is None and src_r is None:
            self.fail("a relation needs at least one named map")
        if src_l is None:
            src_l = src_r
        if src_r is None:
            src_r = src_l
        if src_l is not src_r:
            self.fail("relation sides start at %s and %s"
                      % (src_l.label(), src_r.label()))
        s.declare_word_relation(src_l, lhs, rhs)

    def _relation_side(self):
        """A dotted path of generator names, or id(X) for the empty word."""
        s = self.doc.session
        gens = []
        src = None
        while True:
            tok = self.expect_name()
            if tok.text == "id":
                self.expect("(")
                sp = self._space_ref()
                self.expect(")")
                if src is None:
                    src = sp
            else:
                gid = s.gen_ids.get(tok.text)
                if gid is None:
                    self.fail("relations may only mention generator maps, "
                              "not %r" % tok.text, tok)
                if src is None:
                    src = s.atom_space(s.gen_src[gid])
                gens.append(gid)
            if not self.eat("."):
                return src, tuple(gens)

    def _stmt_pullback(self):
        s = self.doc.session
        name = self._declare_name(self.expect_name())
        self.expect("(")
        f_leg = self._declare_name(self.expect_name())
        self.expect(",")
        g_leg = self._declare_name(self.expect_name())
        self.expect(")")
        tok = self.expect_name()
        if tok.text != "of":
            self.fail("expected 'of'", tok)
        self.expect("(")
        f = self._map_expr()
        self.expect(",")
        g = self._map_expr()
        self.expect(")")
        self.expect(";")
        self.doc.squares[name] = s.declare_pullback(name, f_leg, g_leg, f, g)

    def _map_set(self):
        self.expect("{")
        maps = []
        if not self.at("}"):
            while True:
                maps.append(self._map_expr())
                if not self.eat(","):
                    break
        self.expect("}")
        self.expect(";")
        return maps

    def _stmt_pushgeoloc(self):
        self.doc.push.extend(self._map_set())

    def _stmt_pullgeoloc(self):
        self.doc.pull.extend(self._map_set())

    def _stmt_mono(self):
        self.doc.mono.extend(self._map_set())

    def _stmt_acyclic(self):
        if self.eat("all"):
            self.expect(";")
            self.doc.acyclic_all = True
            return
        self.expect("(")
        a = self._map_expr()
        self.expect(",")
        b = self._map_expr()
        self.expect(")")
        self.expect(";")
        self.doc.acyclic_pairs.append((a, b))

    def _stmt_model(self):
        s = self.doc.session
        name = self._declare_name(self.expect_name())
        self.expect("{")
        spaces = {}
        maps = {}
        while not self.eat("}"):
            ent = self.expect_name()
            self.expect("=")
            self.expect("{")
            if ent.text in s.space_ids:
                spaces[ent.text] = self._label_list()
            elif ent.text in s.gen_ids:
                maps[ent.text] = self._label_table()
            else:
                self.fail("model entry %r is neither a declared space nor "
                          "a generator map" % ent.text, ent)
            self.expect("}")
            self.expect(";")
        self.eat(";")
        self.doc.models.append(
            FiniteFamilyModel(s, spaces, maps, name=name))

    def _label(self):
        tok = self.next()
        if tok.kind == "int":
            return int(tok.text)
        if tok.kind == "name" or tok.text == "*":
            return tok.text
        self.fail("expected a carrier label, found %r" % tok.text, tok)

    def _label_list(self):
        labels = []
        if not self.at("}"):
            while True:
                labels.append(self._label())
                if not self.eat(","):
                    break
        return labels

    def _label_table(self):
        table = {}
        if not self.at("}"):
            while True:
                src = self._label()
                self.expect("->")
                table[src] = self._label()
                if not self.eat(","):
                    break
        return table

    def _stmt_sgf(self):
        name = self._declare_name(self.expect_name())
        self.expect("=")
        w = self._sgf_expr()
        self.expect(";")
        self.doc.sgfs[name] = w

    def _stmt_sgnt(self):
        name = self._declare_name(self.expect_name())
        self.expect("=")
        t = self._sgnt_expr()
        self.expect(";")
        self.doc.sgnts[name] = t

    def _stmt_check(self):
        start = self.peek()
        lhs = self._sgnt_expr()
        self.expect("==")
        rhs = self._sgnt_expr()
        semi = self.expect(";")
        text = " ".join(self.src[start.pos:semi.pos].split())
        if lhs.src != rhs.src or lhs.dst != rhs.dst:
            self.fail("check endpoints differ: left is %r -> %r, right is "
                      "%r -> %r" % (lhs.src, lhs.dst, rhs.src, rhs.dst),
                      start)
        self.doc.checks.append((text, lhs, rhs, start.line))

    def _stmt_roof(self):
        tok = self.expect_name()
        self.expect(";")
        if tok.text not in self.doc.sgfs:
            self.fail("unknown word %r" % tok.text, tok)
        self.doc.roofs.append((tok.text, tok.line))

    def _stmt_render(self):
        tok = self.expect_name()
        if tok.text not in self.doc.sgnts:
            self.fail("unknown term %r" % tok.text, tok)
        self.expect(">")
        path = self.raw_until_semi()
        if not path:
            self.fail("render needs an output path", tok)
        self.doc.renders.append((tok.text, path, tok.line))

    # ------------------------------------------------------------------
    # references and expressions

    def _space_ref(self):
        tok = self.expect_name()
        sp = self.doc.session.named_spaces.get(tok.text)
        if sp is None:
            self.fail("unknown space %r" % tok.text, tok)
        return sp

    def _map_expr(self):
        return self._map_path()

    def _map_path(self):
        m = self._map_atom()
        while self.eat("."):
            tok = self.peek()
            n = self._map_atom()
            if m.dst is not n.src:
                self.fail("cannot compose: the first factor lands in %s but "
                          "the next leaves from %s"
                          % (m.dst.label(), n.src.label()), tok)
            m = m.then(n)
        return m

    def _map_atom(self):
        if self.eat("("):
            m = self._map_path()
            self.expect(")")
            return m
        tok = self.expect_name()
        if tok.text == "id":
            self.expect("(")
            sp = self._space_ref()
            self.expect(")")
            return self.doc.session.identity(sp)
        if tok.text == "terminal" and self.at("("):
            self.next()
            sp = self._space_ref()
            self.expect(")")
            return self.doc.session.terminal(sp)
        if tok.text == "induced" and self.at("("):
            self.next()
            sq_tok = self.expect_name()
            sq = self.doc.squares.get(sq_tok.text)
            if sq is None:
                self.fail("unknown pullback %r" % sq_tok.text, sq_tok)
            self.expect(",")
            u = self._map_expr()
            self.expect(",")
            v = self._map_expr()
            self.expect(")")
            return self.doc.session.induced(sq, u, v)
        m = self.doc.session.named_maps.get(tok.text)
        if m is None:
            self.fail("unknown map %r" % tok.text, tok)
        return m

    # sgf words ---------------------------------------------------------

    def _sgf_expr(self):
        s = self.doc.session
        if (self.at("id") and self.peek(1).text == "("
                and not self._paren_is_letter(self.i + 1)):
            self.next()
            self.next()
            sp = self._space_ref()
            self.expect(")")
            return word(s, (), base=sp)
        letters = [self._letter()]
        while self._starts_letter():
            letters.append(self._letter())
        return self._chain(letters)

    def _starts_letter(self):
        tok = self.peek()
        if tok.kind == "name":
            if tok.text in ("id", "terminal", "induced") and self.peek(1).text == "(":
                return self._paren_is_letter(self.i + 1)
            return self.peek(1).text in ("_*", "^*")
        if tok.text == "(":
            return self._paren_is_letter()
        return False

    def _letter(self):
        """A single word letter; composite maps must be parenthesised."""
        if self.eat("("):
            m = self._map_path()
            self.expect(")")
        else:
            m = self._map_atom()
        var = self.next()
        if var.text == "_*":
            return lower(m)
        if var.text == "^*":
            return upper(m)
        self.fail("expected '_*' or '^*' after a map, found %r"
                  % (var.text or "end of file"), var)

    def _chain(self, letters):
        for a, b in zip(letters, letters[1:]):
            if a.in_space is not b.out_space:
                self.fail("cannot chain %r onto %r: %r continues from %s "
                          "but %r arrives at %s"
                          % (a, b, a, a.in_space.label(),
                             b, b.out_space.label()))
        return word(self.doc.session, tuple(letters))

    def _paren_is_letter(self, start=None):
        """Does the parenthesis at ``start`` close into a _* or ^* marker?"""
        j = self.i if start is None else start
        depth = 0
        while j < len(self.toks) and self.toks[j].kind != "end":
            t = self.toks[j].text
            if t == "(":
                depth += 1
            elif t == ")":
                depth -= 1
                if depth == 0:
                    return self.toks[j + 1].text in ("_*", "^*")
            j += 1
        self.fail("unbalanced parenthesis")

    # sgnt terms --------------------------------------------------------

    def _sgnt_expr(self):
        t = self._sgnt_group()
        while self.eat("."):
            tok = self.peek()
            nxt = self._sgnt_group()
            if t.dst != nxt.src:
                self.fail("cannot stack terms: the first ends at %r but the "
                          "next starts at %r" % (t.dst, nxt.src), tok)
            t = t.then(nxt)
        return t

    def _sgnt_group(self):
        if self.at("(") and not self._paren_is_letter():
            self.next()
            t = self._group_body()
            self.expect(")")
            return t
        return self._group_body(single=True)

    def _group_body(self, single=False):
        s = self.doc.session
        pres = []
        core = None
        posts = []
        while True:
            tok = self.peek()
            if tok.kind == "end" or tok.text in (")", ";", ".", "=="):
                break
            item = self._group_item()
            if isinstance(item, tuple):
                (posts if core is not None else pres).append(item[1])
            elif core is None:
                core = item
            else:
                self.fail("a group may contain at most one cell or term",
                          tok)
            if single and core is None and len(pres) == 1:
                break
            if single and core is not None:
                break
        if core is None:
            if not pres:
                self.fail("empty term group")
            return SgntTerm.identity(self._chain(pres))
        if isinstance(core, BasicCell):
            left = self._chain(pres) if pres else None
            right = self._chain(posts) if posts else None
            return SgntTerm.of_cell(core, left=left, right=right)
        t = core
        if pres:
            t = t.whisker_left(self._chain(pres))
        if posts:
            t = t.whisker_right(self._chain(posts))
        return t

    def _group_item(self):
        """A letter ('letter', Term), a cell, or a whole SgntTerm."""
        tok = self.peek()
        if tok.text == "(":
            if self._paren_is_letter():
                return ("letter", self._letter())
            self.fail("nested groups are not allowed; split the statement",
                      tok)
        if tok.kind != "name":
            self.fail("unexpected %r in a term" % tok.text, tok)
        if (tok.text == "id" and self.peek(1).text == "("
                and not self._paren_is_letter(self.i + 1)):
            self.next()
            self.next()
            w = self._id_argument()
            self.expect(")")
            return SgntTerm.identity(w)
        if tok.text in ("unit", "counit", "bc") and self.peek(1).text == "(":
            return self._cell_call()
        if tok.text in ("comp", "triv") and self.peek(1).text in ("_*", "^*"):
            return self._cell_call()
        if self._starts_letter():
            return ("letter", self._letter())
        if tok.text in self.doc.sgnts:
            self.next()
            return self.doc.sgnts[tok.text]
        self.fail("unknown term %r" % tok.text, tok)

    def _id_argument(self):
        s = self.doc.session
        tok = self.peek()
        if (tok.kind == "name" and tok.text in self.doc.sgfs
                and self.peek(1).text == ")"):
            self.next()
            return self.doc.sgfs[tok.text]
        if (tok.kind == "name" and tok.text in s.named_spaces
                and self.peek(1).text == ")"):
            self.next()
            return word(s, (), base=s.named_spaces[tok.text])
        return self._sgf_expr()

    def _cell_call(self):
        s = self.doc.session
        kw = self.next()
        kind = kw.text
        if kind in ("comp", "triv"):
            kind += "_lower" if self.next().text == "_*" else "_upper"
        self.expect("(")
        if kind in ("unit", "counit"):
            cell = getattr(BasicCell, kind)(self._map_expr())
        elif kind.startswith("comp"):
            f = self._map_expr()
            self.expect(",")
            g = self._map_expr()
            cell = getattr(BasicCell, kind)(f, g)
        elif kind.startswith("triv"):
            cell = getattr(BasicCell, kind)(s, self._space_ref())
        else:
            cell = BasicCell.bc(s, self._square_ref())
        self.expect(")")
        if self.eat("'"):
            if cell.kind in FREE_INVERTIBLE:
                cell = cell.inverse()
            else:
                cell = cell.inverse(cert="claimed")
        return cell

    def _square_ref(self):
        tok = self.peek()
        if tok.text == "pullback" and self.peek(1).text == "(":
            self.next()
            self.next()
            f = self._map_expr()
            self.expect(",")
            g = self._map_expr()
            self.expect(")")
            return self.doc.session.pullback(f, g)
        tok = self.expect_name()
        sq = self.doc.squares.get(tok.text)
        if sq is None:
            self.fail("unknown pullback %r" % tok.text, tok)
        return sq


def parse(source):
    """Parse a session file into a Document."""
    doc = Document()
    _Parser(doc, source).run()
    return doc


# ----------------------------------------------------------------------
# writing terms back out


def map_source(m):
    """A re-parseable expression for a map, when one exists."""
    s = m.session
    name = s.map_name(m)
    if name is not None:
        return name
    if m.is_identity():
        return "id(%s)" % space_source(m.src)
    if len(m.coords) == 1 and m.src.is_atom():
        _, gens = m.coords[0]
        if gens:
            return "(" + " . ".join(s.gen_names[g] for g in gens) + ")"
    if not m.coords and m.dst is s.point():
        return "terminal(%s)" % space_source(m.src)
    raise ParseError("map %r has no written form; bind it with a map "
                     "statement first" % m)


def space_source(sp):
    name = sp.label()
    if name in sp.session.named_spaces:
        return name
    raise ParseError("space %s has no written form; declare it as a "
                     "pullback first" % name)


def word_source(w):
    if not len(w):
        return "id(%s)" % space_source(w.src_space)
    return " ".join(map_source(t.map) + ("_*" if t.lower else "^*")
                    for t in w.terms)


def cell_source(cell):
    kind = cell.kind
    if kind == "bc":
        sq, = cell.params
        if sq.name is not None:
            body = "bc(%s)" % sq.name
        else:
            body = "bc(pullback(%s, %s))" % (map_source(sq.f),
                                             map_source(sq.g))
    elif kind.startswith("comp"):
        f, g = cell.params
        body = "comp%s(%s, %s)" % ("_*" if kind.endswith("lower") else "^*",
                                   map_source(f), map_source(g))
    elif kind.startswith("triv"):
        body = "triv%s(%s)" % ("_*" if kind.endswith("lower") else "^*",
                               space_source(cell.params[0]))
    else:
        body = "%s(%s)" % (kind, map_source(cell.params[0]))
    return body + ("'" if cell.inverted else "")


def term_source(t):
    """A re-parseable expression for a transformation term."""
    if not t.layers:
        return "id(%s)" % word_source(t.src)
    groups = []
    for layer in t.layers:
        parts = []
        if len(layer.left):
            parts.append(word_source(layer.left))
        parts.append(cell_source(layer.cell))
        if len(layer.right):
            parts.append(word_source(layer.right))
        groups.append("(" + " ".join(parts) + ")")
    return " . ".join(groups)


# ----------------------------------------------------------------------
# commands


def _load(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            source = fh.read()
    except OSError as exc:
        raise ParseError(str(exc))
    return parse(source)


def _named_term(doc, name):
    t = doc.sgnts.get(name)
    if t is None:
        raise ParseError("no term named %r in the file" % name)
    return t


def cmd_check(doc, opts):
    if not doc.checks:
        print("no check statements")
        return 0
    structure = doc.structure()
    results = []
    worst = 0
    for k, (text, lhs, rhs, line) in enumerate(doc.checks, start=1):
        v = decide_equal(lhs, rhs, structure,
                         trials=opts.trials, seed=opts.seed)
        results.append({"check": text, "line": line, **v.to_json()})
        if v.kind == "unequal":
            worst = 1
        elif v.kind == "unknown" and worst != 1:
            worst = 2
        if opts.json:
            continue
        rule = v.proof.get("rule") if v.proof else v.trace[-1]
        print("check %d: %s: %s  [%s]" % (k, text, v.kind, rule))
        if v.kind == "unequal":
            print("  separating family at element %s: %s != %s"
                  % (json.dumps(v.witness["element"]),
                     v.witness["lhs"]["entries"],
                     v.witness["rhs"]["entries"]))
        if v.kind != "equal":
            for d in v.diagnostics:
                print("  hypothesis %r not established (%s): %s"
                      % (d["hypothesis"], d.get("term", "goal"),
                         d.get("detail", "")))
        if opts.trace:
            print("  trace: %s" % " -> ".join(v.trace))
    if opts.json:
        print(json.dumps(results, indent=2, sort_keys=True))
    return worst


def cmd_normalize(doc, opts):
    name = opts.name
    if name in doc.sgfs:
        reduced, _ = alternating_reduce(doc.sgfs[name])
        print(word_source(reduced))
        return 0
    t = _named_term(doc, name)
    try:
        canon = sgnt0_canonicalize(t)
    except GfcError:
        canon = t  # no normal form outside the ordered fragment
    print(term_source(canon))
    return 0


def cmd_roof(doc, opts):
    names = [opts.name] if opts.name else [n for n, _ in doc.roofs]
    if not names:
        raise ParseError("no roof statements and no word named")
    out = []
    for name in names:
        w = doc.sgfs.get(name)
        if w is None:
            raise ParseError("no word named %r in the file" % name)
        data = roof(w)
        out.append({"word": name, "apex": data.apex.label(),
                    "a": repr(data.a), "b": repr(data.b),
                    "roof": repr(data.as_sgf)})
    if opts.json:
        print(json.dumps(out, indent=2, sort_keys=True))
    else:
        for rec in out:
            print("roof of %s" % rec["word"])
            print("  apex: %s" % rec["apex"])
            print("  direct leg a: %s" % rec["a"])
            print("  inverse leg b: %s" % rec["b"])
            print("  word: %s" % rec["roof"])
    return 0


def cmd_render(doc, opts):
    if opts.name:
        targets = [(opts.name, opts.output)]
        if not opts.output:
            raise ParseError("render needs -o when a term is named")
    else:
        targets = [(name, path) for name, path, _ in doc.renders]
        if not targets:
            raise ParseError("no render statements and no term named")
        if opts.output:
            if len(targets) > 1:
                raise ParseError("-o with several render statements is "
                                 "ambiguous")
            targets = [(targets[0][0], opts.output)]
    for name, path in targets:
        term = _named_term(doc, name)
        try:
            render_to_file(term, path, labels=opts.labels,
                           doubled=not opts.single_lines)
        except OSError as exc:
            raise ParseError(str(exc))
        print("wrote %s" % path)
    return 0


def main(argv=None):
    ap = argparse.ArgumentParser(
        prog="gfc",
        description="check, normalise and draw push/pull functor calculus")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="run the file's check statements")
    p.add_argument("file")
    p.add_argument("--trials", type=int, default=100,
                   help="finite model search budget (default 100)")
    p.add_argument("--seed", type=int, default=0,
                   help="random seed for the model search")
    p.add_argument("--trace", action="store_true",
                   help="print the decision rungs that were tried")
    p.add_argument("--json", action="store_true",
                   help="emit verdicts as JSON")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("normalize", help="print a canonical form")
    p.add_argument("file")
    p.add_argument("name")
    p.set_defaults(fn=cmd_normalize)

    p = sub.add_parser("roof", help="print roof factorisation data")
    p.add_argument("file")
    p.add_argument("name", nargs="?")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_roof)

    p = sub.add_parser("render", help="write an SVG string diagram")
    p.add_argument("file")
    p.add_argument("name", nargs="?")
    p.add_argument("-o", "--output")
    p.add_argument("--labels", action="store_true",
                   help="draw edge and cell labels")
    p.add_argument("--single-lines", action="store_true",
                   help="disable the doubled-line convention")
    p.set_defaults(fn=cmd_render)

    try:
        opts = ap.parse_args(argv)
    except SystemExit as exc:  # keep exit 2 reserved for unknown verdicts
        return 0 if exc.code in (0, None) else 3
    try:
        doc = _load(opts.file)
        return opts.fn(doc, opts)
    except GfcError as exc:
        print("gfc: error: %s" % exc, file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
