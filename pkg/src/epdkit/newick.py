"""Newick reading and writing.

Supports nested parentheses, ``label:length`` pairs, optional internal node
labels, single-quoted labels and ``[...]`` comments. Every non-root arc
must carry a branch length.
"""

from __future__ import annotations

from .tree import Phylogeny, TreeError, build_tree

_PUNCT = set("(),:;[")
_QUOTE_NEEDED = set("()[]':;, \t\n")


class NewickError(TreeError):
    """Malformed Newick text; carries the 1-based line and column."""

    def __init__(self, message: str, text: str, offset: int):
        line = text.count("\n", 0, offset) + 1
        col = offset - (text.rfind("\n", 0, offset) + 1) + 1
        super().__init__(f"line {line}, column {col}: {message}")
        self.line = line
        self.column = col


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.i = 0

    def error(self, msg, at=None):
        return NewickError(msg, self.text, self.i if at is None else at)

    def skip(self):
        t = self.text
        while self.i < len(t):
            c = t[self.i]
            if c.isspace():
                self.i += 1
            elif c == "[":
                end = t.find("]", self.i)
                if end < 0:
                    raise self.error("unterminated comment")
                self.i = end + 1
            else:
                break

    def peek(self) -> str:
        self.skip()
        return self.text[self.i] if self.i < len(self.text) else ""

    def expect(self, c: str):
        if self.peek() != c:
            got = self.peek() or "end of input"
            raise self.error(f"expected {c!r}, found {got!r}")
        self.i += 1

    def label(self) -> str | None:
        self.skip()
        t = self.text
        if self.i < len(t) and t[self.i] == "'":
            start = self.i
            self.i += 1
            out = []
            while True:
                if self.i >= len(t):
                    raise self.error("unterminated quoted label", start)
                c = t[self.i]
                if c == "'":
                    if t[self.i + 1 : self.i + 2] == "'":
                        out.append("'")
                        self.i += 2
                        continue
                    self.i += 1
                    return "".join(out)
                out.append(c)
                self.i += 1
        start = self.i
        while self.i < len(t) and t[self.i] not in _PUNCT and not t[self.i].isspace():
            self.i += 1
        return t[start : self.i] or None

    def length(self) -> float | None:
        if self.peek() != ":":
            return None
        self.i += 1
        self.skip()
        start = self.i
        t = self.text
        while self.i < len(t) and t[self.i] not in _PUNCT and not t[self.i].isspace():
            self.i += 1
        tok = t[start : self.i]
        try:
            x = float(tok)
        except ValueError:
            x = float("nan")
        if not x >= 0 or x == float("inf"):
            raise self.error(f"invalid branch length {tok!r}", start)
        return x


def parse_newick(text: str) -> Phylogeny:
    """Parse one Newick tree.

    Leaves become species ``0..n-1`` in left-to-right order.

    Raises
    ------
    NewickError
        Syntax errors, missing branch lengths, unary nodes, unlabeled or
        duplicated leaves, with the offending position.
    """
    sc = _Scanner(text)
    parents: list[int] = []
    lengths: list[float] = []
    labels: list[str | None] = []
    starts: list[int] = []
    nkids: list[int] = []

    def new_node(parent: int) -> int:
        parents.append(parent)
        lengths.append(0.0)
        labels.append(None)
        starts.append(sc.i)
        nkids.append(0)
        if parent >= 0:
            nkids[parent] += 1
        return len(parents) - 1

    def finish(node: int):
        sc.skip()
        at = sc.i
        labels[node] = sc.label()
        ln = sc.length()
        if ln is None:
            if parents[node] >= 0:
                raise sc.error("missing branch length", at)
        else:
            lengths[node] = ln
        if nkids[node] == 1:
            raise sc.error("node with exactly one child", at)
        if nkids[node] == 0 and not labels[node]:
            raise sc.error("unlabeled leaf", at)

    if sc.peek() != "(":
        raise sc.error("expected '(' at start of tree")
    # iterative descent so deep caterpillars do not hit the recursion limit
    stack = [new_node(-1)]
    sc.i += 1
    while True:
        c = sc.peek()
        if c == "(":
            stack.append(new_node(stack[-1]))
            sc.i += 1
            continue
        if c in (",", ")", ""):
            raise sc.error("empty subtree" if c else "unexpected end of input")
        leaf = new_node(stack[-1])
        finish(leaf)
        while True:
            c = sc.peek()
            if c == ",":
                sc.i += 1
                break
            if c == ")":
                sc.i += 1
                node = stack.pop()
                finish(node)
                if not stack:
                    break
                continue
            raise sc.error(f"unexpected {c!r}" if c else "unexpected end of input")
        if not stack:
            break
        if sc.peek() == "(":
            continue
    sc.expect(";")
    if sc.peek():
        raise sc.error("trailing text after ';'")

    is_leaf = [k == 0 for k in nkids]
    leaf_labels = [labels[v] for v in range(len(parents)) if is_leaf[v]]
    seen = set()
    for v in range(len(parents)):
        if is_leaf[v]:
            if labels[v] in seen:
                raise NewickError(f"duplicate leaf label {labels[v]!r}", text, starts[v])
            seen.add(labels[v])
    return build_tree(parents, lengths, leaf_labels, labels)


def _fmt_label(s: str) -> str:
    if any(c in _QUOTE_NEEDED for c in s):
        return "'" + s.replace("'", "''") + "'"
    return s


def _fmt_length(x: float) -> str:
    return format(float(x), ".17g")


def write_newick(tree: Phylogeny) -> str:
    """Canonical Newick text.

    Children are ordered by the smallest species index below them and lengths
    are written with 17 significant digits, so parsing the output restores
    every length exactly.
    """
    m = tree.n_nodes
    first = [0] * m
    for v in range(m - 1, -1, -1):
        if tree.is_leaf(v):
            first[v] = tree.species_of(v)
        else:
            first[v] = min(first[c] for c in tree.children(v))

    parts: list[str] = []
    # explicit stack of (node, state); state 0 = open, 1 = close
    stack: list[tuple[int, int]] = [(0, 0)]
    while stack:
        v, state = stack.pop()
        if state == 0 and not tree.is_leaf(v):
            parts.append("(")
            stack.append((v, 1))
            kids = sorted(tree.children(v), key=first.__getitem__)
            for j, c in enumerate(reversed(kids)):
                stack.append((c, 0))
                if j < len(kids) - 1:
                    stack.append((-1, 2))
            continue
        if v == -1:
            parts.append(",")
            continue
        if state == 1:
            parts.append(")")
        lab = tree.node_labels[v]
        if lab:
            parts.append(_fmt_label(lab))
        if v != 0:
            parts.append(":" + _fmt_length(tree.length[v]))
    parts.append(";")
    return "".join(parts)


def read_newick(path) -> Phylogeny:
    with open(path, encoding="utf-8") as fh:
        return parse_newick(fh.read())
