"""Graph-manifold descriptions: circle bundles, connected sums, plumbings.

A closed orientable 3-manifold enters the toolkit in one of three forms:

* ``Bundle(genus, euler)`` -- a circle bundle over the closed orientable
  surface of that genus, classified by its Euler number;
* ``Sum(parts)`` -- a connected sum of two or more descriptions;
* ``Plumbed(pieces, edges)`` -- trivial circle bundles over compact surfaces
  with boundary, glued along boundary tori by unimodular 2x2 matrices.

Each boundary torus carries the ordered basis (boundary curve, fiber), written
(d, f).  A gluing matrix G lists the images of the source basis in the target
basis as its *rows*: the source curve a*d + b*f is identified with the target
curve (a, b) @ G.  With that convention the fiber-preserving mapping classes
of the torus, which send d to d + j*f and fix f, are the upper-triangular
matrices produced by :func:`twist_matrix`.

The module also provides the DSL parser used by the command line and service
front ends, and :func:`canonical_representation`, which exhibits a genus-zero
tree of pieces for the family of manifolds where the toolkit knows how to
build one.
"""

from __future__ import annotations

from dataclasses import dataclass

from .intlat import IntMatrix


class ParseError(ValueError):
    """Syntax or structural error in a manifold description, with position."""

    def __init__(self, message, line, column):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
        self.message = message


@dataclass(frozen=True)
class Bundle:
    """Circle bundle over the closed orientable surface of genus ``genus``."""

    genus: int
    euler: int

    def __post_init__(self):
        if self.genus < 0:
            raise ValueError("genus must be nonnegative")


@dataclass(frozen=True)
class Sum:
    """Connected sum of two or more descriptions."""

    parts: tuple

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))
        if len(self.parts) < 2:
            raise ValueError("a connected sum needs at least two parts")


def sum_of(parts):
    """Connected sum, normalizing the one-part case away."""
    parts = list(parts)
    if not parts:
        raise ValueError("empty connected sum")
    if len(parts) == 1:
        return parts[0]
    return Sum(tuple(parts))


@dataclass(frozen=True)
class Piece:
    """Trivial circle bundle over the compact orientable surface S_{g,b}.

    Its first homology is free of rank 2g + (b-1) + 1 with the designated
    basis x1, y1, ..., xg, yg, d1, ..., d_{b-1}, f; the omitted boundary class
    satisfies d_b = -(d_1 + ... + d_{b-1}), which is 0 when b = 1.
    """

    genus: int
    boundary_count: int

    def __post_init__(self):
        if self.genus < 0:
            raise ValueError("piece genus must be nonnegative")
        if self.boundary_count < 1:
            raise ValueError("piece needs at least one boundary circle")

    @property
    def h1_rank(self):
        return 2 * self.genus + self.boundary_count


@dataclass(frozen=True)
class GluingEdge:
    """Identification of two boundary tori.

    ``source`` and ``target`` are (piece index, boundary index) with boundary
    indices 1-based.  ``matrix`` is 2x2 with |det| = 1; rows are the images of
    the source (d, f) basis in the target (d, f) basis.
    """

    source: tuple
    target: tuple
    matrix: IntMatrix

    def __post_init__(self):
        if self.matrix.rows != 2 or self.matrix.cols != 2:
            raise ValueError("gluing matrix must be 2x2")
        if abs(self.matrix.det()) != 1:
            raise ValueError(f"gluing matrix must have |det| = 1, got {self.matrix.det()}")
        if self.source == self.target:
            raise ValueError("an edge cannot glue a boundary torus to itself")


@dataclass(frozen=True)
class Plumbed:
    pieces: tuple
    edges: tuple

    def __post_init__(self):
        object.__setattr__(self, "pieces", tuple(self.pieces))
        object.__setattr__(self, "edges", tuple(self.edges))
        if not self.pieces:
            raise ValueError("a plumbing needs at least one piece")
        slots = {}
        for e in self.edges:
            for slot in (e.source, e.target):
                pi, b = slot
                if not (0 <= pi < len(self.pieces)):
                    raise ValueError(f"edge refers to unknown piece {pi}")
                if not (1 <= b <= self.pieces[pi].boundary_count):
                    raise ValueError(
                        f"piece {pi} has no boundary {b} "
                        f"(it has {self.pieces[pi].boundary_count})")
                if slot in slots:
                    raise ValueError(f"boundary slot {slot} used by more than one edge")
                slots[slot] = e
        for pi, p in enumerate(self.pieces):
            for b in range(1, p.boundary_count + 1):
                if (pi, b) not in slots:
                    raise ValueError(f"boundary slot ({pi}, {b}) is not glued")
        # Connectivity of the piece/edge graph.
        seen = {0}
        frontier = [0]
        adj = {i: set() for i in range(len(self.pieces))}
        for e in self.edges:
            adj[e.source[0]].add(e.target[0])
            adj[e.target[0]].add(e.source[0])
        while frontier:
            cur = frontier.pop()
            for nxt in adj[cur]:
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
        if len(seen) != len(self.pieces):
            raise ValueError("plumbing graph is not connected")

    @property
    def cycle_rank(self):
        """First Betti number of the piece/edge graph (connected)."""
        return len(self.edges) - len(self.pieces) + 1


ManifoldExpr = (Bundle, Sum, Plumbed)


@dataclass(frozen=True)
class RepresentationGraph:
    """A decomposition graph exhibited as a witness.

    Wraps the underlying plumbing; ``all_genus_zero`` records that every
    vertex is a circle bundle over a genus-zero surface (disk, annulus, pair
    of pants, ...), which is what the tree criterion requires.
    """

    plumbed: Plumbed
    all_genus_zero: bool

    @property
    def vertex_count(self):
        return len(self.plumbed.pieces)

    @property
    def edge_count(self):
        return len(self.plumbed.edges)

    @property
    def is_tree(self):
        if self.plumbed.cycle_rank != 0:
            return False
        return all(e.source[0] != e.target[0] for e in self.plumbed.edges)


def twist_matrix(j) -> IntMatrix:
    """Matrix of the fiber-preserving torus mapping class d -> d + j*f."""
    return IntMatrix.from_rows([[1, j], [0, 1]])


def apply_to_curve(matrix: IntMatrix, curve):
    """Image of the curve a*d + b*f under a gluing matrix (row convention)."""
    a, b = curve
    return (a * matrix.data[0][0] + b * matrix.data[1][0],
            a * matrix.data[0][1] + b * matrix.data[1][1])


_SWAP = ((0, 1), (1, 0))


def lower_bundle(genus, euler) -> Plumbed:
    """Two-piece plumbing presenting Bundle(genus, euler).

    The surface minus a disk carries a trivial circle bundle; so does the
    removed disk.  Regluing the two boundary tori by the twist of the Euler
    number reproduces the bundle, and the resulting two-vertex graph is the
    oracle form used to cross-check the closed-form homology.
    """
    return Plumbed(
        pieces=(Piece(genus, 1), Piece(0, 1)),
        edges=(GluingEdge((0, 1), (1, 1), twist_matrix(euler)),),
    )


def _flatten_bundles(expr):
    """Leaves of nested sums, or None if some leaf is not a bundle."""
    if isinstance(expr, Bundle):
        return [expr]
    if isinstance(expr, Sum):
        out = []
        for p in expr.parts:
            leaves = _flatten_bundles(p)
            if leaves is None:
                return None
            out.extend(leaves)
        return out
    return None


def sum_plumbing(bundles) -> Plumbed:
    """Plumbing presenting a connected sum of two or more circle bundles.

    Shape: a chain of pair-of-pants pieces with n + 1 open slots.  One slot
    leads through a collar annulus to a solid torus that fills the fiber
    direction; filling along the fiber splits the pants chain into a
    connected sum of n solid tori.  The remaining n slots are capped so that
    the i-th solid torus becomes the i-th summand: the cap over a genus-g
    summand is a Piece(g, 1) glued so that its boundary curve minus
    euler * fiber bounds, exactly as in :func:`lower_bundle`.
    """
    bundles = list(bundles)
    n = len(bundles)
    if n < 2:
        raise ValueError("need at least two summands")
    pants = [Piece(0, 3) for _ in range(n - 1)]
    pieces = list(pants)
    edges = []
    # Chain the pants: slot 3 of each onto slot 1 of the next.
    for i in range(n - 2):
        edges.append(GluingEdge((i, 3), (i + 1, 1), IntMatrix.identity(2)))
    open_slots = [(0, 1), (0, 2)]
    open_slots += [(i, 2) for i in range(1, n - 1)]
    open_slots.append((n - 2, 3))
    # Summand caps on the first n slots.
    for i, b in enumerate(bundles):
        cap_index = len(pieces)
        pieces.append(Piece(b.genus, 1))
        cap_matrix = IntMatrix.from_rows([[b.euler, 1], [1, 0]])
        edges.append(GluingEdge((cap_index, 1), open_slots[i], cap_matrix))
    # Fiber-filling leg: collar annulus, then a solid torus killing f.
    annulus = len(pieces)
    pieces.append(Piece(0, 2))
    edges.append(GluingEdge(open_slots[n], (annulus, 1), IntMatrix.identity(2)))
    cap = len(pieces)
    pieces.append(Piece(0, 1))
    edges.append(GluingEdge((annulus, 2), (cap, 1), IntMatrix.from_rows(_SWAP)))
    return Plumbed(tuple(pieces), tuple(edges))


def canonical_representation(expr):
    """Genus-zero tree of pieces for ``expr``, or None when none is derived.

    Only witnesses are produced, never proofs of absence: a bundle over the
    sphere yields the two-vertex graph, a connected sum whose leaves are all
    bundles over the sphere yields the pants-chain graph, and a plumbing that
    already consists of genus-zero pieces with an acyclic graph is its own
    witness.  Everything else returns None (undecided).
    """
    if isinstance(expr, Bundle):
        if expr.genus != 0:
            return None
        return RepresentationGraph(lower_bundle(0, expr.euler), all_genus_zero=True)
    if isinstance(expr, Sum):
        leaves = _flatten_bundles(expr)
        if leaves is None or any(b.genus != 0 for b in leaves):
            return None
        return RepresentationGraph(sum_plumbing(leaves), all_genus_zero=True)
    if isinstance(expr, Plumbed):
        graph = RepresentationGraph(expr, all_genus_zero=all(
            p.genus == 0 for p in expr.pieces))
        if graph.all_genus_zero and graph.is_tree:
            return graph
        return None
    raise TypeError(f"not a manifold description: {expr!r}")


# --- DSL -------------------------------------------------------------------
#
#   expr    := bundle | sum | plumb
#   bundle  := "bundle(" INT "," INT ")"
#   sum     := "sum(" expr ("," expr)+ ")"
#   plumb   := "plumb{" piece+ edge* "}"
#   piece   := "piece" IDENT "(" INT "," INT ")" ";"
#   edge    := "edge" IDENT "." INT "-" IDENT "." INT "[" INT INT INT INT "]" ";"
#
# '#' comments to end of line, whitespace free-form, boundary indices 1-based.

_SYMBOLS = "(){}[],;.-"


class _Token:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind, text, line, col):
        self.kind = kind
        self.text = text
        self.line = line
        self.col = col


def _tokenize(text):
    tokens = []
    line, col = 1, 1
    i = 0
    while i < len(text):
        c = text[i]
        if c == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if c == "#":
            while i < len(text) and text[i] != "\n":
                i += 1
            continue
        start_col = col
        if c.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            tokens.append(_Token("int", text[i:j], line, start_col))
            col += j - i
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(_Token("ident", text[i:j], line, start_col))
            col += j - i
            i = j
            continue
        if c in _SYMBOLS:
            tokens.append(_Token(c, c, line, start_col))
            i += 1
            col += 1
            continue
        raise ParseError(f"unexpected character {c!r}", line, start_col)
    tokens.append(_Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def next(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, message, tok=None):
        tok = tok or self.peek()
        raise ParseError(message, tok.line, tok.col)

    def expect(self, kind, what=None):
        tok = self.peek()
        if tok.kind != kind:
            shown = tok.text if tok.kind != "eof" else "end of input"
            self.fail(f"expected {what or kind!r}, found {shown!r}", tok)
        return self.next()

    def parse_int(self):
        sign = 1
        if self.peek().kind == "-":
            self.next()
            sign = -1
        tok = self.expect("int", "an integer")
        return sign * int(tok.text)

    def parse_expr(self):
        tok = self.peek()
        if tok.kind != "ident":
            self.fail("expected 'bundle', 'sum' or 'plumb'", tok)
        if tok.text == "bundle":
            return self.parse_bundle()
        if tok.text == "sum":
            return self.parse_sum()
        if tok.text == "plumb":
            return self.parse_plumb()
        self.fail(f"unknown construction {tok.text!r}", tok)

    def parse_bundle(self):
        head = self.expect("ident")
        self.expect("(")
        gtok = self.peek()
        genus = self.parse_int()
        self.expect(",")
        euler = self.parse_int()
        self.expect(")")
        if genus < 0:
            raise ParseError("bundle genus must be nonnegative", gtok.line, gtok.col)
        del head
        return Bundle(genus, euler)

    def parse_sum(self):
        self.expect("ident")
        self.expect("(")
        parts = [self.parse_expr()]
        self.expect(",", "',' (a sum needs at least two parts)")
        parts.append(self.parse_expr())
        while self.peek().kind == ",":
            self.next()
            parts.append(self.parse_expr())
        self.expect(")")
        return Sum(tuple(parts))

    def parse_plumb(self):
        head = self.expect("ident")
        self.expect("{")
        names = {}
        pieces = []
        piece_tokens = []
        while self.peek().kind == "ident" and self.peek().text == "piece":
            self.next()
            name = self.expect("ident", "a piece name")
            if name.text in names:
                self.fail(f"duplicate piece name {name.text!r}", name)
            self.expect("(")
            gtok = self.peek()
            genus = self.parse_int()
            self.expect(",")
            btok = self.peek()
            boundary = self.parse_int()
            self.expect(")")
            self.expect(";")
            if genus < 0:
                raise ParseError("piece genus must be nonnegative", gtok.line, gtok.col)
            if boundary < 1:
                raise ParseError("piece boundary count must be >= 1", btok.line, btok.col)
            names[name.text] = len(pieces)
            pieces.append(Piece(genus, boundary))
            piece_tokens.append(name)
        if not pieces:
            self.fail("a plumbing needs at least one piece")

        def slot():
            name = self.expect("ident", "a piece name")
            if name.text not in names:
                self.fail(f"unknown piece {name.text!r}", name)
            self.expect(".")
            btok = self.expect("int", "a boundary index")
            b = int(btok.text)
            idx = names[name.text]
            if not (1 <= b <= pieces[idx].boundary_count):
                self.fail(
                    f"piece {name.text!r} has no boundary {b} "
                    f"(it has {pieces[idx].boundary_count})", btok)
            return (idx, b), btok

        used = {}
        edges = []
        while self.peek().kind == "ident" and self.peek().text == "edge":
            etok = self.next()
            src, stok = slot()
            self.expect("-")
            dst, dtok = slot()
            self.expect("[")
            entries = [self.parse_int() for _ in range(4)]
            close = self.expect("]")
            self.expect(";")
            matrix = IntMatrix.from_rows([entries[:2], entries[2:]])
            if abs(matrix.det()) != 1:
                raise ParseError(
                    f"gluing matrix must have determinant +-1, got {matrix.det()}",
                    close.line, close.col)
            if src == dst:
                self.fail("an edge cannot glue a slot to itself", dtok)
            for s, tok in ((src, stok), (dst, dtok)):
                if s in used:
                    self.fail("boundary slot used twice", tok)
                used[s] = True
            edges.append(GluingEdge(src, dst, matrix))
            del etok
        close = self.expect("}")
        for idx, p in enumerate(pieces):
            for b in range(1, p.boundary_count + 1):
                if (idx, b) not in used:
                    tok = piece_tokens[idx]
                    raise ParseError(
                        f"boundary {b} of piece {tok.text!r} is not glued",
                        tok.line, tok.col)
        try:
            plumbed = Plumbed(tuple(pieces), tuple(edges))
        except ValueError as exc:
            raise ParseError(str(exc), close.line, close.col) from None
        del head
        return plumbed


def parse(text) -> "Bundle | Sum | Plumbed":
    """Parse one manifold description, raising ParseError with positions."""
    parser = _Parser(text)
    expr = parser.parse_expr()
    tok = parser.peek()
    if tok.kind != "eof":
        parser.fail(f"unexpected trailing input {tok.text!r}", tok)
    return expr


def render(expr) -> str:
    """Deterministic DSL text for a description; parse(render(m)) == m."""
    if isinstance(expr, Bundle):
        return f"bundle({expr.genus},{expr.euler})"
    if isinstance(expr, Sum):
        return "sum(" + ", ".join(render(p) for p in expr.parts) + ")"
    if isinstance(expr, Plumbed):
        out = ["plumb{"]
        for i, p in enumerate(expr.pieces):
            out.append(f" piece p{i + 1}({p.genus},{p.boundary_count});")
        for e in expr.edges:
            m = e.matrix.data
            out.append(
                f" edge p{e.source[0] + 1}.{e.source[1]}-p{e.target[0] + 1}.{e.target[1]}"
                f" [{m[0][0]} {m[0][1]} {m[1][0]} {m[1][1]}];")
        out.append(" }")
        return "".join(out)
    raise TypeError(f"not a manifold description: {expr!r}")
