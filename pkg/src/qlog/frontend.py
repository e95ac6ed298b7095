"""SQL text -> labeled, ordered abstract syntax trees.

Covers a generic SQL subset: SELECT with joins (incl. LEFT JOIN ... ON),
WHERE predicates built from AND/OR/NOT, comparisons, IN / NOT IN lists,
IS [NOT] NULL, LIKE and function calls, GROUP BY, ORDER BY ASC/DESC, LIMIT,
top-level UNION [ALL], plus shallow INSERT / UPDATE / DELETE statements.
Keywords and identifiers are case-insensitive and normalized to lower case;
constant leaves are flagged so they can later be abstracted to "?".

Node labels are drawn from a fixed grammar-atom vocabulary; identifier and
constant text lives in the node payload, never in the atom tag.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

# Grammar-atom vocabulary. Structural tags carry no payload; IDENT and CONST
# leaves carry their text in AstNode.text.
SELECT = "SELECT"
DISTINCT = "DISTINCT"
COLS = "COLS"
COL_ID = "COL_ID"
STAR = "STAR"
FROM = "FROM"
TABLE_REF = "TABLE_REF"
ALIAS = "ALIAS"
JOIN = "JOIN"
LEFT_JOIN = "LEFT_JOIN"
RIGHT_JOIN = "RIGHT_JOIN"
CROSS_JOIN = "CROSS_JOIN"
ON = "ON"
WHERE = "WHERE"
GROUP_BY = "GROUP_BY"
ORDER_BY = "ORDER_BY"
SORT_KEY = "SORT_KEY"
ASC = "ASC"
DESC = "DESC"
LIMIT = "LIMIT"
UNION = "UNION"
UNION_ALL = "UNION_ALL"
INSERT = "INSERT"
VALUES = "VALUES"
ROW = "ROW"
UPDATE = "UPDATE"
SET_LIST = "SET_LIST"
ASSIGN = "ASSIGN"
DELETE = "DELETE"
AND = "AND"
OR = "OR"
NOT = "NOT"
EQUALS = "EQUALS"
NOT_EQUALS = "NOT_EQUALS"
LESS = "LESS"
LESS_EQ = "LESS_EQ"
GREATER = "GREATER"
GREATER_EQ = "GREATER_EQ"
IN = "IN"
NOT_IN = "NOT_IN"
LIKE = "LIKE"
NOT_LIKE = "NOT_LIKE"
IS_NULL = "IS_NULL"
IS_NOT_NULL = "IS_NOT_NULL"
IN_LIST = "IN_LIST"
FUNC_CALL = "FUNC_CALL"
NULL_LIT = "NULL_LIT"
IDENT = "IDENT"
CONST = "CONST"

ATOMS = frozenset(
    v
    for k, v in list(globals().items())
    if k.isupper() and isinstance(v, str) and v == k
)

#: Binary comparison operators, plus membership tests, in "op family" order.
COMPARISON_ATOMS = frozenset(
    {EQUALS, NOT_EQUALS, LESS, LESS_EQ, GREATER, GREATER_EQ}
)
JOIN_ATOMS = frozenset({JOIN, LEFT_JOIN, RIGHT_JOIN, CROSS_JOIN})
CONNECTIVE_ATOMS = frozenset({AND, OR})
PREDICATE_HOSTS = frozenset({WHERE, ON})

STATEMENT_KINDS = ("SELECT", "INSERT", "UPDATE", "DELETE", "UNION", "OTHER")

_COMPARE_OPS = {
    "=": EQUALS,
    "!=": NOT_EQUALS,
    "<>": NOT_EQUALS,
    "<": LESS,
    "<=": LESS_EQ,
    ">": GREATER,
    ">=": GREATER_EQ,
}

_KEYWORDS = frozenset(
    """select distinct from where group order by asc desc limit union all
    insert into values update set delete join inner left right outer cross on
    and or not in is null like as""".split()
)


class SqlSyntaxError(Exception):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at offset {pos})")
        self.pos = pos


@dataclass
class AstNode:
    atom: str
    text: str | None = None
    children: list[int] = field(default_factory=list)
    is_const: bool = False


@dataclass
class LabeledAst:
    """Ordered tree of grammar-atom-labeled nodes; children order is stable."""

    nodes: list[AstNode]
    root: int

    def label(self, i: int) -> str:
        """The string a node contributes as its own label: payload text for
        IDENT/CONST leaves, the atom tag otherwise."""
        node = self.nodes[i]
        return node.text if node.text is not None else node.atom

    def children(self, i: int) -> list[int]:
        return self.nodes[i].children

    def heights(self) -> list[int]:
        """Height (edge count to deepest leaf) per node, bottom-up."""
        out = [0] * len(self.nodes)
        for i in self._postorder():
            ch = self.nodes[i].children
            out[i] = 1 + max(out[c] for c in ch) if ch else 0
        return out

    def depth(self) -> int:
        return self.heights()[self.root]

    def _postorder(self) -> list[int]:
        order: list[int] = []
        stack = [(self.root, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
            else:
                stack.append((node, True))
                for c in reversed(self.nodes[node].children):
                    stack.append((c, False))
        return order

    def subtree_nodes(self, start: int) -> list[int]:
        """All node indices in the subtree rooted at start, preorder."""
        out: list[int] = []
        stack = [start]
        while stack:
            n = stack.pop()
            out.append(n)
            stack.extend(reversed(self.nodes[n].children))
        return out

    def to_dict(self) -> dict:
        return {
            "root": self.root,
            "nodes": [
                {
                    "atom": n.atom,
                    "text": n.text,
                    "children": n.children,
                    "is_const": n.is_const,
                }
                for n in self.nodes
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "LabeledAst":
        nodes = [
            AstNode(d["atom"], d["text"], list(d["children"]), d["is_const"])
            for d in data["nodes"]
        ]
        return cls(nodes=nodes, root=data["root"])

    def serialize(self) -> str:
        """Canonical one-line JSON form; byte-stable across runs."""
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))


@dataclass
class ParseOutcome:
    statement_kind: str
    ast: LabeledAst | None = None
    error: str | None = None


# -- tokenizer -------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
      (?P<ws>\s+|--[^\n]*)
    | (?P<num>\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)
    | (?P<str>'(?:[^']|'')*')
    | (?P<name>[A-Za-z_][A-Za-z0-9_$#]*)
    | (?P<op><>|!=|<=|>=|[=<>(),.*?;])
    """,
    re.VERBOSE,
)


def tokenize(sql: str) -> list[tuple[str, str, int]]:
    """Return (kind, value, offset) triples; kinds: name, num, str, op.

    Name tokens are lower-cased.  Raises SqlSyntaxError on unrecognized input.
    """
    tokens: list[tuple[str, str, int]] = []
    pos = 0
    n = len(sql)
    while pos < n:
        m = _TOKEN_RE.match(sql, pos)
        if m is None:
            raise SqlSyntaxError(f"unexpected character {sql[pos]!r}", pos)
        pos = m.end()
        kind = m.lastgroup
        if kind == "ws":
            continue
        value = m.group()
        if kind == "name":
            value = value.lower()
        tokens.append((kind, value, m.start()))
    return tokens


# -- parser ----------------------------------------------------------------


class _Parser:
    def __init__(self, tokens: list[tuple[str, str, int]], length: int):
        self.tokens = tokens
        self.pos = 0
        self.length = length
        self.nodes: list[AstNode] = []

    # token helpers
    def peek(self, offset: int = 0) -> tuple[str, str, int]:
        i = self.pos + offset
        if i < len(self.tokens):
            return self.tokens[i]
        return ("eof", "", self.length)

    def at_kw(self, *words: str) -> bool:
        kind, value, _ = self.peek()
        return kind == "name" and value in words

    def take(self) -> tuple[str, str, int]:
        tok = self.peek()
        self.pos += 1
        return tok

    def expect_kw(self, word: str) -> None:
        kind, value, at = self.peek()
        if kind != "name" or value != word:
            raise SqlSyntaxError(f"expected {word.upper()!r}, found {value!r}", at)
        self.pos += 1

    def expect_op(self, op: str) -> None:
        kind, value, at = self.peek()
        if kind != "op" or value != op:
            raise SqlSyntaxError(f"expected {op!r}, found {value!r}", at)
        self.pos += 1

    def at_op(self, *ops: str) -> bool:
        kind, value, _ = self.peek()
        return kind == "op" and value in ops

    # node helpers
    def node(self, atom: str, text: str | None = None, children: list[int] | None = None, is_const: bool = False) -> int:
        self.nodes.append(AstNode(atom, text, children or [], is_const))
        return len(self.nodes) - 1

    # grammar
    def parse_statement(self) -> tuple[str, int]:
        kind, value, at = self.peek()
        if kind != "name":
            raise SqlSyntaxError(f"expected a statement keyword, found {value!r}", at)
        if value == "select":
            root = self.parse_select_chain()
            stmt = "UNION" if self.nodes[root].atom in (UNION, UNION_ALL) else "SELECT"
        elif value == "insert":
            root, stmt = self.parse_insert(), "INSERT"
        elif value == "update":
            root, stmt = self.parse_update(), "UPDATE"
        elif value == "delete":
            root, stmt = self.parse_delete(), "DELETE"
        else:
            raise SqlSyntaxError(f"unsupported statement {value!r}", at)
        if self.at_op(";"):
            self.take()
        if self.peek()[0] != "eof":
            raise SqlSyntaxError(f"trailing input {self.peek()[1]!r}", self.peek()[2])
        return stmt, root

    def parse_select_chain(self) -> int:
        left = self.parse_select()
        while self.at_kw("union"):
            self.take()
            atom = UNION
            if self.at_kw("all"):
                self.take()
                atom = UNION_ALL
            right = self.parse_select()
            left = self.node(atom, children=[left, right])
        return left

    def parse_select(self) -> int:
        self.expect_kw("select")
        children: list[int] = []
        if self.at_kw("distinct"):
            self.take()
            children.append(self.node(DISTINCT))
        children.append(self.parse_projection())
        if self.at_kw("from"):
            self.take()
            children.append(self.node(FROM, children=[self.parse_table_expr()]))
        if self.at_kw("where"):
            self.take()
            children.append(self.node(WHERE, children=[self.parse_predicate()]))
        if self.at_kw("group"):
            self.take()
            self.expect_kw("by")
            exprs = [self.parse_operand()]
            while self.at_op(","):
                self.take()
                exprs.append(self.parse_operand())
            children.append(self.node(GROUP_BY, children=exprs))
        if self.at_kw("order"):
            self.take()
            self.expect_kw("by")
            keys = [self.parse_sort_key()]
            while self.at_op(","):
                self.take()
                keys.append(self.parse_sort_key())
            children.append(self.node(ORDER_BY, children=keys))
        if self.at_kw("limit"):
            self.take()
            kind, value, at = self.take()
            if kind != "num":
                raise SqlSyntaxError("LIMIT expects a number", at)
            children.append(
                self.node(LIMIT, children=[self.node(CONST, text=value, is_const=True)])
            )
        return self.node(SELECT, children=children)

    def parse_sort_key(self) -> int:
        expr = self.parse_operand()
        atom = ASC
        if self.at_kw("asc"):
            self.take()
        elif self.at_kw("desc"):
            self.take()
            atom = DESC
        return self.node(SORT_KEY, children=[expr, self.node(atom)])

    def parse_projection(self) -> int:
        items = [self.parse_projection_item()]
        while self.at_op(","):
            self.take()
            items.append(self.parse_projection_item())
        return self.node(COLS, children=items)

    def parse_projection_item(self) -> int:
        if self.at_op("*"):
            self.take()
            expr = self.node(STAR)
        else:
            expr = self.parse_operand(allow_star=True)
        children = [expr]
        if self.at_kw("as"):
            self.take()
            kind, value, at = self.take()
            if kind != "name":
                raise SqlSyntaxError("expected alias name after AS", at)
            children.append(self.node(ALIAS, children=[self.node(IDENT, text=value)]))
        return self.node(COL_ID, children=children)

    def parse_qualified_name(self) -> str:
        kind, value, at = self.take()
        if kind != "name" or value in _KEYWORDS:
            raise SqlSyntaxError(f"expected identifier, found {value!r}", at)
        parts = [value]
        while self.at_op(".") and self.peek(1)[0] == "name":
            self.take()
            parts.append(self.take()[1])
        return ".".join(parts)

    def parse_operand(self, allow_star: bool = False) -> int:
        kind, value, at = self.peek()
        if kind == "num":
            self.take()
            return self.node(CONST, text=value, is_const=True)
        if kind == "str":
            self.take()
            return self.node(CONST, text=value, is_const=True)
        if kind == "op" and value == "?":
            self.take()
            return self.node(CONST, text="?", is_const=True)
        if kind == "name" and value == "null":
            self.take()
            return self.node(NULL_LIT)
        if kind == "name":
            name = self.parse_qualified_name()
            if self.at_op("("):
                return self.parse_call(name)
            if allow_star and self.at_op(".") and self.peek(1)[:2] == ("op", "*"):
                self.take()
                self.take()
                return self.node(STAR, text=name)
            return self.node(IDENT, text=name)
        raise SqlSyntaxError(f"expected an operand, found {value!r}", at)

    def parse_call(self, name: str) -> int:
        self.expect_op("(")
        args: list[int] = []
        if not self.at_op(")"):
            args.append(self.parse_call_arg())
            while self.at_op(","):
                self.take()
                args.append(self.parse_call_arg())
        self.expect_op(")")
        return self.node(FUNC_CALL, children=[self.node(IDENT, text=name)] + args)

    def parse_call_arg(self) -> int:
        # aggregate star, as in count(*)
        if self.at_op("*"):
            self.take()
            return self.node(STAR)
        return self.parse_operand()

    def parse_table_ref(self) -> int:
        name = self.parse_qualified_name()
        children = [self.node(IDENT, text=name)]
        alias = None
        if self.at_kw("as"):
            self.take()
            kind, value, at = self.take()
            if kind != "name":
                raise SqlSyntaxError("expected alias name after AS", at)
            alias = value
        elif self.peek()[0] == "name" and self.peek()[1] not in _KEYWORDS:
            alias = self.take()[1]
        if alias is not None:
            children.append(self.node(ALIAS, children=[self.node(IDENT, text=alias)]))
        return self.node(TABLE_REF, children=children)

    def parse_table_expr(self) -> int:
        left = self.parse_table_join()
        # implicit cross joins: FROM a, b
        while self.at_op(","):
            self.take()
            left = self.node(CROSS_JOIN, children=[left, self.parse_table_join()])
        return left

    def parse_table_join(self) -> int:
        left = self.parse_table_ref()
        while True:
            if self.at_kw("join", "inner"):
                if self.at_kw("inner"):
                    self.take()
                self.expect_kw("join")
                atom = JOIN
            elif self.at_kw("left", "right"):
                atom = LEFT_JOIN if self.take()[1] == "left" else RIGHT_JOIN
                if self.at_kw("outer"):
                    self.take()
                self.expect_kw("join")
            elif self.at_kw("cross"):
                self.take()
                self.expect_kw("join")
                atom = CROSS_JOIN
            else:
                return left
            right = self.parse_table_ref()
            children = [left, right]
            if atom != CROSS_JOIN:
                self.expect_kw("on")
                children.append(self.node(ON, children=[self.parse_predicate()]))
            left = self.node(atom, children=children)

    def parse_predicate(self) -> int:
        return self.parse_or()

    def _flatten(self, atom: str, parts: list[int]) -> list[int]:
        out: list[int] = []
        for p in parts:
            if self.nodes[p].atom == atom:
                out.extend(self.nodes[p].children)
            else:
                out.append(p)
        return out

    def parse_or(self) -> int:
        parts = [self.parse_and()]
        while self.at_kw("or"):
            self.take()
            parts.append(self.parse_and())
        if len(parts) == 1:
            return parts[0]
        return self.node(OR, children=self._flatten(OR, parts))

    def parse_and(self) -> int:
        parts = [self.parse_not()]
        while self.at_kw("and"):
            self.take()
            parts.append(self.parse_not())
        if len(parts) == 1:
            return parts[0]
        return self.node(AND, children=self._flatten(AND, parts))

    def parse_not(self) -> int:
        if self.at_kw("not"):
            self.take()
            return self.node(NOT, children=[self.parse_not()])
        return self.parse_primary_pred()

    def parse_primary_pred(self) -> int:
        if self.at_op("("):
            self.take()
            inner = self.parse_predicate()
            self.expect_op(")")
            return inner
        return self.parse_comparison()

    def parse_comparison(self) -> int:
        left = self.parse_operand()
        kind, value, at = self.peek()
        if kind == "op" and value in _COMPARE_OPS:
            self.take()
            right = self.parse_operand()
            return self.node(_COMPARE_OPS[value], children=[left, right])
        if kind == "name" and value == "is":
            self.take()
            atom = IS_NULL
            if self.at_kw("not"):
                self.take()
                atom = IS_NOT_NULL
            self.expect_kw("null")
            return self.node(atom, children=[left])
        negated = False
        if kind == "name" and value == "not":
            self.take()
            negated = True
            kind, value, at = self.peek()
        if kind == "name" and value == "in":
            self.take()
            self.expect_op("(")
            items = [self.parse_operand()]
            while self.at_op(","):
                self.take()
                items.append(self.parse_operand())
            self.expect_op(")")
            lst = self.node(IN_LIST, children=items)
            return self.node(NOT_IN if negated else IN, children=[left, lst])
        if kind == "name" and value == "like":
            self.take()
            right = self.parse_operand()
            return self.node(NOT_LIKE if negated else LIKE, children=[left, right])
        if negated:
            raise SqlSyntaxError("expected IN or LIKE after NOT", at)
        raise SqlSyntaxError(f"expected a comparison operator, found {value!r}", at)

    # shallow DML
    def parse_insert(self) -> int:
        self.expect_kw("insert")
        self.expect_kw("into")
        children = [self.node(TABLE_REF, children=[self.node(IDENT, text=self.parse_qualified_name())])]
        if self.at_op("("):
            self.take()
            cols = [self.node(COL_ID, children=[self.node(IDENT, text=self.parse_qualified_name())])]
            while self.at_op(","):
                self.take()
                cols.append(self.node(COL_ID, children=[self.node(IDENT, text=self.parse_qualified_name())]))
            self.expect_op(")")
            children.append(self.node(COLS, children=cols))
        self.expect_kw("values")
        rows = [self.parse_value_row()]
        while self.at_op(","):
            self.take()
            rows.append(self.parse_value_row())
        children.append(self.node(VALUES, children=rows))
        return self.node(INSERT, children=children)

    def parse_value_row(self) -> int:
        self.expect_op("(")
        items = [self.parse_operand()]
        while self.at_op(","):
            self.take()
            items.append(self.parse_operand())
        self.expect_op(")")
        return self.node(ROW, children=items)

    def parse_update(self) -> int:
        self.expect_kw("update")
        children = [self.node(TABLE_REF, children=[self.node(IDENT, text=self.parse_qualified_name())])]
        self.expect_kw("set")
        assigns = [self.parse_assign()]
        while self.at_op(","):
            self.take()
            assigns.append(self.parse_assign())
        children.append(self.node(SET_LIST, children=assigns))
        if self.at_kw("where"):
            self.take()
            children.append(self.node(WHERE, children=[self.parse_predicate()]))
        return self.node(UPDATE, children=children)

    def parse_assign(self) -> int:
        target = self.node(IDENT, text=self.parse_qualified_name())
        self.expect_op("=")
        return self.node(ASSIGN, children=[target, self.parse_operand()])

    def parse_delete(self) -> int:
        self.expect_kw("delete")
        self.expect_kw("from")
        children = [self.node(TABLE_REF, children=[self.node(IDENT, text=self.parse_qualified_name())])]
        if self.at_kw("where"):
            self.take()
            children.append(self.node(WHERE, children=[self.parse_predicate()]))
        return self.node(DELETE, children=children)


def parse(sql_text: str) -> ParseOutcome:
    """Parse one SQL statement; parse failures become diagnostics, not raises."""
    if not sql_text or not sql_text.strip():
        raise ValueError("sql_text must be non-empty")
    try:
        tokens = tokenize(sql_text)
    except SqlSyntaxError as exc:
        return ParseOutcome(statement_kind="OTHER", error=str(exc))
    return parse_tokens(tokens, len(sql_text))


def parse_tokens(tokens: list[tuple[str, str, int]], length: int) -> ParseOutcome:
    try:
        parser = _Parser(tokens, length)
        stmt, root = parser.parse_statement()
    except SqlSyntaxError as exc:
        return ParseOutcome(statement_kind="OTHER", error=str(exc))
    return ParseOutcome(statement_kind=stmt, ast=LabeledAst(parser.nodes, root))


def classify(sql_text: str) -> str:
    """Statement kind from the leading keyword(s), without a full parse.

    A top-level UNION (outside parentheses) wins over SELECT; anything
    unrecognized, including stored-procedure invocations, is OTHER.
    """
    try:
        tokens = tokenize(sql_text)
    except SqlSyntaxError:
        return "OTHER"
    return classify_tokens(tokens)


def classify_tokens(tokens: list[tuple[str, str, int]]) -> str:
    i = 0
    while i < len(tokens) and tokens[i][:2] == ("op", "("):
        i += 1
    if i >= len(tokens) or tokens[i][0] != "name":
        return "OTHER"
    lead = tokens[i][1]
    if lead == "select":
        depth = 0
        for kind, value, _ in tokens[i:]:
            if kind == "op" and value == "(":
                depth += 1
            elif kind == "op" and value == ")":
                depth -= 1
            elif kind == "name" and value == "union" and depth == 0:
                return "UNION"
        return "SELECT"
    return {"insert": "INSERT", "update": "UPDATE", "delete": "DELETE"}.get(
        lead, "OTHER"
    )


# -- pretty printer ---------------------------------------------------------


def to_sql(ast: LabeledAst, node: int | None = None) -> str:
    """Canonical single-line lower-case SQL for a parsed (or skeleton) AST."""
    n = ast.root if node is None else node

    def s(i: int) -> str:
        return to_sql(ast, i)

    nd = ast.nodes[n]
    atom = nd.atom
    ch = nd.children

    if atom == SELECT:
        parts = ["select"]
        by_atom = {ast.nodes[c].atom: c for c in ch}
        if DISTINCT in by_atom:
            parts.append("distinct")
        parts.append(s(by_atom[COLS]))
        for key, kw in ((FROM, "from"), (WHERE, "where")):
            if key in by_atom:
                parts.append(kw)
                parts.append(s(ast.nodes[by_atom[key]].children[0]))
        if GROUP_BY in by_atom:
            parts.append("group by")
            parts.append(", ".join(s(c) for c in ast.nodes[by_atom[GROUP_BY]].children))
        if ORDER_BY in by_atom:
            parts.append("order by")
            parts.append(", ".join(s(c) for c in ast.nodes[by_atom[ORDER_BY]].children))
        if LIMIT in by_atom:
            parts.append("limit")
            parts.append(s(ast.nodes[by_atom[LIMIT]].children[0]))
        return " ".join(parts)
    if atom == COLS:
        return ", ".join(s(c) for c in ch)
    if atom == COL_ID:
        text = s(ch[0])
        if len(ch) > 1 and ast.nodes[ch[1]].atom == ALIAS:
            text += " as " + s(ast.nodes[ch[1]].children[0])
        return text
    if atom == STAR:
        return f"{nd.text}.*" if nd.text else "*"
    if atom in (IDENT, CONST):
        return nd.text or ""
    if atom == NULL_LIT:
        return "null"
    if atom == FUNC_CALL:
        name = s(ch[0])
        return f"{name}({', '.join(s(c) for c in ch[1:])})"
    if atom == TABLE_REF:
        text = s(ch[0])
        if len(ch) > 1:
            text += " as " + s(ast.nodes[ch[1]].children[0])
        return text
    if atom in JOIN_ATOMS:
        kw = {JOIN: "join", LEFT_JOIN: "left join", RIGHT_JOIN: "right join", CROSS_JOIN: "cross join"}[atom]
        text = f"{s(ch[0])} {kw} {s(ch[1])}"
        if len(ch) > 2:
            text += " on " + s(ast.nodes[ch[2]].children[0])
        return text
    if atom in (AND, OR):
        kw = " and " if atom == AND else " or "
        return kw.join(
            f"({s(c)})" if ast.nodes[c].atom in (AND, OR) else s(c) for c in ch
        )
    if atom == NOT:
        return f"not ({s(ch[0])})"
    if atom in COMPARISON_ATOMS:
        sym = {EQUALS: "=", NOT_EQUALS: "!=", LESS: "<", LESS_EQ: "<=", GREATER: ">", GREATER_EQ: ">="}[atom]
        return f"{s(ch[0])} {sym} {s(ch[1])}"
    if atom in (IN, NOT_IN):
        kw = "in" if atom == IN else "not in"
        return f"{s(ch[0])} {kw} ({', '.join(s(c) for c in ast.nodes[ch[1]].children)})"
    if atom in (LIKE, NOT_LIKE):
        return f"{s(ch[0])} {'like' if atom == LIKE else 'not like'} {s(ch[1])}"
    if atom in (IS_NULL, IS_NOT_NULL):
        return f"{s(ch[0])} is {'null' if atom == IS_NULL else 'not null'}"
    if atom == SORT_KEY:
        direction = "asc" if ast.nodes[ch[1]].atom == ASC else "desc"
        return f"{s(ch[0])} {direction}"
    if atom in (UNION, UNION_ALL):
        return f"{s(ch[0])} {'union' if atom == UNION else 'union all'} {s(ch[1])}"
    if atom == INSERT:
        by_atom = {ast.nodes[c].atom: c for c in ch}
        text = "insert into " + s(by_atom[TABLE_REF])
        if COLS in by_atom:
            text += f" ({s(by_atom[COLS])})"
        rows = ast.nodes[by_atom[VALUES]].children
        text += " values " + ", ".join(s(r) for r in rows)
        return text
    if atom == ROW:
        return f"({', '.join(s(c) for c in ch)})"
    if atom == UPDATE:
        by_atom = {ast.nodes[c].atom: c for c in ch}
        text = "update " + s(by_atom[TABLE_REF]) + " set "
        text += ", ".join(s(a) for a in ast.nodes[by_atom[SET_LIST]].children)
        if WHERE in by_atom:
            text += " where " + s(ast.nodes[by_atom[WHERE]].children[0])
        return text
    if atom == ASSIGN:
        return f"{s(ch[0])} = {s(ch[1])}"
    if atom == DELETE:
        by_atom = {ast.nodes[c].atom: c for c in ch}
        text = "delete from " + s(by_atom[TABLE_REF])
        if WHERE in by_atom:
            text += " where " + s(ast.nodes[by_atom[WHERE]].children[0])
        return text
    raise ValueError(f"cannot print atom {atom!r}")
