"""AST for MiniKer plus the canonical pretty printer.

Nodes compare structurally; source positions are excluded from equality so
that pretty-print/re-parse round trips can be checked with plain ==.
Sugar (compound assignment, ++/--) is desugared by the parser, so the AST
contains core forms only and the printer emits exactly those.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from civscan.errors import Pos

# ---------------------------------------------------------------- type exprs


@dataclass(frozen=True)
class TScalar:
    name: str  # one of i8 u8 i16 u16 i32 u32 i64 u64


@dataclass(frozen=True)
class TVoid:
    pass


@dataclass(frozen=True)
class TNamed:
    kind: str  # struct | union | enum | alias
    name: str


@dataclass(frozen=True)
class TPtr:
    inner: "TypeExpr"


@dataclass(frozen=True)
class TArray:
    inner: "TypeExpr"
    size: int


@dataclass(frozen=True)
class TFunc:
    ret: "TypeExpr"
    params: tuple["TypeExpr", ...]


TypeExpr = Union[TScalar, TVoid, TNamed, TPtr, TArray, TFunc]

_SCALAR_SYNTAX = {
    "i8": "char",
    "u8": "unsigned char",
    "i16": "short",
    "u16": "unsigned short",
    "i32": "int",
    "u32": "unsigned int",
    "i64": "long",
    "u64": "unsigned long",
}


# -------------------------------------------------------------- expressions


@dataclass(frozen=True)
class Name:
    ident: str
    pos: Pos = field(compare=False, default=None)  # type: ignore[assignment]


@dataclass(frozen=True)
class IntLit:
    value: int
    pos: Pos = field(compare=False, default=None)  # type: ignore[assignment]


@dataclass(frozen=True)
class StrLit:
    value: str
    pos: Pos = field(compare=False, default=None)  # type: ignore[assignment]


@dataclass(frozen=True)
class Call:
    callee: "Expr"
    args: tuple["Expr", ...]
    pos: Pos = field(compare=False, default=None)  # type: ignore[assignment]


@dataclass(frozen=True)
class Index:
    base: "Expr"
    index: "Expr"
    pos: Pos = field(compare=False, default=None)  # type: ignore[assignment]


@dataclass(frozen=True)
class Member:
    base: "Expr"
    fieldname: str
    arrow: bool
    pos: Pos = field(compare=False, default=None)  # type: ignore[assignment]


@dataclass(frozen=True)
class Unary:
    op: str  # * & - ! ~
    operand: "Expr"
    pos: Pos = field(compare=False, default=None)  # type: ignore[assignment]


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"
    pos: Pos = field(compare=False, default=None)  # type: ignore[assignment]


@dataclass(frozen=True)
class CastExpr:
    type: TypeExpr
    operand: "Expr"
    pos: Pos = field(compare=False, default=None)  # type: ignore[assignment]


@dataclass(frozen=True)
class SizeOf:
    type: TypeExpr
    pos: Pos = field(compare=False, default=None)  # type: ignore[assignment]


Expr = Union[Name, IntLit, StrLit, Call, Index, Member, Unary, Binary, CastExpr, SizeOf]


# ---------------------------------------------------------------- statements


@dataclass(frozen=True)
class Block:
    stmts: tuple["Stmt", ...]
    pos: Pos = field(compare=False, default=None)  # type: ignore[assignment]


@dataclass(frozen=True)
class DeclStmt:
    name: str
    type: TypeExpr
    init: Optional[Expr]
    pos: Pos = field(compare=False, default=None)  # type: ignore[assignment]


@dataclass(frozen=True)
class Assign:
    target: Expr
    value: Expr
    pos: Pos = field(compare=False, default=None)  # type: ignore[assignment]


@dataclass(frozen=True)
class ExprStmt:
    expr: Expr
    pos: Pos = field(compare=False, default=None)  # type: ignore[assignment]


@dataclass(frozen=True)
class If:
    cond: Expr
    then: "Stmt"
    els: Optional["Stmt"]
    pos: Pos = field(compare=False, default=None)  # type: ignore[assignment]


@dataclass(frozen=True)
class While:
    cond: Expr
    body: "Stmt"
    pos: Pos = field(compare=False, default=None)  # type: ignore[assignment]


@dataclass(frozen=True)
class For:
    init: Optional["Stmt"]  # Assign or ExprStmt
    cond: Optional[Expr]
    step: Optional["Stmt"]
    body: "Stmt"
    pos: Pos = field(compare=False, default=None)  # type: ignore[assignment]


@dataclass(frozen=True)
class SwitchCase:
    value: Optional[int]  # None is the default case
    body: tuple["Stmt", ...]


@dataclass(frozen=True)
class Switch:
    expr: Expr
    cases: tuple[SwitchCase, ...]
    pos: Pos = field(compare=False, default=None)  # type: ignore[assignment]


@dataclass(frozen=True)
class Return:
    value: Optional[Expr]
    pos: Pos = field(compare=False, default=None)  # type: ignore[assignment]


@dataclass(frozen=True)
class Break:
    pos: Pos = field(compare=False, default=None)  # type: ignore[assignment]


@dataclass(frozen=True)
class Continue:
    pos: Pos = field(compare=False, default=None)  # type: ignore[assignment]


Stmt = Union[
    Block, DeclStmt, Assign, ExprStmt, If, While, For, Switch, Return, Break, Continue
]


# -------------------------------------------------------------- declarations


@dataclass(frozen=True)
class FieldDecl:
    name: str
    type: TypeExpr


@dataclass(frozen=True)
class RecordDecl:
    kind: str  # struct | union
    name: str
    fields: tuple[FieldDecl, ...]
    selector: Optional[str]
    pos: Pos = field(compare=False, default=None)  # type: ignore[assignment]


@dataclass(frozen=True)
class EnumDecl:
    name: str
    enumerators: tuple[tuple[str, int], ...]
    pos: Pos = field(compare=False, default=None)  # type: ignore[assignment]


@dataclass(frozen=True)
class TypedefDecl:
    name: str
    type: TypeExpr
    pos: Pos = field(compare=False, default=None)  # type: ignore[assignment]


@dataclass(frozen=True)
class GlobalDecl:
    name: str
    type: TypeExpr
    init: Optional[Expr]
    pos: Pos = field(compare=False, default=None)  # type: ignore[assignment]


@dataclass(frozen=True)
class FuncDecl:
    name: str
    ret: TypeExpr
    params: tuple[tuple[str, TypeExpr], ...]
    body: Optional[Block]  # None for an external prototype
    pos: Pos = field(compare=False, default=None)  # type: ignore[assignment]


Decl = Union[RecordDecl, EnumDecl, TypedefDecl, GlobalDecl, FuncDecl]


@dataclass(frozen=True)
class Program:
    decls: tuple[Decl, ...]


# ------------------------------------------------------------ pretty printer

_PREC = {
    "||": 1, "&&": 2, "|": 3, "^": 4, "&": 5,
    "==": 6, "!=": 6,
    "<": 7, "<=": 7, ">": 7, ">=": 7,
    "<<": 8, ">>": 8,
    "+": 9, "-": 9,
    "*": 10, "/": 10, "%": 10,
}
_UNARY_PREC = 11


def type_text(t: TypeExpr, declname: str = "") -> str:
    """Render a type as declaration syntax around an optional declarator name."""
    if isinstance(t, TScalar):
        base = _SCALAR_SYNTAX[t.name]
        return f"{base} {declname}".rstrip()
    if isinstance(t, TVoid):
        return f"void {declname}".rstrip()
    if isinstance(t, TNamed):
        prefix = {"struct": "struct ", "union": "union ", "enum": "enum ", "alias": ""}[t.kind]
        return f"{prefix}{t.name} {declname}".rstrip()
    if isinstance(t, TPtr):
        if isinstance(t.inner, TFunc):
            fn = t.inner
            params = ", ".join(type_text(p) for p in fn.params) or "void"
            return f"{type_text(fn.ret)} (*{declname})({params})"
        return type_text(t.inner, f"*{declname}")
    if isinstance(t, TArray):
        return type_text(t.inner, f"{declname}[{t.size}]")
    if isinstance(t, TFunc):
        params = ", ".join(type_text(p) for p in t.params) or "void"
        return f"{type_text(t.ret)} {declname}({params})"
    raise AssertionError(f"unknown type {t!r}")


def expr_text(e: Expr, parent_prec: int = 0) -> str:
    if isinstance(e, Name):
        return e.ident
    if isinstance(e, IntLit):
        return str(e.value)
    if isinstance(e, StrLit):
        body = e.value.replace("\\", "\\\\").replace('"', '\\"')
        body = body.replace("\n", "\\n").replace("\t", "\\t").replace("\r", "\\r").replace("\0", "\\0")
        return f'"{body}"'
    if isinstance(e, Call):
        args = ", ".join(expr_text(a) for a in e.args)
        return f"{expr_text(e.callee, _UNARY_PREC + 1)}({args})"
    if isinstance(e, Index):
        return f"{expr_text(e.base, _UNARY_PREC + 1)}[{expr_text(e.index)}]"
    if isinstance(e, Member):
        sep = "->" if e.arrow else "."
        return f"{expr_text(e.base, _UNARY_PREC + 1)}{sep}{e.fieldname}"
    if isinstance(e, Unary):
        return _paren(f"{e.op}{expr_text(e.operand, _UNARY_PREC)}", _UNARY_PREC, parent_prec)
    if isinstance(e, Binary):
        prec = _PREC[e.op]
        text = f"{expr_text(e.left, prec)} {e.op} {expr_text(e.right, prec + 1)}"
        return _paren(text, prec, parent_prec)
    if isinstance(e, CastExpr):
        return _paren(f"({type_text(e.type)}){expr_text(e.operand, _UNARY_PREC)}", _UNARY_PREC, parent_prec)
    if isinstance(e, SizeOf):
        return f"sizeof({type_text(e.type)})"
    raise AssertionError(f"unknown expr {e!r}")


def _paren(text: str, prec: int, parent_prec: int) -> str:
    return f"({text})" if prec < parent_prec else text


def _stmt_lines(s: Stmt, ind: str) -> list[str]:
    nxt = ind + "    "
    if isinstance(s, Block):
        out = [ind + "{"]
        for sub in s.stmts:
            out.extend(_stmt_lines(sub, nxt))
        out.append(ind + "}")
        return out
    if isinstance(s, DeclStmt):
        init = f" = {expr_text(s.init)}" if s.init is not None else ""
        return [f"{ind}{type_text(s.type, s.name)}{init};"]
    if isinstance(s, Assign):
        return [f"{ind}{expr_text(s.target)} = {expr_text(s.value)};"]
    if isinstance(s, ExprStmt):
        return [f"{ind}{expr_text(s.expr)};"]
    if isinstance(s, If):
        out = [f"{ind}if ({expr_text(s.cond)})"]
        out.extend(_stmt_lines(_blockify(s.then), ind))
        if s.els is not None:
            out.append(f"{ind}else")
            out.extend(_stmt_lines(_blockify(s.els), ind))
        return out
    if isinstance(s, While):
        out = [f"{ind}while ({expr_text(s.cond)})"]
        out.extend(_stmt_lines(_blockify(s.body), ind))
        return out
    if isinstance(s, For):
        init = _inline_simple(s.init)
        cond = expr_text(s.cond) if s.cond is not None else ""
        step = _inline_simple(s.step)
        out = [f"{ind}for ({init}; {cond}; {step})"]
        out.extend(_stmt_lines(_blockify(s.body), ind))
        return out
    if isinstance(s, Switch):
        out = [f"{ind}switch ({expr_text(s.expr)})", ind + "{"]
        for case in s.cases:
            label = "default" if case.value is None else f"case {case.value}"
            out.append(f"{nxt}{label}:")
            for sub in case.body:
                out.extend(_stmt_lines(sub, nxt + "    "))
        out.append(ind + "}")
        return out
    if isinstance(s, Return):
        if s.value is None:
            return [f"{ind}return;"]
        return [f"{ind}return {expr_text(s.value)};"]
    if isinstance(s, Break):
        return [f"{ind}break;"]
    if isinstance(s, Continue):
        return [f"{ind}continue;"]
    raise AssertionError(f"unknown stmt {s!r}")


def _blockify(s: Stmt) -> Block:
    return s if isinstance(s, Block) else Block((s,))


def _inline_simple(s: Optional[Stmt]) -> str:
    if s is None:
        return ""
    if isinstance(s, Assign):
        return f"{expr_text(s.target)} = {expr_text(s.value)}"
    if isinstance(s, ExprStmt):
        return expr_text(s.expr)
    raise AssertionError(f"statement not allowed in for-header: {s!r}")


def program_text(prog: Program) -> str:
    """Canonical source text; parsing it back yields a structurally equal AST."""
    chunks: list[str] = []
    for d in prog.decls:
        if isinstance(d, RecordDecl):
            sel = f" /*@selector({d.selector})*/" if d.selector else ""
            lines = [f"{d.kind} {d.name}{sel}", "{"]
            for f in d.fields:
                lines.append(f"    {type_text(f.type, f.name)};")
            lines.append("};")
            chunks.append("\n".join(lines))
        elif isinstance(d, EnumDecl):
            body = ", ".join(f"{n} = {v}" for n, v in d.enumerators)
            chunks.append(f"enum {d.name} {{ {body} }};")
        elif isinstance(d, TypedefDecl):
            chunks.append(f"typedef {type_text(d.type, d.name)};")
        elif isinstance(d, GlobalDecl):
            init = f" = {expr_text(d.init)}" if d.init is not None else ""
            chunks.append(f"{type_text(d.type, d.name)}{init};")
        elif isinstance(d, FuncDecl):
            params = ", ".join(type_text(t, n) for n, t in d.params) or "void"
            head = f"{type_text(d.ret, d.name)}({params})"
            if d.body is None:
                chunks.append(head + ";")
            else:
                lines = [head]
                lines.extend(_stmt_lines(d.body, ""))
                chunks.append("\n".join(lines))
        else:
            raise AssertionError(f"unknown decl {d!r}")
    return "\n\n".join(chunks) + "\n"
