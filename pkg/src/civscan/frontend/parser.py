"""Recursive descent parser for MiniKer.

Fail-fast: the first syntax error raises ParseError with the position and
the expected-token set; there is no recovery. Compound assignment and
++/-- are desugared here, so the AST carries core forms only.
"""

from __future__ import annotations

from civscan.errors import ParseError, Pos
from civscan.frontend import ast_nodes as A
from civscan.frontend.tokens import Token, tokenize

_SCALAR_KWS = {"char", "short", "int", "long", "unsigned", "signed", "void"}
_ASSIGN_OPS = {"+=", "-=", "*=", "/=", "%=", "<<=", ">>=", "&=", "|=", "^="}


class Parser:
    def __init__(self, tokens: list[Token], path: str = "<input>"):
        self.toks = tokens
        self.i = 0
        self.path = path
        self.typedefs: set[str] = set()
        self.enum_consts: dict[str, int] = {}

    # ------------------------------------------------------------ plumbing

    def _pos(self) -> Pos:
        if self.i < len(self.toks):
            return self.toks[self.i].pos
        if self.toks:
            last = self.toks[-1].pos
            return Pos(last.path, last.line, last.col + len(self.toks[-1].text))
        return Pos(self.path, 1, 1)

    def peek(self, off: int = 0) -> Token | None:
        j = self.i + off
        return self.toks[j] if j < len(self.toks) else None

    def at(self, text: str, off: int = 0) -> bool:
        t = self.peek(off)
        return t is not None and t.text == text and t.kind in ("kw", "punct")

    def at_kind(self, kind: str, off: int = 0) -> bool:
        t = self.peek(off)
        return t is not None and t.kind == kind

    def advance(self) -> Token:
        t = self.peek()
        if t is None:
            raise ParseError(self._pos(), "unexpected end of input")
        self.i += 1
        return t

    def expect(self, text: str) -> Token:
        t = self.peek()
        if t is None or t.text != text:
            got = t.text if t else "end of input"
            raise ParseError(self._pos(), f"unexpected {got!r}", expected=(text,))
        return self.advance()

    def expect_ident(self) -> Token:
        t = self.peek()
        if t is None or t.kind != "ident":
            got = t.text if t else "end of input"
            raise ParseError(self._pos(), f"unexpected {got!r}", expected=("identifier",))
        return self.advance()

    # --------------------------------------------------------------- types

    def _starts_type(self, off: int = 0) -> bool:
        t = self.peek(off)
        if t is None:
            return False
        if t.kind == "kw" and t.text in _SCALAR_KWS | {"struct", "union", "enum"}:
            return True
        return t.kind == "ident" and t.text in self.typedefs

    def parse_base_type(self) -> A.TypeExpr:
        t = self.peek()
        if t is None:
            raise ParseError(self._pos(), "expected a type")
        if t.kind == "kw" and t.text in ("struct", "union", "enum"):
            kw = self.advance().text
            name = self.expect_ident().text
            kind = {"struct": "struct", "union": "union", "enum": "enum"}[kw]
            return A.TNamed(kind, name)
        if t.kind == "ident" and t.text in self.typedefs:
            self.advance()
            return A.TNamed("alias", t.text)
        if t.kind == "kw" and t.text in _SCALAR_KWS:
            return self._parse_scalar()
        raise ParseError(t.pos, f"unexpected {t.text!r}", expected=("type",))

    def _parse_scalar(self) -> A.TypeExpr:
        start = self._pos()
        signedness: str | None = None
        base: str | None = None
        while self.at_kind("kw") and self.peek().text in _SCALAR_KWS:  # type: ignore[union-attr]
            w = self.advance().text
            if w in ("unsigned", "signed"):
                if signedness is not None:
                    raise ParseError(start, "duplicate signedness specifier")
                signedness = w
            else:
                if base is not None:
                    raise ParseError(start, f"unexpected type keyword {w!r}")
                base = w
        if base == "void":
            if signedness is not None:
                raise ParseError(start, "void cannot be signed or unsigned")
            return A.TVoid()
        if base is None:
            base = "int"
        width = {"char": 8, "short": 16, "int": 32, "long": 64}[base]
        prefix = "u" if signedness == "unsigned" else "i"
        return A.TScalar(f"{prefix}{width}")

    def parse_type(self) -> A.TypeExpr:
        t = self.parse_base_type()
        while self.at("*"):
            self.advance()
            t = A.TPtr(t)
        return t

    def parse_declarator(self, base: A.TypeExpr) -> tuple[str, A.TypeExpr]:
        """Parse `*... name`, `*... name[N]`, or `(*name)(params)` after a base type."""
        while self.at("*"):
            self.advance()
            base = A.TPtr(base)
        if self.at("("):
            # Function pointer declarator.
            self.advance()
            self.expect("*")
            name = self.expect_ident().text
            self.expect(")")
            self.expect("(")
            params = self._parse_param_types()
            self.expect(")")
            return name, A.TPtr(A.TFunc(base, params))
        name = self.expect_ident().text
        if self.at("["):
            self.advance()
            size = self._parse_const_int()
            self.expect("]")
            base = A.TArray(base, size)
        return name, base

    def _parse_param_types(self) -> tuple[A.TypeExpr, ...]:
        if self.at(")"):
            return ()
        if self.at("void") and self.at(")", 1):
            self.advance()
            return ()
        out = [self.parse_type()]
        while self.at(","):
            self.advance()
            out.append(self.parse_type())
        return tuple(out)

    def _parse_const_int(self) -> int:
        neg = False
        if self.at("-"):
            self.advance()
            neg = True
        t = self.peek()
        if t is not None and t.kind == "int":
            self.advance()
            return -t.value if neg else t.value  # type: ignore[operator,return-value]
        if t is not None and t.kind == "ident" and t.text in self.enum_consts:
            self.advance()
            v = self.enum_consts[t.text]
            return -v if neg else v
        raise ParseError(self._pos(), "expected an integer constant")

    # --------------------------------------------------------- declarations

    def parse_program(self) -> A.Program:
        decls: list[A.Decl] = []
        while self.peek() is not None:
            decls.append(self.parse_top_decl())
        return A.Program(tuple(decls))

    def parse_top_decl(self) -> A.Decl:
        t = self.peek()
        assert t is not None
        if t.kind == "kw" and t.text == "typedef":
            return self._parse_typedef()
        if t.kind == "kw" and t.text in ("struct", "union"):
            # Definition if `struct NAME` is followed by `{` or a pragma.
            nxt2 = self.peek(2)
            if nxt2 is not None and (nxt2.text == "{" or nxt2.kind == "pragma"):
                return self._parse_record()
        if t.kind == "kw" and t.text == "enum":
            nxt2 = self.peek(2)
            if nxt2 is not None and nxt2.text == "{":
                return self._parse_enum()
        return self._parse_global_or_func()

    def _parse_typedef(self) -> A.TypedefDecl:
        pos = self._pos()
        self.expect("typedef")
        base = self.parse_base_type()
        name, ty = self.parse_declarator(base)
        self.expect(";")
        self.typedefs.add(name)
        return A.TypedefDecl(name, ty, pos=pos)

    def _parse_record(self) -> A.RecordDecl:
        pos = self._pos()
        kind = self.advance().text  # struct | union
        name = self.expect_ident().text
        selector: str | None = None
        if self.at_kind("pragma"):
            selector = self.advance().value  # type: ignore[assignment]
        self.expect("{")
        fields: list[A.FieldDecl] = []
        while not self.at("}"):
            base = self.parse_base_type()
            while True:
                fname, fty = self.parse_declarator(base)
                fields.append(A.FieldDecl(fname, fty))
                if self.at(","):
                    self.advance()
                    continue
                break
            self.expect(";")
        self.expect("}")
        self.expect(";")
        return A.RecordDecl(kind, name, tuple(fields), selector, pos=pos)

    def _parse_enum(self) -> A.EnumDecl:
        pos = self._pos()
        self.expect("enum")
        name = self.expect_ident().text
        self.expect("{")
        items: list[tuple[str, int]] = []
        next_value = 0
        while not self.at("}"):
            ename = self.expect_ident().text
            if self.at("="):
                self.advance()
                next_value = self._parse_const_int()
            items.append((ename, next_value))
            self.enum_consts[ename] = next_value
            next_value += 1
            if self.at(","):
                self.advance()
            elif not self.at("}"):
                raise ParseError(self._pos(), "expected ',' or '}' in enum body")
        self.expect("}")
        self.expect(";")
        return A.EnumDecl(name, tuple(items), pos=pos)

    def _parse_global_or_func(self) -> A.Decl:
        pos = self._pos()
        base = self.parse_base_type()
        name, ty = self.parse_declarator(base)
        if self.at("(") and not isinstance(ty, (A.TArray,)) and not _is_funcptr(ty):
            return self._parse_function(pos, name, ty)
        init: A.Expr | None = None
        if self.at("="):
            self.advance()
            init = self.parse_expr()
        self.expect(";")
        return A.GlobalDecl(name, ty, init, pos=pos)

    def _parse_function(self, pos: Pos, name: str, ret: A.TypeExpr) -> A.FuncDecl:
        self.expect("(")
        params: list[tuple[str, A.TypeExpr]] = []
        if self.at("void") and self.at(")", 1):
            self.advance()
        elif not self.at(")"):
            while True:
                pbase = self.parse_base_type()
                pname, pty = self.parse_declarator(pbase)
                if isinstance(pty, A.TArray):
                    pty = A.TPtr(pty.inner)  # arrays decay in parameters
                params.append((pname, pty))
                if self.at(","):
                    self.advance()
                    continue
                break
        self.expect(")")
        if self.at(";"):
            self.advance()
            return A.FuncDecl(name, ret, tuple(params), None, pos=pos)
        body = self.parse_block()
        return A.FuncDecl(name, ret, tuple(params), body, pos=pos)

    # ----------------------------------------------------------- statements

    def parse_block(self) -> A.Block:
        pos = self._pos()
        self.expect("{")
        stmts: list[A.Stmt] = []
        while not self.at("}"):
            stmts.append(self.parse_stmt())
        self.expect("}")
        return A.Block(tuple(stmts), pos=pos)

    def parse_stmt(self) -> A.Stmt:
        t = self.peek()
        if t is None:
            raise ParseError(self._pos(), "unexpected end of input in statement")
        pos = t.pos
        if t.text == "{":
            return self.parse_block()
        if t.text == ";":
            self.advance()
            return A.Block((), pos=pos)
        if t.kind == "kw":
            if t.text == "if":
                return self._parse_if()
            if t.text == "while":
                return self._parse_while()
            if t.text == "for":
                return self._parse_for()
            if t.text == "switch":
                return self._parse_switch()
            if t.text == "return":
                self.advance()
                value = None if self.at(";") else self.parse_expr()
                self.expect(";")
                return A.Return(value, pos=pos)
            if t.text == "break":
                self.advance()
                self.expect(";")
                return A.Break(pos=pos)
            if t.text == "continue":
                self.advance()
                self.expect(";")
                return A.Continue(pos=pos)
        if self._starts_type():
            base = self.parse_base_type()
            name, ty = self.parse_declarator(base)
            init = None
            if self.at("="):
                self.advance()
                init = self.parse_expr()
            self.expect(";")
            return A.DeclStmt(name, ty, init, pos=pos)
        stmt = self.parse_simple_stmt()
        self.expect(";")
        return stmt

    def parse_simple_stmt(self) -> A.Stmt:
        """An assignment, desugared update, or bare expression."""
        pos = self._pos()
        if self.at("++") or self.at("--"):
            op = self.advance().text
            target = self.parse_unary()
            return self._update(target, "+" if op == "++" else "-", pos)
        expr = self.parse_expr()
        if self.at("="):
            self.advance()
            value = self.parse_expr()
            return A.Assign(expr, value, pos=pos)
        t = self.peek()
        if t is not None and t.text in _ASSIGN_OPS:
            self.advance()
            rhs = self.parse_expr()
            return A.Assign(expr, A.Binary(t.text[:-1], expr, rhs, pos=pos), pos=pos)
        if self.at("++") or self.at("--"):
            op = self.advance().text
            return self._update(expr, "+" if op == "++" else "-", pos)
        return A.ExprStmt(expr, pos=pos)

    def _update(self, target: A.Expr, op: str, pos: Pos) -> A.Assign:
        return A.Assign(target, A.Binary(op, target, A.IntLit(1, pos=pos), pos=pos), pos=pos)

    def _parse_if(self) -> A.If:
        pos = self._pos()
        self.expect("if")
        self.expect("(")
        cond = self.parse_expr()
        self.expect(")")
        then = self.parse_stmt()
        els = None
        if self.at("else"):
            self.advance()
            els = self.parse_stmt()
        return A.If(cond, then, els, pos=pos)

    def _parse_while(self) -> A.While:
        pos = self._pos()
        self.expect("while")
        self.expect("(")
        cond = self.parse_expr()
        self.expect(")")
        body = self.parse_stmt()
        return A.While(cond, body, pos=pos)

    def _parse_for(self) -> A.For:
        pos = self._pos()
        self.expect("for")
        self.expect("(")
        init = None if self.at(";") else self.parse_simple_stmt()
        self.expect(";")
        cond = None if self.at(";") else self.parse_expr()
        self.expect(";")
        step = None if self.at(")") else self.parse_simple_stmt()
        self.expect(")")
        body = self.parse_stmt()
        return A.For(init, cond, step, body, pos=pos)

    def _parse_switch(self) -> A.Switch:
        pos = self._pos()
        self.expect("switch")
        self.expect("(")
        expr = self.parse_expr()
        self.expect(")")
        self.expect("{")
        cases: list[A.SwitchCase] = []
        seen_default = False
        while not self.at("}"):
            if self.at("case"):
                self.advance()
                value: int | None = self._parse_const_int()
            elif self.at("default"):
                if seen_default:
                    raise ParseError(self._pos(), "duplicate default case")
                seen_default = True
                self.advance()
                value = None
            else:
                raise ParseError(self._pos(), "expected 'case' or 'default'",
                                 expected=("case", "default"))
            self.expect(":")
            body: list[A.Stmt] = []
            while not (self.at("case") or self.at("default") or self.at("}")):
                body.append(self.parse_stmt())
            cases.append(A.SwitchCase(value, tuple(body)))
        self.expect("}")
        return A.Switch(expr, tuple(cases), pos=pos)

    # ---------------------------------------------------------- expressions

    def parse_expr(self, min_prec: int = 1) -> A.Expr:
        left = self.parse_unary()
        while True:
            t = self.peek()
            if t is None or t.kind != "punct" or t.text not in A._PREC:
                return left
            prec = A._PREC[t.text]
            if prec < min_prec:
                return left
            op = self.advance().text
            right = self.parse_expr(prec + 1)
            left = A.Binary(op, left, right, pos=t.pos)

    def parse_unary(self) -> A.Expr:
        t = self.peek()
        if t is None:
            raise ParseError(self._pos(), "unexpected end of input in expression")
        if t.text in ("*", "&", "-", "!", "~") and t.kind == "punct":
            self.advance()
            return A.Unary(t.text, self.parse_unary(), pos=t.pos)
        if t.text == "(" and self._starts_type(1):
            self.advance()
            ty = self.parse_type()
            self.expect(")")
            return A.CastExpr(ty, self.parse_unary(), pos=t.pos)
        return self.parse_postfix()

    def parse_postfix(self) -> A.Expr:
        expr = self.parse_primary()
        while True:
            t = self.peek()
            if t is None:
                return expr
            if t.text == "(":
                self.advance()
                args: list[A.Expr] = []
                if not self.at(")"):
                    args.append(self.parse_expr())
                    while self.at(","):
                        self.advance()
                        args.append(self.parse_expr())
                self.expect(")")
                expr = A.Call(expr, tuple(args), pos=t.pos)
            elif t.text == "[":
                self.advance()
                idx = self.parse_expr()
                self.expect("]")
                expr = A.Index(expr, idx, pos=t.pos)
            elif t.text == ".":
                self.advance()
                fld = self.expect_ident().text
                expr = A.Member(expr, fld, arrow=False, pos=t.pos)
            elif t.text == "->":
                self.advance()
                fld = self.expect_ident().text
                expr = A.Member(expr, fld, arrow=True, pos=t.pos)
            else:
                return expr

    def parse_primary(self) -> A.Expr:
        t = self.peek()
        if t is None:
            raise ParseError(self._pos(), "unexpected end of input in expression")
        if t.kind == "int":
            self.advance()
            return A.IntLit(t.value, pos=t.pos)  # type: ignore[arg-type]
        if t.kind == "str":
            self.advance()
            return A.StrLit(t.value, pos=t.pos)  # type: ignore[arg-type]
        if t.kind == "ident":
            self.advance()
            if t.text in self.enum_consts:
                return A.IntLit(self.enum_consts[t.text], pos=t.pos)
            return A.Name(t.text, pos=t.pos)
        if t.text == "sizeof":
            self.advance()
            self.expect("(")
            ty = self.parse_type()
            self.expect(")")
            return A.SizeOf(ty, pos=t.pos)
        if t.text == "(":
            self.advance()
            expr = self.parse_expr()
            self.expect(")")
            return expr
        raise ParseError(t.pos, f"unexpected {t.text!r}", expected=("expression",))


def _is_funcptr(ty: A.TypeExpr) -> bool:
    return isinstance(ty, A.TPtr) and isinstance(ty.inner, A.TFunc)


def parse(tokens: list[Token], path: str = "<input>") -> A.Program:
    """Parse a token stream into a Program AST."""
    return Parser(tokens, path).parse_program()


def parse_text(text: str, path: str = "<input>") -> A.Program:
    return parse(tokenize(path, text), path)
