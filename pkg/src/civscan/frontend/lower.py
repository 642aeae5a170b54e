"""Lowering from the MiniKer AST to three-address IR.

Scalars whose address is never taken stay as named variables; everything
else (globals, aggregates, arrays, address-taken scalars) is accessed
through explicit addr_of/field_access/index/load/store instructions, which
is what the dependence analysis keys on. Short-circuit && and || become
branches. Every field access records the (TypeDecl, field) pair it
resolves to.
"""

from __future__ import annotations

from dataclasses import dataclass

from civscan.errors import Pos, TypeCheckError
from civscan.frontend import ast_nodes as A
from civscan.frontend.ir import (
    BasicBlock, Const, FuncRef, Instr, IRFunction, IRModule, Operand, StrConst,
    Temp, Var,
)
from civscan.frontend.mtypes import (
    Array, FuncType, INT32, INT64, UINT64, Named, Ptr, Scalar, TypeDecl,
    TypeRef, TypeTable, Void,
)

_ARITH_OPS = {"+": "add", "-": "sub", "*": "mul", "/": "div", "%": "mod",
              "<<": "shl", ">>": "shr", "&": "and", "|": "or", "^": "xor"}
_CMP_OPS = {"<": "lt", "<=": "le", ">": "gt", ">=": "ge", "==": "eq", "!=": "ne"}


@dataclass
class Signature:
    ret: TypeRef
    params: tuple[TypeRef, ...]
    defined: bool


@dataclass
class LowerResult:
    module: IRModule
    table: TypeTable
    warnings: list[str]


def resolve_type_expr(te: A.TypeExpr, table: TypeTable, pos: Pos | None = None) -> TypeRef:
    if isinstance(te, A.TScalar):
        return Scalar(te.name)
    if isinstance(te, A.TVoid):
        return Void()
    if isinstance(te, A.TNamed):
        if te.kind == "alias" and table.get(te.name) is None:
            raise TypeCheckError(pos, f"unknown type name '{te.name}'")
        kind = {"struct": "aggregate", "union": "union",
                "enum": "enum", "alias": "scalar-alias"}[te.kind]
        return Named(kind, te.name)
    if isinstance(te, A.TPtr):
        return Ptr(resolve_type_expr(te.inner, table, pos))
    if isinstance(te, A.TArray):
        return Array(resolve_type_expr(te.inner, table, pos), te.size)
    if isinstance(te, A.TFunc):
        return FuncType(resolve_type_expr(te.ret, table, pos),
                        tuple(resolve_type_expr(p, table, pos) for p in te.params))
    raise AssertionError(f"unknown type expr {te!r}")


def lower(prog: A.Program, path: str, table: TypeTable | None = None) -> LowerResult:
    """Lower one parsed compilation unit; raises TypeCheckError on bad programs."""
    ml = _ModuleLowerer(prog, path, table or TypeTable())
    return ml.run()


class _ModuleLowerer:
    def __init__(self, prog: A.Program, path: str, table: TypeTable):
        self.prog = prog
        self.path = path
        self.table = table
        self.signatures: dict[str, Signature] = {}
        self.globals: dict[str, TypeRef] = {}
        self.global_inits: dict[str, int] = {}
        self.warnings: list[str] = []
        self.iid = 0
        self.str_count = 0

    def next_iid(self) -> int:
        self.iid += 1
        return self.iid

    def run(self) -> LowerResult:
        for d in self.prog.decls:
            if isinstance(d, A.RecordDecl):
                kind = "aggregate" if d.kind == "struct" else "union"
                fields = tuple(
                    (f.name, resolve_type_expr(f.type, self.table, d.pos)) for f in d.fields
                )
                self.table.add(TypeDecl(d.name, kind, fields, d.selector, pos=d.pos))
            elif isinstance(d, A.EnumDecl):
                self.table.add(TypeDecl(d.name, "enum", enumerators=d.enumerators, pos=d.pos))
            elif isinstance(d, A.TypedefDecl):
                aliased = resolve_type_expr(d.type, self.table, d.pos)
                self.table.add(TypeDecl(d.name, "scalar-alias", aliased=aliased, pos=d.pos))
        self.table.validate()

        for d in self.prog.decls:
            if isinstance(d, A.FuncDecl):
                ret = resolve_type_expr(d.ret, self.table, d.pos)
                params = tuple(resolve_type_expr(t, self.table, d.pos) for _, t in d.params)
                prev = self.signatures.get(d.name)
                if prev is not None:
                    if (prev.ret, prev.params) != (ret, params):
                        raise TypeCheckError(d.pos, f"conflicting declarations of '{d.name}'")
                    if prev.defined and d.body is not None:
                        raise TypeCheckError(d.pos, f"redefinition of '{d.name}'")
                    prev.defined = prev.defined or d.body is not None
                else:
                    self.signatures[d.name] = Signature(ret, params, d.body is not None)
            elif isinstance(d, A.GlobalDecl):
                ty = resolve_type_expr(d.type, self.table, d.pos)
                if d.name in self.globals:
                    raise TypeCheckError(d.pos, f"redefinition of global '{d.name}'")
                self.globals[d.name] = ty
                if d.init is not None:
                    if not isinstance(d.init, A.IntLit):
                        raise TypeCheckError(d.pos, "global initializers must be integer constants")
                    self.global_inits[d.name] = d.init.value

        functions: list[IRFunction] = []
        for d in self.prog.decls:
            if not isinstance(d, A.FuncDecl):
                continue
            if d.body is None:
                if not self.signatures[d.name].defined:
                    sig = self.signatures[d.name]
                    if all(f.name != d.name for f in functions):
                        functions.append(IRFunction(
                            d.name,
                            tuple(zip([n for n, _ in d.params], sig.params)),
                            sig.ret, [], compartment="external",
                        ))
                continue
            fl = _FuncLowerer(self, d)
            functions.append(fl.run())

        mod = IRModule(
            self.path,
            functions,
            [(n, t, "kernel") for n, t in self.globals.items()],
            list(self.table.decls.values()),
            self.global_inits,
        )
        return LowerResult(mod, self.table, self.warnings)


def _collect_address_taken(stmt: A.Stmt | None, acc: set[str]) -> None:
    def walk_expr(e: A.Expr) -> None:
        if isinstance(e, A.Unary):
            if e.op == "&" and isinstance(e.operand, A.Name):
                acc.add(e.operand.ident)
            walk_expr(e.operand)
        elif isinstance(e, A.Binary):
            walk_expr(e.left)
            walk_expr(e.right)
        elif isinstance(e, A.Call):
            walk_expr(e.callee)
            for a in e.args:
                walk_expr(a)
        elif isinstance(e, A.Index):
            walk_expr(e.base)
            walk_expr(e.index)
        elif isinstance(e, A.Member):
            walk_expr(e.base)
        elif isinstance(e, A.CastExpr):
            walk_expr(e.operand)

    def walk(s: A.Stmt | None) -> None:
        if s is None:
            return
        if isinstance(s, A.Block):
            for sub in s.stmts:
                walk(sub)
        elif isinstance(s, A.DeclStmt):
            if s.init is not None:
                walk_expr(s.init)
        elif isinstance(s, A.Assign):
            walk_expr(s.target)
            walk_expr(s.value)
        elif isinstance(s, A.ExprStmt):
            walk_expr(s.expr)
        elif isinstance(s, A.If):
            walk_expr(s.cond)
            walk(s.then)
            walk(s.els)
        elif isinstance(s, A.While):
            walk_expr(s.cond)
            walk(s.body)
        elif isinstance(s, A.For):
            walk(s.init)
            if s.cond is not None:
                walk_expr(s.cond)
            walk(s.step)
            walk(s.body)
        elif isinstance(s, A.Switch):
            walk_expr(s.expr)
            for case in s.cases:
                for sub in case.body:
                    walk(sub)
        elif isinstance(s, A.Return):
            if s.value is not None:
                walk_expr(s.value)

    walk(stmt)


class _FuncLowerer:
    def __init__(self, ml: _ModuleLowerer, decl: A.FuncDecl):
        self.ml = ml
        self.table = ml.table
        self.decl = decl
        self.ret_type = ml.signatures[decl.name].ret
        self.blocks: list[BasicBlock] = []
        self.cur: BasicBlock | None = None
        self.temp_count = 0
        self.block_count = 0
        self.locals: dict[str, TypeRef] = {}
        self.param_names = [n for n, _ in decl.params]
        self.addr_taken: set[str] = set()
        self.break_stack: list[str] = []
        self.continue_stack: list[str] = []
        self.sc_count = 0

    # ------------------------------------------------------------- plumbing

    def new_block(self) -> BasicBlock:
        blk = BasicBlock(f"b{self.block_count}")
        self.block_count += 1
        self.blocks.append(blk)
        return blk

    def start(self, blk: BasicBlock) -> None:
        self.cur = blk

    def emit(self, kind: str, pos: Pos, **kw) -> Instr:
        assert self.cur is not None
        ins = Instr(self.ml.next_iid(), kind, pos, **kw)
        self.cur.instrs.append(ins)
        if ins.is_terminator:
            self.cur = None
        return ins

    def new_temp(self) -> Temp:
        self.temp_count += 1
        return Temp(self.temp_count)

    def terminated(self) -> bool:
        return self.cur is None

    def ensure_block(self, pos: Pos) -> None:
        # Statements after a terminator (e.g. following a return) land in a
        # fresh block that CFG construction will flag dead.
        if self.cur is None:
            self.start(self.new_block())

    def is_memory_var(self, name: str) -> bool:
        if name in self.ml.globals:
            return True
        ty = self.local_type(name)
        if ty is None:
            return False
        rt = self.table.resolve(ty)
        if isinstance(rt, (Array, Named)) and not self.table.is_scalar(rt):
            return True
        return name in self.addr_taken

    def local_type(self, name: str) -> TypeRef | None:
        if name in self.locals:
            return self.locals[name]
        for n, t in zip(self.param_names, self.ml.signatures[self.decl.name].params):
            if n == name:
                return t
        return None

    # ------------------------------------------------------------------ run

    def run(self) -> IRFunction:
        decl = self.decl
        self.addr_taken = set()
        _collect_address_taken(decl.body, self.addr_taken)

        entry = self.new_block()
        self.start(entry)
        sig = self.ml.signatures[decl.name]

        # Address-taken scalar params become memory; copy the incoming value in.
        for (pname, _), pty in zip(decl.params, sig.params):
            if pname in self.addr_taken:
                addr = self.new_temp()
                self.emit("addr_of", decl.pos, dst=addr, operands=(Var(pname),), type=Ptr(pty))
                self.emit("store", decl.pos, operands=(addr, Var(pname)), type=pty)

        assert decl.body is not None
        self.lower_stmt(decl.body)
        if not self.terminated():
            if isinstance(self.table.resolve(self.ret_type), Void):
                self.emit("ret", decl.pos)
            else:
                self.emit("ret", decl.pos, operands=(Const(0, self.ret_type),), type=self.ret_type)
        for blk in self.blocks:
            if not blk.instrs or not blk.instrs[-1].is_terminator:
                # Dead block created by break/return flow; give it a ret so the
                # one-terminator invariant holds everywhere.
                saved = self.cur
                self.cur = blk
                if isinstance(self.table.resolve(self.ret_type), Void):
                    self.emit("ret", decl.pos)
                else:
                    self.emit("ret", decl.pos, operands=(Const(0, self.ret_type),), type=self.ret_type)
                self.cur = saved

        params = tuple(zip(self.param_names, sig.params))
        fn = IRFunction(decl.name, params, sig.ret, self.blocks)
        fn.local_types = dict(self.locals)
        fn.address_taken = frozenset(self.addr_taken)
        return fn

    # ----------------------------------------------------------- statements

    def lower_stmt(self, s: A.Stmt) -> None:
        if isinstance(s, A.Block):
            for sub in s.stmts:
                self.ensure_block(getattr(sub, "pos", self.decl.pos))
                self.lower_stmt(sub)
            return
        if isinstance(s, A.DeclStmt):
            ty = resolve_type_expr(s.type, self.table, s.pos)
            if s.name in self.locals:
                raise TypeCheckError(s.pos, f"redefinition of local '{s.name}'")
            self.locals[s.name] = ty
            if s.init is not None:
                self._lower_assign_to_name(s.name, s.init, s.pos)
            return
        if isinstance(s, A.Assign):
            self.lower_assign(s)
            return
        if isinstance(s, A.ExprStmt):
            self.lower_expr(s.expr, want_value=False)
            return
        if isinstance(s, A.If):
            self._lower_if(s)
            return
        if isinstance(s, A.While):
            self._lower_while(s)
            return
        if isinstance(s, A.For):
            self._lower_for(s)
            return
        if isinstance(s, A.Switch):
            self._lower_switch(s)
            return
        if isinstance(s, A.Return):
            self._lower_return(s)
            return
        if isinstance(s, A.Break):
            if not self.break_stack:
                raise TypeCheckError(s.pos, "break outside loop or switch")
            self.emit("jmp", s.pos, targets=(self.break_stack[-1],))
            return
        if isinstance(s, A.Continue):
            if not self.continue_stack:
                raise TypeCheckError(s.pos, "continue outside loop")
            self.emit("jmp", s.pos, targets=(self.continue_stack[-1],))
            return
        raise AssertionError(f"unknown statement {s!r}")

    def lower_assign(self, s: A.Assign) -> None:
        if isinstance(s.target, A.Name) and not self.is_memory_var(s.target.ident):
            ty = self.local_type(s.target.ident)
            if ty is None:
                raise TypeCheckError(s.pos, f"assignment to undeclared '{s.target.ident}'")
            self._lower_assign_to_name(s.target.ident, s.value, s.pos)
            return
        addr, pointee = self.lower_addr(s.target)
        val, vty = self.lower_expr(s.value)
        self._check_assignable(pointee, vty, s.value, s.pos)
        self.emit("store", s.pos, operands=(addr, val), type=pointee)

    def _lower_assign_to_name(self, name: str, value: A.Expr, pos: Pos) -> None:
        ty = self.local_type(name)
        if ty is None:
            raise TypeCheckError(pos, f"assignment to undeclared '{name}'")
        val, vty = self.lower_expr(value)
        self._check_assignable(ty, vty, value, pos)
        if self.is_memory_var(name):
            addr = self.new_temp()
            self.emit("addr_of", pos, dst=addr, operands=(Var(name),), type=Ptr(ty))
            self.emit("store", pos, operands=(addr, val), type=ty)
        else:
            self.emit("assign", pos, dst=Var(name), operands=(val,), type=ty)

    def _lower_if(self, s: A.If) -> None:
        cond, _ = self.lower_cond(s.cond)
        then_blk = self.new_block()
        join_blk: BasicBlock | None = None
        if s.els is not None:
            else_blk = self.new_block()
            self.emit("br", s.pos, operands=(cond,), targets=(then_blk.label, else_blk.label))
            self.start(then_blk)
            self.lower_stmt(s.then)
            then_open = not self.terminated()
            if then_open:
                join_blk = self.new_block()
                self.emit("jmp", s.pos, targets=(join_blk.label,))
            self.start(else_blk)
            self.lower_stmt(s.els)
            if not self.terminated():
                if join_blk is None:
                    join_blk = self.new_block()
                self.emit("jmp", s.pos, targets=(join_blk.label,))
            if join_blk is not None:
                self.start(join_blk)
            else:
                self.cur = None
        else:
            join_blk = self.new_block()
            self.emit("br", s.pos, operands=(cond,), targets=(then_blk.label, join_blk.label))
            self.start(then_blk)
            self.lower_stmt(s.then)
            if not self.terminated():
                self.emit("jmp", s.pos, targets=(join_blk.label,))
            self.start(join_blk)

    def _lower_while(self, s: A.While) -> None:
        cond_blk = self.new_block()
        self.emit("jmp", s.pos, targets=(cond_blk.label,))
        self.start(cond_blk)
        cond, _ = self.lower_cond(s.cond)
        body_blk = self.new_block()
        exit_blk = self.new_block()
        self.emit("br", s.pos, operands=(cond,), targets=(body_blk.label, exit_blk.label))
        self.break_stack.append(exit_blk.label)
        self.continue_stack.append(cond_blk.label)
        self.start(body_blk)
        self.lower_stmt(s.body)
        if not self.terminated():
            self.emit("jmp", s.pos, targets=(cond_blk.label,))
        self.break_stack.pop()
        self.continue_stack.pop()
        self.start(exit_blk)

    def _lower_for(self, s: A.For) -> None:
        if s.init is not None:
            self.lower_stmt(s.init)
        cond_blk = self.new_block()
        self.emit("jmp", s.pos, targets=(cond_blk.label,))
        self.start(cond_blk)
        if s.cond is not None:
            cond, _ = self.lower_cond(s.cond)
        else:
            cond = Const(1, INT32)
        body_blk = self.new_block()
        step_blk = self.new_block()
        exit_blk = self.new_block()
        self.emit("br", s.pos, operands=(cond,), targets=(body_blk.label, exit_blk.label))
        self.break_stack.append(exit_blk.label)
        self.continue_stack.append(step_blk.label)
        self.start(body_blk)
        self.lower_stmt(s.body)
        if not self.terminated():
            self.emit("jmp", s.pos, targets=(step_blk.label,))
        self.break_stack.pop()
        self.continue_stack.pop()
        self.start(step_blk)
        if s.step is not None:
            self.lower_stmt(s.step)
        if not self.terminated():
            self.emit("jmp", s.pos, targets=(cond_blk.label,))
        self.start(exit_blk)

    def _lower_switch(self, s: A.Switch) -> None:
        op, ty = self.lower_expr(s.expr)
        if not self._is_scalarish(ty):
            raise TypeCheckError(s.pos, "switch operand must be a scalar")
        exit_blk = self.new_block()
        case_blocks = [self.new_block() for _ in s.cases]
        default_label = exit_blk.label
        cases: list[tuple[int, str]] = []
        for case, blk in zip(s.cases, case_blocks):
            if case.value is None:
                default_label = blk.label
            else:
                cases.append((case.value, blk.label))
        self.emit("switch", s.pos, operands=(op,), targets=(default_label,), cases=tuple(cases))
        self.break_stack.append(exit_blk.label)
        for idx, (case, blk) in enumerate(zip(s.cases, case_blocks)):
            self.start(blk)
            for sub in case.body:
                self.ensure_block(getattr(sub, "pos", s.pos))
                self.lower_stmt(sub)
            if not self.terminated():
                nxt = case_blocks[idx + 1].label if idx + 1 < len(case_blocks) else exit_blk.label
                self.emit("jmp", s.pos, targets=(nxt,))
        self.break_stack.pop()
        self.start(exit_blk)

    def _lower_return(self, s: A.Return) -> None:
        want_void = isinstance(self.table.resolve(self.ret_type), Void)
        if s.value is None:
            if not want_void:
                raise TypeCheckError(s.pos, "return without a value in a non-void function")
            self.emit("ret", s.pos)
            return
        if want_void:
            raise TypeCheckError(s.pos, "return with a value in a void function")
        val, vty = self.lower_expr(s.value)
        self._check_assignable(self.ret_type, vty, s.value, s.pos)
        self.emit("ret", s.pos, operands=(val,), type=self.ret_type)

    # ---------------------------------------------------------- expressions

    def lower_cond(self, e: A.Expr) -> tuple[Operand, TypeRef]:
        op, ty = self.lower_expr(e)
        if not (self._is_scalarish(ty) or isinstance(self.table.resolve(ty), Ptr)):
            raise TypeCheckError(getattr(e, "pos", None), "condition must be scalar or pointer")
        return op, ty

    def lower_expr(self, e: A.Expr, want_value: bool = True) -> tuple[Operand, TypeRef]:
        pos = getattr(e, "pos", None) or self.decl.pos
        if isinstance(e, A.IntLit):
            return Const(e.value, INT32 if -(2**31) <= e.value < 2**31 else INT64), INT32 \
                if -(2**31) <= e.value < 2**31 else INT64
        if isinstance(e, A.StrLit):
            self.ml.str_count += 1
            return StrConst(self.ml.str_count, e.value), Ptr(Scalar("i8"))
        if isinstance(e, A.SizeOf):
            ty = resolve_type_expr(e.type, self.table, pos)
            size = self.table.size_of(self.table.resolve(ty) if isinstance(ty, Named) else ty)
            return Const(size, UINT64, sized=ty), UINT64
        if isinstance(e, A.Name):
            return self._lower_name(e, pos)
        if isinstance(e, A.Unary):
            return self._lower_unary(e, pos)
        if isinstance(e, A.Binary):
            return self._lower_binary(e, pos)
        if isinstance(e, A.CastExpr):
            return self._lower_cast(e, pos)
        if isinstance(e, A.Call):
            return self._lower_call(e, pos, want_value)
        if isinstance(e, (A.Member, A.Index)):
            addr, pointee = self.lower_addr(e)
            return self._load_or_decay(addr, pointee, pos)
        raise AssertionError(f"unknown expression {e!r}")

    def _lower_name(self, e: A.Name, pos: Pos) -> tuple[Operand, TypeRef]:
        ty = self.local_type(e.ident)
        if ty is not None:
            rt = self.table.resolve(ty)
            if isinstance(rt, Named) and not self.table.is_scalar(rt):
                raise TypeCheckError(pos, f"aggregate '{e.ident}' used as a value")
            if self.is_memory_var(e.ident):
                addr = self.new_temp()
                if isinstance(rt, Array):
                    self.emit("addr_of", pos, dst=addr, operands=(Var(e.ident),), type=Ptr(rt.elem))
                    return addr, Ptr(rt.elem)
                self.emit("addr_of", pos, dst=addr, operands=(Var(e.ident),), type=Ptr(ty))
                val = self.new_temp()
                self.emit("load", pos, dst=val, operands=(addr,), type=ty)
                return val, ty
            return Var(e.ident), ty
        if e.ident in self.ml.globals:
            gty = self.ml.globals[e.ident]
            rt = self.table.resolve(gty)
            if isinstance(rt, Named) and not self.table.is_scalar(rt):
                raise TypeCheckError(pos, f"aggregate '{e.ident}' used as a value")
            addr = self.new_temp()
            if isinstance(rt, Array):
                self.emit("addr_of", pos, dst=addr, operands=(Var(e.ident, True),), type=Ptr(rt.elem))
                return addr, Ptr(rt.elem)
            self.emit("addr_of", pos, dst=addr, operands=(Var(e.ident, True),), type=Ptr(gty))
            val = self.new_temp()
            self.emit("load", pos, dst=val, operands=(addr,), type=gty)
            return val, gty
        sig = self.ml.signatures.get(e.ident)
        if sig is not None:
            return FuncRef(e.ident), Ptr(FuncType(sig.ret, sig.params))
        raise TypeCheckError(pos, f"use of undeclared identifier '{e.ident}'")

    def _lower_unary(self, e: A.Unary, pos: Pos) -> tuple[Operand, TypeRef]:
        if e.op == "&":
            if isinstance(e.operand, A.Name) and self.local_type(e.operand.ident) is None \
                    and e.operand.ident not in self.ml.globals:
                sig = self.ml.signatures.get(e.operand.ident)
                if sig is not None:
                    return FuncRef(e.operand.ident), Ptr(FuncType(sig.ret, sig.params))
                raise TypeCheckError(pos, f"use of undeclared identifier '{e.operand.ident}'")
            addr, pointee = self.lower_addr(e.operand)
            return addr, Ptr(pointee)
        if e.op == "*":
            val, ty = self.lower_expr(e.operand)
            rt = self.table.resolve(ty)
            if not isinstance(rt, Ptr):
                raise TypeCheckError(pos, "dereference of a non-pointer")
            return self._load_or_decay(val, rt.elem, pos)
        val, ty = self.lower_expr(e.operand)
        if e.op == "-":
            sc = self._arith_scalar(ty, pos)
            dst = self.new_temp()
            self.emit("int_arith", pos, dst=dst, op="sub", operands=(Const(0, sc), val), type=sc)
            return dst, sc
        if e.op == "~":
            sc = self._arith_scalar(ty, pos)
            dst = self.new_temp()
            self.emit("int_arith", pos, dst=dst, op="xor", operands=(val, Const(-1, sc)), type=sc)
            return dst, sc
        if e.op == "!":
            dst = self.new_temp()
            zero = Const(0, INT32)
            self.emit("compare", pos, dst=dst, op="eq", operands=(val, zero), type=INT32)
            return dst, INT32
        raise AssertionError(f"unknown unary {e.op}")

    def _lower_binary(self, e: A.Binary, pos: Pos) -> tuple[Operand, TypeRef]:
        if e.op in ("&&", "||"):
            return self._lower_short_circuit(e, pos)
        if e.op in _CMP_OPS:
            lv, lt = self.lower_expr(e.left)
            rv, rt = self.lower_expr(e.right)
            self._check_comparable(lt, rt, pos)
            dst = self.new_temp()
            self.emit("compare", pos, dst=dst, op=_CMP_OPS[e.op], operands=(lv, rv), type=INT32)
            return dst, INT32
        lv, lt = self.lower_expr(e.left)
        rv, rt = self.lower_expr(e.right)
        lres = self.table.resolve(lt)
        rres = self.table.resolve(rt)
        if e.op in ("+", "-") and isinstance(lres, Ptr) and self._is_scalarish(rt):
            dst = self.new_temp()
            self.emit("ptr_arith", pos, dst=dst, op=_ARITH_OPS[e.op], operands=(lv, rv), type=lres)
            return dst, lres
        if e.op == "+" and isinstance(rres, Ptr) and self._is_scalarish(lt):
            dst = self.new_temp()
            self.emit("ptr_arith", pos, dst=dst, op="add", operands=(rv, lv), type=rres)
            return dst, rres
        if e.op == "-" and isinstance(lres, Ptr) and isinstance(rres, Ptr):
            dst = self.new_temp()
            self.emit("int_arith", pos, dst=dst, op="sub", operands=(lv, rv), type=INT64)
            return dst, INT64
        lsc = self._arith_scalar(lt, pos)
        rsc = self._arith_scalar(rt, pos)
        out = lsc if lsc.width >= rsc.width else rsc
        if e.op in ("/", "%") and isinstance(rv, Const) and rv.value == 0:
            self.ml.warnings.append(f"{pos}: division by constant zero")
        dst = self.new_temp()
        self.emit("int_arith", pos, dst=dst, op=_ARITH_OPS[e.op], operands=(lv, rv), type=out)
        return dst, out

    def _lower_short_circuit(self, e: A.Binary, pos: Pos) -> tuple[Operand, TypeRef]:
        self.sc_count += 1
        name = f"__sc{self.sc_count}"
        self.locals[name] = INT32

        lv, _ = self.lower_cond(e.left)
        rhs_blk = self.new_block()
        short_blk = self.new_block()
        join_blk = self.new_block()
        if e.op == "&&":
            self.emit("br", pos, operands=(lv,), targets=(rhs_blk.label, short_blk.label))
            short_val = 0
        else:
            self.emit("br", pos, operands=(lv,), targets=(short_blk.label, rhs_blk.label))
            short_val = 1
        self.start(short_blk)
        self.emit("assign", pos, dst=Var(name), operands=(Const(short_val, INT32),), type=INT32)
        self.emit("jmp", pos, targets=(join_blk.label,))
        self.start(rhs_blk)
        rv, _ = self.lower_cond(e.right)
        dst = self.new_temp()
        self.emit("compare", pos, dst=dst, op="ne", operands=(rv, Const(0, INT32)), type=INT32)
        self.emit("assign", pos, dst=Var(name), operands=(dst,), type=INT32)
        self.emit("jmp", pos, targets=(join_blk.label,))
        self.start(join_blk)
        return Var(name), INT32

    def _lower_cast(self, e: A.CastExpr, pos: Pos) -> tuple[Operand, TypeRef]:
        target = resolve_type_expr(e.type, self.table, pos)
        val, src = self.lower_expr(e.operand)
        tres = self.table.resolve(target)
        sres = self.table.resolve(src)
        ok = (
            (self._is_scalarish(src) and self._is_scalarish(target))
            or (isinstance(sres, Ptr) and isinstance(tres, Ptr))
            or (isinstance(sres, Ptr) and self._is_scalarish(target))
            or (self._is_scalarish(src) and isinstance(tres, Ptr))
        )
        if not ok:
            raise TypeCheckError(pos, f"invalid cast from '{src}' to '{target}'")
        dst = self.new_temp()
        self.emit("cast", pos, dst=dst, operands=(val,), type=target, src_type=src)
        return dst, target

    def _lower_call(self, e: A.Call, pos: Pos, want_value: bool) -> tuple[Operand, TypeRef]:
        if isinstance(e.callee, A.Name):
            name = e.callee.ident
            local = self.local_type(name)
            if local is None and name not in self.ml.globals:
                sig = self.ml.signatures.get(name)
                if sig is None:
                    raise TypeCheckError(pos, f"call to undeclared function '{name}'")
                args = self._lower_args(e.args, sig.params, name, pos)
                ret = sig.ret
                dst = None if isinstance(self.table.resolve(ret), Void) else self.new_temp()
                self.emit("call", pos, dst=dst, callee=name, operands=tuple(args), type=ret)
                return (dst if dst is not None else Const(0, INT32)), ret
        fp, fpty = self.lower_expr(e.callee)
        rt = self.table.resolve(fpty)
        if not (isinstance(rt, Ptr) and isinstance(self.table.resolve(rt.elem), FuncType)):
            raise TypeCheckError(pos, "called object is not a function or function pointer")
        ftype = self.table.resolve(rt.elem)
        assert isinstance(ftype, FuncType)
        args = self._lower_args(e.args, ftype.params, "<indirect>", pos)
        ret = ftype.ret
        dst = None if isinstance(self.table.resolve(ret), Void) else self.new_temp()
        self.emit("icall", pos, dst=dst, operands=(fp,) + tuple(args), type=ret)
        return (dst if dst is not None else Const(0, INT32)), ret

    def _lower_args(self, args: tuple[A.Expr, ...], params: tuple[TypeRef, ...],
                    name: str, pos: Pos) -> list[Operand]:
        if len(args) != len(params):
            raise TypeCheckError(
                pos, f"call to '{name}' with {len(args)} arguments, expected {len(params)}"
            )
        out: list[Operand] = []
        for a, pty in zip(args, params):
            val, vty = self.lower_expr(a)
            self._check_assignable(pty, vty, a, getattr(a, "pos", pos) or pos)
            out.append(val)
        return out

    # -------------------------------------------------------------- lvalues

    def lower_addr(self, e: A.Expr) -> tuple[Operand, TypeRef]:
        """Address of an lvalue; returns (address operand, pointee type)."""
        pos = getattr(e, "pos", None) or self.decl.pos
        if isinstance(e, A.Name):
            ty = self.local_type(e.ident)
            is_global = False
            if ty is None:
                ty = self.ml.globals.get(e.ident)
                is_global = ty is not None
            if ty is None:
                raise TypeCheckError(pos, f"use of undeclared identifier '{e.ident}'")
            if not is_global and not self.is_memory_var(e.ident):
                raise TypeCheckError(pos, f"cannot take the address of register variable '{e.ident}'")
            rt = self.table.resolve(ty)
            addr = self.new_temp()
            if isinstance(rt, Array):
                self.emit("addr_of", pos, dst=addr, operands=(Var(e.ident, is_global),), type=Ptr(rt.elem))
                return addr, rt.elem
            self.emit("addr_of", pos, dst=addr, operands=(Var(e.ident, is_global),), type=Ptr(ty))
            return addr, ty
        if isinstance(e, A.Unary) and e.op == "*":
            val, ty = self.lower_expr(e.operand)
            rt = self.table.resolve(ty)
            if not isinstance(rt, Ptr):
                raise TypeCheckError(pos, "dereference of a non-pointer")
            return val, rt.elem
        if isinstance(e, A.Member):
            return self._lower_member_addr(e, pos)
        if isinstance(e, A.Index):
            base, bty = self.lower_expr(e.base)
            brt = self.table.resolve(bty)
            if not isinstance(brt, Ptr):
                raise TypeCheckError(pos, "indexed expression is not a pointer or array")
            idx, ity = self.lower_expr(e.index)
            if not self._is_scalarish(ity):
                raise TypeCheckError(pos, "array index must be a scalar")
            elem = brt.elem
            ert = self.table.resolve(elem)
            addr = self.new_temp()
            out_ty = Ptr(ert.elem) if isinstance(ert, Array) else Ptr(elem)
            self.emit("index", pos, dst=addr, operands=(base, idx), type=out_ty)
            return addr, elem
        raise TypeCheckError(pos, "expression is not an lvalue")

    def _lower_member_addr(self, e: A.Member, pos: Pos) -> tuple[Operand, TypeRef]:
        if e.arrow:
            base, bty = self.lower_expr(e.base)
            brt = self.table.resolve(bty)
            if not isinstance(brt, Ptr):
                raise TypeCheckError(pos, "'->' applied to a non-pointer")
            rec_ty = brt.elem
        else:
            base, rec_ty = self.lower_addr(e.base)
        rec = self.table.record_of(rec_ty)
        if rec is None:
            raise TypeCheckError(pos, f"member access on non-aggregate type '{rec_ty}'")
        fty = rec.field_type(e.fieldname)
        if fty is None:
            raise TypeCheckError(pos, f"no field '{e.fieldname}' in '{rec.kind} {rec.name}'")
        addr = self.new_temp()
        frt = self.table.resolve(fty)
        out_ty = Ptr(frt.elem) if isinstance(frt, Array) else Ptr(fty)
        self.emit("field_access", pos, dst=addr, operands=(base,), type=out_ty,
                  tdecl=rec.name, fieldname=e.fieldname)
        return addr, fty

    def _load_or_decay(self, addr: Operand, pointee: TypeRef, pos: Pos) -> tuple[Operand, TypeRef]:
        rt = self.table.resolve(pointee)
        if isinstance(rt, Array):
            return addr, Ptr(rt.elem)  # arrays decay; the address is the value
        if isinstance(rt, Named) and not self.table.is_scalar(rt):
            return addr, Ptr(pointee)  # aggregate rvalue is its address
        val = self.new_temp()
        self.emit("load", pos, dst=val, operands=(addr,), type=pointee)
        return val, pointee

    # ------------------------------------------------------------ type fits

    def _is_scalarish(self, t: TypeRef) -> bool:
        return self.table.is_scalar(t)

    def _arith_scalar(self, t: TypeRef, pos: Pos) -> Scalar:
        if not self._is_scalarish(t):
            raise TypeCheckError(pos, f"arithmetic on non-scalar type '{t}'")
        return self.table.scalar_of(t)

    def _check_comparable(self, lt: TypeRef, rt: TypeRef, pos: Pos) -> None:
        lres = self.table.resolve(lt)
        rres = self.table.resolve(rt)
        if self._is_scalarish(lt) and self._is_scalarish(rt):
            return
        if isinstance(lres, Ptr) and isinstance(rres, Ptr):
            return
        if isinstance(lres, Ptr) and self._is_scalarish(rt):
            return
        if isinstance(rres, Ptr) and self._is_scalarish(lt):
            return
        raise TypeCheckError(pos, f"cannot compare '{lt}' with '{rt}'")

    def _check_assignable(self, dst: TypeRef, src: TypeRef, src_expr: A.Expr, pos: Pos) -> None:
        dres = self.table.resolve(dst)
        sres = self.table.resolve(src)
        if self._is_scalarish(dst) and self._is_scalarish(src):
            return
        if isinstance(dres, Ptr) and isinstance(sres, Ptr):
            de = self.table.resolve(dres.elem)
            se = self.table.resolve(sres.elem)
            if de == se or isinstance(de, Void) or isinstance(se, Void):
                return
            raise TypeCheckError(pos, f"incompatible pointer assignment: '{src}' to '{dst}'")
        if isinstance(dres, Ptr) and isinstance(src_expr, A.IntLit) and src_expr.value == 0:
            return  # null pointer constant
        raise TypeCheckError(pos, f"cannot assign '{src}' to '{dst}'")

