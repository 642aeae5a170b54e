"""Three-address IR for lowered MiniKer modules.

Instruction kinds: load, store, addr_of, field_access, index, ptr_arith,
int_arith, compare, cast, call, icall, assign, br, jmp, switch, ret.
Aggregates are only touched through addresses; scalars that never have
their address taken live as named variables with assign/use def-use.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from civscan.errors import Pos
from civscan.frontend.mtypes import TypeDecl, TypeRef

# ------------------------------------------------------------------ operands


@dataclass(frozen=True)
class Temp:
    tid: int

    def __str__(self) -> str:
        return f"t{self.tid}"


@dataclass(frozen=True)
class Var:
    name: str
    is_global: bool = False

    def __str__(self) -> str:
        return f"@{self.name}" if self.is_global else f"%{self.name}"


@dataclass(frozen=True)
class Const:
    value: int
    type: TypeRef
    sized: Optional[TypeRef] = None  # the operand came from sizeof(sized)

    def __str__(self) -> str:
        if self.sized is not None:
            return f"sizeof({self.sized})"
        return str(self.value)


@dataclass(frozen=True)
class FuncRef:
    name: str

    def __str__(self) -> str:
        return f"&{self.name}"


@dataclass(frozen=True)
class StrConst:
    sid: int
    value: str

    def __str__(self) -> str:
        body = self.value.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
        return f'"{body}"'


Operand = Union[Temp, Var, Const, FuncRef, StrConst]

TERMINATORS = ("br", "jmp", "switch", "ret")


@dataclass
class Instr:
    iid: int
    kind: str
    pos: Pos
    dst: Optional[Union[Temp, Var]] = None
    operands: tuple[Operand, ...] = ()
    type: Optional[TypeRef] = None
    op: Optional[str] = None           # int_arith/compare/ptr_arith operator
    tdecl: Optional[str] = None        # field_access: owning TypeDecl name
    fieldname: Optional[str] = None    # field_access
    callee: Optional[str] = None       # call
    targets: tuple[str, ...] = ()      # br: (then, else); jmp: (next,); switch: (default,)
    cases: tuple[tuple[int, str], ...] = ()  # switch
    src_type: Optional[TypeRef] = None  # cast

    def text(self) -> str:
        k = self.kind
        ops = ", ".join(str(o) for o in self.operands)
        lhs = f"{self.dst} = " if self.dst is not None else ""
        if k == "field_access":
            return f"{lhs}field_access {ops}, {self.tdecl}.{self.fieldname}"
        if k in ("int_arith", "compare", "ptr_arith"):
            return f"{lhs}{k}.{self.op} {ops}"
        if k == "call":
            return f"{lhs}call {self.callee}({ops})"
        if k == "icall":
            return f"{lhs}icall {ops}"
        if k == "cast":
            return f"{lhs}cast {ops} : {self.src_type} -> {self.type}"
        if k == "br":
            return f"br {ops}, {self.targets[0]}, {self.targets[1]}"
        if k == "jmp":
            return f"jmp {self.targets[0]}"
        if k == "switch":
            arms = ", ".join(f"{v} -> {lbl}" for v, lbl in self.cases)
            return f"switch {ops} [{arms}] default {self.targets[0]}"
        if k == "ret":
            return f"ret {ops}".rstrip()
        return f"{lhs}{k} {ops}"

    @property
    def is_terminator(self) -> bool:
        return self.kind in TERMINATORS


@dataclass
class BasicBlock:
    label: str
    instrs: list[Instr] = field(default_factory=list)

    @property
    def terminator(self) -> Instr:
        return self.instrs[-1]


@dataclass
class IRFunction:
    name: str
    params: tuple[tuple[str, TypeRef], ...]
    return_type: TypeRef
    blocks: list[BasicBlock]
    compartment: str = "kernel"  # kernel | driver | external
    local_types: dict[str, TypeRef] = field(default_factory=dict)
    address_taken: frozenset[str] = frozenset()

    @property
    def is_external(self) -> bool:
        return not self.blocks

    def instructions(self):
        for b in self.blocks:
            yield from b.instrs

    def entry(self) -> BasicBlock:
        return self.blocks[0]


@dataclass
class IRModule:
    path: str
    functions: list[IRFunction]
    globals: list[tuple[str, TypeRef, str]]  # (name, type, compartment)
    types: list[TypeDecl]
    global_inits: dict[str, int] = field(default_factory=dict)

    def function(self, name: str) -> Optional[IRFunction]:
        for f in self.functions:
            if f.name == name:
                return f
        return None


def dump_module(mod: IRModule) -> str:
    """Deterministic textual IR, one function per section."""
    out: list[str] = [f"; module {mod.path}"]
    for name, ty, comp in mod.globals:
        out.append(f"global @{name} : {ty} [{comp}]")
    for fn in mod.functions:
        params = ", ".join(f"%{n}: {t}" for n, t in fn.params)
        if fn.is_external:
            out.append(f"declare {fn.name}({params}) -> {fn.return_type}")
            continue
        out.append(f"function {fn.name}({params}) -> {fn.return_type} [{fn.compartment}]")
        for blk in fn.blocks:
            out.append(f"{blk.label}:")
            for ins in blk.instrs:
                out.append(f"  {ins.text()}")
    return "\n".join(out) + "\n"
