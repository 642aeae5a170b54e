"""Resolved types and type declarations.

TypeRefs are immutable and hashable. A TypeTable owns every TypeDecl of an
analysis run; modules contribute their declarations and same-named
declarations from different files must agree structurally.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from civscan.errors import Pos, TypeCheckError

SCALAR_WIDTHS = {
    "i8": 8, "u8": 8, "i16": 16, "u16": 16,
    "i32": 32, "u32": 32, "i64": 64, "u64": 64,
}


@dataclass(frozen=True)
class Scalar:
    name: str  # i8 u8 i16 u16 i32 u32 i64 u64

    @property
    def width(self) -> int:
        return SCALAR_WIDTHS[self.name]

    @property
    def signed(self) -> bool:
        return self.name.startswith("i")

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Void:
    def __str__(self) -> str:
        return "void"


@dataclass(frozen=True)
class Named:
    kind: str  # struct | union | enum | scalar-alias
    name: str

    def __str__(self) -> str:
        if self.kind == "scalar-alias":
            return self.name
        return f"{self.kind} {self.name}"


@dataclass(frozen=True)
class Ptr:
    elem: "TypeRef"

    def __str__(self) -> str:
        return f"*{self.elem}"


@dataclass(frozen=True)
class Array:
    elem: "TypeRef"
    size: int

    def __str__(self) -> str:
        return f"[{self.size} x {self.elem}]"


@dataclass(frozen=True)
class FuncType:
    ret: "TypeRef"
    params: tuple["TypeRef", ...]

    def __str__(self) -> str:
        return f"{self.ret}({', '.join(str(p) for p in self.params)})"


TypeRef = Union[Scalar, Void, Named, Ptr, Array, FuncType]

INT32 = Scalar("i32")
INT64 = Scalar("i64")
UINT64 = Scalar("u64")
CHAR = Scalar("i8")


@dataclass
class TypeDecl:
    """One named type: aggregate, union, enum, or scalar alias."""

    name: str
    kind: str  # aggregate | union | enum | scalar-alias
    fields: tuple[tuple[str, TypeRef], ...] = ()
    selector_field: Optional[str] = None
    aliased: Optional[TypeRef] = None  # scalar-alias only
    enumerators: tuple[tuple[str, int], ...] = ()
    pos: Optional[Pos] = None

    def field_type(self, fname: str) -> Optional[TypeRef]:
        for n, t in self.fields:
            if n == fname:
                return t
        return None


class TypeTable:
    """Registry of TypeDecls with alias resolution and merge checking."""

    def __init__(self) -> None:
        self.decls: dict[str, TypeDecl] = {}

    def add(self, decl: TypeDecl) -> None:
        prev = self.decls.get(decl.name)
        if prev is None:
            self.decls[decl.name] = decl
            return
        if (prev.kind, prev.fields, prev.selector_field, prev.aliased, prev.enumerators) != (
            decl.kind, decl.fields, decl.selector_field, decl.aliased, decl.enumerators
        ):
            raise TypeCheckError(
                decl.pos, f"conflicting redeclaration of type '{decl.name}'"
            )

    def get(self, name: str) -> Optional[TypeDecl]:
        return self.decls.get(name)

    def resolve(self, t: TypeRef) -> TypeRef:
        """Chase scalar aliases down to a concrete type."""
        seen = 0
        while isinstance(t, Named):
            decl = self.decls.get(t.name)
            if decl is None or decl.kind != "scalar-alias" or decl.aliased is None:
                return t
            t = decl.aliased
            seen += 1
            if seen > 32:
                raise TypeCheckError(decl.pos, f"alias cycle through '{t}'")
        return t

    def record_of(self, t: TypeRef) -> Optional[TypeDecl]:
        """The aggregate/union TypeDecl behind a type, if any."""
        t = self.resolve(t)
        if isinstance(t, Named):
            decl = self.decls.get(t.name)
            if decl is not None and decl.kind in ("aggregate", "union"):
                return decl
        return None

    def is_scalar(self, t: TypeRef) -> bool:
        t = self.resolve(t)
        if isinstance(t, Scalar):
            return True
        if isinstance(t, Named):
            decl = self.decls.get(t.name)
            return decl is not None and decl.kind == "enum"
        return False

    def scalar_of(self, t: TypeRef) -> Scalar:
        t = self.resolve(t)
        if isinstance(t, Scalar):
            return t
        if isinstance(t, Named):
            decl = self.decls.get(t.name)
            if decl is not None and decl.kind == "enum":
                return INT32
        raise TypeCheckError(None, f"expected a scalar type, got '{t}'")

    def size_of(self, t: TypeRef) -> int:
        """Byte size used by sizeof; pointers are 8 bytes."""
        t = self.resolve(t)
        if isinstance(t, Scalar):
            return t.width // 8
        if isinstance(t, (Ptr, FuncType)):
            return 8
        if isinstance(t, Array):
            return t.size * self.size_of(t.elem)
        if isinstance(t, Void):
            return 1
        if isinstance(t, Named):
            decl = self.decls.get(t.name)
            if decl is None:
                raise TypeCheckError(None, f"sizeof of undeclared type '{t}'")
            if decl.kind == "enum":
                return 4
            sizes = [self.size_of(ft) for _, ft in decl.fields]
            if decl.kind == "union":
                return max(sizes, default=1)
            return sum(sizes) or 1
        raise TypeCheckError(None, f"sizeof of '{t}' is not defined")

    def validate(self) -> None:
        """Check invariants: unique field names, selector sanity, recursion only via pointers."""
        for decl in self.decls.values():
            names = [n for n, _ in decl.fields]
            if len(names) != len(set(names)):
                raise TypeCheckError(decl.pos, f"duplicate field name in '{decl.name}'")
            if decl.selector_field is not None:
                self._check_selector(decl)
        for decl in self.decls.values():
            if decl.kind in ("aggregate", "union"):
                self._check_recursion(decl.name, decl, ())

    def _check_selector(self, decl: TypeDecl) -> None:
        sel = decl.selector_field
        assert sel is not None
        if decl.field_type(sel) is not None and self.is_scalar(decl.field_type(sel)):  # type: ignore[arg-type]
            return
        # The selector may live on an aggregate that embeds this type.
        for other in self.decls.values():
            if other.kind != "aggregate":
                continue
            holds_this = any(
                isinstance(self.resolve(ft), Named) and self.resolve(ft).name == decl.name  # type: ignore[union-attr]
                for _, ft in other.fields
            )
            sel_ty = other.field_type(sel)
            if holds_this and sel_ty is not None and self.is_scalar(sel_ty):
                return
        raise TypeCheckError(
            decl.pos,
            f"selector '{sel}' of '{decl.name}' does not name a scalar field "
            "of the declaration or an enclosing aggregate",
        )

    def _check_recursion(self, root: str, decl: TypeDecl, path: tuple[str, ...]) -> None:
        for fname, ft in decl.fields:
            rt = self.resolve(ft)
            while isinstance(rt, Array):
                rt = self.resolve(rt.elem)
            if isinstance(rt, Named):
                sub = self.decls.get(rt.name)
                if sub is None or sub.kind not in ("aggregate", "union"):
                    continue
                if sub.name == root or sub.name in path:
                    raise TypeCheckError(
                        decl.pos,
                        f"type '{root}' is directly recursive through field '{fname}'",
                    )
                self._check_recursion(root, sub, path + (decl.name,))
