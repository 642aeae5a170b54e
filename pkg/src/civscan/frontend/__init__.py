"""MiniKer frontend: tokenizer, parser, type table, and IR lowering."""

from civscan.frontend.ast_nodes import Program, program_text
from civscan.frontend.ir import IRFunction, IRModule, dump_module
from civscan.frontend.lower import LowerResult, lower
from civscan.frontend.mtypes import TypeDecl, TypeTable
from civscan.frontend.parser import parse, parse_text
from civscan.frontend.tokens import Token, tokenize

__all__ = [
    "Program", "program_text", "IRFunction", "IRModule", "dump_module",
    "LowerResult", "lower", "TypeDecl", "TypeTable", "parse", "parse_text",
    "Token", "tokenize",
]
