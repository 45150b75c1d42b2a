"""Surface language: parser, elaborator, printer and command line."""

from .cli import check_file, main, size_table
from .elab import CheckResult, Definition, Session, elaborate
from .printer import Printer, print_context, print_definition, print_term, print_type, size
from .syntax import parse, parse_term, parse_text, parse_type, tokenize

__all__ = [
    "CheckResult", "Definition", "Printer", "Session", "check_file", "elaborate", "main",
    "parse", "parse_term", "parse_text", "parse_type", "print_context", "print_definition",
    "print_term", "print_type", "size", "size_table", "tokenize",
]
