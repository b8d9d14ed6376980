"""Two-pass assembler, disassembler and hex memory-image I/O.

Source syntax, one statement per line::

    label:  MNEMONIC [operand]   ; comment
            .byte  value
            .org   address

Operands are decimal, ``0x`` hex, or a label name. Mnemonics and directives
are case-insensitive; labels are not. Branch mnemonics take no operand since
their offsets are fixed by the encoding.

Lines in the form emitted by :func:`disassemble` (``"05: 55  ADD 21"``) are
also accepted: the leading address acts as an ``.org`` and the byte column is
ignored, so a listing assembles back to the image it came from.
"""

import re
from dataclasses import dataclass, field
from enum import Enum

from . import isa
from .isa import Instruction, Kind

__all__ = [
    "ADDRESS_SPACE", "StatementKind", "Statement", "MemoryImage", "AssemblyError",
    "HexFormatError", "parse_source", "assemble", "assemble_source", "disassemble",
    "format_hex", "parse_hex",
]

ADDRESS_SPACE = 32

_LABEL_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_NUMBER_RE = re.compile(r"0[xX][0-9A-Fa-f]+|[0-9]+")
_LISTING_RE = re.compile(r"([0-9A-Fa-f]{2}):\s+[0-9A-Fa-f]{2}(?:\s+|$)")
_OPERAND_KINDS = frozenset(isa.MEMORY_KINDS) | {Kind.ADDI}


class StatementKind(Enum):
    LABEL = "label"
    INSTRUCTION = "instruction"
    BYTE = "byte"
    ORIGIN = "origin"


@dataclass(frozen=True)
class Statement:
    """One parsed statement.

    ``name`` is set for labels, ``mnemonic`` for instructions, and ``operand``
    holds an int literal or an unresolved label name.
    """

    kind: StatementKind
    line: int
    name: str | None = None
    mnemonic: Kind | None = None
    operand: int | str | None = None


@dataclass
class MemoryImage:
    """Sparse 32-byte memory image: address -> byte, plus optional symbols.

    Equality compares the bytes only.
    """

    cells: dict[int, int] = field(default_factory=dict)
    symbols: dict[str, int] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        for addr, value in self.cells.items():
            if not 0 <= addr < ADDRESS_SPACE:
                raise ValueError(f"address {addr} outside 0..{ADDRESS_SPACE - 1}")
            if not 0 <= value <= 0xFF:
                raise ValueError(f"value {value} at address {addr} is not a byte")
        self.cells = dict(sorted(self.cells.items()))

    @classmethod
    def from_bytes(cls, data, start: int = 0) -> "MemoryImage":
        return cls({start + i: b for i, b in enumerate(data)})

    def __len__(self):
        return len(self.cells)

    def get(self, addr: int, default: int = 0) -> int:
        return self.cells.get(addr, default)


class AssemblyError(Exception):
    """Assembly failure. ``category`` is one of CATEGORIES."""

    CATEGORIES = (
        "syntax", "unknown-mnemonic", "duplicate-label", "undefined-label",
        "operand-range", "image-overflow", "address-collision",
    )

    def __init__(self, category: str, line: int, message: str):
        assert category in self.CATEGORIES, category
        super().__init__(f"line {line}: {category}: {message}")
        self.category = category
        self.line = line
        self.message = message


class HexFormatError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.message = message


def _parse_operand(token: str, lineno: int) -> int | str:
    if _NUMBER_RE.fullmatch(token):
        return int(token, 0) if token[:2].lower() == "0x" else int(token, 10)
    if _LABEL_RE.fullmatch(token):
        return token
    raise AssemblyError("syntax", lineno, f"malformed operand {token!r}")


def _parse_line(text: str, lineno: int) -> list[Statement]:
    out: list[Statement] = []
    text = text.split(";", 1)[0].strip()

    m = _LISTING_RE.match(text)
    if m:
        out.append(Statement(StatementKind.ORIGIN, lineno, operand=int(m.group(1), 16)))
        text = text[m.end():].strip()

    if ":" in text:
        name, text = text.split(":", 1)
        name, text = name.strip(), text.strip()
        if not _LABEL_RE.fullmatch(name):
            raise AssemblyError("syntax", lineno, f"bad label name {name!r}")
        out.append(Statement(StatementKind.LABEL, lineno, name=name))
    if not text:
        return out

    words = text.split()
    head, args = words[0], words[1:]
    if len(args) > 1:
        raise AssemblyError("syntax", lineno, f"too many operands: {' '.join(args)}")
    operand = _parse_operand(args[0], lineno) if args else None

    if head.startswith("."):
        directive = head.lower()
        if directive not in (".byte", ".org"):
            raise AssemblyError("syntax", lineno, f"unknown directive {head}")
        if operand is None:
            raise AssemblyError("syntax", lineno, f"{directive} needs a value")
        if directive == ".org" and not isinstance(operand, int):
            raise AssemblyError("syntax", lineno, ".org needs a numeric address")
        kind = StatementKind.BYTE if directive == ".byte" else StatementKind.ORIGIN
        out.append(Statement(kind, lineno, operand=operand))
        return out

    try:
        mnemonic = isa.from_mnemonic(head)
    except KeyError:
        raise AssemblyError("unknown-mnemonic", lineno, f"unknown mnemonic {head!r}") from None
    if mnemonic in _OPERAND_KINDS and operand is None:
        raise AssemblyError("syntax", lineno, f"{mnemonic.value} needs an operand")
    if mnemonic not in _OPERAND_KINDS and operand is not None:
        raise AssemblyError("syntax", lineno, f"{mnemonic.value} takes no operand")
    out.append(Statement(StatementKind.INSTRUCTION, lineno, mnemonic=mnemonic, operand=operand))
    return out


def parse_source(source: str) -> list[Statement]:
    statements = []
    for lineno, text in enumerate(source.splitlines(), start=1):
        statements.extend(_parse_line(text, lineno))
    return statements


def assemble(statements) -> MemoryImage:
    # Pass 1: addresses and labels.
    symbols: dict[str, int] = {}
    placed: list[tuple[int, Statement]] = []
    loc = 0
    for st in statements:
        if st.kind is StatementKind.ORIGIN:
            if not 0 <= st.operand < ADDRESS_SPACE:
                raise AssemblyError("operand-range", st.line, f".org {st.operand} outside 0..31")
            loc = st.operand
        elif st.kind is StatementKind.LABEL:
            if st.name in symbols:
                raise AssemblyError("duplicate-label", st.line, f"label {st.name!r} already defined")
            symbols[st.name] = loc
        else:
            if loc >= ADDRESS_SPACE:
                raise AssemblyError("image-overflow", st.line, f"address {loc} beyond 32-byte memory")
            placed.append((loc, st))
            loc += 1

    # Pass 2: resolve operands and encode.
    cells: dict[int, int] = {}
    for addr, st in placed:
        value = st.operand
        if isinstance(value, str):
            if value not in symbols:
                raise AssemblyError("undefined-label", st.line, f"undefined label {value!r}")
            value = symbols[value]
        if st.kind is StatementKind.BYTE:
            if not 0 <= value <= 0xFF:
                raise AssemblyError("operand-range", st.line, f".byte value {value} exceeds 8 bits")
            byte = value
        else:
            try:
                byte = isa.encode(Instruction(st.mnemonic, value))
            except ValueError as exc:
                raise AssemblyError("operand-range", st.line, str(exc)) from None
        if addr in cells:
            raise AssemblyError("address-collision", st.line, f"address {addr:02X} written twice")
        cells[addr] = byte
    return MemoryImage(cells, symbols)


def assemble_source(source: str) -> MemoryImage:
    return assemble(parse_source(source))


def disassemble(image: MemoryImage) -> str:
    lines = [f"{addr:02X}: {byte:02X}  {isa.decode(byte)}" for addr, byte in image.cells.items()]
    return "\n".join(lines)


def format_hex(image: MemoryImage, per_line: int = 16) -> str:
    """Render as ``@HH``-marked runs of two-digit hex bytes."""
    lines: list[str] = []
    run: list[str] = []
    expected = 0
    for addr, byte in image.cells.items():
        if addr != expected or len(run) == per_line:
            if run:
                lines.append(" ".join(run))
            run = [] if addr == expected else [f"@{addr:02X}"]
        run.append(f"{byte:02X}")
        expected = addr + 1
    if run:
        lines.append(" ".join(run))
    return "\n".join(lines)


def parse_hex(text: str) -> MemoryImage:
    cells: dict[int, int] = {}
    addr = 0
    for lineno, line in enumerate(text.splitlines(), start=1):
        for token in line.split("//", 1)[0].split():
            if token.startswith("@"):
                try:
                    addr = int(token[1:], 16)
                except ValueError:
                    raise HexFormatError(lineno, f"malformed address marker {token!r}") from None
                if not 0 <= addr < ADDRESS_SPACE:
                    raise HexFormatError(lineno, f"address {token[1:]} outside 0..1F")
                continue
            if not re.fullmatch(r"[0-9A-Fa-f]{1,2}", token):
                raise HexFormatError(lineno, f"malformed token {token!r}")
            if addr >= ADDRESS_SPACE:
                raise HexFormatError(lineno, f"address {addr:02X} outside 0..1F")
            if addr in cells:
                raise HexFormatError(lineno, f"duplicate address {addr:02X}")
            cells[addr] = int(token, 16)
            addr += 1
    return MemoryImage(cells)
