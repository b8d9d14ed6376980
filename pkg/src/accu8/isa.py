"""Instruction set: 24 one-byte instructions covering all 256 encodings.

Encoding map::

    000MMMMM LDA   001MMMMM STA   010MMMMM ADD   011MMMMM SUB
    100MMMMM AND   101MMMMM OR    110MMMMM XOR   1110XXXX ADDI
    1111nnnn one of 16 operand-free instructions (see FIXED_OPCODES)
"""

from dataclasses import dataclass
from enum import Enum

__all__ = [
    "Kind", "InstructionClass", "Instruction", "MEMORY_KINDS", "BRANCH_KINDS",
    "FIXED_OPCODES", "ADDR_BITS", "IMM_BITS", "decode", "encode", "class_of",
    "mnemonic_of", "from_mnemonic",
]

ADDR_BITS = 5
IMM_BITS = 4
ADDR_MASK = (1 << ADDR_BITS) - 1
IMM_MASK = (1 << IMM_BITS) - 1


class Kind(Enum):
    """Instruction mnemonics. The value is the canonical spelling."""

    ADDI = "ADDI"
    LDA = "LDA"
    STA = "STA"
    ADD = "ADD"
    SUB = "SUB"
    AND = "AND"
    OR = "OR"
    XOR = "XOR"
    JMP = "JMP"
    JSR = "JSR"
    BEQ_FWD = "BEQ_FWD"
    BEQ_BWD = "BEQ_BWD"
    BNE_FWD = "BNE_FWD"
    BNE_BWD = "BNE_BWD"
    HLT = "HLT"
    SHL = "SHL"
    SHR = "SHR"
    SHL4 = "SHL4"
    ROL = "ROL"
    ROR = "ROR"
    LDAR = "LDAR"
    DEC = "DEC"
    CLR = "CLR"
    INV = "INV"


class InstructionClass(Enum):
    IMMEDIATE = "Immediate"
    VARIABLE_DATA = "VariableData"
    CONTROL_BRANCH = "ControlBranch"
    DATA_MANIPULATION = "DataManipulation"


# Top three bits select the memory-operand instruction.
MEMORY_KINDS = (Kind.LDA, Kind.STA, Kind.ADD, Kind.SUB, Kind.AND, Kind.OR, Kind.XOR)

FIXED_OPCODES: dict[Kind, int] = {
    Kind.JMP: 0xF0,
    Kind.JSR: 0xF1,
    Kind.BEQ_FWD: 0xF2,
    Kind.BEQ_BWD: 0xF3,
    Kind.BNE_FWD: 0xF4,
    Kind.BNE_BWD: 0xF5,
    Kind.SHL: 0xF6,
    Kind.SHR: 0xF7,
    Kind.SHL4: 0xF8,
    Kind.ROL: 0xF9,
    Kind.ROR: 0xFA,
    Kind.LDAR: 0xFB,
    Kind.DEC: 0xFC,
    Kind.CLR: 0xFD,
    Kind.INV: 0xFE,
    Kind.HLT: 0xFF,
}

BRANCH_KINDS = frozenset({Kind.BEQ_FWD, Kind.BEQ_BWD, Kind.BNE_FWD, Kind.BNE_BWD})

ADDI_BASE = 0xE0

_CLASSES: dict[Kind, InstructionClass] = {Kind.ADDI: InstructionClass.IMMEDIATE}
_CLASSES.update({k: InstructionClass.VARIABLE_DATA for k in MEMORY_KINDS})
_CLASSES.update({
    k: InstructionClass.CONTROL_BRANCH
    for k in (Kind.JMP, Kind.JSR, *sorted(BRANCH_KINDS, key=FIXED_OPCODES.get), Kind.HLT)
})
_CLASSES.update({
    k: InstructionClass.DATA_MANIPULATION
    for k in (Kind.SHL, Kind.SHR, Kind.SHL4, Kind.ROL, Kind.ROR,
              Kind.LDAR, Kind.DEC, Kind.CLR, Kind.INV)
})


@dataclass(frozen=True, slots=True)
class Instruction:
    """One decoded instruction.

    ``operand`` is a memory address (0-31) for the seven memory-operand
    kinds, a 4-bit immediate for ADDI, and None for everything else.
    """

    kind: Kind
    operand: int | None = None

    def __post_init__(self):
        if self.kind in MEMORY_KINDS:
            _check_field(self.kind, self.operand, ADDR_MASK)
        elif self.kind is Kind.ADDI:
            _check_field(self.kind, self.operand, IMM_MASK)
        elif self.operand is not None:
            raise ValueError(f"{self.kind.value} takes no operand")

    def __str__(self):
        if self.operand is None:
            return self.kind.value
        return f"{self.kind.value} {self.operand}"


def _check_field(kind: Kind, operand, mask: int) -> None:
    if operand is None:
        raise ValueError(f"{kind.value} requires an operand")
    if isinstance(operand, bool) or not isinstance(operand, int):
        raise TypeError(f"{kind.value} operand must be an int, got {operand!r}")
    if not 0 <= operand <= mask:
        raise ValueError(f"{kind.value} operand {operand} out of range 0..{mask}")


def _build_decode_table() -> tuple[Instruction, ...]:
    by_fixed = {code: kind for kind, code in FIXED_OPCODES.items()}
    table = []
    for byte in range(256):
        top = byte >> ADDR_BITS
        if top < len(MEMORY_KINDS):
            table.append(Instruction(MEMORY_KINDS[top], byte & ADDR_MASK))
        elif byte & 0xF0 == ADDI_BASE:
            table.append(Instruction(Kind.ADDI, byte & IMM_MASK))
        else:
            table.append(Instruction(by_fixed[byte]))
    return tuple(table)


DECODE_TABLE = _build_decode_table()


def decode(byte: int) -> Instruction:
    """Decode one byte. Total over 0..255; the result is shared and immutable."""
    if not 0 <= byte <= 0xFF:
        raise ValueError(f"not a byte: {byte}")
    return DECODE_TABLE[byte]


def encode(instr: Instruction) -> int:
    kind = instr.kind
    if kind in FIXED_OPCODES:
        return FIXED_OPCODES[kind]
    if kind is Kind.ADDI:
        _check_field(kind, instr.operand, IMM_MASK)
        return ADDI_BASE | instr.operand
    _check_field(kind, instr.operand, ADDR_MASK)
    return (MEMORY_KINDS.index(kind) << ADDR_BITS) | instr.operand


def class_of(instr: Instruction | Kind) -> InstructionClass:
    kind = instr if isinstance(instr, Kind) else instr.kind
    return _CLASSES[kind]


def mnemonic_of(instr: Instruction | Kind) -> str:
    kind = instr if isinstance(instr, Kind) else instr.kind
    return kind.value


def from_mnemonic(text: str) -> Kind:
    """Case-insensitive mnemonic lookup; raises KeyError for unknown names."""
    return Kind[text.upper()]
