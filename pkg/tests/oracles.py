"""Independent reference data for the tests.

Nothing here imports the package: the decode table is rebuilt from the
opcode bit patterns as printed in the ISA table, and the segment patterns
are read off an ASCII drawing of the ten digits.
"""

# (mnemonic, opcode pattern, class) exactly as listed in the ISA table.
ISA_TABLE = [
    ("ADDI", "1110XXXX", "Immediate"),
    ("LDA", "000MMMMM", "VariableData"),
    ("STA", "001MMMMM", "VariableData"),
    ("ADD", "010MMMMM", "VariableData"),
    ("SUB", "011MMMMM", "VariableData"),
    ("AND", "100MMMMM", "VariableData"),
    ("OR", "101MMMMM", "VariableData"),
    ("XOR", "110MMMMM", "VariableData"),
    ("JMP", "11110000", "ControlBranch"),
    ("JSR", "11110001", "ControlBranch"),
    ("BEQ_FWD", "11110010", "ControlBranch"),
    ("BEQ_BWD", "11110011", "ControlBranch"),
    ("BNE_FWD", "11110100", "ControlBranch"),
    ("BNE_BWD", "11110101", "ControlBranch"),
    ("HLT", "11111111", "ControlBranch"),
    ("SHL", "11110110", "DataManipulation"),
    ("SHR", "11110111", "DataManipulation"),
    ("SHL4", "11111000", "DataManipulation"),
    ("ROL", "11111001", "DataManipulation"),
    ("ROR", "11111010", "DataManipulation"),
    ("LDAR", "11111011", "DataManipulation"),
    ("DEC", "11111100", "DataManipulation"),
    ("CLR", "11111101", "DataManipulation"),
    ("INV", "11111110", "DataManipulation"),
]


def _matches(byte, pattern):
    bits = format(byte, "08b")
    operand = "".join(b for b, p in zip(bits, pattern) if p in "MX")
    fixed = all(p == b for b, p in zip(bits, pattern) if p in "01")
    return fixed, (int(operand, 2) if operand else None)


def brute_force_decode(byte):
    """All (mnemonic, operand) rows whose bit pattern matches ``byte``."""
    hits = []
    for name, pattern, _ in ISA_TABLE:
        ok, operand = _matches(byte, pattern)
        if ok:
            hits.append((name, operand))
    return hits


DIGITS_ART = [
    " _     _  _     _  _  _  _  _ ",
    "| |  | _| _||_||_ |_   ||_||_|",
    "|_|  ||_  _|  | _||_|  ||_| _|",
]

# (row, column within a 3-wide cell, segment letter)
_SEGMENT_CELLS = [
    (0, 1, "a"), (1, 2, "b"), (2, 2, "c"), (2, 1, "d"),
    (2, 0, "e"), (1, 0, "f"), (1, 1, "g"),
]


def seven_segment(digit):
    """Active-high pattern, bit 0 = a ... bit 6 = g, read off DIGITS_ART."""
    pattern = 0
    for row, col, seg in _SEGMENT_CELLS:
        if DIGITS_ART[row][3 * digit + col] != " ":
            pattern |= 1 << "abcdefg".index(seg)
    return pattern
