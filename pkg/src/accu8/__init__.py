"""Toolchain for an 8-bit accumulator microprocessor with 32 bytes of memory."""

from .arch import ArchState, IoInputs, MemoryMapConfig, reset, run, step
from .assembler import MemoryImage, assemble, assemble_source, disassemble, format_hex, parse_hex, parse_source
from .isa import Instruction, InstructionClass, Kind, class_of, decode, encode, mnemonic_of
from .rtl import Phase, RtlState, control_signals, rtl_reset, run_cycles, scan_export, scan_import, scan_shift, tick

__version__ = "0.1.0"
