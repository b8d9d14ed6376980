"""Instruction-at-a-time golden model.

Memory map (default configuration)::

    0x00-0x0F  RAM
    0x10       I/O byte: read -> button in bit 0, write -> segment latch
    0x11-0x1A  ROM, seven-segment patterns for digits 0-9
    0x1B-0x1F  unmapped, reads as 0, writes ignored

The I/O byte is a RAM cell like the others; its stored value is the segment
latch (``out_latch``) but reads of that address see only the button.
"""

from dataclasses import dataclass, field

from . import isa
from .assembler import ADDRESS_SPACE, MemoryImage
from .isa import Instruction, Kind

__all__ = [
    "SEGMENT_PATTERNS", "MemoryMapConfig", "ArchState", "IoInputs", "StepResult",
    "RunResult", "MemoryMapError", "HaltedError", "reset", "mem_read", "mem_write",
    "alu_eval", "step", "run", "branch_taken",
]

# Active-high, bit 0 = segment a ... bit 6 = segment g.
SEGMENT_PATTERNS = (0x3F, 0x06, 0x5B, 0x4F, 0x66, 0x6D, 0x7D, 0x07, 0x7F, 0x6F)

PC_MASK = ADDRESS_SPACE - 1


class MemoryMapError(ValueError):
    pass


class HaltedError(RuntimeError):
    pass


@dataclass(frozen=True)
class MemoryMapConfig:
    ram_size: int = 17
    io_addr: int | None = None
    rom: tuple[int, ...] = SEGMENT_PATTERNS

    def __post_init__(self):
        object.__setattr__(self, "rom", tuple(self.rom))
        if self.io_addr is None:
            object.__setattr__(self, "io_addr", self.ram_size - 1)
        if self.ram_size < 1:
            raise MemoryMapError(f"ram_size must be >= 1, got {self.ram_size}")
        if self.ram_size + len(self.rom) > ADDRESS_SPACE:
            raise MemoryMapError(
                f"RAM ({self.ram_size}) + ROM ({len(self.rom)}) exceeds {ADDRESS_SPACE} bytes")
        if not 0 <= self.io_addr < self.ram_size:
            raise MemoryMapError(f"io_addr {self.io_addr} not inside RAM 0..{self.ram_size - 1}")
        if any(not 0 <= b <= 0xFF for b in self.rom):
            raise MemoryMapError("ROM contents must be bytes")

    @property
    def rom_end(self) -> int:
        return self.ram_size + len(self.rom)

    def region(self, addr: int) -> str:
        if addr == self.io_addr:
            return "io"
        if addr < self.ram_size:
            return "ram"
        if addr < self.rom_end:
            return "rom"
        return "unmapped"


DEFAULT_CONFIG = MemoryMapConfig()


@dataclass(frozen=True, slots=True)
class ArchState:
    acc: int = 0
    pc: int = 0
    halted: bool = False
    ram: tuple[int, ...] = ()
    out_latch: int = 0


@dataclass(frozen=True, slots=True)
class IoInputs:
    button: int = 0


NO_INPUT = IoInputs()


@dataclass(frozen=True, slots=True)
class StepResult:
    executed: Instruction
    raw: int
    pc_before: int
    pc_after: int
    acc_before: int
    acc_after: int
    memory_write: tuple[int, int] | None
    halted_now: bool


@dataclass
class RunResult:
    state: ArchState
    trace: list[StepResult] = field(default_factory=list)

    @property
    def steps(self) -> int:
        return len(self.trace)

    @property
    def exhausted(self) -> bool:
        """True when the step limit ran out before HLT."""
        return not self.state.halted


def load_ram(config: MemoryMapConfig, image: MemoryImage) -> tuple[int, ...]:
    """RAM contents for ``image``; ROM bytes in the image must match the ROM."""
    ram = [0] * config.ram_size
    for addr, value in image.cells.items():
        region = config.region(addr)
        if region in ("ram", "io"):
            ram[addr] = value
        elif region == "rom":
            expected = config.rom[addr - config.ram_size]
            if value != expected:
                raise MemoryMapError(
                    f"image byte {value:02X} at {addr:02X} conflicts with ROM byte {expected:02X}")
        else:
            raise MemoryMapError(f"image address {addr:02X} is outside RAM and ROM")
    return tuple(ram)


def reset(config: MemoryMapConfig = DEFAULT_CONFIG, image: MemoryImage | None = None) -> ArchState:
    ram = load_ram(config, image or MemoryImage())
    return ArchState(ram=ram, out_latch=ram[config.io_addr])


def mem_read(state, config: MemoryMapConfig, inputs: IoInputs, addr: int) -> int:
    """Read one byte; ``state`` may be any object with a ``ram`` tuple."""
    if addr == config.io_addr:
        return inputs.button & 1
    if addr < config.ram_size:
        return state.ram[addr]
    if addr < config.rom_end:
        return config.rom[addr - config.ram_size]
    return 0


def write_ram(ram: tuple[int, ...], config: MemoryMapConfig, addr: int, value: int):
    """Return the RAM tuple after a store, or None if the store is ignored."""
    if addr >= config.ram_size:
        return None
    return ram[:addr] + (value & 0xFF,) + ram[addr + 1:]


def mem_write(state: ArchState, config: MemoryMapConfig, addr: int, value: int) -> ArchState:
    ram = write_ram(state.ram, config, addr, value)
    if ram is None:
        return state
    latch = value & 0xFF if addr == config.io_addr else state.out_latch
    return ArchState(state.acc, state.pc, state.halted, ram, latch)


def alu_eval(op: Kind, a: int, b: int = 0) -> int:
    if op is Kind.ADD or op is Kind.ADDI:
        r = a + b
    elif op is Kind.SUB:
        r = a - b
    elif op is Kind.AND:
        r = a & b
    elif op is Kind.OR:
        r = a | b
    elif op is Kind.XOR:
        r = a ^ b
    elif op is Kind.SHL:
        r = a << 1
    elif op is Kind.SHR:
        r = a >> 1
    elif op is Kind.SHL4:
        r = a << 4
    elif op is Kind.ROL:
        r = (a << 1) | (a >> 7)
    elif op is Kind.ROR:
        r = (a >> 1) | ((a & 1) << 7)
    elif op is Kind.DEC:
        r = a - 1
    elif op is Kind.CLR:
        r = 0
    elif op is Kind.INV:
        r = ~a
    else:
        raise ValueError(f"{op} is not an ALU operation")
    return r & 0xFF


def branch_taken(kind: Kind, acc: int) -> bool:
    if kind is Kind.BEQ_FWD or kind is Kind.BEQ_BWD:
        return acc == 0
    return acc != 0


_BINARY_MEMORY_OPS = frozenset({Kind.ADD, Kind.SUB, Kind.AND, Kind.OR, Kind.XOR})


def step(state: ArchState, config: MemoryMapConfig = DEFAULT_CONFIG,
         inputs: IoInputs = NO_INPUT) -> tuple[ArchState, StepResult]:
    if state.halted:
        raise HaltedError("cannot step a halted machine; reset it first")
    p = state.pc
    acc = state.acc
    raw = mem_read(state, config, inputs, p)
    ins = isa.decode(raw)
    kind = ins.kind
    pc = (p + 1) & PC_MASK
    ram = state.ram
    latch = state.out_latch
    halted = False
    write = None

    if kind is Kind.LDA:
        acc = mem_read(state, config, inputs, ins.operand)
    elif kind is Kind.STA:
        new_ram = write_ram(ram, config, ins.operand, acc)
        if new_ram is not None:
            ram = new_ram
            write = (ins.operand, acc)
            if ins.operand == config.io_addr:
                latch = acc
    elif kind in _BINARY_MEMORY_OPS:
        acc = alu_eval(kind, acc, mem_read(state, config, inputs, ins.operand))
    elif kind is Kind.ADDI:
        acc = alu_eval(Kind.ADD, acc, ins.operand)
    elif kind is Kind.JMP:
        pc = acc & PC_MASK
    elif kind is Kind.JSR:
        pc, acc = acc & PC_MASK, pc
    elif kind in isa.BRANCH_KINDS:
        if branch_taken(kind, acc):
            offset = 3 if kind in (Kind.BEQ_FWD, Kind.BNE_FWD) else -2
            pc = (p + offset) & PC_MASK
    elif kind is Kind.HLT:
        halted = True
    elif kind is Kind.LDAR:
        acc = mem_read(state, config, inputs, acc & PC_MASK)
    else:
        acc = alu_eval(kind, acc)

    new = ArchState(acc, pc, halted, ram, latch)
    return new, StepResult(ins, raw, p, pc, state.acc, acc, write, halted)


def run(state: ArchState, config: MemoryMapConfig = DEFAULT_CONFIG,
        input_schedule=None, max_steps: int = 4096) -> RunResult:
    """Step until HLT or ``max_steps``.

    ``input_schedule`` maps step index -> IoInputs (or a bare button bit);
    missing steps see the button released.
    """
    if max_steps < 0:
        raise ValueError("max_steps must be >= 0")
    schedule = input_schedule or {}
    result = RunResult(state)
    for i in range(max_steps):
        if state.halted:
            break
        state, info = step(state, config, as_inputs(schedule.get(i)))
        result.trace.append(info)
    result.state = state
    return result


def as_inputs(value) -> IoInputs:
    if value is None:
        return NO_INPUT
    if isinstance(value, IoInputs):
        return value
    return IoInputs(int(value) & 1)
