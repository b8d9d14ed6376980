"""Cycle-accurate datapath and control unit.

Each instruction takes two clock ticks. FETCH loads IR from M[PC] and
increments PC; EXECUTE drives the datapath from the decoded IR. Because PC
has already moved on by EXECUTE, taken branches apply +2 (forward) or -3
(backward) to it, netting +3 / -2 from the branch's own address.

Datapath multiplexers::

    PC  <- {PC+1, ACC[4:0], PC-3, PC+2}
    ACC <- {ALU, memory data, PC}
    memory address <- {IR[4:0], ACC[4:0], PC}
    ALU B <- {memory data, IR[3:0]}

All registers except the phase register are on one scan chain:
PC (5 bits) -> ACC (8) -> IR (8) -> RAM[0] ... RAM[n-1] (8 each), MSB first.
"""

from dataclasses import dataclass, field, fields, replace
from enum import Enum, IntEnum
from functools import lru_cache

from . import isa
from .arch import (
    DEFAULT_CONFIG, NO_INPUT, PC_MASK, ArchState, IoInputs, MemoryMapConfig,
    as_inputs, branch_taken, load_ram, mem_read, write_ram,
)
from .assembler import MemoryImage
from .isa import Kind

__all__ = [
    "Phase", "PcSel", "AccSel", "AddrSel", "BSel", "AluOp", "ControlSignals",
    "RtlState", "TickRecord", "CycleResult", "rtl_reset", "control_signals",
    "alu", "tick", "run_cycles", "chain_length", "scan_export", "scan_import",
    "scan_shift", "bits_to_text", "text_to_bits", "pin_inputs", "pin_outputs",
    "chip_cycle",
]


class Phase(Enum):
    FETCH = "FETCH"
    EXECUTE = "EXECUTE"
    HALT = "HALT"


class PcSel(IntEnum):
    INC = 0b00
    ACC = 0b01
    BACK3 = 0b10
    FWD2 = 0b11


class AccSel(IntEnum):
    ALU = 0b00
    MEM = 0b01
    PC = 0b10


class AddrSel(IntEnum):
    IR = 0b00
    ACC = 0b01
    PC = 0b10


class BSel(IntEnum):
    MEM = 0
    IMM = 1


class AluOp(IntEnum):
    ADD = 0b0000
    SUB = 0b0001
    AND = 0b0010
    OR = 0b0011
    XOR = 0b0100
    SHL = 0b0101
    SHR = 0b0110
    SHL4 = 0b0111
    ROL = 0b1000
    ROR = 0b1001
    DEC = 0b1010
    CLR = 0b1011
    INV = 0b1100


@dataclass(frozen=True, slots=True)
class ControlSignals:
    pc_write_enable: int = 0
    pc_mux_select: PcSel = PcSel.INC
    acc_write_enable: int = 0
    acc_mux_select: AccSel = AccSel.ALU
    ir_load_enable: int = 0
    alu_opcode: AluOp = AluOp.ADD
    alu_inputB_mux_select: BSel = BSel.MEM
    memory_write_enable: int = 0
    memory_address_mux_select: AddrSel = AddrSel.IR


CONTROL_FIELDS = tuple(f.name for f in fields(ControlSignals))

QUIET = ControlSignals()
FETCH_SIGNALS = ControlSignals(
    pc_write_enable=1, pc_mux_select=PcSel.INC, ir_load_enable=1,
    memory_address_mux_select=AddrSel.PC,
)


@lru_cache(maxsize=None)
def control_signals(phase: Phase, ir: int, acc_zero: bool = False) -> ControlSignals:
    """Control word for one tick.

    ``acc_zero`` is the branch-condition input (ACC == 0); a branch whose
    condition fails leaves ``pc_write_enable`` low.
    """
    if phase is Phase.FETCH:
        return FETCH_SIGNALS
    if phase is Phase.HALT:
        return QUIET

    kind = isa.decode(ir).kind
    if kind is Kind.LDA:
        return ControlSignals(acc_write_enable=1, acc_mux_select=AccSel.MEM)
    if kind is Kind.STA:
        return ControlSignals(memory_write_enable=1)
    if kind in (Kind.ADD, Kind.SUB, Kind.AND, Kind.OR, Kind.XOR):
        return ControlSignals(acc_write_enable=1, alu_opcode=AluOp[kind.name])
    if kind is Kind.ADDI:
        return ControlSignals(acc_write_enable=1, alu_opcode=AluOp.ADD,
                              alu_inputB_mux_select=BSel.IMM)
    if kind is Kind.JMP:
        return ControlSignals(pc_write_enable=1, pc_mux_select=PcSel.ACC)
    if kind is Kind.JSR:
        return ControlSignals(pc_write_enable=1, pc_mux_select=PcSel.ACC,
                              acc_write_enable=1, acc_mux_select=AccSel.PC)
    if kind in isa.BRANCH_KINDS:
        taken = branch_taken(kind, 0 if acc_zero else 1)
        forward = kind in (Kind.BEQ_FWD, Kind.BNE_FWD)
        return ControlSignals(pc_write_enable=int(taken),
                              pc_mux_select=PcSel.FWD2 if forward else PcSel.BACK3)
    if kind is Kind.HLT:
        return QUIET
    if kind is Kind.LDAR:
        return ControlSignals(acc_write_enable=1, acc_mux_select=AccSel.MEM,
                              memory_address_mux_select=AddrSel.ACC)
    return ControlSignals(acc_write_enable=1, alu_opcode=AluOp[kind.name])


def alu(opcode: int, a: int, b: int) -> int:
    if opcode == AluOp.ADD:
        r = a + b
    elif opcode == AluOp.SUB:
        r = a - b
    elif opcode == AluOp.AND:
        r = a & b
    elif opcode == AluOp.OR:
        r = a | b
    elif opcode == AluOp.XOR:
        r = a ^ b
    elif opcode == AluOp.SHL:
        r = a << 1
    elif opcode == AluOp.SHR:
        r = a >> 1
    elif opcode == AluOp.SHL4:
        r = a << 4
    elif opcode == AluOp.ROL:
        r = (a << 1) | (a >> 7)
    elif opcode == AluOp.ROR:
        r = (a >> 1) | (a << 7)
    elif opcode == AluOp.DEC:
        r = a - 1
    elif opcode == AluOp.CLR:
        r = 0
    elif opcode == AluOp.INV:
        r = ~a
    else:
        # Unused encodings 1101-1111 pass A through.
        r = a
    return r & 0xFF


@dataclass(frozen=True, slots=True)
class RtlState:
    acc: int = 0
    pc: int = 0
    ir: int = 0
    phase: Phase = Phase.FETCH
    ram: tuple[int, ...] = ()
    out_latch: int = 0

    @property
    def halted(self) -> bool:
        return self.phase is Phase.HALT

    def project(self) -> ArchState:
        """Architectural view, comparable with the golden model at boundaries."""
        return ArchState(self.acc, self.pc, self.halted, self.ram, self.out_latch)


def rtl_reset(config: MemoryMapConfig = DEFAULT_CONFIG, image: MemoryImage | None = None) -> RtlState:
    ram = load_ram(config, image or MemoryImage())
    return RtlState(ram=ram, out_latch=ram[config.io_addr])


def tick(state: RtlState, config: MemoryMapConfig = DEFAULT_CONFIG,
         inputs: IoInputs = NO_INPUT, control=control_signals) -> RtlState:
    """Advance one clock. ``control`` replaces the control unit (fault injection)."""
    return _clock(state, config, inputs, control)[0]


def _clock(state: RtlState, config: MemoryMapConfig, inputs: IoInputs, control):
    phase = state.phase
    if phase is Phase.HALT:
        return state, None
    acc, pc, ir = state.acc, state.pc, state.ir
    cs = control(phase, ir, acc == 0)

    sel = cs.memory_address_mux_select
    if sel == AddrSel.IR:
        addr = ir & PC_MASK
    elif sel == AddrSel.ACC:
        addr = acc & PC_MASK
    else:
        addr = pc
    mem_data = mem_read(state, config, inputs, addr)

    ram, latch = state.ram, state.out_latch
    write = None
    if cs.memory_write_enable:
        new_ram = write_ram(ram, config, addr, acc)
        if new_ram is not None:
            ram = new_ram
            write = (addr, acc)
            if addr == config.io_addr:
                latch = acc

    if cs.ir_load_enable:
        ir = mem_data

    if cs.acc_write_enable:
        sel = cs.acc_mux_select
        if sel == AccSel.MEM:
            acc = mem_data
        elif sel == AccSel.PC:
            acc = pc
        else:
            b = state.ir & 0x0F if cs.alu_inputB_mux_select == BSel.IMM else mem_data
            acc = alu(cs.alu_opcode, acc, b)

    if cs.pc_write_enable:
        sel = cs.pc_mux_select
        if sel == PcSel.INC:
            pc = pc + 1
        elif sel == PcSel.ACC:
            pc = state.acc
        elif sel == PcSel.BACK3:
            pc = pc - 3
        else:
            pc = pc + 2
        pc &= PC_MASK

    if phase is Phase.FETCH:
        next_phase = Phase.EXECUTE
    elif state.ir == isa.FIXED_OPCODES[Kind.HLT]:
        next_phase = Phase.HALT
    else:
        next_phase = Phase.FETCH
    return RtlState(acc, pc, ir, next_phase, ram, latch), write


@dataclass(frozen=True, slots=True)
class TickRecord:
    tick: int
    phase: Phase
    pc: int
    ir: int
    acc_before: int
    acc_after: int
    memory_write: tuple[int, int] | None
    halted: bool


@dataclass
class CycleResult:
    state: RtlState
    trace: list[TickRecord] = field(default_factory=list)
    ticks: int = 0
    instructions: int = 0


def run_cycles(state: RtlState, config: MemoryMapConfig = DEFAULT_CONFIG,
               input_schedule=None, max_ticks: int = 8192, stop_on_halt: bool = True,
               control=control_signals) -> CycleResult:
    """Tick up to ``max_ticks`` times.

    ``input_schedule`` is keyed by instruction index (tick // 2) so the same
    schedule drives both simulators identically.
    """
    if max_ticks < 0:
        raise ValueError("max_ticks must be >= 0")
    schedule = input_schedule or {}
    result = CycleResult(state)
    for t in range(max_ticks):
        if stop_on_halt and state.halted:
            break
        before = state
        state, write = _clock(state, config, as_inputs(schedule.get(t // 2)), control)
        result.trace.append(TickRecord(t, before.phase, before.pc, before.ir,
                                       before.acc, state.acc, write, state.halted))
        result.ticks += 1
        if before.phase is Phase.EXECUTE:
            result.instructions += 1
    result.state = state
    return result


# -- scan chain ---------------------------------------------------------------

_HEADER = ((5, "pc"), (8, "acc"), (8, "ir"))


def chain_length(config: MemoryMapConfig = DEFAULT_CONFIG) -> int:
    return sum(w for w, _ in _HEADER) + 8 * config.ram_size


def _to_bits(value: int, width: int) -> list[int]:
    return [(value >> i) & 1 for i in range(width - 1, -1, -1)]


def _from_bits(bits) -> int:
    v = 0
    for b in bits:
        v = (v << 1) | b
    return v


def scan_export(state: RtlState) -> tuple[int, ...]:
    bits: list[int] = []
    for width, name in _HEADER:
        bits += _to_bits(getattr(state, name), width)
    for byte in state.ram:
        bits += _to_bits(byte, 8)
    return tuple(bits)


def scan_import(bits, config: MemoryMapConfig = DEFAULT_CONFIG,
                phase: Phase = Phase.FETCH) -> RtlState:
    bits = tuple(bits)
    expected = chain_length(config)
    if len(bits) != expected:
        raise ValueError(f"scan stream has {len(bits)} bits, expected {expected}")
    if any(b not in (0, 1) for b in bits):
        raise ValueError("scan stream must contain only 0/1")
    values = {}
    pos = 0
    for width, name in _HEADER:
        values[name] = _from_bits(bits[pos:pos + width])
        pos += width
    ram = tuple(_from_bits(bits[i:i + 8]) for i in range(pos, expected, 8))
    return RtlState(values["acc"], values["pc"], values["ir"], phase, ram, ram[config.io_addr])


def scan_shift(state: RtlState, scan_in: int,
               config: MemoryMapConfig = DEFAULT_CONFIG) -> tuple[RtlState, int]:
    """One scan clock: head bit leaves on scan_out, ``scan_in`` enters the tail.

    The phase register is outside the chain and keeps its value.
    """
    bits = scan_export(state)
    shifted = bits[1:] + (scan_in & 1,)
    return scan_import(shifted, config, phase=state.phase), bits[0]


def bits_to_text(bits) -> str:
    return "".join("1" if b else "0" for b in bits)


def text_to_bits(text: str) -> tuple[int, ...]:
    text = "".join(text.split())
    if set(text) - {"0", "1"}:
        raise ValueError("scan stream must contain only '0' and '1'")
    return tuple(int(c) for c in text)


# -- top-level pins -----------------------------------------------------------
# ui_in:  [0] reset, [1] scan_enable, [2] scan_in, [3] button, [7:4] unused
# uo_out: [6:0] segments a-g, [7] processor_halted

@dataclass(frozen=True)
class PinInputs:
    reset: int = 0
    scan_enable: int = 0
    scan_in: int = 0
    button: int = 0


def pin_inputs(ui_in: int) -> PinInputs:
    return PinInputs(ui_in & 1, (ui_in >> 1) & 1, (ui_in >> 2) & 1, (ui_in >> 3) & 1)


def pin_outputs(state: RtlState) -> int:
    return (state.out_latch & 0x7F) | (0x80 if state.halted else 0)


def chip_cycle(state: RtlState, ui_in: int,
               config: MemoryMapConfig = DEFAULT_CONFIG) -> tuple[RtlState, int, int]:
    """One clock of the packaged chip. Returns (state, uo_out, scan_out).

    Reset clears the registers and re-enters FETCH; RAM keeps its contents so
    a program loaded over the scan chain survives it.
    """
    pins = pin_inputs(ui_in)
    scan_out = 0
    if pins.reset:
        state = replace(state, acc=0, pc=0, ir=0, phase=Phase.FETCH)
    elif pins.scan_enable:
        state, scan_out = scan_shift(state, pins.scan_in, config)
    else:
        state = tick(state, config, IoInputs(pins.button))
    return state, pin_outputs(state), scan_out
