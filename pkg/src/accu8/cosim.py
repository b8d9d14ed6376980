"""Lockstep differential testing of the RTL model against the golden model."""

import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

from .arch import DEFAULT_CONFIG, ArchState, IoInputs, MemoryMapConfig, reset, step
from .assembler import MemoryImage
from . import isa
from .isa import Kind
from .rtl import AccSel, AddrSel, AluOp, BSel, Phase, PcSel, control_signals, rtl_reset, tick

__all__ = [
    "COMPARED_FIELDS", "FAULTS", "ProgramCase", "Divergence", "CosimReport",
    "random_image", "random_schedule", "generate_cases", "compare", "cosim_case", "cosim",
]

COMPARED_FIELDS = ("pc", "acc", "ram", "out_latch", "halted")


@dataclass(frozen=True)
class ProgramCase:
    index: int
    image: MemoryImage
    schedule: dict[int, IoInputs]


@dataclass(frozen=True)
class Divergence:
    program: int
    step: int
    field: str
    arch_value: object
    rtl_value: object
    instruction: str

    def __str__(self):
        return (f"program={self.program} step={self.step} field={self.field} "
                f"arch={self.arch_value} rtl={self.rtl_value} instruction={self.instruction}")


@dataclass
class CosimReport:
    programs: int = 0
    instructions: int = 0
    divergence: Divergence | None = None

    @property
    def passed(self) -> bool:
        return self.divergence is None

    def __str__(self):
        head = f"programs={self.programs} instructions={self.instructions}"
        if self.passed:
            return f"{head} result=PASS"
        return f"{head} result=FAIL first divergence: {self.divergence}"


def random_image(rng: random.Random, config: MemoryMapConfig = DEFAULT_CONFIG) -> MemoryImage:
    """Uniform random bytes over every RAM address; ROM is left to the config."""
    return MemoryImage({a: rng.randrange(256) for a in range(config.ram_size)})


def random_schedule(rng: random.Random, steps: int) -> dict[int, IoInputs]:
    presses = IoInputs(1)
    return {i: presses for i in range(steps) if rng.getrandbits(1)}


def generate_cases(seed: int, count: int, steps: int,
                   config: MemoryMapConfig = DEFAULT_CONFIG) -> list[ProgramCase]:
    """Seed-deterministic programs; each draws from its own 64-bit sub-seed."""
    master = random.Random(seed)
    cases = []
    for index in range(count):
        rng = random.Random(master.getrandbits(64))
        cases.append(ProgramCase(index, random_image(rng, config), random_schedule(rng, steps)))
    return cases


def compare(arch: ArchState, rtl: ArchState):
    """Name of the first differing architectural field, or None."""
    for name in COMPARED_FIELDS:
        if getattr(arch, name) != getattr(rtl, name):
            return name
    return None


def cosim_case(case: ProgramCase, steps: int, config: MemoryMapConfig = DEFAULT_CONFIG,
               control=control_signals) -> tuple[int, Divergence | None]:
    """Run one program in lockstep. Returns (instructions compared, divergence)."""
    a = reset(config, case.image)
    r = rtl_reset(config, case.image)
    idle = IoInputs()
    compared = 0
    for i in range(steps):
        if a.halted:
            break
        inputs = case.schedule.get(i, idle)
        a, info = step(a, config, inputs)
        r = tick(r, config, inputs, control)
        r = tick(r, config, inputs, control)
        compared += 1
        projected = r.project()
        name = compare(a, projected)
        if name is not None:
            return compared, Divergence(case.index, i, name, getattr(a, name),
                                        getattr(projected, name), str(info.executed))
    return compared, None


def cosim(seed: int, count: int, steps: int, config: MemoryMapConfig = DEFAULT_CONFIG,
          control=control_signals, workers: int = 1) -> CosimReport:
    """Co-simulate ``count`` random programs; the report is ordered by program index."""
    cases = generate_cases(seed, count, steps, config)
    report = CosimReport()

    def job(case):
        return cosim_case(case, steps, config, control)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(job, cases))
    else:
        results = map(job, cases)
    for n, divergence in results:
        report.programs += 1
        report.instructions += n
        if divergence is not None:
            report.divergence = divergence
            break
    return report


# -- fault injection ------------------------------------------------------------
# Each fault corrupts exactly one control field for some instructions.

def _execute_fault(kinds, **override):
    def control(phase, ir, acc_zero=False):
        cs = control_signals(phase, ir, acc_zero)
        if phase is Phase.EXECUTE and isa.decode(ir).kind in kinds:
            return replace(cs, **override)
        return cs
    return control


def _no_ir_load(phase, ir, acc_zero=False):
    cs = control_signals(phase, ir, acc_zero)
    if phase is Phase.FETCH:
        return replace(cs, ir_load_enable=0)
    return cs


FAULTS = {
    "pc_write_enable": _execute_fault({Kind.JMP}, pc_write_enable=0),
    # Forward branches get +1 instead of +2: the pre-update branch distance.
    "pc_mux_select": _execute_fault({Kind.BEQ_FWD, Kind.BNE_FWD}, pc_mux_select=PcSel.INC),
    "acc_write_enable": _execute_fault({Kind.LDA}, acc_write_enable=0),
    "acc_mux_select": _execute_fault({Kind.JSR}, acc_mux_select=AccSel.ALU),
    "ir_load_enable": _no_ir_load,
    "alu_opcode": _execute_fault({Kind.SUB}, alu_opcode=AluOp.ADD),
    "alu_inputB_mux_select": _execute_fault({Kind.ADDI}, alu_inputB_mux_select=BSel.MEM),
    "memory_write_enable": _execute_fault({Kind.STA}, memory_write_enable=0),
    "memory_address_mux_select": _execute_fault({Kind.LDAR}, memory_address_mux_select=AddrSel.IR),
}
