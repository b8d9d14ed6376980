"""Line-oriented trace records.

Instruction trace (one line per instruction)::

    step=3 pc=04 byte=F1 mnemonic=JSR acc=10->05 write=- halted=0

Tick trace (one line per clock)::

    tick=7 phase=EXECUTE pc=05 ir=30 acc=6D->6D write=10:6D halted=0

``write`` is ``-`` or ``ADDR:VALUE`` in hex.
"""

import re
from dataclasses import dataclass

from .arch import StepResult
from .rtl import TickRecord

__all__ = ["TraceRecord", "format_step", "format_tick", "parse_writes", "replay_writes"]


@dataclass(frozen=True)
class TraceRecord:
    step: int
    pc_before: int
    raw: int
    mnemonic: str
    acc_before: int
    acc_after: int
    memory_write: tuple[int, int] | None
    halted: bool

    @classmethod
    def from_step(cls, index: int, r: StepResult) -> "TraceRecord":
        return cls(index, r.pc_before, r.raw, r.executed.kind.value,
                   r.acc_before, r.acc_after, r.memory_write, r.halted_now)

    def __str__(self):
        return (f"step={self.step} pc={self.pc_before:02X} byte={self.raw:02X} "
                f"mnemonic={self.mnemonic} acc={self.acc_before:02X}->{self.acc_after:02X} "
                f"write={_fmt_write(self.memory_write)} halted={int(self.halted)}")


def _fmt_write(write) -> str:
    return "-" if write is None else f"{write[0]:02X}:{write[1]:02X}"


def format_step(index: int, r: StepResult) -> str:
    return str(TraceRecord.from_step(index, r))


def format_tick(r: TickRecord) -> str:
    return (f"tick={r.tick} phase={r.phase.value} pc={r.pc:02X} ir={r.ir:02X} "
            f"acc={r.acc_before:02X}->{r.acc_after:02X} write={_fmt_write(r.memory_write)} "
            f"halted={int(r.halted)}")


_WRITE_RE = re.compile(r"\bwrite=(-|([0-9A-F]{2}):([0-9A-F]{2}))(?:\s|$)")


def parse_writes(text: str) -> list[tuple[int, int]]:
    """Memory writes recorded in a trace of either kind, in order."""
    writes = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        m = _WRITE_RE.search(line)
        if m is None:
            raise ValueError(f"line {lineno}: no write field in trace record")
        if m.group(2):
            writes.append((int(m.group(2), 16), int(m.group(3), 16)))
    return writes


def replay_writes(ram, writes) -> tuple[int, ...]:
    ram = list(ram)
    for addr, value in writes:
        ram[addr] = value
    return tuple(ram)
