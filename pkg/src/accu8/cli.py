"""Command-line front end: assemble, disassemble, run, cosim, scan, demo."""

import argparse
import sys
from pathlib import Path

from . import arch, rtl
from .arch import MemoryMapConfig, MemoryMapError
from .assembler import AssemblyError, HexFormatError, assemble_source, disassemble, format_hex, parse_hex
from .cosim import FAULTS, cosim
from .programs import demo_program
from .trace import format_step, format_tick


class CliError(Exception):
    pass


def read_schedule(path) -> dict[int, arch.IoInputs]:
    """Parse ``<step-index> <button-bit>`` lines; ``#`` starts a comment."""
    schedule = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2 or not all(p.isdigit() for p in parts) or parts[1] not in ("0", "1"):
            raise CliError(f"{path}:{lineno}: expected '<step-index> <0|1>', got {line!r}")
        schedule[int(parts[0])] = arch.IoInputs(int(parts[1]))
    return schedule


def load_image(path):
    try:
        return parse_hex(Path(path).read_text())
    except HexFormatError as exc:
        raise CliError(f"{path}: {exc}") from None


def make_config(args) -> MemoryMapConfig:
    rom = arch.SEGMENT_PATTERNS
    if args.no_rom:
        rom = ()
    elif args.rom:
        image = load_image(args.rom)
        if list(image.cells) != list(range(len(image))):
            raise CliError(f"{args.rom}: ROM image must be contiguous from address 00")
        rom = tuple(image.cells.values())
    try:
        return MemoryMapConfig(ram_size=args.ram_size, rom=rom)
    except MemoryMapError as exc:
        raise CliError(str(exc)) from None


def summary(state) -> str:
    return (f"halted={str(state.halted).lower()} pc={state.pc} acc={state.acc} "
            f"out_latch={state.out_latch}")


def cmd_assemble(args):
    try:
        image = assemble_source(Path(args.source).read_text())
    except AssemblyError as exc:
        raise CliError(f"{args.source}:{exc}") from None
    text = format_hex(image)
    Path(args.output).write_text(text + "\n" if text else "")


def cmd_disassemble(args):
    listing = disassemble(load_image(args.image))
    if listing:
        print(listing)


def cmd_run(args):
    config = make_config(args)
    image = load_image(args.image)
    schedule = read_schedule(args.schedule) if args.schedule else {}
    try:
        if args.mode == "arch":
            result = arch.run(arch.reset(config, image), config, schedule, args.max_steps)
            lines = [format_step(i, r) for i, r in enumerate(result.trace)]
        else:
            result = rtl.run_cycles(rtl.rtl_reset(config, image), config, schedule, args.max_ticks)
            lines = [format_tick(r) for r in result.trace]
    except MemoryMapError as exc:
        raise CliError(str(exc)) from None
    if args.trace:
        Path(args.trace).write_text("".join(line + "\n" for line in lines))
    print(summary(result.state))


def cmd_cosim(args):
    config = make_config(args)
    control = FAULTS[args.inject_fault] if args.inject_fault else rtl.control_signals
    report = cosim(args.seed, args.count, args.max_steps, config, control, args.workers)
    print(report)
    return 0 if report.passed else 1


def scan_summary(state: rtl.RtlState) -> str:
    ram = " ".join(f"{b:02X}" for b in state.ram)
    return f"{summary(state)} ir={state.ir} ram={ram}"


def cmd_scan(args):
    config = make_config(args)
    try:
        state = rtl.rtl_reset(config, load_image(args.image))
    except MemoryMapError as exc:
        raise CliError(str(exc)) from None
    if args.action == "dump":
        if args.max_steps:
            state = rtl.run_cycles(state, config, None, 2 * args.max_steps).state
        Path(args.stream).write_text(rtl.bits_to_text(rtl.scan_export(state)) + "\n")
        print(scan_summary(state))
        return
    try:
        bits = rtl.text_to_bits(Path(args.stream).read_text())
    except ValueError as exc:
        raise CliError(f"{args.stream}: {exc}") from None
    expected = rtl.chain_length(config)
    if len(bits) != expected:
        raise CliError(f"{args.stream}: scan stream length {len(bits)}, expected {expected}")
    for bit in bits:
        state, _ = rtl.scan_shift(state, bit, config)
    print(scan_summary(rtl.scan_import(rtl.scan_export(state), config)))


def cmd_demo(args):
    source = demo_program(args.digit)
    if args.output:
        Path(args.output).write_text(source)
    else:
        sys.stdout.write(source)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="accu8", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    memory = argparse.ArgumentParser(add_help=False)
    memory.add_argument("--ram-size", type=int, default=17)
    group = memory.add_mutually_exclusive_group()
    group.add_argument("--rom", metavar="HEXFILE", help="ROM contents (default: segment table)")
    group.add_argument("--no-rom", action="store_true", help="configure without ROM")

    p = sub.add_parser("assemble", help="assemble source to a hex image")
    p.add_argument("source")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_assemble)

    p = sub.add_parser("disassemble", help="list a hex image")
    p.add_argument("image")
    p.set_defaults(func=cmd_disassemble)

    p = sub.add_parser("run", parents=[memory], help="simulate a hex image")
    p.add_argument("image")
    p.add_argument("--mode", choices=("arch", "rtl"), default="arch")
    p.add_argument("--max-steps", type=int, default=4096)
    p.add_argument("--max-ticks", type=int, default=8192)
    p.add_argument("--schedule", metavar="FILE")
    p.add_argument("--trace", metavar="FILE")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("cosim", parents=[memory], help="differential test on random programs")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--max-steps", type=int, default=1000)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--inject-fault", choices=sorted(FAULTS), help="corrupt one control field")
    p.set_defaults(func=cmd_cosim)

    p = sub.add_parser("scan", parents=[memory], help="dump or load the scan chain")
    p.add_argument("image")
    p.add_argument("action", choices=("dump", "load"))
    p.add_argument("stream")
    p.add_argument("--max-steps", type=int, default=0, help="instructions to run before a dump")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("demo", help="print the 7-segment demo program")
    p.add_argument("--digit", type=int, default=5, choices=range(10))
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_demo)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args) or 0
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
