import pytest
from hypothesis import given, settings, strategies as st

from accu8.arch import (
    ArchState, HaltedError, IoInputs, MemoryMapConfig, MemoryMapError, SEGMENT_PATTERNS,
    alu_eval, mem_read, mem_write, reset, run, step,
)
from accu8.assembler import MemoryImage, assemble_source
from accu8.isa import Instruction, Kind, encode
from oracles import seven_segment

DEFAULT = MemoryMapConfig()
FLAT = MemoryMapConfig(ram_size=32, rom=())  # every address is RAM except the I/O byte at 31
BRANCHES = [Kind.BEQ_FWD, Kind.BEQ_BWD, Kind.BNE_FWD, Kind.BNE_BWD]


def flat_away_from(pc):
    """All-RAM map whose I/O byte is not at ``pc``."""
    return MemoryMapConfig(ram_size=32, io_addr=(pc + 16) % 32, rom=())


def state_with(pc=0, acc=0, cells=None, config=FLAT):
    image = MemoryImage(cells or {})
    return ArchState(acc=acc, pc=pc, ram=reset(config, image).ram)


def test_default_rom_is_seven_segment_digits():
    assert SEGMENT_PATTERNS == tuple(seven_segment(d) for d in range(10))
    assert DEFAULT.ram_size == 17 and DEFAULT.io_addr == 16 and DEFAULT.rom_end == 27


@pytest.mark.parametrize("kwargs", [
    {"ram_size": 0}, {"ram_size": 23}, {"ram_size": 17, "io_addr": 17}, {"rom": (256,)},
])
def test_config_validation(kwargs):
    with pytest.raises(MemoryMapError):
        MemoryMapConfig(**kwargs)


def test_reset():
    s = reset(DEFAULT, MemoryImage())
    assert (s.acc, s.pc, s.halted, s.out_latch) == (0, 0, False, 0)
    assert s.ram == (0,) * 17
    assert reset(DEFAULT, MemoryImage({0: 0xFF})).ram[0] == 0xFF
    # Matching ROM bytes are allowed.
    reset(DEFAULT, MemoryImage({17: 0x3F}))


@pytest.mark.parametrize("cells", [{17: 0x00}, {27: 0x01}])
def test_reset_rejects_rom_conflicts_and_unmapped(cells):
    with pytest.raises(MemoryMapError):
        reset(DEFAULT, MemoryImage(cells))


def test_mem_read_map():
    s = reset(DEFAULT, MemoryImage({3: 0x42, 16: 0x99}))
    assert mem_read(s, DEFAULT, IoInputs(1), 16) == 0x01
    assert mem_read(s, DEFAULT, IoInputs(0), 16) == 0x00
    assert mem_read(s, DEFAULT, IoInputs(), 17) == 0x3F
    assert mem_read(s, DEFAULT, IoInputs(), 31) == 0x00
    assert mem_read(s, DEFAULT, IoInputs(), 3) == 0x42
    for d in range(10):
        assert mem_read(s, DEFAULT, IoInputs(), 17 + d) == seven_segment(d)


def test_mem_write_map():
    s = reset(DEFAULT)
    assert mem_write(s, DEFAULT, 3, 0x7E).ram[3] == 0x7E
    io = mem_write(s, DEFAULT, 16, seven_segment(5))
    assert io.out_latch == 0x6D
    assert mem_write(s, DEFAULT, 20, 0xAA) == s
    assert mem_write(s, DEFAULT, 30, 0xAA) == s


def test_io_address_not_at_end_of_ram():
    cfg = MemoryMapConfig(ram_size=8, io_addr=2, rom=())
    s = reset(cfg, MemoryImage({5: 9}))
    assert mem_read(s, cfg, IoInputs(1), 5) == 9
    assert mem_read(s, cfg, IoInputs(1), 2) == 1
    assert mem_write(s, cfg, 2, 0x11).out_latch == 0x11


@pytest.mark.parametrize("op, a, b, expected", [
    (Kind.ADD, 250, 10, 4),
    (Kind.INV, 0x0F, 0, 0xF0),
    (Kind.SHL4, 0x1B, 0, 0xB0),
    (Kind.ROR, 0x01, 0, 0x80),
    (Kind.ROL, 0x80, 0, 0x01),
    (Kind.SUB, 3, 5, 254),
    (Kind.DEC, 0, 0, 255),
    (Kind.SHR, 0x81, 0, 0x40),
    (Kind.SHL, 0x81, 0, 0x02),
    (Kind.CLR, 0x55, 0, 0),
    (Kind.ADDI, 255, 1, 0),
])
def test_alu_examples(op, a, b, expected):
    assert alu_eval(op, a, b) == expected


def _reference_alu(op, a, b):
    # Bit-list formulation, independent of the shift/mask arithmetic in alu_eval.
    bits = [(a >> i) & 1 for i in range(8)]  # LSB first
    if op is Kind.SHL:
        bits = [0] + bits[:7]
    elif op is Kind.SHR:
        bits = bits[1:] + [0]
    elif op is Kind.SHL4:
        bits = [0, 0, 0, 0] + bits[:4]
    elif op is Kind.ROL:
        bits = bits[7:] + bits[:7]
    elif op is Kind.ROR:
        bits = bits[1:] + bits[:1]
    elif op is Kind.INV:
        bits = [1 - x for x in bits]
    else:
        return {
            Kind.ADD: (a + b) % 256, Kind.ADDI: (a + b) % 256, Kind.SUB: (a - b) % 256,
            Kind.AND: a & b, Kind.OR: a | b, Kind.XOR: a ^ b, Kind.DEC: (a - 1) % 256, Kind.CLR: 0,
        }[op]
    return sum(x << i for i, x in enumerate(bits))


ALU_OPS = [Kind.ADD, Kind.SUB, Kind.AND, Kind.OR, Kind.XOR, Kind.ADDI, Kind.SHL, Kind.SHR,
           Kind.SHL4, Kind.ROL, Kind.ROR, Kind.DEC, Kind.CLR, Kind.INV]


@pytest.mark.parametrize("op", ALU_OPS)
def test_alu_exhaustive_against_reference(op):
    bs = range(256) if op in (Kind.ADD, Kind.SUB, Kind.AND, Kind.OR, Kind.XOR, Kind.ADDI) else [0]
    for a in range(256):
        for b in bs:
            assert alu_eval(op, a, b) == _reference_alu(op, a, b)


def test_alu_rejects_non_alu_kind():
    with pytest.raises(ValueError):
        alu_eval(Kind.JMP, 1, 1)


def one_step(byte, pc=0, acc=0, cells=None, config=None, inputs=IoInputs()):
    config = config or flat_away_from(pc)
    cells = dict(cells or {})
    cells[pc] = byte
    return step(state_with(pc, acc, cells, config), config, inputs)


def test_branch_examples():
    assert one_step(encode(Instruction(Kind.BEQ_FWD)), pc=5, acc=0)[0].pc == 8
    assert one_step(encode(Instruction(Kind.BEQ_BWD)), pc=5, acc=0)[0].pc == 3


def test_jsr_example():
    s, info = one_step(0xF1, pc=4, acc=0x10)
    assert (s.pc, s.acc) == (16, 5)
    assert (info.pc_before, info.pc_after, info.acc_after) == (4, 16, 5)


def test_jmp_truncates_acc():
    s, _ = one_step(0xF0, pc=2, acc=0xE7)
    assert (s.pc, s.acc) == (7, 0xE7)


@pytest.mark.parametrize("acc, expected", [(17, 0x3F), (18, 0x06), (19, 0x5B), (0x93, 0x5B)])
def test_ldar_reads_rom(acc, expected):
    s, _ = one_step(0xFB, pc=0, acc=acc, config=DEFAULT)
    assert s.acc == expected


def test_pc_wraps():
    s, _ = one_step(0xFD, pc=31, acc=9)
    assert (s.pc, s.acc) == (0, 0)


def test_addi_zero_extends():
    s, _ = one_step(0xEF, acc=0x10)
    assert s.acc == 0x1F


def test_hlt_and_halted_contract():
    s, info = one_step(0xFF, pc=6)
    assert s.halted and s.pc == 7 and info.halted_now
    with pytest.raises(HaltedError):
        step(s, flat_away_from(0))


def test_sta_reports_write_and_rom_write_ignored():
    s, info = one_step(0x23, pc=0, acc=0x44, config=DEFAULT)
    assert s.ram[3] == 0x44 and info.memory_write == (3, 0x44)
    rom_store = encode(Instruction(Kind.STA, 20))
    s2, info2 = one_step(rom_store, pc=0, acc=0x44, config=DEFAULT)
    assert info2.memory_write is None
    assert s2.ram == state_with(cells={0: rom_store}, config=DEFAULT).ram


def test_sta_to_io_latches():
    s, _ = one_step(encode(Instruction(Kind.STA, 16)), acc=0x6D, config=DEFAULT)
    assert s.out_latch == 0x6D


def test_lda_io_reads_button():
    s, _ = one_step(encode(Instruction(Kind.LDA, 16)), config=DEFAULT, inputs=IoInputs(1),
                    cells={16: 0x80})
    assert s.acc == 1


@pytest.mark.parametrize("kind", BRANCHES)
@pytest.mark.parametrize("acc", [0, 1, 0x80])
@pytest.mark.parametrize("p", range(32))
def test_branch_arithmetic_exhaustive(kind, acc, p):
    s, _ = one_step(encode(Instruction(kind)), pc=p, acc=acc)
    taken = (acc == 0) == kind.value.startswith("BEQ")
    forward = kind.value.endswith("FWD")
    expected = (p + (3 if forward else -2)) % 32 if taken else (p + 1) % 32
    assert s.pc == expected
    assert s.acc == acc


@pytest.mark.parametrize("p", range(32))
@pytest.mark.parametrize("acc", [0, 7])
def test_branch_inversion(p, acc):
    for eq, ne in [(Kind.BEQ_FWD, Kind.BNE_FWD), (Kind.BEQ_BWD, Kind.BNE_BWD)]:
        a, _ = one_step(encode(Instruction(eq)), pc=p, acc=acc)
        b, _ = one_step(encode(Instruction(ne)), pc=p, acc=acc)
        assert (a.pc != (p + 1) % 32) != (b.pc != (p + 1) % 32)


def test_run_hlt():
    r = run(reset(DEFAULT, assemble_source("HLT")), DEFAULT, max_steps=10)
    assert r.steps == 1 and r.state.halted and r.state.pc == 1 and not r.exhausted


def test_run_clr_beq_bwd_never_halts():
    # 0: CLR, 1: BEQ_BWD -> 31; unmapped 31 reads 00 = LDA 0 -> ACC=FD; PC wraps to 0.
    r = run(reset(DEFAULT, assemble_source("CLR\nBEQ_BWD")), DEFAULT, max_steps=300)
    assert r.exhausted and r.steps == 300
    pcs = [t.pc_before for t in r.trace[:7]]
    assert pcs == [0, 1, 31, 0, 1, 31, 0]
    assert r.trace[2].acc_after == 0xFD


def test_run_zero_steps_is_identity():
    s = reset(DEFAULT)
    r = run(s, DEFAULT, max_steps=0)
    assert r.state == s and r.steps == 0
    with pytest.raises(ValueError):
        run(s, DEFAULT, max_steps=-1)


def test_run_schedule_accepts_bits():
    src = "LDA 16\nHLT"
    r = run(reset(DEFAULT, assemble_source(src)), DEFAULT, {0: 1})
    assert r.state.acc == 1


def test_jsr_jmp_linkage():
    src = """
        LDA target
        JSR
        ADDI 1
        HLT
sub:    STA link
        LDA link
        JMP
target: .byte sub
link:   .byte 0
"""
    r = run(reset(DEFAULT, assemble_source(src)), DEFAULT, max_steps=20)
    pcs = [t.pc_before for t in r.trace]
    assert pcs == [0, 1, 4, 5, 6, 2, 3]
    assert r.state.acc == 3  # saved return address 2, plus 1


@st.composite
def programs(draw, config=DEFAULT):
    cells = draw(st.lists(st.integers(0, 255), min_size=config.ram_size, max_size=config.ram_size))
    return MemoryImage(dict(enumerate(cells)))


@settings(max_examples=200, deadline=None)
@given(programs(), st.lists(st.integers(0, 1), max_size=64))
def test_random_program_invariants(image, buttons):
    s = reset(DEFAULT, image)
    schedule = dict(enumerate(buttons))
    r = run(s, DEFAULT, schedule, max_steps=64)
    for t in r.trace:
        assert 0 <= t.pc_after < 32 and 0 <= t.acc_after < 256
        if t.memory_write:
            assert t.memory_write[0] < DEFAULT.ram_size
    assert len(r.state.ram) == 17
    for addr in range(17, 27):
        assert mem_read(r.state, DEFAULT, IoInputs(), addr) == SEGMENT_PATTERNS[addr - 17]
    if r.state.halted:
        assert run(r.state, DEFAULT, schedule, max_steps=10).state == r.state


@given(st.integers(5, 19), st.integers(0, 255))
def test_sta_then_lda(addr, value):
    src = f"LDA v\nSTA {addr}\nCLR\nLDA {addr}\nHLT\n.org 20\nv: .byte {value}"
    r = run(reset(FLAT, assemble_source(src)), FLAT, max_steps=10)
    assert r.state.acc == value
