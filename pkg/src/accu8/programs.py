"""Bundled assembly programs: the 7-segment demo and a directed suite."""

DEMO_TEMPLATE = """\
; Show one decimal digit on the 7-segment display.
; The pattern table sits in ROM right after RAM (address 17 for 17 bytes of RAM).
        LDA digit
        ADDI 15
        ADDI 2          ; ACC = 17 + digit
        LDAR            ; ACC = M[ACC]
        STA 16          ; I/O byte drives the segments
        HLT
digit:  .byte {digit}
"""


def demo_program(digit: int = 5) -> str:
    if not 0 <= digit <= 9:
        raise ValueError(f"digit must be 0..9, got {digit}")
    return DEMO_TEMPLATE.format(digit=digit)


# Together these execute every instruction at least once.
DIRECTED = {
    "arith": """\
        LDA a
        ADD b           ; 200 + 100 wraps to 44
        SUB c           ; 44 - 50 wraps to 250
        AND mask
        OR bits
        XOR bits
        ADDI 7
        STA out
        HLT
a:      .byte 200
b:      .byte 100
c:      .byte 50
mask:   .byte 0xF0
bits:   .byte 0x0F
out:    .byte 0
""",
    "shifts": """\
        CLR
        LDA v
        SHL
        SHR
        SHL4
        ROL
        ROR
        DEC
        INV
        HLT
v:      .byte 0x81
""",
    "branches": """\
        LDA n
loop:   DEC
        STA n
        BNE_BWD         ; back to loop while ACC != 0
        BEQ_FWD         ; ACC == 0: skip the next two
        ADDI 1
        HLT
        ADDI 1
again:  DEC             ; 1 -> 0, then 0 -> 255
        STA n
        BEQ_BWD         ; back to again once
        BNE_FWD         ; ACC == 255: skip the next two
        HLT
        HLT
        HLT
n:      .byte 3
""",
    "subroutine": """\
        LDA sub_addr
        JSR             ; ACC <- return address
        LDA result
        STA 16
        HLT
sub:    STA ret
        LDA idx
        LDAR            ; pattern for digit 2 from ROM
        STA result
        LDA ret
        JMP
sub_addr: .byte sub
ret:    .byte 0
idx:    .byte 19
result: .byte 0
""",
    "poll": """\
; Spin until the button is pressed, then count the press.
wait:   LDA 16
        AND one
        BEQ_BWD         ; back to wait while released
        ADD count
        STA count
        HLT
one:    .byte 1
count:  .byte 41
""",
}


def corpus() -> dict[str, str]:
    """Every bundled program by name."""
    progs = {f"demo{d}": demo_program(d) for d in range(10)}
    progs.update(DIRECTED)
    return progs
