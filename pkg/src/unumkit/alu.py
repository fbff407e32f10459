"""Functional model of the arithmetic-unit testbed.

The testbed couples an instruction memory (1024 slots), a register file of
128-bit images (two unpacked unum slots each) and a memory-controller
command interface.  Programs run sequentially, once or repeatedly; there is
no pipeline timing here, only an informational cycle counter with the
convention UADD/USUB = 2 cycles and UNIFY/OPTIMIZE/NOP = 1.

Command script, line oriented; ``#`` starts a comment:

    WI <addr> <opcode> <rd>,<rs1>[,<rs2>]    write instruction slot
    WR <reg> <32 hex digits>                 write register image
    RR <reg>                                 read register, emits <reg>=<hex>
    RUN <n>                                  execute the program n times

Register images follow the codec's two-slot layout, first unum in the
upper 64 bits.  The all-zero image is the defined empty pattern and reads
as exact zero.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum

from .arith import add, sub
from .codec import PackedUbound, image_to_hex, image_to_ubound, hex_to_image, ubound_to_image
from .compress import optimize, unify
from .env import Environment

IMEM_SIZE = 1024
REGFILE_SIZE = 32


class Opcode(Enum):
    UADD = "UADD"
    USUB = "USUB"
    UNIFY = "UNIFY"
    OPTIMIZE = "OPTIMIZE"
    NOP = "NOP"


_CYCLES = {
    Opcode.UADD: 2,
    Opcode.USUB: 2,
    Opcode.UNIFY: 1,
    Opcode.OPTIMIZE: 1,
    Opcode.NOP: 1,
}


@dataclass(frozen=True, slots=True)
class Instruction:
    opcode: Opcode
    rd: int = 0
    rs1: int = 0
    rs2: int = 0

    def __post_init__(self) -> None:
        for name in ("rd", "rs1", "rs2"):
            idx = getattr(self, name)
            if not 0 <= idx < REGFILE_SIZE:
                raise ValueError(f"{name}={idx} outside the {REGFILE_SIZE}-entry register file")


class CommandError(ValueError):
    """A rejected controller command; carries the offending position."""

    def __init__(self, message: str, line: int | None = None, field: str | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field:
            where.append(field)
        prefix = f"{' '.join(where)}: " if where else ""
        super().__init__(f"{prefix}{message}")
        self.line = line
        self.field = field


@dataclass
class AluState:
    """Instruction memory, register file and control state."""

    env: Environment = field(default_factory=lambda: Environment(4, 5))
    imem: list[Instruction | None] = field(
        default_factory=lambda: [None] * IMEM_SIZE
    )
    regfile: list[int] = field(default_factory=lambda: [0] * REGFILE_SIZE)
    pc: int = 0
    mode: str = "run-once"
    cycles: int = 0

    def read_reg(self, idx: int) -> PackedUbound:
        return image_to_ubound(self.env, self.regfile[idx])

    def write_reg(self, idx: int, value: PackedUbound) -> None:
        self.regfile[idx] = ubound_to_image(value)

    def step(self, inst: Instruction) -> None:
        self.cycles += _CYCLES[inst.opcode]
        if inst.opcode is Opcode.NOP:
            return
        a = self.read_reg(inst.rs1)
        if inst.opcode is Opcode.UADD:
            out = add(a, self.read_reg(inst.rs2))
        elif inst.opcode is Opcode.USUB:
            out = sub(a, self.read_reg(inst.rs2))
        elif inst.opcode is Opcode.UNIFY:
            out = unify(a)
        else:
            out = optimize(a)
        self.write_reg(inst.rd, out)

    def run(self, repeats: int) -> None:
        self.mode = "run-once" if repeats <= 1 else "run-repeat"
        for _ in range(repeats):
            self.pc = 0
            while self.pc < IMEM_SIZE:
                inst = self.imem[self.pc]
                if inst is None:
                    break  # end of the loaded program
                self.pc += 1
                self.step(inst)


_WS = re.compile(r"\s+")


def _parse_index(token: str, limit: int, what: str, line: int | None) -> int:
    try:
        idx = int(token)
    except ValueError:
        raise CommandError(f"{what} {token!r} is not a number", line, what) from None
    if not 0 <= idx < limit:
        raise CommandError(f"{what} {idx} out of range (0..{limit - 1})", line, what)
    return idx


def exec_command(
    state: AluState, command: str, line: int | None = None
) -> str | None:
    """Apply one controller command; returns the response text, if any.

    Malformed or out-of-range commands raise CommandError and leave the
    state untouched.
    """
    text = command.split("#", 1)[0].strip()
    if not text:
        return None
    parts = _WS.split(text)
    op = parts[0].upper()

    if op == "WI":
        if len(parts) < 3:
            raise CommandError("WI needs <addr> <opcode> [<operands>]", line)
        addr = _parse_index(parts[1], IMEM_SIZE, "instruction address", line)
        try:
            opcode = Opcode(parts[2].upper())
        except ValueError:
            raise CommandError(f"unknown opcode {parts[2]!r}", line, "opcode") from None
        ops = [t for t in "".join(parts[3:]).split(",") if t]
        need = {Opcode.UADD: 3, Opcode.USUB: 3, Opcode.UNIFY: 2, Opcode.OPTIMIZE: 2}
        if opcode is Opcode.NOP:
            regs = [0, 0, 0]
            if ops:
                raise CommandError("NOP takes no operands", line, "operands")
        else:
            want = need[opcode]
            if len(ops) not in (want, 3):
                raise CommandError(
                    f"{opcode.value} needs {want} register operands", line, "operands"
                )
            regs = [
                _parse_index(t, REGFILE_SIZE, f"register operand {i + 1}", line)
                for i, t in enumerate(ops)
            ]
            while len(regs) < 3:
                regs.append(0)
        state.imem[addr] = Instruction(opcode, regs[0], regs[1], regs[2])
        return None

    if op == "WR":
        if len(parts) != 3:
            raise CommandError("WR needs <reg> <32 hex digits>", line)
        reg = _parse_index(parts[1], REGFILE_SIZE, "register", line)
        try:
            image = hex_to_image(parts[2])
            image_to_ubound(state.env, image)  # validate before committing
        except ValueError as exc:
            raise CommandError(str(exc), line, "image") from None
        state.regfile[reg] = image
        return None

    if op == "RR":
        if len(parts) != 2:
            raise CommandError("RR needs <reg>", line)
        reg = _parse_index(parts[1], REGFILE_SIZE, "register", line)
        return f"{reg}={image_to_hex(state.regfile[reg])}"

    if op == "RUN":
        if len(parts) != 2:
            raise CommandError("RUN needs <n>", line)
        try:
            n = int(parts[1])
        except ValueError:
            raise CommandError(f"repeat count {parts[1]!r} is not a number", line) from None
        if n < 0:
            raise CommandError(f"repeat count {n} is negative", line)
        state.run(n)
        return None

    raise CommandError(f"unknown command {parts[0]!r}", line)


def run_script(state: AluState, script: str) -> list[str]:
    """Run a whole command script, returning the emitted responses."""
    responses = []
    for lineno, raw in enumerate(script.splitlines(), start=1):
        out = exec_command(state, raw, line=lineno)
        if out is not None:
            responses.append(out)
    return responses
