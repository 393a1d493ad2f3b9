"""CSAT instances: gate DAGs over a finite algebra with two output gates.

Gates are numbered from 1; g1..gn are the inputs. Every other gate is a
constant or an operation applied to earlier gates.

    CIRCUIT v1
    algebra a22.alg
    inputs 2
    g3 = p1 g1 g2
    g4 = const 00
    output g3 g4
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import CsatError, FormatError, UsageError
from .rng import Rng


@dataclass(frozen=True)
class Gate:
    kind: str  # "input", "const" or "apply"
    op: str | None = None
    args: tuple = ()  # 1-based ids of earlier gates
    value: tuple | None = None  # element, for constants
    index: int | None = None  # input position, for inputs


class Circuit:
    def __init__(self, algebra, n_inputs: int, gates: Sequence[Gate], outputs, algebra_ref=None):
        self.algebra = algebra
        self.n_inputs = int(n_inputs)
        self.gates = tuple(gates)
        self.outputs = tuple(outputs)
        self.algebra_ref = algebra_ref
        self._validate()
        self._evaluator = None

    def _validate(self):
        alg = self.algebra
        if len(self.outputs) != 2:
            raise UsageError("a circuit has exactly two output gates")
        if len(self.gates) < self.n_inputs:
            raise UsageError("fewer gates than inputs")
        for gid, g in enumerate(self.gates, start=1):
            if gid <= self.n_inputs:
                if g.kind != "input" or g.index != gid - 1:
                    raise UsageError(f"g{gid} must be input {gid}")
                continue
            if g.kind == "const":
                alg.encode(g.value)
            elif g.kind == "apply":
                if len(g.args) != alg.arity(g.op):
                    raise UsageError(f"g{gid}: {g.op} takes {alg.arity(g.op)} arguments")
                for a in g.args:
                    if not 1 <= a < gid:
                        raise UsageError(f"g{gid} refers to g{a}, which does not precede it")
            else:
                raise UsageError(f"g{gid}: bad gate kind {g.kind!r}")
        for o in self.outputs:
            if not 1 <= o <= len(self.gates):
                raise UsageError(f"output gate g{o} is not defined")

    @property
    def size(self) -> int:
        """k: the total number of gates, inputs included."""
        return len(self.gates)

    def __eq__(self, other):
        return (
            isinstance(other, Circuit)
            and self.algebra is other.algebra
            and self.n_inputs == other.n_inputs
            and self.gates == other.gates
            and self.outputs == other.outputs
        )

    def __repr__(self):
        return f"Circuit(n={self.n_inputs}, k={self.size}, outputs={self.outputs})"

    def __getstate__(self):
        state = self.__dict__.copy()
        state["_evaluator"] = None
        return state

    def evaluator(self) -> "Evaluator":
        if self._evaluator is None:
            self._evaluator = Evaluator(self)
        return self._evaluator


class Evaluator:
    """Batch evaluation on element indices, one topological pass per batch.

    Operation tables are captured at construction so the evaluator can be
    shipped to worker processes without recomputing them.
    """

    def __init__(self, circuit: Circuit):
        alg = circuit.algebra
        self.algebra = alg
        self.n_inputs = circuit.n_inputs
        self.size = alg.size
        self.outputs = (circuit.outputs[0] - 1, circuit.outputs[1] - 1)
        self.k = circuit.size
        self.steps = []
        for g in circuit.gates[circuit.n_inputs :]:
            if g.kind == "const":
                self.steps.append(("const", alg.encode(g.value), None))
            else:
                self.steps.append(("apply", g.op, tuple(a - 1 for a in g.args), alg.op_table(g.op)))

    def outputs_many(self, x: np.ndarray):
        """x: (P, n) element indices -> two (P,) arrays of output indices."""
        x = np.asarray(x, dtype=np.int64)
        p = x.shape[0]
        values = [x[:, i] for i in range(self.n_inputs)]
        for step in self.steps:
            if step[0] == "const":
                values.append(np.full(p, step[1], dtype=np.int64))
                continue
            _, op, args, table = step
            if table is None:
                values.append(self.algebra.apply_many(op, [values[a] for a in args]))
                continue
            idx = values[args[0]]
            for a in args[1:]:
                idx = idx * self.size + values[a]
            values.append(table[idx])
        return values[self.outputs[0]], values[self.outputs[1]]

    def satisfied_many(self, x: np.ndarray) -> np.ndarray:
        a, b = self.outputs_many(x)
        return a == b

    def first_hit(self, x: np.ndarray) -> int:
        """Row of the first satisfying assignment in x, or -1."""
        hits = np.flatnonzero(self.satisfied_many(x))
        return int(hits[0]) if len(hits) else -1


# -- single-assignment evaluation (reference path) ---------------------------


def eval_circuit(c: Circuit, assignment: Sequence) -> tuple:
    """Values of both output gates, each gate evaluated once via eval_op."""
    if len(assignment) != c.n_inputs:
        raise UsageError(f"assignment has {len(assignment)} values, circuit has {c.n_inputs} inputs")
    alg = c.algebra
    values = []
    for g in c.gates:
        if g.kind == "input":
            v = tuple(assignment[g.index])
            alg.encode(v)
        elif g.kind == "const":
            v = g.value
        else:
            v = alg.eval_op(g.op, [values[a - 1] for a in g.args])
        values.append(v)
    return values[c.outputs[0] - 1], values[c.outputs[1] - 1]


def check(c: Circuit, assignment: Sequence) -> bool:
    a, b = eval_circuit(c, assignment)
    return a == b


# -- text format -------------------------------------------------------------


def parse_circuit(text: str, algebra, algebra_ref=None) -> Circuit:
    n_inputs = None
    gates: list = []
    outputs = None
    ref = None
    header_seen = False
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if outputs is not None:
            raise FormatError("content after the output line", no)
        if parts == ["CIRCUIT", "v1"]:
            if header_seen or n_inputs is not None or ref is not None:
                raise FormatError("header must come first", no)
            header_seen = True
            continue
        if parts[0] == "algebra":
            if len(parts) != 2 or ref is not None or n_inputs is not None:
                raise FormatError("'algebra PATH' must precede 'inputs'", no)
            ref = parts[1]
            continue
        if parts[0] == "inputs":
            if n_inputs is not None or len(parts) != 2 or not parts[1].isdigit():
                raise FormatError("expected a single 'inputs N' line", no)
            n_inputs = int(parts[1])
            gates = [Gate("input", index=i) for i in range(n_inputs)]
            continue
        if n_inputs is None:
            raise FormatError("'inputs N' must come before gates", no)
        if parts[0] == "output":
            if len(parts) != 3:
                raise FormatError("expected 'output gA gB'", no)
            outputs = tuple(_gate_ref(p, len(gates) + 1, no, "output") for p in parts[1:])
            continue
        if len(parts) < 3 or parts[1] != "=":
            raise FormatError("expected 'gK = OP gA ...' or 'gK = const DIGITS'", no)
        gid = _gate_id(parts[0], no)
        if gid != len(gates) + 1:
            raise FormatError(f"expected gate g{len(gates) + 1}, found {parts[0]}", no)
        if parts[2] == "const":
            if len(parts) != 4:
                raise FormatError("expected 'gK = const DIGITS'", no)
            try:
                gates.append(Gate("const", value=algebra.parse_element(parts[3])))
            except CsatError as exc:
                raise FormatError(str(exc), no) from None
            continue
        op = parts[2]
        if op not in algebra.arities:
            raise FormatError(f"unknown operation {op!r}", no)
        args = tuple(_gate_ref(p, gid, no, f"g{gid}") for p in parts[3:])
        if len(args) != algebra.arities[op]:
            raise FormatError(f"{op} takes {algebra.arities[op]} arguments, got {len(args)}", no)
        gates.append(Gate("apply", op=op, args=args))
    if n_inputs is None:
        raise FormatError("missing 'inputs N' line")
    if outputs is None:
        raise FormatError("missing 'output gA gB' line")
    return Circuit(algebra, n_inputs, gates, outputs, algebra_ref=algebra_ref or ref)


def _gate_id(tok, no):
    if not (tok.startswith("g") and tok[1:].isdigit() and int(tok[1:]) >= 1):
        raise FormatError(f"bad gate name {tok!r}", no)
    return int(tok[1:])


def _gate_ref(tok, limit, no, where):
    gid = _gate_id(tok, no)
    if gid >= limit:
        raise FormatError(f"{where} refers to undefined gate {tok}", no)
    return gid


def format_circuit(c: Circuit, algebra_ref: str | None = None) -> str:
    ref = algebra_ref if algebra_ref is not None else c.algebra_ref
    out = ["CIRCUIT v1"]
    if ref:
        out.append(f"algebra {ref}")
    out.append(f"inputs {c.n_inputs}")
    for gid, g in enumerate(c.gates, start=1):
        if g.kind == "const":
            out.append(f"g{gid} = const {c.algebra.format_element(g.value)}")
        elif g.kind == "apply":
            out.append(f"g{gid} = {g.op} " + " ".join(f"g{a}" for a in g.args))
    out.append(f"output g{c.outputs[0]} g{c.outputs[1]}")
    return "\n".join(out) + "\n"


def load_circuit(path, algebra) -> Circuit:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from None
    return parse_circuit(text, algebra)


def save_circuit(c: Circuit, path, algebra_ref: str | None = None):
    Path(path).write_text(format_circuit(c, algebra_ref), encoding="utf-8")


# -- generation and projection -------------------------------------------------


def random_circuit(algebra, n_inputs: int, n_gates: int, seed: int) -> Circuit:
    """Gates draw uniformly among operations and `const`; operands among earlier gates."""
    if n_gates < n_inputs + 2:
        raise UsageError(f"need n_gates >= n_inputs + 2, got {n_gates} < {n_inputs + 2}")
    rng = Rng(seed)
    kinds = sorted(algebra.arities) + ["const"]
    gates = [Gate("input", index=i) for i in range(n_inputs)]
    for gid in range(n_inputs + 1, n_gates + 1):
        kind = rng.choice(kinds)
        if kind == "const":
            gates.append(Gate("const", value=algebra.decode(rng.below(algebra.size))))
        else:
            args = tuple(1 + rng.below(gid - 1) for _ in range(algebra.arities[kind]))
            gates.append(Gate("apply", op=kind, args=args))
    outputs = (1 + rng.below(n_gates), 1 + rng.below(n_gates))
    return Circuit(algebra, n_inputs, gates, outputs)


def project_circuit(c: Circuit, factor: int) -> Circuit:
    """The same circuit over one factor of a product algebra."""
    alg = c.algebra
    target = alg.factors[factor]
    gates = [
        Gate("const", value=alg.project(g.value, factor)) if g.kind == "const" else g
        for g in c.gates
    ]
    return Circuit(target, c.n_inputs, gates, c.outputs)


def decode_assignment(algebra, indices: Sequence[int]) -> tuple:
    return tuple(algebra.decode(int(i)) for i in indices)


def encode_assignment(algebra, assignment: Sequence) -> list:
    return [algebra.encode(a) for a in assignment]
