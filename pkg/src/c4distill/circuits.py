"""Circuit IR and builders for the distillation routine and its gadgets.

The main product is the 5-wire distillation circuit: an ancilla prepared in
|+>, two data wires carrying the resource states to be improved, and two
check wires, with the four-qubit code's encoder/decoder around an encoded
Hadamard-pair measurement.  Error locations come in two kinds: the 2 data
states (a Y before encoding) and the 8 gate states backing the four
controlled-H gadgets (inserted in their propagated form after the ideal
gate: Z-on-control with Y-on-target for the first resource state of a
gadget, a bare Y-on-target for the second).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

from .pauli import PauliString

GateSpec = tuple[str, tuple[int, ...]]


@dataclass(frozen=True)
class Element:
    """One circuit element: preparation, gate, or measurement."""

    op: str
    wires: tuple[int, ...]
    label: Optional[str] = None
    cond: Optional[tuple[str, int]] = None

    def serialize(self) -> str:
        parts = [self.op] + [str(w) for w in self.wires]
        if self.label is not None:
            parts += ["->", self.label]
        if self.cond is not None:
            parts.append(f"?{self.cond[0]}={self.cond[1]}")
        return " ".join(parts)


@dataclass(frozen=True)
class Circuit:
    """Ordered elements over ``width`` wires plus semantic wire labels."""

    width: int
    elements: tuple[Element, ...]
    labels: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        for el in self.elements:
            if any(w < 0 or w >= self.width for w in el.wires):
                raise ValueError(f"element {el} references wire out of range")
            if len(set(el.wires)) != len(el.wires):
                raise ValueError(f"element {el} repeats a wire")
        if len(set(self.labels.values())) != len(self.labels):
            raise ValueError("wire labels must be injective")

    def count_op(self, op: str) -> int:
        return sum(1 for el in self.elements if el.op == op)

    def measurement_labels(self) -> tuple[str, ...]:
        return tuple(el.label for el in self.elements if el.op in ("mx", "my", "mz"))

    def with_insertions(self, insertions: Sequence[tuple[int, Element]]) -> "Circuit":
        """Insert elements, each before the element index given (pre-insertion
        indices; stable for equal indices)."""
        elems = list(self.elements)
        for idx, el in sorted(insertions, key=lambda t: t[0], reverse=True):
            elems.insert(idx, el)
        return replace(self, elements=tuple(elems))

    def serialize(self) -> str:
        lines = [f"wires {self.width}"]
        for name in sorted(self.labels):
            lines.append(f"label {name} {self.labels[name]}")
        lines += [el.serialize() for el in self.elements]
        return "\n".join(lines) + "\n"


def gates(*specs: GateSpec) -> list[Element]:
    return [Element(name, wires) for name, wires in specs]


@dataclass(frozen=True)
class CodeDefinition:
    """The [[4,2,2]] error-detecting code and our logical operator choices."""

    n: int
    stabilizers: tuple[PauliString, PauliString]
    logical_x: tuple[PauliString, PauliString]
    logical_z: tuple[PauliString, PauliString]

    def logical_y(self, i: int) -> PauliString:
        return self.logical_x[i] * self.logical_z[i] * PauliString(self.n, 0, 0, 1)


CODE = CodeDefinition(
    n=4,
    stabilizers=(PauliString.from_label("XXXX"), PauliString.from_label("ZZZZ")),
    logical_x=(PauliString.from_label("XXII"), PauliString.from_label("XIIX")),
    logical_z=(PauliString.from_label("ZIIZ"), PauliString.from_label("ZZII")),
)


@dataclass(frozen=True)
class ErrorLocation:
    """One of the 10 places a faulty resource state feeds the routine."""

    id: int
    kind: str  # "data" or "gate"
    gadget: Optional[int]  # 0..3 for gate locations
    role: Optional[str]  # "first" or "second" for gate locations
    insert_index: int  # elements are inserted before this circuit index
    paulis: tuple[tuple[str, int], ...]  # (pauli op, wire)


# Encoder for two logical qubits carried on wires (d1, z0, d2, plus):
# d1 -> logical 1, d2 -> logical 2, auxiliary wires start in |0> and |+>.
def _encoder_specs(d1: int, z0: int, d2: int, plus: int) -> list[GateSpec]:
    return [("cx", (plus, d1)), ("cx", (d2, z0)), ("cx", (d1, z0)), ("cx", (plus, d2))]


def _decoder_specs(d1: int, z0: int, d2: int, plus: int) -> list[GateSpec]:
    return [(op, w) for op, w in reversed(_encoder_specs(d1, z0, d2, plus))]


# Clifford block between the two controlled-H pairs of the measurement
# gadget, in the two-gadget form (ancilla = wire a).  The fixed single- and
# two-qubit gates realize the encoded Hadamard bookkeeping; the two ancilla
# CZs are what remains of the eliminated controlled-H pair.
def middle_block(a: int, w1: int, w2: int, w3: int, w4: int) -> list[GateSpec]:
    return [
        ("h", (w2,)),
        ("h", (w3,)),
        ("s", (w2,)),
        ("sdg", (w4,)),
        ("cz", (w2, w4)),
        ("cz", (a, w2)),
        ("cy", (w2, w3)),
        ("h", (w2,)),
        ("cy", (w4, w3)),
        ("cz", (a, w4)),
    ]


# Same block in the four-gadget form: no ancilla CZs; acts as an encoded
# Hadamard on the second logical qubit.
def logical_middle_block(w1: int, w2: int, w3: int, w4: int) -> list[GateSpec]:
    return [
        ("h", (w2,)),
        ("h", (w3,)),
        ("s", (w2,)),
        ("sdg", (w4,)),
        ("cz", (w2, w4)),
        ("cy", (w2, w3)),
        ("h", (w2,)),
        ("cy", (w4, w3)),
    ]


@dataclass(frozen=True)
class DistillationLayout:
    """Structured description of the 5-wire routine, shared by the dense
    builder and the exact error classifier."""

    ancilla: int
    code_wires: tuple[int, int, int, int]
    data_wires: tuple[int, int]
    out_wires: tuple[int, int]
    encoder: tuple[GateSpec, ...]
    first_block: tuple[GateSpec, ...]
    middle: tuple[GateSpec, ...]
    second_block: tuple[GateSpec, ...]
    decoder: tuple[GateSpec, ...]
    width: int = 5


def distillation_layout() -> DistillationLayout:
    a, w1, w2, w3, w4 = 0, 1, 2, 3, 4
    return DistillationLayout(
        ancilla=a,
        code_wires=(w1, w2, w3, w4),
        data_wires=(w1, w3),
        out_wires=(w1, w3),
        encoder=tuple(_encoder_specs(w1, w2, w3, w4)),
        first_block=(("ch", (a, w2)), ("ch", (a, w4))),
        middle=tuple(middle_block(a, w1, w2, w3, w4)),
        second_block=(("ch", (a, w2)), ("ch", (a, w4))),
        decoder=tuple(_decoder_specs(w1, w2, w3, w4)),
    )


def build_c4_codec() -> tuple[Circuit, Circuit]:
    """Encoder and decoder circuits for the code on 4 wires.

    Wire order: (data1, |0> ancilla, data2, |+> ancilla).  The decoder is the
    element-wise reverse of the encoder followed by the two check
    measurements (Z on the |0> wire, X on the |+> wire).
    """
    labels = {"data1": 0, "ancilla_zero": 1, "data2": 2, "ancilla_plus": 3}
    enc = [Element("prep_0", (1,)), Element("prep_plus", (3,))]
    enc += gates(*_encoder_specs(0, 1, 2, 3))
    dec = gates(*_decoder_specs(0, 1, 2, 3))
    dec += [Element("mz", (1,), label="check_z"), Element("mx", (3,), label="check_x")]
    return (
        Circuit(4, tuple(enc), dict(labels)),
        Circuit(4, tuple(dec), dict(labels)),
    )


def build_distillation_circuit() -> tuple[Circuit, list[ErrorLocation]]:
    """The full 10-to-2 routine on 5 wires plus its 10 error locations."""
    ly = distillation_layout()
    a = ly.ancilla
    w1, w2, w3, w4 = ly.code_wires
    elements: list[Element] = [
        Element("prep_plus", (a,)),
        Element("prep_h", (w1,)),
        Element("prep_0", (w2,)),
        Element("prep_h", (w3,)),
        Element("prep_plus", (w4,)),
    ]
    data_insert = len(elements)
    elements += gates(*ly.encoder)
    ch_indices: list[int] = []
    for spec in ly.first_block:
        elements.append(Element(*spec))
        ch_indices.append(len(elements) - 1)
    elements += gates(*ly.middle)
    for spec in ly.second_block:
        elements.append(Element(*spec))
        ch_indices.append(len(elements) - 1)
    elements.append(Element("mx", (a,), label="meas_encoded"))
    elements += gates(*ly.decoder)
    elements.append(Element("mz", (w2,), label="check_z"))
    elements.append(Element("mx", (w4,), label="check_x"))

    locations = [
        ErrorLocation(0, "data", None, None, data_insert, (("y", w1),)),
        ErrorLocation(1, "data", None, None, data_insert, (("y", w3),)),
    ]
    next_id = 2
    for g, idx in enumerate(ch_indices):
        target = elements[idx].wires[1]
        locations.append(
            ErrorLocation(
                next_id, "gate", g, "first", idx + 1, (("z", a), ("y", target))
            )
        )
        locations.append(
            ErrorLocation(next_id + 1, "gate", g, "second", idx + 1, (("y", target),))
        )
        next_id += 2
    labels = {
        "ancilla": a,
        "out1": w1,
        "check_z_wire": w2,
        "out2": w3,
        "check_x_wire": w4,
    }
    return Circuit(ly.width, tuple(elements), labels), locations


def insert_pattern(
    circuit: Circuit, locations: Sequence[ErrorLocation], bits: int
) -> Circuit:
    """Insert the Pauli errors of the given 10-bit pattern into the circuit."""
    insertions = []
    for loc in locations:
        if bits >> loc.id & 1:
            for op, wire in loc.paulis:
                insertions.append((loc.insert_index, Element(op, (wire,))))
    return circuit.with_insertions(insertions)


class NondeterministicReference(RuntimeError):
    """A noiseless measurement came out random: the circuit is miswired."""


def reference_outcomes(circuit: Circuit) -> dict[str, int]:
    """Noiseless outcome of every visible measurement.

    Labels starting with ``_`` (gadget-internal measurements, intrinsically
    random) are excluded; every other outcome must be deterministic or the
    circuit is miswired.
    """
    from .statevec import run

    branches = run(circuit, merge_hidden=True)
    seen: dict[tuple, float] = {}
    for br in branches:
        if br.prob <= 1e-9:
            continue
        key = tuple(sorted((k, v) for k, v in br.outcomes.items() if not k.startswith("_")))
        seen[key] = seen.get(key, 0.0) + br.prob
    if len(seen) != 1:
        raise NondeterministicReference(
            f"noiseless run has {len(seen)} distinct visible outcome sets"
        )
    ((key, prob),) = seen.items()
    if abs(prob - 1.0) > 1e-9:
        raise NondeterministicReference("noiseless outcome probability != 1")
    return dict(key)


def rotation_gadget(
    target: int, resource: int, sign: int, tag: str
) -> list[Element]:
    """Teleport a Y(+-pi/4) rotation onto ``target`` consuming one |H> state.

    The resource wire must be in |0>; it is measured in the Y basis, the
    correction fires on the outcome that needs it, and the wire is restored
    to |0> so it can be reused.  Measurement labels are hidden (``_`` prefix).
    """
    lbl = f"_{tag}"
    rot = "ry_p2" if sign > 0 else "ry_m2"
    fire = 1 if sign > 0 else 0
    return [
        Element("prep_h", (resource,)),
        Element("cy", (resource, target)),
        Element("my", (resource,), label=lbl),
        Element(rot, (target,), cond=(lbl, fire)),
        Element("sdg", (resource,)),
        Element("h", (resource,)),
        Element("x", (resource,), cond=(lbl, 1)),
    ]


def controlled_h_gadget(
    control: int, target: int, resources: tuple[int, int], tag: str
) -> tuple[list[Element], list[int]]:
    """Controlled-H from a CZ between two rotation gadgets.

    Returns the elements and the indices (relative to the returned list) of
    the two resource-state preparations, in consumption order.
    """
    first = rotation_gadget(target, resources[0], -1, tag + "a")
    second = rotation_gadget(target, resources[1], +1, tag + "b")
    elems = first + [Element("cz", (control, target))] + second
    return elems, [0, len(first) + 1]


def build_gadget_distillation() -> tuple[Circuit, list[ErrorLocation]]:
    """Gadget-level variant of the routine: controlled-H gates realized with
    explicit resource states on two reused wires (7 wires total).

    Error locations point at the resource-state preparations themselves, so
    this build checks the propagated error forms used everywhere else.
    """
    ly = distillation_layout()
    a = ly.ancilla
    w1, w2, w3, w4 = ly.code_wires
    r1, r2 = 5, 6
    elements: list[Element] = [
        Element("prep_plus", (a,)),
        Element("prep_h", (w1,)),
        Element("prep_0", (w2,)),
        Element("prep_h", (w3,)),
        Element("prep_plus", (w4,)),
    ]
    data_insert = len(elements)
    elements += gates(*ly.encoder)
    locations = [
        ErrorLocation(0, "data", None, None, data_insert, (("y", w1),)),
        ErrorLocation(1, "data", None, None, data_insert, (("y", w3),)),
    ]
    next_id = 2
    ch_specs = list(ly.first_block) + list(ly.middle) + list(ly.second_block)
    gadget = 0
    for spec in ch_specs:
        if spec[0] != "ch":
            elements.append(Element(*spec))
            continue
        _, (ctl, tgt) = spec
        gelems, prep_offsets = controlled_h_gadget(ctl, tgt, (r1, r2), f"g{gadget}")
        base = len(elements)
        elements += gelems
        for role, off in zip(("first", "second"), prep_offsets):
            locations.append(
                ErrorLocation(
                    next_id,
                    "gate",
                    gadget,
                    role,
                    base + off + 1,
                    (("y", r1 if role == "first" else r2),),
                )
            )
            next_id += 1
        gadget += 1
    elements.append(Element("mx", (a,), label="meas_encoded"))
    elements += gates(*ly.decoder)
    elements.append(Element("mz", (w2,), label="check_z"))
    elements.append(Element("mx", (w4,), label="check_x"))
    labels = {"ancilla": a, "out1": w1, "out2": w3, "resource_a": r1, "resource_b": r2}
    return Circuit(7, tuple(elements), labels), locations
