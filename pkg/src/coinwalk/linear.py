"""Constant-towers-free coin application in depth linear in n.

Layout (see circuit.RegisterMap.linear): 2^n ancillary position wires b',
2^n-1 ancillary coins s_1.., the principal coin s_0 and the n position
wires.  The pipeline U = Q1 -> Q2 -> Q0 -> Q2^dag -> Q1^dag

* Q1 marks b'_k = 1 for the walker's position k,
* Q2 routes the principal coin state onto ancillary coin s_k,
* Q0 applies every C_k at once, each singly controlled by its b'_k,

then the conjugate half un-routes and un-marks, so ancillae end at |0>
exactly and the net effect on the walker is the block-diagonal total coin.
"""

from __future__ import annotations

import numpy as np

from .circuit import Circuit, GateInstance, RegisterMap, dagger
from .coins import CoinField

__all__ = [
    "build_linear",
    "build_q0",
    "build_q1_naive",
    "build_q1_parallel",
    "build_q2",
    "predicted_depth",
]


def build_q0(field: CoinField) -> Circuit:
    """All 2^n coins in one layer: coin k controlled by b'_k, acting on s_k."""
    n = field.n
    regs = RegisterMap.linear(n)
    gates = tuple(
        GateInstance(
            "cu2",
            (regs.apos(k),),
            (regs.acoin(k),),
            matrix=np.ascontiguousarray(field.coin(k)),
            label=f"coin{k}",
        )
        for k in range(1 << n)
    )
    return Circuit(regs, gates, {"builder": "q0", "n": n})


def build_q1_naive(n: int) -> Circuit:
    """Mark b'_k by a binary cascade of controlled swaps.

    After X on b'_0 the lone 1 sits at index 0; level m swaps the lower and
    upper halves of each 2^(m+1) block when position bit m is set, walking
    the 1 to index k.  Cheap to state, depth O(2^n) since every level's
    swaps share the same control wire.
    """
    regs = RegisterMap.linear(n)
    gates = [GateInstance("x", (), (regs.apos(0),))]
    for m in range(n):
        for i in range(1 << m):
            gates.append(
                GateInstance(
                    "cswap",
                    (regs.position(m),),
                    (regs.apos(i), regs.apos(i + (1 << m))),
                )
            )
    return Circuit(regs, tuple(gates), {"builder": "q1-naive", "n": n})


def _copy_offset(m: int) -> int:
    # s-register offset of the copy block for level m: 1, 2, 5, 12, ...
    off = 1
    for j in range(2, m + 1):
        off += (1 << (j - 1)) - 1
    return off


def build_q1_parallel(n: int) -> Circuit:
    """Same action as the naive marker in depth 5n - 2 (+1 when n = 1).

    Level m of the swap cascade needs its control bit b_m on 2^m distinct
    wires.  A CNOT doubling tree copies b_m onto 2^m - 1 ancillary coins
    (all levels' trees run in parallel on disjoint wires), the swap layer
    fires, and the mirrored tree erases the copies.
    """
    regs = RegisterMap.linear(n)
    copy_stages: list[list[GateInstance]] = [[] for _ in range(max(n - 1, 0))]
    for m in range(1, n):
        off = _copy_offset(m)
        copy_stages[0].append(
            GateInstance("cnot", (regs.position(m),), (regs.acoin(off),))
        )
        for i in range(1, m):
            stage = copy_stages[i]
            for back in range((1 << i) - 1):
                stage.append(
                    GateInstance(
                        "cnot",
                        (regs.acoin(off + back),),
                        (regs.acoin(off + back + (1 << i)),),
                    )
                )
            stage.append(
                GateInstance(
                    "cnot",
                    (regs.position(m),),
                    (regs.acoin(off + (1 << i) - 1),),
                )
            )
    copies = [g for stage in copy_stages for g in stage]

    swaps: list[GateInstance] = []
    for m in range(n):
        off = _copy_offset(m) if m else 0
        for i in range(1 << m):
            control = regs.position(m) if i == 0 else regs.acoin(off + i - 1)
            swaps.append(
                GateInstance("cswap", (control,), (regs.apos(i), regs.apos(i + (1 << m))))
            )

    gates = [GateInstance("x", (), (regs.apos(0),))]
    gates += copies + swaps + copies[::-1]
    return Circuit(regs, tuple(gates), {"builder": "q1-parallel", "n": n})


def _q2_abstract(nu: int) -> list[tuple]:
    """Q2 recursion over abstract indices ("b", i) / ("s", i).

    Step nu embeds the previous stage by doubling indices (b' to odd slots,
    s to even slots), brackets it with a CNOT pairing layer V, and finishes
    with a controlled-swap layer M that peels the lowest surviving bit.
    """
    if nu == 1:
        return [("cswap", ("b", 1), ("s", 0), ("s", 1))]

    def dilate(op):
        def remap(w):
            reg, i = w
            return (reg, 2 * i + 1) if reg == "b" else (reg, 2 * i)

        return (op[0],) + tuple(remap(w) for w in op[1:])

    inner = [dilate(op) for op in _q2_abstract(nu - 1)]
    v = [("cnot", ("b", 2 * m), ("b", 2 * m + 1)) for m in range(1, 1 << (nu - 1))]
    m_layer = [
        ("cswap", ("b", 2 * l + 1), ("s", 2 * l), ("s", 2 * l + 1))
        for l in range(1 << (nu - 1))
    ]
    return v + inner + v + m_layer


def build_q2(n: int) -> Circuit:
    """Route the principal coin state to s_k, addressed by the b' one-hot mark."""
    regs = RegisterMap.linear(n)

    def wire(w):
        reg, i = w
        return regs.apos(i) if reg == "b" else regs.acoin(i)

    gates = []
    for op in _q2_abstract(n):
        if op[0] == "cnot":
            gates.append(GateInstance("cnot", (wire(op[1]),), (wire(op[2]),)))
        else:
            gates.append(
                GateInstance("cswap", (wire(op[1]),), (wire(op[2]), wire(op[3])))
            )
    return Circuit(regs, tuple(gates), {"builder": "q2", "n": n})


def build_linear(field: CoinField, parallel: bool = True) -> Circuit:
    """Full sandwich Q1 -> Q2 -> Q0 -> Q2^dag -> Q1^dag on the ancilla layout."""
    n = field.n
    q1 = (build_q1_parallel if parallel else build_q1_naive)(n)
    q2 = build_q2(n)
    q0 = build_q0(field)
    gates = (
        list(q1.gates)
        + list(q2.gates)
        + list(q0.gates)
        + [dagger(g) for g in reversed(q2.gates)]
        + [dagger(g) for g in reversed(q1.gates)]
    )
    meta = {"builder": "linear", "n": n, "parallel": parallel}
    return Circuit(q1.registers, tuple(gates), meta)


def predicted_depth(n: int) -> int:
    """Block-convention depth cap for the full sandwich: 20n + 2*[n=1] - 7."""
    if n < 1:
        raise ValueError("need n >= 1")
    return 20 * n + (2 if n == 1 else 0) - 7
