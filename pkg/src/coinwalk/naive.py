"""Sequential position-selected coin circuit.

One multiply-controlled coin gate per node, preceded by an X "tower" that
rotates the control pattern from the previous node's index to the current
one.  Tower i flips position wires 0..t, t = trailing zeros of i (i >= 1);
tower 0 flips every position wire.  Gate count is exponential in n by
construction.
"""

from __future__ import annotations

import numpy as np

from .errors import ToolkitError
from .circuit import Circuit, GateInstance, RegisterMap
from .coins import CoinField

__all__ = ["build_naive", "tower", "tower_flips"]


def tower_flips(n: int, i: int) -> list[int]:
    """Position-wire indices flipped by tower i, 0 <= i < 2^(n-1) (i = 0 for n = 1)."""
    if n < 1:
        raise ToolkitError("index-out-of-range", "tower needs n >= 1")
    if not 0 <= i < max(1 << (n - 1), 1):
        raise ToolkitError("index-out-of-range", f"tower index {i} invalid for n={n}")
    if i == 0:
        return list(range(n))
    t = (i & -i).bit_length() - 1  # trailing zeros
    return list(range(t + 1))


def tower(n: int, i: int) -> list[GateInstance]:
    """X gates of tower i, on walk-layout position wires (coin untouched)."""
    flips = tower_flips(n, i)
    regs = RegisterMap.walk(n)
    return [GateInstance("x", (), (regs.position(p),)) for p in flips]


def build_naive(field: CoinField) -> Circuit:
    """Circuit for the block-diagonal total coin, one controlled gate per node.

    Walking k = 0..2^n-1, the tower before node k maps the all-ones control
    pattern onto the bits of k, so every coin gate controls on all position
    wires.  The X count per wire over the whole loop is even, so the
    position register ends exactly where it started.
    """
    n = field.n
    regs = RegisterMap.walk(n)
    pos = tuple(regs.position(p) for p in range(n))
    coin = regs.coin()
    half = max(1 << (n - 1), 1)
    gates: list[GateInstance] = []
    for k in range(1 << n):
        gates.extend(tower(n, k % half))
        kind = "cu2" if n == 1 else "mcu2"
        gates.append(
            GateInstance(
                kind,
                pos,
                (coin,),
                matrix=np.ascontiguousarray(field.coin(k)),
                label=f"coin{k}",
            )
        )
    return Circuit(regs, tuple(gates), {"builder": "naive", "n": n})
