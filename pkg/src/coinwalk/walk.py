"""Step composition W = S * C, evolution, and distribution extraction.

The coin circuit may come from any builder.  Walk-layout builders evolve a
dense vector of n+1 qubits; the linear-ancilla builder evolves a sparse
state on its own layout with the shift gates remapped onto the principal
coin and position wires, relying on the per-step ancilla restoration that
the construction guarantees (and asserting it numerically).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import ToolkitError
from . import statevec
from .statevec import SparseState
from .circuit import Circuit
from .coins import CoinField, coin_field_from_json, coin_field_to_json, total_coin_matrix
from . import naive as naive_mod
from . import linear as linear_mod
from . import walsh as walsh_mod
from . import shift as shift_mod

__all__ = [
    "Distribution",
    "WalkConfig",
    "WalkResult",
    "config_from_json",
    "config_to_json",
    "initial_state",
    "matrix_oracle_run",
    "results_to_csv",
    "results_to_json",
    "run",
    "tvd",
]

COIN_BUILDERS = ("naive", "linear", "walsh", "dense-oracle")
SHIFT_SCHEMES = ("qft", "id")

# linear layout needs 2^(n+1)+n wires; past this the bookkeeping is pointless
_MAX_LINEAR_WIRES = 160

_NORM_SLACK = 1e-9
_ANCILLA_SLACK = 1e-8


@dataclass(frozen=True)
class WalkConfig:
    n: int
    steps: int
    field: CoinField
    coin_builder: str = "dense-oracle"
    shift_scheme: str = "qft"
    truncation: int | None = None
    initial: dict | None = None
    shots: int | None = None
    seed: int | None = None

    def __post_init__(self):
        if self.steps < 0:
            raise ValueError("steps must be nonnegative")
        if self.coin_builder not in COIN_BUILDERS:
            raise ValueError(f"unknown coin builder {self.coin_builder!r}")
        if self.shift_scheme not in SHIFT_SCHEMES:
            raise ValueError(f"unknown shift scheme {self.shift_scheme!r}")
        if self.shots is not None and self.shots < 1:
            raise ValueError("shots must be >= 1 when sampling")
        if self.field.n != self.n:
            raise ValueError("coin field size does not match n")


@dataclass(frozen=True)
class Distribution:
    probabilities: np.ndarray
    counts: np.ndarray | None = None

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=float)
        if np.any(p < -1e-12) or abs(float(p.sum()) - 1.0) > 1e-10:
            raise ValueError("probabilities must be nonnegative and sum to 1")
        object.__setattr__(self, "probabilities", np.maximum(p, 0.0))


@dataclass
class WalkResult:
    distribution: Distribution
    final_state: object
    history: list[np.ndarray] = dc_field(default_factory=list)


def tvd(p, q) -> float:
    """Total variation distance (1/2) sum |p_k - q_k|."""
    pa = p.probabilities if isinstance(p, Distribution) else np.asarray(p, dtype=float)
    qa = q.probabilities if isinstance(q, Distribution) else np.asarray(q, dtype=float)
    if pa.shape != qa.shape:
        raise ValueError(f"distribution size mismatch {pa.shape} vs {qa.shape}")
    return 0.5 * float(np.abs(pa - qa).sum())


def _coin_amplitudes(spec: dict | None) -> np.ndarray:
    raw = (spec or {}).get("coin", [1, 0])
    amps = np.array(
        [complex(c[0], c[1]) if isinstance(c, (list, tuple)) else complex(c) for c in raw]
    )
    if amps.shape != (2,) or np.linalg.norm(amps) == 0:
        raise ValueError("coin amplitude spec must be two nonzero-norm entries")
    return amps / np.linalg.norm(amps)


def initial_state(config: WalkConfig) -> np.ndarray:
    """Dense walk-layout vector: |position> (x) (coin amplitudes)."""
    n = config.n
    spec = config.initial or {}
    k = int(spec.get("position", 0))
    if not 0 <= k < 1 << n:
        raise ToolkitError("index-out-of-range", f"initial position {k} for n={n}")
    amps = _coin_amplitudes(spec)
    vec = np.zeros(1 << (n + 1), dtype=complex)
    vec[2 * k] = amps[0]
    vec[2 * k + 1] = amps[1]
    return vec


def _marginal_walk(vec: np.ndarray) -> np.ndarray:
    pairs = vec.reshape(-1, 2)
    return np.abs(pairs[:, 0]) ** 2 + np.abs(pairs[:, 1]) ** 2


def _sample(probs: np.ndarray, config: WalkConfig) -> np.ndarray | None:
    if config.shots is None:
        return None
    rng = np.random.default_rng(config.seed)
    return rng.multinomial(config.shots, probs / probs.sum())


def matrix_oracle_run(
    field: CoinField, shift_matrix: np.ndarray, steps: int, init: np.ndarray
) -> WalkResult:
    """Reference evolution by dense matrix products, no circuits involved."""
    if field.n + 1 > statevec.dense_limit():
        raise ToolkitError("dense-limit-exceeded", "oracle run needs n under the dense cap")
    w = shift_matrix @ total_coin_matrix(field)
    vec = np.asarray(init, dtype=complex).copy()
    history = [_marginal_walk(vec)]
    for _ in range(steps):
        vec = w @ vec
        history.append(_marginal_walk(vec))
    return WalkResult(Distribution(history[-1]), vec, history)


def _run_dense_circuit(config: WalkConfig, coin_circuit: Circuit | None) -> WalkResult:
    n = config.n
    if n + 1 > statevec.dense_limit():
        raise ToolkitError("dense-limit-exceeded", f"walk layout for n={n} is over the cap")
    shift_circuit = _shift_circuit(config)
    vec = initial_state(config)
    phase = 0.0
    if coin_circuit is not None:
        phase = float(coin_circuit.metadata.get("global_phase", 0.0))
    coin_matrix = None if coin_circuit is not None else total_coin_matrix(config.field)
    history = [_marginal_walk(vec)]
    for _ in range(config.steps):
        if coin_circuit is None:
            vec = coin_matrix @ vec
        else:
            vec = statevec.apply_circuit(vec, coin_circuit)
            if phase:
                vec = np.exp(1j * phase) * vec
        vec = statevec.apply_circuit(vec, shift_circuit)
        norm = float(np.linalg.norm(vec))
        assert abs(norm - 1.0) <= _NORM_SLACK, f"norm drifted to {norm}"
        history.append(_marginal_walk(vec))
    probs = history[-1]
    return WalkResult(Distribution(probs, _sample(probs, config)), vec, history)


def _shift_circuit(config: WalkConfig) -> Circuit:
    if config.shift_scheme == "qft":
        return shift_mod.build_shift_qft(config.n)
    return shift_mod.build_shift_id(config.n)


def _run_linear(config: WalkConfig) -> WalkResult:
    n = config.n
    coin_circuit = linear_mod.build_linear(config.field)
    regs = coin_circuit.registers
    if regs.num_wires > _MAX_LINEAR_WIRES:
        raise ToolkitError(
            "backend-infeasible",
            f"linear layout needs {regs.num_wires} wires, cap {_MAX_LINEAR_WIRES}",
        )
    wire_map = {0: regs.coin()}
    for p in range(n):
        wire_map[1 + p] = regs.position(p)
    shift_gates = [g.remapped(wire_map) for g in _shift_circuit(config).gates]

    ancilla_mask = 0
    for m in range(1 << n):
        ancilla_mask |= 1 << regs.apos(m)
    for m in range(1, 1 << n):
        ancilla_mask |= 1 << regs.acoin(m)

    spec = config.initial or {}
    k = int(spec.get("position", 0))
    if not 0 <= k < 1 << n:
        raise ToolkitError("index-out-of-range", f"initial position {k} for n={n}")
    amps = _coin_amplitudes(spec)
    base = 0
    for p in range(n):
        if (k >> p) & 1:
            base |= 1 << regs.position(p)
    state = SparseState(
        regs.num_wires,
        {base: amps[0], base | (1 << regs.coin()): amps[1]},
    )

    def marginal(s: SparseState) -> np.ndarray:
        probs = np.zeros(1 << n)
        for idx, amp in s.items():
            kk = 0
            for p in range(n):
                if (idx >> regs.position(p)) & 1:
                    kk |= 1 << p
            probs[kk] += abs(amp) ** 2
        return probs

    history = [marginal(state)]
    for _ in range(config.steps):
        state = statevec.apply_circuit(state, coin_circuit)
        residual = max(
            (abs(a) for idx, a in state.items() if idx & ancilla_mask), default=0.0
        )
        assert residual <= _ANCILLA_SLACK, f"ancilla residual {residual}"
        for g in shift_gates:
            state = state.apply_gate(g.matrix_on_targets(), g.targets, g.controls)
        norm = state.norm()
        assert abs(norm - 1.0) <= _NORM_SLACK, f"norm drifted to {norm}"
        history.append(marginal(state))
    probs = history[-1]
    return WalkResult(Distribution(probs, _sample(probs, config)), state, history)


def run(config: WalkConfig) -> WalkResult:
    """Evolve per step as coin then shift; exact marginals, optional sampling."""
    if config.coin_builder == "dense-oracle":
        return _run_dense_circuit(config, None)
    if config.coin_builder == "naive":
        return _run_dense_circuit(config, naive_mod.build_naive(config.field))
    if config.coin_builder == "walsh":
        circuit = walsh_mod.build_walsh_coin(config.field, m=config.truncation)
        return _run_dense_circuit(config, circuit)
    return _run_linear(config)


# -- serialization -------------------------------------------------------------


def config_to_json(config: WalkConfig) -> dict:
    return {
        "n": config.n,
        "steps": config.steps,
        "coin_builder": config.coin_builder,
        "shift_scheme": config.shift_scheme,
        "truncation": config.truncation,
        "initial": config.initial,
        "shots": config.shots,
        "seed": config.seed,
        "field": coin_field_to_json(config.field),
    }


def config_from_json(data: dict) -> WalkConfig:
    field = coin_field_from_json(data["field"])
    return WalkConfig(
        n=int(data["n"]),
        steps=int(data["steps"]),
        field=field,
        coin_builder=data.get("coin_builder", "dense-oracle"),
        shift_scheme=data.get("shift_scheme", "qft"),
        truncation=data.get("truncation"),
        initial=data.get("initial"),
        shots=data.get("shots"),
        seed=data.get("seed"),
    )


def results_to_json(config: WalkConfig, result: WalkResult, tvd_vs_oracle: float | None = None) -> str:
    payload = {
        "config": config_to_json(config),
        "steps": config.steps,
        "probabilities": [float(p) for p in result.distribution.probabilities],
    }
    if result.distribution.counts is not None:
        payload["counts"] = [int(c) for c in result.distribution.counts]
    if tvd_vs_oracle is not None:
        payload["tvd_vs_oracle"] = tvd_vs_oracle
    return json.dumps(payload, indent=1)


def results_to_csv(result: WalkResult) -> str:
    lines = ["k,p_k,count"]
    counts = result.distribution.counts
    for k, p in enumerate(result.distribution.probabilities):
        c = "" if counts is None else str(int(counts[k]))
        lines.append(f"{k},{float(p)!r},{c}")
    return "\n".join(lines) + "\n"
