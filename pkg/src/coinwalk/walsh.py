"""Walsh-series synthesis of exponentials e^{i f(x) (x) sigma}.

A real function sampled on the 2^n dyadic points expands into +-1-valued
Walsh functions; each series term exponentiates to a commuting circuit
fragment built from a CNOT parity ladder and one rotation.  Truncating the
series at 2^m terms costs at most sup|f'| / 2^m in spectral norm, so smooth
functions compress well.

Sample order convention: samples[k] is f evaluated at the dyadic coordinate
of position index k (bit-reversed fraction), which makes the coefficient
transform a plain natural-order Walsh-Hadamard transform and makes term j's
diagonal operator a Z-tensor on exactly the position wires in j's binary
support.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import ToolkitError
from .circuit import Circuit, GateInstance, RegisterMap
from .coins import CoinField, dyadic_coordinate
from . import transpile

__all__ = [
    "WalshSeries",
    "build_linear_phase",
    "build_walsh",
    "build_walsh_coin",
    "derivative_sup_estimate",
    "function_from_spec",
    "gray_walsh_gates",
    "series_from_json",
    "series_to_json",
    "smoothness_check",
    "truncate",
    "truncation_error_bound",
    "unwrap_angles",
    "walsh_coefficients",
    "walsh_function",
    "walsh_product_gates",
]

SIGMA_KINDS = ("i", "x", "y", "z")

_PAULI = {
    "i": np.eye(2, dtype=complex),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def _sigma_key(sigma: str) -> str:
    key = str(sigma).lower()
    if key not in SIGMA_KINDS:
        raise ValueError(f"sigma must be one of I, X, Y, Z, got {sigma!r}")
    return key


def walsh_function(j: int, x) -> np.ndarray | int:
    """w_j(x) in {+1, -1}; bit i of j pairs with the dyadic digit of weight 2^-(i+1)."""
    if j < 0:
        raise ToolkitError("index-out-of-range", "walsh index must be nonnegative")
    xs = np.asarray(x, dtype=float)
    exponent = np.zeros(xs.shape, dtype=np.int64)
    frac = np.mod(xs, 1.0)
    i = 0
    while j >> i:
        frac = frac * 2.0
        digit = frac.astype(np.int64)
        if (j >> i) & 1:
            exponent += digit
        frac -= digit
        i += 1
    out = 1 - 2 * (exponent & 1)
    return out if out.shape else int(out)


@dataclass(frozen=True)
class WalshSeries:
    """Coefficients a_j, j = 0..2^n-1, of a function sampled at dyadic points."""

    n: int
    coefficients: np.ndarray
    samples: np.ndarray | None = dc_field(default=None, repr=False)

    def __post_init__(self):
        coeffs = np.asarray(self.coefficients, dtype=float)
        if coeffs.shape != (1 << self.n,):
            raise ToolkitError(
                "bad-sample-count",
                f"need 2^{self.n} coefficients, got shape {coeffs.shape}",
            )
        object.__setattr__(self, "coefficients", coeffs)

    def reconstruct(self) -> np.ndarray:
        """f(x_k) for every position index k (inverse transform, exact)."""
        return _fwht(self.coefficients.copy())

    def terms(self) -> list[tuple[int, float]]:
        """(j, a_j) pairs with a_j != 0, ascending j."""
        return [(j, float(a)) for j, a in enumerate(self.coefficients) if a != 0.0]


def _fwht(a: np.ndarray) -> np.ndarray:
    """In-place natural-order Walsh-Hadamard butterfly (unnormalized)."""
    h = 1
    while h < a.shape[0]:
        a = a.reshape(-1, 2 * h)
        lo, hi = a[:, :h].copy(), a[:, h:].copy()
        a[:, :h] = lo + hi
        a[:, h:] = lo - hi
        a = a.reshape(-1)
        h *= 2
    return a


def walsh_coefficients(samples) -> WalshSeries:
    """Series of the function with value samples[k] at position k's dyadic point."""
    values = np.asarray(samples, dtype=float)
    if values.ndim != 1 or values.size < 1 or values.size & (values.size - 1):
        raise ToolkitError(
            "bad-sample-count", f"sample count must be a power of 2, got {values.size}"
        )
    n = values.size.bit_length() - 1
    coeffs = _fwht(values.copy()) / values.size
    return WalshSeries(n, coeffs, samples=values)


def truncate(series: WalshSeries, m: int) -> WalshSeries:
    """Zero every coefficient with index >= 2^m."""
    if not 0 <= m <= series.n:
        raise ToolkitError("index-out-of-range", f"truncation order {m} not in [0, {series.n}]")
    coeffs = series.coefficients.copy()
    coeffs[1 << m :] = 0.0
    return WalshSeries(series.n, coeffs, samples=series.samples)


def truncation_error_bound(f_prime_sup: float, m: int) -> float:
    """Sup-norm (hence spectral-norm) error cap for a series cut at 2^m terms."""
    if f_prime_sup < 0:
        raise ValueError("derivative bound must be nonnegative")
    return f_prime_sup / (1 << m)


def smoothness_check(f_prime_sup: float, epsilon: float, n: int) -> str:
    """Whether a 1/epsilon-size truncated circuit can reach accuracy epsilon."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    scale = epsilon * (1 << n)
    if f_prime_sup <= scale / 8:
        return "efficient"
    if f_prime_sup >= scale:
        return "fails"
    return "marginal"


def derivative_sup_estimate(samples) -> float:
    """sup|f'| estimated from dyadic samples: max adjacent-in-x difference / spacing.

    A finite-difference estimate, not a bound; callers needing a certificate
    must supply the true derivative sup.
    """
    values = np.asarray(samples, dtype=float)
    n = values.size.bit_length() - 1
    if values.size != 1 << n:
        raise ToolkitError("bad-sample-count", "need a power-of-2 sample count")
    if values.size == 1:
        return 0.0
    xs = np.array([dyadic_coordinate(k, n) for k in range(values.size)])
    order = np.argsort(xs)
    return float(np.max(np.abs(np.diff(values[order]))) * values.size)


def unwrap_angles(values: np.ndarray, n: int) -> np.ndarray:
    """Remove 2-pi jumps along increasing dyadic coordinate.

    Angle data from per-position matrix factorizations is only defined mod
    2 pi; adjacent-in-x jumps inflate the effective derivative and ruin
    truncation.  Shifting each value by a whole period changes no
    exponential e^{i F sigma}, so this is free smoothing.
    """
    xs = np.array([dyadic_coordinate(k, n) for k in range(values.size)])
    order = np.argsort(xs)
    unwrapped = np.unwrap(values[order])
    out = np.empty_like(values)
    out[order] = unwrapped
    return out


def function_from_spec(spec: dict, n: int) -> np.ndarray:
    """Dyadic samples for a CLI function spec: harmonic, linear, or literal samples."""
    kind = spec.get("kind")
    xs = np.array([dyadic_coordinate(k, n) for k in range(1 << n)])
    if kind == "harmonic":
        v0 = float(spec["V0"])
        return v0 * (xs - 0.5) ** 2
    if kind == "linear":
        return float(spec["a"]) * xs
    if kind == "samples":
        values = np.asarray(spec["values"], dtype=float)
        if values.size != 1 << n:
            raise ToolkitError(
                "bad-sample-count", f"expected {1 << n} samples, got {values.size}"
            )
        return values
    raise ValueError(f"unknown function spec kind {kind!r}")


def series_to_json(series: WalshSeries) -> dict:
    return {"n": series.n, "coefficients": [float(a) for a in series.coefficients]}


def series_from_json(data: dict) -> WalshSeries:
    return WalshSeries(int(data["n"]), np.asarray(data["coefficients"], dtype=float))


# -- circuit emission ----------------------------------------------------------

_ROT_FOR = {"x": "rx", "y": "ry", "z": "rz"}


def _coin_core(regs: RegisterMap, wire: int, sigma: str, angle: float) -> list[GateInstance]:
    """e^{i a Z_wire (x) sigma_coin} as entangler / rotation / entangler."""
    coin = regs.coin()
    rot = GateInstance(_ROT_FOR[sigma], (), (coin,), angle)
    if sigma == "x":
        ent = GateInstance("cz", (wire,), (coin,))
    else:
        ent = GateInstance("cnot", (wire,), (coin,))
    return [ent, rot, ent]


def _term_gates(regs: RegisterMap, sigma: str, j: int, a: float) -> list[GateInstance]:
    """One commuting factor e^{i a w_j (x) sigma}; empty for the sigma=I phase term."""
    if j == 0:
        if sigma == "i":
            return []  # scalar phase, tracked in circuit metadata
        return [GateInstance(_ROT_FOR[sigma], (), (regs.coin(),), -2.0 * a)]
    bits = [p for p in range(j.bit_length()) if (j >> p) & 1]
    head = regs.position(bits[0])
    ladder = [GateInstance("cnot", (regs.position(p),), (head,)) for p in bits[1:]]
    if sigma == "i":
        middle = [GateInstance("rz", (), (head,), -2.0 * a)]
    else:
        middle = _coin_core(regs, head, sigma, -2.0 * a)
    return ladder + middle + ladder[::-1]


def walsh_product_gates(
    regs: RegisterMap, sigma: str, terms: list[tuple[int, float]]
) -> list[GateInstance]:
    """Fragment-per-term gate list, in the given term order (builder canonical form)."""
    sigma = _sigma_key(sigma)
    gates: list[GateInstance] = []
    for j, a in terms:
        gates.extend(_term_gates(regs, sigma, j, a))
    return gates


def _cancel_common_target_runs(gates: list[GateInstance]) -> list[GateInstance]:
    """Reduce runs of consecutive CNOTs sharing a target by control parity."""
    changed = True
    while changed:
        changed = False
        out: list[GateInstance] = []
        i = 0
        while i < len(gates):
            g = gates[i]
            if g.kind != "cnot":
                out.append(g)
                i += 1
                continue
            target = g.targets[0]
            run_end = i
            while run_end < len(gates) and gates[run_end].kind == "cnot" and gates[run_end].targets[0] == target:
                run_end += 1
            controls = [gates[t].controls[0] for t in range(i, run_end)]
            survivors = sorted(c for c in set(controls) if controls.count(c) % 2)
            if len(survivors) < len(controls):
                changed = True
            out.extend(GateInstance("cnot", (c,), (target,)) for c in survivors)
            i = run_end
        gates = out
    return gates


def gray_walsh_gates(
    regs: RegisterMap, sigma: str, ordered_terms: list[tuple[int, float]]
) -> list[GateInstance]:
    """Merged emission of the given terms, consecutive parity sets shared.

    For sigma != I every term folds its whole parity set onto the coin wire
    (the entanglers commute pairwise), so adjacent terms only pay for the
    symmetric difference of their index supports.  For sigma = I the
    per-term ladders are emitted and then reduced by the common-target
    cancellation pass.
    """
    sigma = _sigma_key(sigma)
    if sigma == "i":
        gates: list[GateInstance] = []
        for j, a in ordered_terms:
            gates.extend(_term_gates(regs, sigma, j, a))
        return _cancel_common_target_runs(gates)
    coin = regs.coin()
    rot_kind = _ROT_FOR[sigma]
    ent_kind = "cz" if sigma == "x" else "cnot"

    def entangler(p: int) -> GateInstance:
        return GateInstance(ent_kind, (regs.position(p),), (coin,))

    gates = []
    current: frozenset[int] = frozenset()
    for j, a in ordered_terms:
        wanted = frozenset(p for p in range(j.bit_length()) if (j >> p) & 1)
        for p in sorted(current ^ wanted):
            gates.append(entangler(p))
        gates.append(GateInstance(rot_kind, (), (coin,), -2.0 * a))
        current = wanted
    for p in sorted(current):
        gates.append(entangler(p))
    return gates


def build_walsh(series: WalshSeries, sigma: str, optimize: bool = True) -> Circuit:
    """Circuit for e^{i f(x) (x) sigma} on the walk layout (coin wire 0).

    The j = 0 term is a bare coin rotation for sigma in {X, Y, Z} and a
    tracked global phase for sigma = I.  With ``optimize`` the Gray-code
    pass is applied and kept when it strictly lowers the entangling count.
    """
    sigma = _sigma_key(sigma)
    regs = RegisterMap.walk(series.n)
    terms = series.terms()
    phase = 0.0
    if sigma == "i" and terms and terms[0][0] == 0:
        phase = terms[0][1]
    gates = walsh_product_gates(regs, sigma, terms)
    meta = {
        "builder": "walsh",
        "n": series.n,
        "global_phase": phase,
        "walsh": {"sigma": sigma, "terms": terms, "optimized": False},
    }
    circuit = Circuit(regs, tuple(gates), meta)
    if optimize and sum(1 for j, _ in terms if j != 0) > 1:
        circuit = transpile.gray_code_optimize(circuit)
    return circuit


def build_walsh_coin(field: CoinField, m: int | None = None, optimize: bool = True) -> Circuit:
    """Coin circuit from the field's four per-position angle functions.

    The first angle function becomes a tracked global phase series (sigma =
    I on positions), the other three become Z/Y/Z coin-conjugation series,
    composed in circuit time from the last factor to the first.  Angle
    samples are unwrapped along x before expansion so branch cuts in the
    factorization do not masquerade as roughness.
    """
    angles = field.euler_angles()
    unwrapped = [unwrap_angles(angles[:, i], field.n) for i in range(4)]
    series = [walsh_coefficients(col) for col in unwrapped]
    if m is not None:
        series = [truncate(s, m) for s in series]
    order = [(3, "z"), (2, "y"), (1, "z"), (0, "i")]
    regs = RegisterMap.walk(field.n)
    gates: list[GateInstance] = []
    phase = 0.0
    for idx, sigma in order:
        part = build_walsh(series[idx], sigma, optimize=optimize)
        gates.extend(part.gates)
        phase += float(part.metadata.get("global_phase", 0.0))
    meta = {
        "builder": "walsh-coin",
        "n": field.n,
        "truncation": m,
        "global_phase": phase,
    }
    return Circuit(regs, tuple(gates), meta)


def build_linear_phase(a: float, sigma: str, n: int) -> Circuit:
    """e^{i a x(hat) (x) sigma} with exactly n two-qubit gates.

    The dyadic coordinate splits over bits, so one controlled e^{i a 2^-(p+1)
    sigma} per position wire suffices; no series expansion and no error.
    """
    sigma = _sigma_key(sigma)
    regs = RegisterMap.walk(n)
    pauli = _PAULI[sigma]
    gates = []
    for p in range(n):
        theta = a / (1 << (p + 1))
        block = np.cos(theta) * np.eye(2) + 1j * np.sin(theta) * pauli
        gates.append(
            GateInstance(
                "cu2",
                (regs.position(p),),
                (regs.coin(),),
                matrix=block,
                label=f"phase{p}",
            )
        )
    meta = {"builder": "linear-phase", "n": n, "global_phase": 0.0}
    return Circuit(regs, tuple(gates), meta)
