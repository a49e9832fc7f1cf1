"""Single-photon epoch circuits on a 4-mode nearest-neighbour MZI line.

Each MZI acts on adjacent modes ``(i, i+1)`` as

    [[e^{i phi} sin(theta/2), e^{i phi} cos(theta/2)],
     [cos(theta/2),           -sin(theta/2)        ]]

Two-qubit basis states ``|a>_A |r>_R`` (flattened index ``2*a + r``) are
placed on modes by a :class:`ModeEncoding`. The default order
``|00>, |01>, |11>, |10>`` puts the reward flip on rewarded actions onto the
single adjacent pair (2, 3).

Every two-level block of the abstract circuit is realized exactly (no
per-block phase freedom), so the compiled mesh reproduces the abstract
unitary entry for entry.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .amplitude import StateVector, prepare_initial, reflect_about
from .environment import OneWinnerEnvironment, reward_register_unitary

N_MODES = 4
TWO_PI = 2 * math.pi
UNITARY_TOL = 1e-10


class Unrepresentable(ValueError):
    """Target is outside the single-MZI family even up to a global phase."""

    def __init__(self, residual: float):
        super().__init__(f"not a single MZI up to global phase (residual {residual:.3e})")
        self.residual = residual


@dataclass(frozen=True)
class MziSetting:
    mode: int
    theta: float
    phi: float

    def __post_init__(self):
        if not 0 <= self.mode < N_MODES - 1:
            raise ValueError(f"mode pair ({self.mode}, {self.mode + 1}) not on the {N_MODES}-mode line")
        # theta is 4*pi periodic (the block flips sign after 2*pi), so it is checked, not wrapped
        if not 0 <= self.theta < TWO_PI:
            raise ValueError(f"theta {self.theta} outside [0, 2*pi)")
        object.__setattr__(self, "phi", float(self.phi) % TWO_PI)

    @property
    def mode_pair(self) -> tuple[int, int]:
        return (self.mode, self.mode + 1)

    def matrix(self) -> np.ndarray:
        return mzi_unitary(self.theta, self.phi)


@dataclass(frozen=True)
class MziMesh:
    """MZIs applied in list order (first element acts first)."""

    settings: tuple[MziSetting, ...] = ()

    def __len__(self):
        return len(self.settings)

    def __iter__(self):
        return iter(self.settings)

    def table(self) -> str:
        rows = ["index,mode_pair,theta,phi"]
        for i, s in enumerate(self.settings):
            rows.append(f"{i},{s.mode}-{s.mode + 1},{s.theta:.9f},{s.phi:.9f}")
        return "\n".join(rows)


@dataclass(frozen=True)
class ModeEncoding:
    """``order[m]`` is the ``(action, reward)`` basis state carried by mode ``m``."""

    order: tuple[tuple[int, int], ...] = ((0, 0), (0, 1), (1, 1), (1, 0))

    def __post_init__(self):
        if sorted(self.order) != [(0, 0), (0, 1), (1, 0), (1, 1)]:
            raise ValueError("encoding must be a bijection onto the two-qubit basis")

    @property
    def input_mode(self) -> int:
        return self.order.index((0, 0))

    def mode_of(self, index: int) -> int:
        """Mode carrying basis index ``2*a + r``."""
        return self.order.index(divmod(index, 2))

    def permutation(self) -> np.ndarray:
        """``P`` with ``P @ basis_vector = mode_vector``."""
        p = np.zeros((N_MODES, N_MODES))
        for m, (a, r) in enumerate(self.order):
            p[m, 2 * a + r] = 1.0
        return p

    def detectors(self, kind: str) -> dict[str, list[int]]:
        if kind == "classical":
            return {
                "D1": [m for m, (_, r) in enumerate(self.order) if r == 0],
                "D2": [m for m, (_, r) in enumerate(self.order) if r == 1],
            }
        if kind == "quantum":
            return {"D3": [m for m, (a, _) in enumerate(self.order) if a == 1]}
        raise ValueError(f"unknown circuit kind {kind!r}")


DEFAULT_ENCODING = ModeEncoding()


def mzi_unitary(theta: float, phi: float) -> np.ndarray:
    s, c = math.sin(theta / 2), math.cos(theta / 2)
    e = complex(math.cos(phi), math.sin(phi))
    return np.array([[e * s, e * c], [c, -s]], dtype=np.complex128)


def _check_unitary(u: np.ndarray, tol: float = UNITARY_TOL):
    u = np.asarray(u, dtype=np.complex128)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError("expected a square matrix")
    err = np.abs(u.conj().T @ u - np.eye(u.shape[0])).max()
    if err > tol:
        raise ValueError(f"matrix is not unitary (deviation {err:.3e})")
    return u


@dataclass(frozen=True)
class MziFit:
    theta: float
    phi: float
    global_phase: complex


def solve_mzi(target, tol: float = UNITARY_TOL) -> MziFit:
    """Angles with ``target == global_phase * mzi_unitary(theta, phi)``.

    Raises :class:`Unrepresentable` when the bottom row of ``target`` is not
    real up to a common phase.
    """
    t = _check_unitary(target, tol)
    if t.shape != (2, 2):
        raise ValueError("expected a 2x2 matrix")
    s = abs(t[1, 1])
    if s > 1e-12:
        g = -t[1, 1] / s
    else:
        g = t[1, 0] / abs(t[1, 0])
    c = (t[1, 0] / g).real
    theta = (2 * math.atan2(s, c)) % TWO_PI
    s_h, c_h = math.sin(theta / 2), math.cos(theta / 2)
    top = (t[0, 0] * s_h + t[0, 1] * c_h) / g
    phi = math.atan2(top.imag, top.real) % TWO_PI
    residual = float(np.abs(g * mzi_unitary(theta, phi) - t).max())
    if residual > 1e3 * tol:
        raise Unrepresentable(residual)
    return MziFit(theta, phi, complex(g))


def _phase_split(block: np.ndarray):
    """``block == mzi_unitary(theta, phi) @ diag(d0, d1)`` exactly."""
    s, c = abs(block[0, 0]), abs(block[1, 0])
    if c <= 1e-12:
        theta, phi = math.pi, 0.0
        d0, d1 = block[0, 0], -block[1, 1]
    elif s <= 1e-12:
        theta, phi = 0.0, 0.0
        d0, d1 = block[1, 0], block[0, 1]
    else:
        theta = 2 * math.atan2(s, c)
        d0 = block[1, 0] / c
        d1 = -block[1, 1] / s
        e = block[0, 0] / (d0 * s)
        phi = math.atan2(e.imag, e.real) % TWO_PI
    return theta, phi, d0, d1


def _angle(z: complex) -> float:
    return math.atan2(z.imag, z.real) % TWO_PI


def block_settings(block, mode: int) -> list[MziSetting]:
    """Exact MZI realization of a 2x2 unitary on the adjacent pair ``(mode, mode+1)``.

    One MZI when :func:`solve_mzi` finds it with unit global phase,
    otherwise two swap-type MZIs (theta = 0) supply the diagonal phases
    ahead of the mixing MZI.
    """
    b = _check_unitary(block)
    try:
        fit = solve_mzi(b)
        if abs(fit.global_phase - 1) < 1e-12:
            return [MziSetting(mode, fit.theta, fit.phi)]
    except Unrepresentable:
        pass
    theta, phi, d0, d1 = _phase_split(b)
    # diag(d0, d1) == mzi(0, arg d0) @ mzi(0, arg d1)
    return [
        MziSetting(mode, 0.0, _angle(d1)),
        MziSetting(mode, 0.0, _angle(d0)),
        MziSetting(mode, theta % TWO_PI, phi),
    ]


def embed(block: np.ndarray, mode: int, n: int = N_MODES) -> np.ndarray:
    u = np.eye(n, dtype=np.complex128)
    u[mode : mode + 2, mode : mode + 2] = block
    return u


def compose_mesh(mesh) -> np.ndarray:
    u = np.eye(N_MODES, dtype=np.complex128)
    for s in mesh:
        u = embed(s.matrix(), s.mode) @ u
    return u


def two_level_blocks(gate: np.ndarray, tol: float = 1e-12):
    """Split a gate that only couples disjoint pairs of levels into ``(a, b, 2x2)`` blocks.

    Identity blocks are dropped. Uncoupled levels must be left untouched.
    """
    gate = np.asarray(gate)
    n = gate.shape[0]
    seen, blocks = set(), []
    for a in range(n):
        if a in seen:
            continue
        partners = [b for b in range(n) if b != a and (abs(gate[a, b]) > tol or abs(gate[b, a]) > tol)]
        if not partners:
            if abs(gate[a, a] - 1) > tol:
                raise ValueError(f"level {a} picks up a phase without a partner level")
            seen.add(a)
            continue
        if len(partners) != 1:
            raise ValueError("gate couples more than two levels")
        b = partners[0]
        seen.update((a, b))
        idx = [a, b]
        sub = gate[np.ix_(idx, idx)]
        if np.abs(sub - np.eye(2)).max() > tol:
            blocks.append((a, b, sub))
    return blocks


_SWAP = np.array([[0, 1], [1, 0]], dtype=np.complex128)


def compile_blocks(blocks) -> MziMesh:
    """Route each two-level block onto adjacent modes with swap MZIs and realize it."""
    pos = list(range(N_MODES))  # pos[logical mode] = physical mode
    at = list(range(N_MODES))  # at[physical mode] = logical mode
    out: list[MziSetting] = []

    def swap(p):
        out.append(MziSetting(p, 0.0, 0.0))
        a, b = at[p], at[p + 1]
        at[p], at[p + 1] = b, a
        pos[a], pos[b] = p + 1, p

    for a, b, block in blocks:
        while abs(pos[a] - pos[b]) > 1:
            if pos[b] > pos[a]:
                swap(pos[b] - 1)
            else:
                swap(pos[b])
        if pos[a] < pos[b]:
            out.extend(block_settings(block, pos[a]))
        else:
            out.extend(block_settings(_SWAP @ block @ _SWAP, pos[b]))
    # restore the logical order
    for i in range(N_MODES):
        for p in range(N_MODES - 1 - i):
            if at[p] > at[p + 1]:
                swap(p)
    return MziMesh(tuple(_cancel_swaps(out)))


def _cancel_swaps(settings):
    out: list[MziSetting] = []
    for s in settings:
        if out and s == out[-1] and s.theta == 0.0 and s.phi == 0.0:
            out.pop()
        else:
            out.append(s)
    return out


# --- abstract epoch circuits on the two-qubit basis (index 2*a + r) -------------------

_ORACLE_ENV = OneWinnerEnvironment(2, winner=1)
# |0> -> |-> on the reward qubit; self-inverse
_MINUS_PREP = np.array([[1, -1], [-1, -1]], dtype=np.complex128) / math.sqrt(2)


def _action_state(xi: float) -> StateVector:
    return prepare_initial([math.cos(xi) ** 2, math.sin(xi) ** 2])


def _on_action(op2: np.ndarray) -> np.ndarray:
    return np.kron(op2, np.eye(2))


def _on_reward(op2: np.ndarray) -> np.ndarray:
    return np.kron(np.eye(2), op2)


def _preparation(psi: StateVector) -> np.ndarray:
    """Householder reflection taking ``|0>`` to the real state ``psi``."""
    v = np.array([1.0, 0.0]) - psi.amplitudes.real
    nv = v @ v
    if nv < 1e-30:
        return np.eye(2, dtype=np.complex128)
    return (np.eye(2) - 2 * np.outer(v, v) / nv).astype(np.complex128)


def _reflection_matrix(psi: StateVector) -> np.ndarray:
    cols = [reflect_about(psi, StateVector(np.eye(2)[i])).amplitudes for i in range(2)]
    return np.column_stack(cols)


def _oracle_matrix() -> np.ndarray:
    return np.column_stack(
        [reward_register_unitary(_ORACLE_ENV, StateVector(np.eye(4)[i], "action_reward")).amplitudes
         for i in range(4)]
    )


def epoch_gates(kind: str, xi: float) -> list[np.ndarray]:
    """Gate list (first applied first) on the two-qubit basis."""
    if not 0 < xi < math.pi / 2:
        raise ValueError("xi must lie in (0, pi/2)")
    psi = _action_state(xi)
    prep = _on_action(_preparation(psi))
    oracle = _oracle_matrix()
    if kind == "classical":
        return [prep, oracle]
    if kind == "quantum":
        minus = _on_reward(_MINUS_PREP)
        return [prep, minus, oracle, minus, _on_action(_reflection_matrix(psi))]
    raise ValueError(f"unknown circuit kind {kind!r}")


def epoch_unitary(kind: str, xi: float) -> np.ndarray:
    u = np.eye(4, dtype=np.complex128)
    for g in epoch_gates(kind, xi):
        u = g @ u
    return u


def compile_epoch_circuit(kind: str, xi: float, encoding: ModeEncoding = DEFAULT_ENCODING) -> MziMesh:
    p = encoding.permutation()
    blocks = []
    for gate in epoch_gates(kind, xi):
        blocks.extend(two_level_blocks(p @ gate @ p.T))
    return compile_blocks(blocks)


def simulate_with_visibility(mesh, input_mode: int, visibility: float = 1.0) -> np.ndarray:
    """Output mode distribution with each MZI's two-input interference scaled by ``visibility``.

    The density matrix is propagated MZI by MZI; before each one the
    coherence between its two input modes is multiplied by ``visibility``.
    """
    if not 0 <= visibility <= 1:
        raise ValueError("visibility must lie in [0, 1]")
    rho = np.zeros((N_MODES, N_MODES), dtype=np.complex128)
    rho[input_mode, input_mode] = 1.0
    for s in mesh:
        i, j = s.mode, s.mode + 1
        rho[i, j] *= visibility
        rho[j, i] *= visibility
        u = embed(s.matrix(), s.mode)
        rho = u @ rho @ u.conj().T
    return np.clip(rho.diagonal().real, 0.0, 1.0)


def detector_probabilities(kind: str, probs, encoding: ModeEncoding = DEFAULT_ENCODING) -> dict[str, float]:
    return {name: float(sum(probs[m] for m in modes)) for name, modes in encoding.detectors(kind).items()}


@lru_cache(maxsize=4096)
def photonic_success(q: float, visibility: float = 1.0) -> float:
    """Probability that the compiled single-iteration circuit reports a rewarded action."""
    xi = math.asin(math.sqrt(q))
    mesh = compile_epoch_circuit("quantum", xi)
    probs = simulate_with_visibility(mesh, DEFAULT_ENCODING.input_mode, visibility)
    return detector_probabilities("quantum", probs)["D3"]
