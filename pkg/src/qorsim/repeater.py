"""Entanglement distribution over chains of quantum-optical repeater nodes.

Protocol conventions, fixed across both engines:

 * Each span has its pair source at the right end; the flying photon
   crosses the fiber leftward, so span states are ordered (left end qubit,
   right end qubit) and the fiber stack acts on qubit 0.
 * An attempt cycle lasts 1/attempt_rate plus one round trip (the source
   holds its memory until the herald returns), so a span's k-th-attempt
   success is ready at k * cycle. By ready time the left qubit has aged one
   one-way delay and the right qubit one round trip.
 * End stations are ideal: no memory decay, unit efficiencies. Only
   intermediate nodes carry memory and detector parameters.
 * Neighboring spans generate in parallel; a pair older than the chain's
   memory_cutoff (measured from its ready time, clock reset on merge) is
   discarded and only that side regenerates, from the expiry time.
 * A failed swap discards everything built so far and restarts the whole
   frontier from the failure time. Swap success probability is
   bsm_success_prob times read_efficiency squared (both measured qubits
   are read from the swapping node's memories).
 * After a successful swap the outcome travels one span to the new frontier
   edge before the pair is usable; the final swap's outcome must reach both
   end stations.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channels import apply_to_subsystem, depolarizing_channel
from .fiber import FiberSpan, photon_dwell_time, span_channel_stack
from .linalg import (
    BELL_KETS,
    BELL_SIDE_OPS,
    DensityMatrix,
    DimensionError,
    StateError,
    bell_diagonal_weights,
)

# Geometric attempt counts with success probability below this are modeled
# by their exponential limit in the analytic engine (grid sums would need
# millions of terms; the relative error of the limit is O(p)).
GEOM_EXACT_MIN_P = 1e-4

_PHI_PLUS_VEC = BELL_KETS[0]


@dataclass(frozen=True)
class MemorySpec:
    """Quantum memory figure-of-merit bundle. Decay is depolarizing with
    survival weight exp(-dwell / coherence_time)."""

    coherence_time: float = 1.0
    write_efficiency: float = 0.9
    read_efficiency: float = 0.9
    cryogenic_required: bool = False

    def __post_init__(self) -> None:
        if self.coherence_time <= 0:
            raise StateError("coherence time must be positive")
        for name in ("write_efficiency", "read_efficiency"):
            v = getattr(self, name)
            if not 0.0 < v <= 1.0:
                raise StateError(f"{name} must lie in (0, 1], got {v}")


@dataclass(frozen=True)
class QorsNode:
    """An intermediate repeater station: memories plus a swapping BSM."""

    memory: MemorySpec = MemorySpec()
    bsm_success_prob: float = 0.5
    bsm_visibility_penalty: float = 0.0
    detector_efficiency: float = 0.8
    position_km: float = 0.0

    def __post_init__(self) -> None:
        if not 0.0 < self.bsm_success_prob <= 1.0:
            raise StateError("bsm_success_prob must lie in (0, 1]")
        if not 0.0 <= self.bsm_visibility_penalty <= 1.0:
            raise StateError("bsm_visibility_penalty must lie in [0, 1]")
        if not 0.0 < self.detector_efficiency <= 1.0:
            raise StateError("detector_efficiency must lie in (0, 1]")


@dataclass(frozen=True)
class RepeaterChain:
    """Spans end to end with one node between each adjacent pair."""

    spans: tuple[FiberSpan, ...]
    nodes: tuple[QorsNode, ...] = ()
    attempt_rate: float = 1e6     # pair-source attempts per second
    memory_cutoff: float = 1.0    # seconds a ready pair may wait

    def __post_init__(self) -> None:
        spans = tuple(self.spans)
        nodes = tuple(self.nodes)
        if not spans:
            raise DimensionError("chain needs at least one span")
        if len(nodes) != len(spans) - 1:
            raise DimensionError(
                f"{len(spans)} spans need {len(spans) - 1} nodes, got {len(nodes)}"
            )
        if self.attempt_rate <= 0:
            raise StateError("attempt rate must be positive")
        if self.memory_cutoff <= 0:
            raise StateError("memory cutoff must be positive")
        object.__setattr__(self, "spans", spans)
        object.__setattr__(self, "nodes", nodes)


@dataclass(frozen=True)
class SpanAttempt:
    """Heralded span outcome: click probability and the conditional state."""

    success_probability: float
    state: DensityMatrix
    transmittance: float


@dataclass(frozen=True)
class SwapResult:
    success_probability: float
    state: DensityMatrix


@dataclass(frozen=True)
class EndToEndResult:
    """Delivered-pair statistics for a whole chain."""

    fidelity: float
    pair_rate_hz: float
    mean_latency_s: float
    trials: int
    fidelity_stderr: float
    rate_stderr: float
    mean_state: DensityMatrix
    engine: str


def span_entanglement_attempt(
    span: FiberSpan,
    detector_efficiency: float = 1.0,
    memory: MemorySpec | None = None,
) -> SpanAttempt:
    """One heralded pair-generation attempt across a span.

    The source keeps one qubit (write efficiency of its memory), the other
    flies through the span stack and must be detected on the far side. The
    returned state is conditioned on the herald; background coincidences mix
    in a maximally mixed component with weight noise / (signal + noise).
    """
    if not 0.0 < detector_efficiency <= 1.0:
        raise StateError("detector efficiency must lie in (0, 1]")
    stack = span_channel_stack(span)
    write = memory.write_efficiency if memory is not None else 1.0
    p = write * detector_efficiency * stack.transmittance

    # Entangled pair with the flying qubit embedded in the rail space:
    # (|0>_f |0>_k + |1>_f |1>_k) / sqrt(2), rail factor first.
    vec = np.zeros(6, dtype=complex)
    vec[0 * 2 + 0] = vec[1 * 2 + 1] = 1.0 / np.sqrt(2.0)
    rho = DensityMatrix(np.outer(vec, vec.conj()))
    rho = apply_to_subsystem(stack.channel, rho, 0, [3, 2])
    # Herald: project the rail onto its photon levels and renormalize.
    sub = rho.matrix[:4, :4]
    survival = float(np.real(np.trace(sub)))
    if survival < 1e-14:
        raise StateError("span transmitted nothing; cannot herald")
    conditional = sub / survival

    noise = stack.noise_probability
    if noise > 0.0:
        w_noise = noise / (p + noise)
        conditional = (1.0 - w_noise) * conditional + w_noise * np.eye(4) / 4.0
    return SpanAttempt(
        success_probability=p,
        state=DensityMatrix(conditional),
        transmittance=stack.transmittance,
    )


def memory_decay(
    state: DensityMatrix, dwell_s: float, memory: MemorySpec, qubit: int
) -> DensityMatrix:
    """Depolarize one qubit of a pair for a storage interval."""
    if dwell_s < 0:
        raise StateError("dwell time must be nonnegative")
    if state.dim != 4:
        raise DimensionError("memory decay acts on two-qubit states")
    if qubit not in (0, 1):
        raise DimensionError("qubit index must be 0 or 1")
    p = 1.0 - math.exp(-dwell_s / memory.coherence_time)
    if p == 0.0:
        return state
    return apply_to_subsystem(depolarizing_channel(p), state, qubit, [2, 2])


_CORRECTIONS_ON_RIGHT = tuple(np.kron(np.eye(2), op) for op in BELL_SIDE_OPS)
# Linear-optics BSMs herald only the odd-parity Bell outcomes.
_HERALDED_OUTCOMES = (1, 3)
_Z_ON_QUBIT1_OF4 = np.kron(
    np.kron(np.eye(2), np.array([[1, 0], [0, -1]], dtype=complex)), np.eye(4)
)


def _swap_states(left: np.ndarray, right: np.ndarray, visibility_penalty: float) -> np.ndarray:
    """Bell-measure qubits (1, 2) of left x right, aggregate the heralded
    outcomes with their Pauli corrections applied to the far right qubit."""
    joint = np.kron(left, right)
    if visibility_penalty > 0.0:
        z = _Z_ON_QUBIT1_OF4
        joint = (1.0 - visibility_penalty) * joint + visibility_penalty * (
            z @ joint @ z
        )
    t = joint.reshape((2,) * 8)
    out = np.zeros((4, 4), dtype=complex)
    for k in _HERALDED_OUTCOMES:
        v = BELL_KETS[k].reshape(2, 2)
        m = np.einsum("mn,amnbcpqd,pq->abcd", v.conj(), t, v).reshape(4, 4)
        c = _CORRECTIONS_ON_RIGHT[k]
        out += c @ m @ c.conj().T
    tr = float(np.real(np.trace(out)))
    if tr < 1e-14:
        raise StateError("Bell measurement has no support on heralded outcomes")
    out = out / tr
    return (out + out.conj().T) / 2


def entanglement_swap(
    left: DensityMatrix, right: DensityMatrix, node: QorsNode
) -> SwapResult:
    """Connect two pairs meeting at a node into one longer pair.

    Interference visibility enters as a phase-flip on the node-side qubit of
    the left pair before the measurement. The returned state aggregates the
    heralded outcomes after correction; success probability is the node's
    BSM efficiency (memory readout is accounted by the chain engines).
    """
    if left.dim != 4 or right.dim != 4:
        raise DimensionError("entanglement swap needs two two-qubit states")
    out = _swap_states(left.matrix, right.matrix, node.bsm_visibility_penalty)
    return SwapResult(
        success_probability=node.bsm_success_prob, state=DensityMatrix(out)
    )


def teleport(state: DensityMatrix, resource: DensityMatrix) -> DensityMatrix:
    """Teleport a single-qubit state through an entangled resource pair,
    averaging over all four corrected measurement outcomes."""
    if state.dim != 2 or resource.dim != 4:
        raise DimensionError("teleport needs a qubit state and a two-qubit resource")
    joint = np.kron(state.matrix, resource.matrix)
    t = joint.reshape((2,) * 6)
    out = np.zeros((2, 2), dtype=complex)
    for k in range(4):
        v = BELL_KETS[k].reshape(2, 2)
        m = np.einsum("mn,mnapqb,pq->ab", v.conj(), t, v)
        c = BELL_SIDE_OPS[k]
        out += c @ m @ c.conj().T
    out = out / float(np.real(np.trace(out)))
    return DensityMatrix((out + out.conj().T) / 2)


# Chain engines.

@dataclass(frozen=True)
class _SpanModel:
    """Per-span quantities both engines share."""

    success_prob: float
    cycle_s: float
    one_way_s: float
    ready_state: np.ndarray       # pre-ready decay folded in
    left_decay_rate: float        # 1/coherence at the left holder, 0 if ideal
    right_decay_rate: float


def _decay_qubit_raw(rho: np.ndarray, qubit: int, rate: float, dwell: float) -> np.ndarray:
    """Fast path for memory_decay on a raw 4x4 array."""
    if rate == 0.0 or dwell == 0.0:
        return rho
    lam = math.exp(-rate * dwell)
    t = rho.reshape(2, 2, 2, 2)
    if qubit == 0:
        reduced = np.einsum("ijik->jk", t)
        mixed = np.kron(np.eye(2) / 2.0, reduced)
    else:
        reduced = np.einsum("ijkj->ik", t)
        mixed = np.kron(reduced, np.eye(2) / 2.0)
    return lam * rho + (1.0 - lam) * mixed


def _span_models(chain: RepeaterChain) -> list[_SpanModel]:
    n = len(chain.spans)
    models = []
    for i, span in enumerate(chain.spans):
        left = chain.nodes[i - 1] if i > 0 else None
        right = chain.nodes[i] if i < n - 1 else None
        attempt = span_entanglement_attempt(
            span,
            detector_efficiency=left.detector_efficiency if left else 1.0,
            memory=right.memory if right else None,
        )
        one_way = photon_dwell_time(span)
        state = attempt.state
        if left is not None:
            state = memory_decay(state, one_way, left.memory, qubit=0)
        if right is not None:
            state = memory_decay(state, 2.0 * one_way, right.memory, qubit=1)
        models.append(
            _SpanModel(
                success_prob=attempt.success_probability,
                cycle_s=1.0 / chain.attempt_rate + 2.0 * one_way,
                one_way_s=one_way,
                ready_state=state.matrix,
                left_decay_rate=1.0 / left.memory.coherence_time if left else 0.0,
                right_decay_rate=1.0 / right.memory.coherence_time if right else 0.0,
            )
        )
    return models


def _final_classical_delay(models: list[_SpanModel]) -> float:
    """Outcome of the last swap must reach both end stations."""
    if len(models) == 1:
        return 0.0
    to_right = models[-1].one_way_s
    to_left = sum(m.one_way_s for m in models[:-1])
    return max(to_right, to_left)


def _run_trial(
    models: list[_SpanModel],
    nodes: tuple[QorsNode, ...],
    cutoff: float,
    final_delay: float,
    rng: np.random.Generator,
) -> tuple[float, np.ndarray]:
    n = len(models)

    def gen_span(i: int, t0: float) -> float:
        m = models[i]
        k = int(rng.geometric(m.success_prob)) if m.success_prob < 1.0 else 1
        return t0 + k * m.cycle_s

    def build(i: int, t0: float) -> tuple[float, np.ndarray, float]:
        """Frontier over spans 0..i-1: (ready time, state, last decay time)."""
        if i == 1:
            r = gen_span(0, t0)
            return r, models[0].ready_state, r
        m = models[i - 1]
        node = nodes[i - 2]
        while True:
            t_f, s_f, u_f = build(i - 1, t0)
            t_s = gen_span(i - 1, t0)
            u_s = t_s
            while True:
                if t_s - t_f > cutoff:
                    t_f, s_f, u_f = build(i - 1, t_f + cutoff)
                elif t_f - t_s > cutoff:
                    t_s = gen_span(i - 1, t_s + cutoff)
                    u_s = t_s
                else:
                    break
            t_swap = max(t_f, t_s)
            node_rate = 1.0 / node.memory.coherence_time
            s_f = _decay_qubit_raw(s_f, 1, node_rate, t_swap - u_f)
            s_s = _decay_qubit_raw(m.ready_state, 0, node_rate, t_swap - u_s)
            s_s = _decay_qubit_raw(s_s, 1, m.right_decay_rate, t_swap - u_s)
            q = node.bsm_success_prob * node.memory.read_efficiency**2
            if rng.random() < q:
                out = _swap_states(s_f, s_s, node.bsm_visibility_penalty)
                notify = m.one_way_s if i < n else final_delay
                return t_swap + notify, out, t_swap
            t0 = t_swap

    ready, state, _ = build(n, 0.0)
    return ready, state


def _run_trial_range(
    chain: RepeaterChain, seed: int, lo: int, hi: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    models = _span_models(chain)
    final_delay = _final_classical_delay(models)
    times = np.empty(hi - lo)
    states = np.empty((hi - lo, 4, 4), dtype=complex)
    for i in range(lo, hi):
        rng = np.random.default_rng([seed, i])
        t, s = _run_trial(models, chain.nodes, chain.memory_cutoff, final_delay, rng)
        times[i - lo] = t
        states[i - lo] = s
    fidelities = np.real(
        np.einsum("i,nij,j->n", _PHI_PLUS_VEC.conj(), states, _PHI_PLUS_VEC)
    )
    return times, fidelities, states


def simulate_chain_mc(
    chain: RepeaterChain, trials: int, seed: int = 42, workers: int = 1
) -> EndToEndResult:
    """Monte Carlo over full protocol runs.

    Each trial draws per-trial randomness from default_rng([seed, index]),
    so results are byte-identical for any worker count. Every delivered
    state is validated as a density matrix.
    """
    if trials < 1:
        raise StateError("need at least one trial")
    if workers < 1:
        raise StateError("worker count must be positive")
    if workers == 1 or trials < 4 * workers:
        times, fids, states = _run_trial_range(chain, seed, 0, trials)
    else:
        bounds = np.linspace(0, trials, workers + 1, dtype=int)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(
                pool.map(
                    _run_trial_range,
                    [chain] * workers,
                    [seed] * workers,
                    bounds[:-1],
                    bounds[1:],
                )
            )
        times = np.concatenate([p[0] for p in parts])
        fids = np.concatenate([p[1] for p in parts])
        states = np.concatenate([p[2] for p in parts])

    mean_state = DensityMatrix(states.mean(axis=0))
    mean_t = float(times.mean())
    fid = float(fids.mean())
    fid_se = float(fids.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    t_se = float(times.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return EndToEndResult(
        fidelity=fid,
        pair_rate_hz=1.0 / mean_t,
        mean_latency_s=mean_t,
        trials=trials,
        fidelity_stderr=fid_se,
        rate_stderr=t_se / mean_t**2,
        mean_state=mean_state,
        engine="mc",
    )


# Analytic engine: exact Bell-diagonal algebra for the states, exact
# renewal accounting for the times. Ready times are geometric grids
# (exponential limit below GEOM_EXACT_MIN_P); after the first merge the
# frontier time is approximated by a point mass at its mean. Cutoff expiry
# is neglected, so results are exact only when cutoffs are generous.

class _GridDist:
    """Time distribution supported on k * cycle, k >= 1, geometric weights."""

    def __init__(self, p: float, cycle: float):
        self.p = p
        self.q = 1.0 - p
        self.cycle = cycle
        self.mean = cycle / p
        if self.q == 0.0:
            kmax = 1
        else:
            kmax = int(np.ceil(np.log(1e-16) / np.log(self.q))) + 1
        k = np.arange(1, kmax + 1)
        self.times = k * cycle
        self.pmf = p * self.q ** (k - 1)

    def _natoms(self, x):
        return np.clip(np.floor(x / self.cycle * (1 + 1e-12)), 0, None)

    def cdf(self, x):
        return 1.0 - self.q ** self._natoms(x)

    def tail_time_mean(self, x):
        n = self._natoms(x)
        return self.cycle * self.q**n * ((n + 1) * self.p + self.q) / self.p

    def decay_above(self, x, rate):
        n = self._natoms(x)
        first = (n + 1) * self.cycle
        ratio = self.q * np.exp(-rate * self.cycle)
        return self.p * self.q**n * np.exp(-rate * (first - x)) / (1.0 - ratio)


class _PointDist:
    def __init__(self, m: float):
        self.mean = m
        self.times = np.array([m])
        self.pmf = np.array([1.0])

    def cdf(self, x):
        return (self.mean <= np.asarray(x) * (1 + 1e-12)).astype(float)

    def tail_time_mean(self, x):
        return self.mean * (1.0 - self.cdf(x))

    def decay_above(self, x, rate):
        return np.exp(-rate * np.clip(self.mean - x, 0.0, None)) * (1.0 - self.cdf(x))


class _ExpDist:
    """Continuous limit of a geometric grid with the same mean."""

    times = None
    pmf = None

    def __init__(self, lam: float):
        self.lam = lam
        self.mean = 1.0 / lam

    def cdf(self, x):
        return 1.0 - np.exp(-self.lam * x)

    def tail_time_mean(self, x):
        return (x + self.mean) * np.exp(-self.lam * x)

    def decay_above(self, x, rate):
        return np.exp(-self.lam * x) * self.lam / (self.lam + rate)

    def decay_below(self, x, rate):
        lam, x = self.lam, np.asarray(x, dtype=float)
        if abs(rate - lam) < 1e-9 * max(rate, lam, 1.0):
            return lam * x * np.exp(-lam * x)
        return lam / (rate - lam) * (np.exp(-lam * x) - np.exp(-rate * x))


def _span_dist(p: float, cycle: float):
    if p >= GEOM_EXACT_MIN_P:
        return _GridDist(p, cycle)
    return _ExpDist(p / cycle)


def _expected_excess(a, b) -> float:
    """E[(B - A)+] for independent nonnegative A, B."""
    if a.times is not None:
        vals = b.tail_time_mean(a.times) - a.times * (1.0 - b.cdf(a.times))
        return float(np.dot(a.pmf, vals))
    if b.times is not None:
        vals = b.times * a.cdf(b.times) - (a.mean - a.tail_time_mean(b.times))
        return float(np.dot(b.pmf, vals))
    la, lb = a.lam, b.lam
    return la / ((la + lb) * lb)


def _expected_wait_decay(a, b, rate: float) -> float:
    """E[exp(-rate * (B - A)+)]: decay of the side that was ready first."""
    if rate == 0.0:
        return 1.0
    if a.times is not None:
        vals = b.cdf(a.times) + b.decay_above(a.times, rate)
        return float(np.dot(a.pmf, vals))
    if b.times is not None:
        vals = (1.0 - a.cdf(b.times)) + a.decay_below(b.times, rate)
        return float(np.dot(b.pmf, vals))
    la, lb = a.lam, b.lam
    return lb / (la + lb) + la / (la + lb) * lb / (lb + rate)


def _bell_decay(b: np.ndarray, lam: float) -> np.ndarray:
    return lam * b + (1.0 - lam) / 4.0


def _bell_dephase(b: np.ndarray, p: float) -> np.ndarray:
    flipped = b[[2, 3, 0, 1]]
    return (1.0 - p) * b + p * flipped


def _bell_convolve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.zeros(4)
    for g in range(4):
        for h in range(4):
            out[g ^ h] += a[g] * b[h]
    return out


def _expected_swap_bell(
    b_front: np.ndarray,
    b_span: np.ndarray,
    decay_front: float,
    decay_span: float,
    penalty: float,
) -> np.ndarray:
    """Expected Bell weights after a swap whose two sides waited on each
    other. Exactly one wait is nonzero, so for the affine decay factors
    E[f(A) g(B)] = f(EA, 1) + f(1, EB) - f(1, 1) holds exactly."""

    def merged(da: float, db: float) -> np.ndarray:
        left = _bell_dephase(_bell_decay(b_front, da), penalty)
        return _bell_convolve(left, _bell_decay(b_span, db))

    return merged(decay_front, 1.0) + merged(1.0, decay_span) - merged(1.0, 1.0)


def simulate_chain_analytic(chain: RepeaterChain) -> EndToEndResult:
    """Expected-value model of the same protocol the Monte Carlo runs.

    Exact for single spans and for two-span chains with generous cutoffs
    (span stacks produce Bell-diagonal states, for which the swap algebra
    and wait-decay expectations here are closed form); longer chains
    approximate intermediate frontier times by their means.
    """
    models = _span_models(chain)
    n = len(models)

    if n == 1:
        m = models[0]
        state = DensityMatrix(m.ready_state)
        mean_t = m.cycle_s / m.success_prob
        fid = float(
            np.real(_PHI_PLUS_VEC.conj() @ m.ready_state @ _PHI_PLUS_VEC)
        )
        return EndToEndResult(
            fidelity=fid,
            pair_rate_hz=1.0 / mean_t,
            mean_latency_s=mean_t,
            trials=0,
            fidelity_stderr=0.0,
            rate_stderr=0.0,
            mean_state=state,
            engine="analytic",
        )

    final_delay = _final_classical_delay(models)
    bells = [bell_diagonal_weights(DensityMatrix(m.ready_state)) for m in models]

    front_dist = _span_dist(models[0].success_prob, models[0].cycle_s)
    b_front = bells[0]
    mean_t = 0.0
    for i in range(2, n + 1):
        m = models[i - 1]
        node = chain.nodes[i - 2]
        span_dist = _span_dist(m.success_prob, m.cycle_s)
        node_rate = 1.0 / node.memory.coherence_time
        # Frontier right qubit decays while waiting for the span, the span's
        # two stored qubits decay together while waiting for the frontier.
        e_front = _expected_wait_decay(front_dist, span_dist, node_rate)
        e_span = _expected_wait_decay(
            span_dist, front_dist, node_rate + m.right_decay_rate
        )
        e_round = front_dist.mean + _expected_excess(front_dist, span_dist)
        b_front = _expected_swap_bell(
            b_front, bells[i - 1], e_front, e_span, node.bsm_visibility_penalty
        )
        q = node.bsm_success_prob * node.memory.read_efficiency**2
        notify = m.one_way_s if i < n else final_delay
        mean_t = e_round / q + notify
        front_dist = _PointDist(mean_t)
        if i < n:
            # While the swap outcome travels to the new frontier edge, the
            # merged pair's right qubit keeps decaying there. The interval
            # is deterministic, so this factor is exact.
            b_front = _bell_decay(b_front, math.exp(-m.right_decay_rate * notify))

    state = DensityMatrix(
        np.einsum("k,ki,kj->ij", b_front, BELL_KETS, BELL_KETS.conj())
    )
    return EndToEndResult(
        fidelity=float(b_front[0]),
        pair_rate_hz=1.0 / mean_t,
        mean_latency_s=mean_t,
        trials=0,
        fidelity_stderr=0.0,
        rate_stderr=0.0,
        mean_state=state,
        engine="analytic",
    )
