"""Pre-chirp alphabet design: pairwise-distance objectives and the PSO solver."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .channel import enumerate_placements, path_offset
from .config import SystemConfig, constellation_for
from .detection import phi_tensor
from .mapping import (
    DEFAULT_ENUMERATION_CAP,
    EnumerationCapExceeded,
    PreChirpAlphabet,
    frame_bit_count,
    group_pattern_codebook,
)

_BATCH_ELEMENTS = 1 << 24  # cap on the broadcast tensor size per fitness chunk


@dataclass(frozen=True, eq=False)
class ObjectiveContext:
    """Everything the pairwise objective needs besides the alphabet values.

    Holds the legitimate frame patterns, the Hamming-2 pattern pairs, all
    placements of p_paths over distinct delay-Doppler cells, and the cyclic
    index tables they induce.
    """

    cfg: SystemConfig
    p_paths: int
    placements: tuple
    patterns: np.ndarray  # (K, N) alphabet indices
    pairs: tuple[tuple[int, int], ...]
    col_index: np.ndarray  # (R, P, N) = (row + offset) mod N
    col_sq: np.ndarray  # col_index ** 2
    row_sq: np.ndarray  # (N,) row ** 2


def build_objective_context(cfg: SystemConfig, p_paths: int) -> ObjectiveContext:
    """Enumerate patterns, Hamming-2 pairs, and distinct-cell placements."""
    n, n_c = cfg.n_subcarriers, cfg.group_size
    lam = cfg.alphabet_size
    if lam != n_c:
        raise ValueError("the pattern codebook requires alphabet_size == group size")
    if p_paths < 1:
        raise ValueError("p_paths must be >= 1")
    if p_paths > cfg.placement_capacity:
        raise ValueError(
            f"p_paths={p_paths} exceeds the {cfg.placement_capacity} distinct "
            "delay-Doppler cells"
        )
    placements = enumerate_placements(cfg, p_paths, distinct=True)

    group_patterns = group_pattern_codebook(lam, n_c)
    patterns = np.array(
        [sum(combo, ()) for combo in product(group_patterns, repeat=cfg.n_groups)],
        dtype=np.int8,
    )
    pairs = tuple(
        (j, k)
        for j in range(len(patterns))
        for k in range(j + 1, len(patterns))
        if int(np.count_nonzero(patterns[j] != patterns[k])) == 2
    )

    row = np.arange(n)
    col_index = np.empty((len(placements), p_paths, n), dtype=np.int64)
    for r, geometry in enumerate(placements):
        for p, (d, a) in enumerate(geometry):
            col_index[r, p] = (row + path_offset(cfg, d, a)) % n
    return ObjectiveContext(
        cfg=cfg,
        p_paths=p_paths,
        placements=placements,
        patterns=patterns,
        pairs=pairs,
        col_index=col_index,
        col_sq=col_index.astype(float) ** 2,
        row_sq=row.astype(float) ** 2,
    )


def _values_of(alphabet) -> np.ndarray:
    if isinstance(alphabet, PreChirpAlphabet):
        return alphabet.array
    return np.asarray(alphabet, dtype=float)


def _check_pair(ctx: ObjectiveContext, pair: tuple[int, int]) -> tuple[int, int]:
    """Accept equal patterns (objective 0) or Hamming-2 pairs; reject the rest."""
    j, k = pair
    dist = int(np.count_nonzero(ctx.patterns[j] != ctx.patterns[k]))
    if j != k and dist != 2:
        raise ValueError(f"pattern pair {pair} differs in {dist} positions, not 2")
    return j, k


def _pair_objectives(values: np.ndarray, ctx: ObjectiveContext) -> np.ndarray:
    """Reduced objective of every Hamming-2 pair, batched over alphabets.

    values: (..., lambda). Returns (..., n_pairs).
    """
    values = np.asarray(values, dtype=float)
    squeeze = values.ndim == 1
    vals = np.atleast_2d(values)  # (F, lambda)
    pj = np.array([ctx.patterns[j] for j, _ in ctx.pairs])  # (n_pairs, N)
    pk = np.array([ctx.patterns[k] for _, k in ctx.pairs])
    out = np.empty((vals.shape[0], len(ctx.pairs)), dtype=float)
    r_count, p_count, n = ctx.col_index.shape
    per_pair = vals.shape[0] * r_count * p_count * n
    step = max(1, _BATCH_ELEMENTS // max(per_pair, 1))
    for lo in range(0, len(ctx.pairs), step):
        hi = min(lo + step, len(ctx.pairs))
        diff = vals[:, pk[lo:hi]] - vals[:, pj[lo:hi]]  # (F, q, N)
        d_col = diff[:, :, ctx.col_index]  # (F, q, R, P, N)
        d_row = diff[:, :, None, None, :]
        delta_theta = 2 * np.pi * (d_col * ctx.col_sq - d_row * ctx.row_sq)
        out[:, lo:hi] = np.sum(1.0 - np.cos(delta_theta), axis=(2, 3, 4))
    return out[0] if squeeze else out


def reduced_objective(alphabet, ctx: ObjectiveContext, pair: tuple[int, int]) -> float:
    """Pairwise distance surrogate: sum over placements, paths, and rows of
    1 - cos(theta'_n - theta_n) for one Hamming-2 pattern pair."""
    j, k = _check_pair(ctx, pair)
    vals = _values_of(alphabet)
    diff = vals[ctx.patterns[k]] - vals[ctx.patterns[j]]  # (N,)
    delta_theta = 2 * np.pi * (diff[ctx.col_index] * ctx.col_sq - diff * ctx.row_sq)
    return float(np.sum(1.0 - np.cos(delta_theta)))


def _all_symbol_vectors(cfg: SystemConfig) -> np.ndarray:
    const = constellation_for(cfg)
    m, n = const.order, cfg.n_subcarriers
    count = m**n
    idx = np.arange(count)
    digits = (idx[:, None] // m ** np.arange(n - 1, -1, -1)[None, :]) % m
    return const.points[digits]


def _pattern_phi(
    values: np.ndarray, pattern: np.ndarray, symbols: np.ndarray, geometry, cfg
) -> np.ndarray:
    assign = np.broadcast_to(pattern, symbols.shape)
    return phi_tensor(symbols, assign, geometry, cfg, values)


def brute_objective(
    alphabet,
    ctx: ObjectiveContext,
    pair: tuple[int, int],
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> float:
    """Aggregate squared distance between the two patterns' codeword-channel
    matrices, summed over ALL ordered symbol-vector pairs and placements.

    Oracle-grade: builds the matrices explicitly and accumulates Frobenius
    norms row by row; no cancellation argument is used.
    """
    j, k = _check_pair(ctx, pair)
    cfg = ctx.cfg
    if 2 ** frame_bit_count(cfg) > cap:
        raise EnumerationCapExceeded("codebook too large for the brute objective")
    vals = _values_of(alphabet)
    symbols = _all_symbol_vectors(cfg)
    total = 0.0
    for geometry in ctx.placements:
        phi_k = _pattern_phi(vals, ctx.patterns[k], symbols, geometry, cfg)
        phi_j = _pattern_phi(vals, ctx.patterns[j], symbols, geometry, cfg)
        for idx in range(symbols.shape[0]):
            delta = phi_k[idx][None, :, :] - phi_j
            total += float(np.sum(np.abs(delta) ** 2))
    return total


def brute_objective_equal_symbols(
    alphabet,
    ctx: ObjectiveContext,
    pair: tuple[int, int],
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> float:
    """Same aggregate distance restricted to pairs sharing the symbol vector."""
    j, k = _check_pair(ctx, pair)
    cfg = ctx.cfg
    if 2 ** frame_bit_count(cfg) > cap:
        raise EnumerationCapExceeded("codebook too large for the brute objective")
    vals = _values_of(alphabet)
    symbols = _all_symbol_vectors(cfg)
    total = 0.0
    for geometry in ctx.placements:
        phi_k = _pattern_phi(vals, ctx.patterns[k], symbols, geometry, cfg)
        phi_j = _pattern_phi(vals, ctx.patterns[j], symbols, geometry, cfg)
        total += float(np.sum(np.abs(phi_k - phi_j) ** 2))
    return total


def min_pair_objective(alphabet, ctx: ObjectiveContext) -> float:
    """The max-min design target: minimum reduced objective over Hamming-2 pairs."""
    if not ctx.pairs:
        raise ValueError("context has no Hamming-2 pattern pairs")
    return float(np.min(_pair_objectives(_values_of(alphabet), ctx)))


@dataclass(frozen=True)
class PsoParams:
    """Swarm defaults match the published tuning."""

    n_particles: int = 200
    inertia: float = 0.5
    global_coeff: float = 2.0
    local_coeff: float = 2.0
    velocity_max: float = 0.05
    max_iterations: int = 300

    def __post_init__(self) -> None:
        if (
            self.n_particles < 1
            or self.inertia <= 0
            or self.global_coeff <= 0
            or self.local_coeff <= 0
            or self.velocity_max <= 0
            or self.max_iterations < 0
        ):
            raise ValueError("swarm parameters must be positive")


@dataclass(frozen=True)
class PsoResult:
    alphabet: PreChirpAlphabet
    fitness: float
    history: tuple[tuple[int, float], ...] = field(repr=False)


def uniform_heuristic(alphabet_size: int) -> np.ndarray:
    """Evenly spread starting alphabet: (i + 1/2) / lambda."""
    return (np.arange(alphabet_size) + 0.5) / alphabet_size


def pso_optimize(
    cfg: SystemConfig,
    ctx: ObjectiveContext,
    params: PsoParams,
    rng: np.random.Generator,
) -> PsoResult:
    """Maximize the min-pair objective over alphabets in (0, 1)^lambda.

    Particle 0 starts at the evenly spread heuristic; the rest start uniform
    at random with zero velocities. Positions outside the feasible set get a
    brick-wall fitness of -1 and are never selected while any feasible
    particle exists. Alphabets are canonicalized by sorting before fitness.
    """
    lam = cfg.alphabet_size
    heuristic = uniform_heuristic(lam)
    if lam == 1:
        # no pattern pairs exist; the single value is returned unchanged
        return PsoResult(
            alphabet=PreChirpAlphabet((float(heuristic[0]),)),
            fitness=math.nan,
            history=((0, math.nan),),
        )

    def fitness_of(positions: np.ndarray) -> np.ndarray:
        canon = np.sort(positions, axis=1)
        feasible = np.all((canon > 0.0) & (canon < 1.0), axis=1)
        if lam > 1:
            feasible &= np.all(np.diff(canon, axis=1) > 0.0, axis=1)
        fit = np.full(positions.shape[0], -1.0)
        if np.any(feasible):
            objs = _pair_objectives(canon[feasible], ctx)
            fit[feasible] = objs.min(axis=1)
        return fit

    n_p = params.n_particles
    positions = np.empty((n_p, lam), dtype=float)
    positions[0] = heuristic
    if n_p > 1:
        positions[1:] = rng.uniform(0.0, 1.0, size=(n_p - 1, lam))
    velocities = np.zeros_like(positions)

    fit = fitness_of(positions)
    local_pos = positions.copy()
    local_fit = fit.copy()
    best = int(np.argmax(fit))
    global_pos = positions[best].copy()
    global_fit = float(fit[best])
    history = [(0, global_fit)]

    for iteration in range(1, params.max_iterations + 1):
        r1 = rng.uniform(size=(n_p, 1))
        r2 = rng.uniform(size=(n_p, 1))
        velocities = (
            params.inertia * velocities
            + r1 * params.local_coeff * (local_pos - positions)
            + r2 * params.global_coeff * (global_pos[None, :] - positions)
        )
        np.clip(velocities, -params.velocity_max, params.velocity_max, out=velocities)
        positions = positions + velocities
        fit = fitness_of(positions)
        improved = fit > local_fit
        local_pos[improved] = positions[improved]
        local_fit[improved] = fit[improved]
        best = int(np.argmax(fit))
        if fit[best] > global_fit:
            global_fit = float(fit[best])
            global_pos = positions[best].copy()
        history.append((iteration, global_fit))

    return PsoResult(
        alphabet=PreChirpAlphabet(tuple(np.sort(global_pos))),
        fitness=global_fit,
        history=tuple(history),
    )


def write_convergence_csv(history, fileobj) -> None:
    """Emit the per-iteration best fitness as CSV."""
    fileobj.write("iteration,best_fitness\n")
    for iteration, best in history:
        fileobj.write(f"{iteration},{best:.12g}\n")
