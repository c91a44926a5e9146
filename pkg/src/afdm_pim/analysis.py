"""Pairwise error probabilities, union bounds, diversity order, spectral efficiency."""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations_with_replacement
from typing import Iterator, Sequence

import numpy as np

from .config import SystemConfig
from .detection import Geometry, path_image_tensor
from .mapping import (
    DEFAULT_ENUMERATION_CAP,
    PreChirpAlphabet,
    codeword_table,
    frame_bit_count,
)

RANK_TOLERANCE = 1e-9

_PAIR_CHUNK = 8192


@dataclass(frozen=True, eq=False)
class PairwiseDifference:
    """Difference of two codeword-channel matrices and its Gram spectrum."""

    delta_phi: np.ndarray  # (N, P)
    psi: np.ndarray  # (P, P) Hermitian PSD
    eigenvalues: np.ndarray  # (P,) non-negative, ascending
    rank: int


def pairwise_difference(phi_a: np.ndarray, phi_b: np.ndarray) -> PairwiseDifference:
    """Spectrum of (phi_b - phi_a); rank counts eigenvalues above the relative tolerance."""
    delta = np.asarray(phi_b, dtype=complex) - np.asarray(phi_a, dtype=complex)
    psi = delta.conj().T @ delta
    eig = np.clip(np.linalg.eigvalsh(psi), 0.0, None)
    top = eig[-1] if eig.size else 0.0
    rank = int(np.count_nonzero(eig > RANK_TOLERANCE * top)) if top > 0 else 0
    return PairwiseDifference(delta_phi=delta, psi=psi, eigenvalues=eig, rank=rank)


def _upep_from_eigs(eigs: np.ndarray, p_paths: int, n0: float) -> float:
    if n0 == 0.0:
        return 1.0 / 3.0 if eigs.size == 0 else 0.0
    t1 = np.prod(1.0 / (1.0 + eigs / (4 * p_paths * n0)))
    t2 = np.prod(1.0 / (1.0 + eigs / (3 * p_paths * n0)))
    return float(t1 / 12.0 + t2 / 4.0)


def upep(pair: PairwiseDifference, p_paths: int, n0: float) -> float:
    """Unconditional pairwise error probability from the Gram eigenvalues.

    Uses the two-exponential tail approximation; identical codewords (rank 0)
    give the zero-distance value 1/3.
    """
    top = pair.eigenvalues[-1] if pair.eigenvalues.size else 0.0
    kept = pair.eigenvalues[pair.eigenvalues > RANK_TOLERANCE * top] if top > 0 else np.array([])
    return _upep_from_eigs(kept, p_paths, n0)


@dataclass(frozen=True)
class AbepResult:
    """Union-bound average bit error probability, clipped to [0, 1]."""

    bound: float
    n0: float
    geometries: tuple


def _pair_chunks(count: int, chunk: int) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """Unordered index pairs (i < j) over range(count), yielded in chunks."""
    buf_i: list[np.ndarray] = []
    buf_j: list[np.ndarray] = []
    size = 0
    for i in range(count - 1):
        js = np.arange(i + 1, count)
        buf_i.append(np.full(js.size, i))
        buf_j.append(js)
        size += js.size
        if size >= chunk:
            yield np.concatenate(buf_i), np.concatenate(buf_j)
            buf_i, buf_j, size = [], [], 0
    if size:
        yield np.concatenate(buf_i), np.concatenate(buf_j)


def _masked_eigs(psi: np.ndarray) -> np.ndarray:
    """Batched Gram eigenvalues with sub-tolerance values zeroed."""
    eigs = np.clip(np.linalg.eigvalsh(psi), 0.0, None)
    top = eigs[..., -1:]
    return np.where(eigs > RANK_TOLERANCE * top, eigs, 0.0)


def _bound_accumulator(
    phi: np.ndarray, payload: np.ndarray, col_var: np.ndarray, n0: np.ndarray
) -> np.ndarray:
    """Sum over ordered codeword pairs of UPEP * bit errors, for several n0.

    col_var holds the gain variance of each path column; it is absorbed into
    the Gram spectrum so the error-probability products need no extra scale.
    """
    count = phi.shape[0]
    scale = np.sqrt(col_var)
    acc = np.zeros(n0.shape, dtype=float)
    for idx_i, idx_j in _pair_chunks(count, _PAIR_CHUNK):
        diff = (phi[idx_j] - phi[idx_i]) * scale[None, None, :]
        psi = np.einsum("bnp,bnq->bpq", diff.conj(), diff)
        eigs = _masked_eigs(psi)
        tau = np.count_nonzero(payload[idx_i] != payload[idx_j], axis=1)
        ratio = eigs[None, :, :] / n0[:, None, None]
        t1 = np.prod(1.0 / (1.0 + ratio / 4.0), axis=2)
        t2 = np.prod(1.0 / (1.0 + ratio / 3.0), axis=2)
        acc += 2.0 * (t1 / 12.0 + t2 / 4.0) @ tau  # both orderings of each pair
    return acc


def abep_curve(
    cfg: SystemConfig,
    alphabet: PreChirpAlphabet,
    geometries: Sequence[Geometry],
    n0_values: Sequence[float],
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> np.ndarray:
    """Union-bound ABEP at several noise levels, averaged uniformly over the
    supplied path placements; per-path gain variance is 1/P."""
    if not geometries:
        raise ValueError("at least one path placement is required")
    n0 = np.asarray(n0_values, dtype=float)
    if np.any(n0 <= 0):
        raise ValueError("noise variances must be positive")
    table = codeword_table(cfg, alphabet, cap)
    b_total = frame_bit_count(cfg)
    p_paths = len(geometries[0])
    acc = np.zeros(n0.shape, dtype=float)
    col_var = np.full(p_paths, 1.0 / p_paths)
    for geometry in geometries:
        if len(geometry) != p_paths:
            raise ValueError("all placements must use the same number of paths")
        phi = path_image_tensor(cfg, alphabet, geometry, cap)
        acc += _bound_accumulator(phi, table.payload_bits, col_var, n0)
    bound = acc / (b_total * 2.0**b_total * len(geometries))
    return np.clip(bound, 0.0, 1.0)


def abep_upper_bound(
    cfg: SystemConfig,
    alphabet: PreChirpAlphabet,
    geometries: Sequence[Geometry],
    n0: float,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> AbepResult:
    """Union-bound ABEP at one noise level."""
    bound = float(abep_curve(cfg, alphabet, geometries, [n0], cap)[0])
    return AbepResult(bound=bound, n0=n0, geometries=tuple(tuple(g) for g in geometries))


# --- bound matched to the sampled channel law ------------------------------


def jakes_doppler_pmf(max_doppler: int) -> dict[int, float]:
    """Distribution of floor(a_max * cos(theta)) for theta uniform on [-pi, pi]."""
    if max_doppler == 0:
        return {0: 1.0}
    pmf: dict[int, float] = {}
    for k in range(-max_doppler, max_doppler + 1):
        lo = np.clip(k / max_doppler, -1.0, 1.0)
        hi = np.clip((k + 1) / max_doppler, -1.0, 1.0)
        p = (math.acos(lo) - math.acos(hi)) / math.pi
        if p > 0.0:
            pmf[k] = p
    return pmf


def jakes_cell_pmf(cfg: SystemConfig) -> dict[tuple[int, int], float]:
    """Per-path probability of each (delay, Doppler) cell under the channel law."""
    doppler = jakes_doppler_pmf(cfg.max_doppler)
    p_delay = 1.0 / (cfg.max_delay + 1)
    return {
        (d, a): p_delay * p
        for d in range(cfg.max_delay + 1)
        for a, p in doppler.items()
    }


def jakes_geometry_mixture(
    cfg: SystemConfig, p_paths: int
) -> list[tuple[tuple[tuple[int, int], ...], tuple[int, ...], float]]:
    """All reachable path multisets with their probabilities.

    Returns (support cells, multiplicities, weight) triples; paths falling in
    the same cell are merged, so the support lists distinct cells only.
    """
    pmf = jakes_cell_pmf(cfg)
    cells = sorted(pmf)
    out = []
    for combo in combinations_with_replacement(cells, p_paths):
        support = tuple(dict.fromkeys(combo))
        mult = tuple(combo.count(c) for c in support)
        weight = math.factorial(p_paths)
        for c, m in zip(support, mult):
            weight *= pmf[c] ** m / math.factorial(m)
        out.append((support, mult, weight))
    return out


def abep_curve_jakes(
    cfg: SystemConfig,
    alphabet: PreChirpAlphabet,
    p_paths: int,
    n0_values: Sequence[float],
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> np.ndarray:
    """Union-bound ABEP averaged over the sampled channel's own geometry law.

    Coincident paths merge into one column whose gain variance is the cell
    multiplicity over P, exactly as their independent gains add in the
    simulated channel. This is the curve comparable to Monte-Carlo BER.
    """
    n0 = np.asarray(n0_values, dtype=float)
    if np.any(n0 <= 0):
        raise ValueError("noise variances must be positive")
    table = codeword_table(cfg, alphabet, cap)
    b_total = frame_bit_count(cfg)
    acc = np.zeros(n0.shape, dtype=float)
    for support, mult, weight in jakes_geometry_mixture(cfg, p_paths):
        phi = path_image_tensor(cfg, alphabet, support, cap)
        col_var = np.asarray(mult, dtype=float) / p_paths
        acc += weight * _bound_accumulator(phi, table.payload_bits, col_var, n0)
    bound = acc / (b_total * 2.0**b_total)
    return np.clip(bound, 0.0, 1.0)


def diversity_order(
    cfg: SystemConfig,
    alphabet: PreChirpAlphabet,
    geometries: Sequence[Geometry],
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> int:
    """Minimum rank of the codeword-image difference over all pairs and placements.

    Paths sharing a (delay, Doppler) cell contribute identical unit-gain
    columns, so each placement is reduced to its distinct cells first; the
    rank is unchanged and the scan touches each distinct support once.
    """
    table = codeword_table(cfg, alphabet, cap)
    count = table.symbols.shape[0]
    best: int | None = None
    seen: set[tuple[tuple[int, int], ...]] = set()
    for geometry in geometries:
        support = tuple(dict.fromkeys((int(d), int(a)) for d, a in geometry))
        if support in seen:
            continue
        seen.add(support)
        phi = path_image_tensor(cfg, alphabet, support, cap)
        for idx_i, idx_j in _pair_chunks(count, _PAIR_CHUNK):
            diff = phi[idx_j] - phi[idx_i]
            psi = np.einsum("bnp,bnq->bpq", diff.conj(), diff)
            eigs = _masked_eigs(psi)
            ranks = np.count_nonzero(eigs > 0.0, axis=1)
            low = int(ranks.min())
            if best is None or low < best:
                best = low
                if best == 0:
                    return 0
    if best is None:
        raise ValueError("no placements supplied")
    return best


@dataclass(frozen=True)
class FullDiversityReport:
    """Checkable part of the full-diversity conditions, plus the assumed part."""

    p_paths: int
    placement_capacity: int
    paths_within_capacity: bool  # P <= (d_max+1)(2*a_max+1)
    capacity_within_frame: bool  # (d_max+1)(2*a_max+1) <= N
    condition1: bool
    condition2_note: str


def check_full_diversity_conditions(
    cfg: SystemConfig, alphabet: PreChirpAlphabet, p_paths: int
) -> FullDiversityReport:
    """Evaluate the path-count/capacity condition; irrationality is only assumed."""
    cap = cfg.placement_capacity
    paths_ok = p_paths <= cap
    frame_ok = cap <= cfg.n_subcarriers
    return FullDiversityReport(
        p_paths=p_paths,
        placement_capacity=cap,
        paths_within_capacity=paths_ok,
        capacity_within_frame=frame_ok,
        condition1=paths_ok and frame_ok,
        condition2_note=(
            "assumed: floating point cannot certify that the pre-chirp values "
            "are irrational"
        ),
    )


def spectral_efficiency(
    scheme: str, m: int, n_c: int | None = None, a: int | None = None
) -> float:
    """Bits/s/Hz of the plain chirp waveform, its subcarrier-activation variant,
    or the pre-chirp index variant.

    scheme: 'afdm' needs m; 'afdm_im' needs (n_c, a, m); 'afdm_pim' needs (n_c, m).
    """
    key = scheme.strip().lower().replace("-", "_")
    bits = math.log2(m)
    if key == "afdm":
        return bits
    if key == "afdm_im":
        if n_c is None or a is None:
            raise ValueError("afdm_im needs n_c and a")
        return (math.floor(math.log2(math.comb(n_c, a))) + a * bits) / n_c
    if key == "afdm_pim":
        if n_c is None:
            raise ValueError("afdm_pim needs n_c")
        return math.floor(math.log2(math.factorial(n_c))) / n_c + bits
    raise ValueError(f"unknown scheme {scheme!r}")
