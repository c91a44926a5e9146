"""Doubly dispersive channel: sampling, time-domain application, effective matrices."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, combinations_with_replacement

import numpy as np

from .config import SystemConfig
from .mapping import PreChirpAlphabet, PreChirpPatternGroup
from .transceiver import build_daft

_LOC_INT_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    """P propagation paths: complex gain, integer delay, integer Doppler shift."""

    gains: np.ndarray  # (P,) complex
    delays: np.ndarray  # (P,) int, in [0, d_max]
    dopplers: np.ndarray  # (P,) int, in [-a_max, a_max]

    def __post_init__(self) -> None:
        object.__setattr__(self, "gains", np.asarray(self.gains, dtype=complex))
        object.__setattr__(self, "delays", np.asarray(self.delays, dtype=int))
        object.__setattr__(self, "dopplers", np.asarray(self.dopplers, dtype=int))
        if not (len(self.gains) == len(self.delays) == len(self.dopplers)):
            raise ValueError("gains, delays, and dopplers must have equal length")

    @property
    def n_paths(self) -> int:
        return len(self.gains)

    @property
    def geometry(self) -> tuple[tuple[int, int], ...]:
        """The (delay, Doppler) cell of each path."""
        return tuple((int(d), int(a)) for d, a in zip(self.delays, self.dopplers))


def channel_to_text(ch: ChannelRealization) -> str:
    """Serialize as P lines: re(h) im(h) delay doppler."""
    lines = [
        f"{h.real:.17g} {h.imag:.17g} {int(d)} {int(a)}"
        for h, d, a in zip(ch.gains, ch.delays, ch.dopplers)
    ]
    return "\n".join(lines) + "\n"


def channel_from_text(text: str) -> ChannelRealization:
    gains, delays, dopplers = [], [], []
    for line in text.splitlines():
        if not line.strip():
            continue
        re_h, im_h, d, a = line.split()
        gains.append(complex(float(re_h), float(im_h)))
        delays.append(int(d))
        dopplers.append(int(a))
    return ChannelRealization(np.array(gains), np.array(delays), np.array(dopplers))


def sample_channel(
    cfg: SystemConfig, p_paths: int, rng: np.random.Generator
) -> ChannelRealization:
    """Draw one realization: CN(0, 1/P) gains, Jakes-spectrum integer Dopplers,
    delays uniform on {0, ..., d_max}. Draw order is fixed: gains, angles, delays."""
    if p_paths < 1:
        raise ValueError("p_paths must be >= 1")
    scale = np.sqrt(1.0 / (2 * p_paths))
    gains = scale * (rng.standard_normal(p_paths) + 1j * rng.standard_normal(p_paths))
    theta = rng.uniform(-np.pi, np.pi, p_paths)
    dopplers = np.floor(cfg.max_doppler * np.cos(theta)).astype(int)
    delays = rng.integers(0, cfg.max_delay + 1, p_paths)
    return ChannelRealization(gains=gains, delays=delays, dopplers=dopplers)


def apply_channel_time(
    s_prefixed: np.ndarray,
    ch: ChannelRealization,
    cfg: SystemConfig,
    rng: np.random.Generator | None,
    noise_variance: float,
) -> np.ndarray:
    """Sample-level channel: r[n] = sum_p h_p s[n-d_p] e^{-j2pi (a_p/N) n} + w[n].

    The Doppler phase is referenced to the first post-prefix sample (n = 0), and
    samples before the frame start are zero; the prefix absorbs the delay tail.
    """
    s_prefixed = np.asarray(s_prefixed, dtype=complex)
    n, l_cp = cfg.n_subcarriers, cfg.cpp_length
    total = n + l_cp
    if s_prefixed.shape != (total,):
        raise ValueError(f"expected a prefixed frame of length {total}")
    if l_cp < int(np.max(ch.delays)):
        raise ValueError("prefix shorter than the realization's maximum delay")
    time_rel = np.arange(total) - l_cp
    r = np.zeros(total, dtype=complex)
    for h, d, a in zip(ch.gains, ch.delays, ch.dopplers):
        shifted = np.zeros(total, dtype=complex)
        if d == 0:
            shifted[:] = s_prefixed
        else:
            shifted[d:] = s_prefixed[:-d]
        r += h * shifted * np.exp(-2j * np.pi * (a / n) * time_rel)
    if noise_variance > 0.0:
        if rng is None:
            raise ValueError("rng required when noise_variance > 0")
        sigma = np.sqrt(noise_variance / 2.0)
        r = r + sigma * (rng.standard_normal(total) + 1j * rng.standard_normal(total))
    return r


def path_offset(cfg: SystemConfig, delay: int, doppler: int) -> int:
    """Cyclic column offset of one path, (alpha + 2*N*c1*d) mod N.

    Requires 2*N*c1*d to be an integer, which holds for the default post-chirp.
    """
    n = cfg.n_subcarriers
    step = 2 * n * cfg.post_chirp * delay
    if abs(step - round(step)) > _LOC_INT_TOL:
        raise ValueError(
            f"2*N*c1*d = {step} is not an integer; analytic placement undefined"
        )
    return (doppler + round(step)) % n


@dataclass(frozen=True, eq=False)
class EffectiveChannel:
    """Chirp-domain channel: the summed matrix plus unit-gain per-path factors."""

    matrix: np.ndarray  # (N, N) complex
    per_path: tuple[np.ndarray, ...]  # unit-gain H_p, (N, N) each
    offsets: tuple[int, ...] | None  # per-path cyclic offsets, when defined


def cpp_phase_profile(cfg: SystemConfig, delay: int) -> np.ndarray:
    """Prefix correction omega_{p,n}: phase for n < d_p, one elsewhere."""
    n = cfg.n_subcarriers
    idx = np.arange(n)
    omega = np.ones(n, dtype=complex)
    head = idx < delay
    omega[head] = np.exp(
        -2j * np.pi * cfg.post_chirp * (n**2 - 2 * n * (delay - idx[head]))
    )
    return omega


def _time_operator_single(cfg: SystemConfig, delay: int, doppler: int) -> np.ndarray:
    """Unit-gain circular time-domain operator Gamma * Delta * Pi^d for one path."""
    n = cfg.n_subcarriers
    idx = np.arange(n)
    gamma = cpp_phase_profile(cfg, delay)
    delta = np.exp(-2j * np.pi * (doppler / n) * idx)
    op = np.zeros((n, n), dtype=complex)
    op[idx, (idx - delay) % n] = gamma * delta
    return op


def time_domain_operator(ch: ChannelRealization, cfg: SystemConfig) -> np.ndarray:
    """Circular operator H with r = H s for prefix-free frames (noise excluded)."""
    n = cfg.n_subcarriers
    out = np.zeros((n, n), dtype=complex)
    for h, d, a in zip(ch.gains, ch.delays, ch.dopplers):
        out += h * _time_operator_single(cfg, int(d), int(a))
    return out


def _offsets_or_none(cfg: SystemConfig, ch: ChannelRealization) -> tuple[int, ...] | None:
    try:
        return tuple(path_offset(cfg, int(d), int(a)) for d, a in zip(ch.delays, ch.dopplers))
    except ValueError:
        return None


def build_effective_matrix(
    ch: ChannelRealization,
    cfg: SystemConfig,
    alphabet: PreChirpAlphabet,
    pcpg: PreChirpPatternGroup,
) -> EffectiveChannel:
    """Operator-product construction: H_p = A Gamma Delta Pi^d A^H per path."""
    a_mat = build_daft(cfg, alphabet, pcpg).daft
    a_h = a_mat.conj().T
    per_path = []
    for d, alpha in zip(ch.delays, ch.dopplers):
        per_path.append(a_mat @ _time_operator_single(cfg, int(d), int(alpha)) @ a_h)
    matrix = sum(h * hp for h, hp in zip(ch.gains, per_path))
    return EffectiveChannel(
        matrix=matrix, per_path=tuple(per_path), offsets=_offsets_or_none(cfg, ch)
    )


def unit_path_matrix(
    cfg: SystemConfig,
    alphabet_values: np.ndarray,
    assignment: np.ndarray,
    delay: int,
    doppler: int,
) -> np.ndarray:
    """Analytic unit-gain H_p: one unit-modulus entry per row at the path offset."""
    n = cfg.n_subcarriers
    loc = path_offset(cfg, delay, doppler)
    c2 = np.asarray(alphabet_values)[np.asarray(assignment)]
    row = np.arange(n)
    col = (row + loc) % n
    phase = np.exp(
        2j
        * np.pi
        * (
            c2[col] * col**2
            - c2[row] * row**2
            + cfg.post_chirp * delay**2
            - col * delay / n
        )
    )
    h_p = np.zeros((n, n), dtype=complex)
    h_p[row, col] = phase
    return h_p


def build_effective_analytic(
    ch: ChannelRealization,
    cfg: SystemConfig,
    alphabet: PreChirpAlphabet,
    pcpg: PreChirpPatternGroup,
) -> EffectiveChannel:
    """Closed-form sparse construction of the chirp-domain channel."""
    vals = alphabet.array
    assign = np.asarray(pcpg.assignment)
    per_path = []
    offsets = []
    for d, alpha in zip(ch.delays, ch.dopplers):
        per_path.append(unit_path_matrix(cfg, vals, assign, int(d), int(alpha)))
        offsets.append(path_offset(cfg, int(d), int(alpha)))
    matrix = sum(h * hp for h, hp in zip(ch.gains, per_path))
    return EffectiveChannel(
        matrix=matrix, per_path=tuple(per_path), offsets=tuple(offsets)
    )


def delay_doppler_cells(cfg: SystemConfig) -> tuple[tuple[int, int], ...]:
    """All (delay, Doppler) grid cells within the configured bounds."""
    return tuple(
        (d, a)
        for d in range(cfg.max_delay + 1)
        for a in range(-cfg.max_doppler, cfg.max_doppler + 1)
    )


def enumerate_placements(
    cfg: SystemConfig, p_paths: int, distinct: bool = True
) -> tuple[tuple[tuple[int, int], ...], ...]:
    """All placements of p_paths over the delay-Doppler grid.

    With distinct=True these are the C(capacity, P) combinations of distinct
    cells; distinct=False allows repeated cells (needed when P exceeds the
    grid capacity).
    """
    cells = delay_doppler_cells(cfg)
    chooser = combinations if distinct else combinations_with_replacement
    return tuple(chooser(cells, p_paths))
