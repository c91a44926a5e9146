"""Monte-Carlo BER sweeps, published-scenario presets, and CSV emission."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence, TextIO

import numpy as np

from .analysis import abep_curve_jakes
from .channel import ChannelRealization
from .config import RandomSource, SystemConfig, system_config_from_items
from .detection import MLDetector, count_bit_errors
from .mapping import (
    DEFAULT_ENUMERATION_CAP,
    PreChirpAlphabet,
    frame_bit_count,
    load_alphabet,
)

CSV_HEADER = "scheme,snr_db,kind,bits,errors,ber,seed"

_CHUNK_FRAMES = 128

# published candidate alphabets by size
TABLE_ALPHABETS: dict[int, tuple[float, ...]] = {
    2: (0.20, 0.60),
    3: (0.29, 0.62, 0.93),
    4: (0.01, 0.20, 0.41, 0.80),
}


@dataclass(frozen=True)
class Scenario:
    """One reproducible BER experiment."""

    name: str
    cfg: SystemConfig
    alphabet: PreChirpAlphabet
    p_paths: int
    snr_grid_db: tuple[float, ...]
    min_bits: int = 100_000
    min_errors: int = 100
    seed: int = 1
    include_theory: bool = True

    def __post_init__(self) -> None:
        if self.p_paths < 1:
            raise ValueError("p_paths must be >= 1")
        grid = tuple(float(s) for s in self.snr_grid_db)
        object.__setattr__(self, "snr_grid_db", grid)
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("snr_grid_db must be strictly increasing")
        if self.min_errors < 100 and self.min_bits < 100_000:
            raise ValueError(
                "stopping rule too weak: need min_errors >= 100 or min_bits >= 1e5"
            )
        if len(self.alphabet) != self.cfg.alphabet_size:
            raise ValueError("alphabet size does not match the configuration")


@dataclass(frozen=True)
class BerPoint:
    snr_db: float
    bits: int
    errors: int
    ber: float
    kind: str  # simulation | theory

    def __post_init__(self) -> None:
        if self.kind not in ("simulation", "theory"):
            raise ValueError(f"unknown point kind {self.kind!r}")
        if not (0.0 <= self.ber <= 1.0):
            raise ValueError(f"ber {self.ber} outside [0, 1]")
        if self.kind == "simulation" and self.bits > 0:
            if abs(self.ber - self.errors / self.bits) > 1e-15:
                raise ValueError("ber must equal errors/bits")


def noise_variance_from_snr_db(snr_db: float) -> float:
    """SNR is 1/N0; an infinite SNR is the exact noiseless case."""
    if math.isinf(snr_db) and snr_db > 0:
        return 0.0
    return 10.0 ** (-snr_db / 10.0)


def _prefixed(frames: np.ndarray, cfg: SystemConfig) -> np.ndarray:
    n, l_cp = cfg.n_subcarriers, cfg.cpp_length
    if l_cp == 0:
        return frames
    neg = np.arange(-l_cp, 0)
    phase = np.exp(-2j * np.pi * cfg.post_chirp * (n**2 + 2 * n * neg))
    return np.concatenate([frames[:, n + neg] * phase[None, :], frames], axis=1)


def _apply_channel_batch(
    prefixed: np.ndarray,
    gains: np.ndarray,
    delays: np.ndarray,
    dopplers: np.ndarray,
    cfg: SystemConfig,
) -> np.ndarray:
    """Per-frame sample-level channel for a chunk of frames (noise excluded)."""
    frames, total = prefixed.shape
    n = cfg.n_subcarriers
    time_rel = np.arange(total) - cfg.cpp_length
    rows = np.arange(frames)[:, None]
    received = np.zeros_like(prefixed)
    for p in range(gains.shape[1]):
        idx = np.arange(total)[None, :] - delays[:, p][:, None]
        valid = idx >= 0
        shifted = prefixed[rows, np.where(valid, idx, 0)]
        shifted[~valid] = 0.0
        phase = np.exp(-2j * np.pi * (dopplers[:, p][:, None] / n) * time_rel[None, :])
        received += gains[:, p][:, None] * shifted * phase
    return received


def run_ber_sweep(
    scenario: Scenario, cap: int = DEFAULT_ENUMERATION_CAP
) -> list[BerPoint]:
    """Simulate every SNR point until the stopping rule is met.

    Each frame sees a fresh channel realization (block fading). All draws
    come from streams keyed by (seed, point index, chunk index), so the
    output is a pure function of the scenario. An interrupt returns the
    points finished so far plus the partially accumulated one.
    """
    cfg, alphabet = scenario.cfg, scenario.alphabet
    detector = MLDetector(cfg, alphabet, cap)
    b_total = frame_bit_count(cfg)
    weights = (1 << np.arange(b_total - 1, -1, -1)).astype(np.int64)
    source = RandomSource(scenario.seed)
    gain_scale = math.sqrt(1.0 / (2 * scenario.p_paths))
    points: list[BerPoint] = []

    try:
        _sweep_points(
            scenario, detector, b_total, weights, source, gain_scale, points
        )
    except KeyboardInterrupt:
        pass
    return points


def _sweep_points(scenario, detector, b_total, weights, source, gain_scale, points):
    cfg = scenario.cfg
    for point_idx, snr_db in enumerate(scenario.snr_grid_db):
        n0 = noise_variance_from_snr_db(snr_db)
        errors = 0
        bits = 0
        chunk_idx = 0
        try:
            while errors < scenario.min_errors and bits < scenario.min_bits:
                rng = source.generator(point_idx, chunk_idx)
                chunk_idx += 1
                payload = rng.integers(0, 2, size=(_CHUNK_FRAMES, b_total)).astype(np.int8)
                # channel draws in fixed order: gains, angles, delays
                gains = gain_scale * (
                    rng.standard_normal((_CHUNK_FRAMES, scenario.p_paths))
                    + 1j * rng.standard_normal((_CHUNK_FRAMES, scenario.p_paths))
                )
                theta = rng.uniform(-np.pi, np.pi, (_CHUNK_FRAMES, scenario.p_paths))
                dopplers = np.floor(cfg.max_doppler * np.cos(theta)).astype(int)
                delays = rng.integers(0, cfg.max_delay + 1, (_CHUNK_FRAMES, scenario.p_paths))

                codeword_idx = payload.astype(np.int64) @ weights
                tx = detector.candidates[codeword_idx]
                received = _apply_channel_batch(
                    _prefixed(tx, cfg), gains, delays, dopplers, cfg
                )
                if n0 > 0.0:
                    sigma = math.sqrt(n0 / 2.0)
                    received = received + sigma * (
                        rng.standard_normal(received.shape)
                        + 1j * rng.standard_normal(received.shape)
                    )
                body = received[:, cfg.cpp_length :]

                for f in range(_CHUNK_FRAMES):
                    ch = ChannelRealization(
                        gains=gains[f], delays=delays[f], dopplers=dopplers[f]
                    )
                    detected, _ = detector.detect(body[f], ch)
                    errors += count_bit_errors(payload[f], detected)
                    bits += b_total
                    if errors >= scenario.min_errors or bits >= scenario.min_bits:
                        break
        except KeyboardInterrupt:
            if bits > 0:
                points.append(
                    BerPoint(
                        snr_db=snr_db, bits=bits, errors=errors,
                        ber=errors / bits, kind="simulation",
                    )
                )
            raise
        points.append(
            BerPoint(
                snr_db=snr_db,
                bits=bits,
                errors=errors,
                ber=errors / bits,
                kind="simulation",
            )
        )


def theory_points(
    scenario: Scenario, cap: int = DEFAULT_ENUMERATION_CAP
) -> list[BerPoint]:
    """Union-bound curve over the scenario's SNR grid, averaged over the same
    geometry law the simulated channel draws from (coincident cells merged)."""
    finite = [s for s in scenario.snr_grid_db if not math.isinf(s)]
    n0s = [noise_variance_from_snr_db(s) for s in finite]
    bounds = abep_curve_jakes(
        scenario.cfg, scenario.alphabet, scenario.p_paths, n0s, cap
    )
    return [
        BerPoint(snr_db=s, bits=0, errors=0, ber=float(b), kind="theory")
        for s, b in zip(finite, bounds)
    ]


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def write_csv(
    points: Sequence[BerPoint], scheme: str, seed: int, fileobj: TextIO
) -> None:
    """Emit rows in the stable schema scheme,snr_db,kind,bits,errors,ber,seed."""
    fileobj.write(CSV_HEADER + "\n")
    for p in points:
        fileobj.write(
            f"{scheme},{_fmt(p.snr_db)},{p.kind},{p.bits},{p.errors},{_fmt(p.ber)},{seed}\n"
        )


def run_scenario(
    scenario: Scenario, cap: int = DEFAULT_ENUMERATION_CAP
) -> list[BerPoint]:
    """Simulation points plus, when enabled, the matching theory rows."""
    points = run_ber_sweep(scenario, cap)
    if scenario.include_theory:
        points += theory_points(scenario, cap)
    return points


# --- published-scenario presets -------------------------------------------


def _bpsk(n, g, lam, d_max, a_max):
    return SystemConfig(
        n_subcarriers=n,
        n_groups=g,
        alphabet_size=lam,
        constellation_order=2,
        constellation_kind="PSK",
        max_delay=d_max,
        max_doppler=a_max,
        cpp_length=d_max,
    )


_DEFAULT_GRID = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0)


def _preset_fig4() -> Scenario:
    return Scenario(
        name="fig4",
        cfg=_bpsk(6, 2, 3, 1, 1),
        alphabet=PreChirpAlphabet(TABLE_ALPHABETS[3]),
        p_paths=3,
        snr_grid_db=_DEFAULT_GRID,
    )


def _preset_fig7_pim() -> Scenario:
    # theory disabled: the bound's pair enumeration is quadratic in 2^16
    return Scenario(
        name="fig7_pim",
        cfg=_bpsk(8, 2, 4, 1, 2),
        alphabet=PreChirpAlphabet(TABLE_ALPHABETS[4]),
        p_paths=3,
        snr_grid_db=_DEFAULT_GRID,
        include_theory=False,
    )


def _preset_fig8(a_max: int, name: str) -> Scenario:
    return Scenario(
        name=name,
        cfg=_bpsk(4, 2, 2, 0, a_max),
        alphabet=PreChirpAlphabet(TABLE_ALPHABETS[2]),
        p_paths=3,
        snr_grid_db=_DEFAULT_GRID,
    )


def _preset_baseline_afdm() -> Scenario:
    # classic single-pre-chirp waveform at spectral efficiency 2 (QPSK, N=8);
    # with one alphabet value the index machinery collapses (b2 = 0)
    cfg = SystemConfig(
        n_subcarriers=8,
        n_groups=1,
        alphabet_size=1,
        constellation_order=4,
        constellation_kind="PSK",
        max_delay=2,
        max_doppler=2,
        cpp_length=2,
    )
    return Scenario(
        name="baseline_afdm",
        cfg=cfg,
        alphabet=PreChirpAlphabet((0.5,)),
        p_paths=4,
        snr_grid_db=_DEFAULT_GRID,
        include_theory=False,
    )


PRESETS: dict[str, Callable[[], Scenario]] = {
    "fig4": _preset_fig4,
    "fig7_pim": _preset_fig7_pim,
    "fig8_lo": lambda: _preset_fig8(1, "fig8_lo"),
    "fig8_hi": lambda: _preset_fig8(2, "fig8_hi"),
    "baseline_afdm": _preset_baseline_afdm,
}


def make_preset(name: str, seed: int | None = None) -> Scenario:
    try:
        scenario = PRESETS[name]()
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; choices: {sorted(PRESETS)}") from None
    if seed is not None:
        scenario = replace(scenario, seed=seed)
    return scenario


def run_scenario_preset(
    name: str, seed: int | None = None, cap: int = DEFAULT_ENUMERATION_CAP
) -> str:
    """Run a named preset and return its CSV text."""
    import io

    scenario = make_preset(name, seed)
    points = run_scenario(scenario, cap)
    buf = io.StringIO()
    write_csv(points, scenario.name, scenario.seed, buf)
    return buf.getvalue()


# --- scenario assembly from configuration files ----------------------------


def _parse_snr_grid(items: dict[str, str]) -> tuple[float, ...]:
    if "snr_db" in items:
        return tuple(float(tok) for tok in items["snr_db"].replace(",", " ").split())
    start = float(items.get("snr_db_start", 0.0))
    stop = float(items.get("snr_db_stop", 25.0))
    step = float(items.get("snr_db_step", 5.0))
    if step <= 0:
        raise ValueError("snr_db_step must be positive")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return tuple(start + i * step for i in range(count))


def alphabet_from_items(items: dict[str, str], expected_size: int) -> PreChirpAlphabet:
    """[alphabet] section: inline values, an alphabet file, or the published table."""
    if "values" in items:
        vals = tuple(float(tok) for tok in items["values"].replace(",", " ").split())
        return PreChirpAlphabet(vals)
    if "file" in items:
        return PreChirpAlphabet(load_alphabet(items["file"]).values)
    if expected_size in TABLE_ALPHABETS:
        return PreChirpAlphabet(TABLE_ALPHABETS[expected_size])
    raise ValueError(
        "no alphabet given and no published table entry for "
        f"alphabet_size={expected_size}"
    )


def scenario_from_sections(
    sections: dict[str, dict[str, str]], name: str = "custom"
) -> Scenario:
    """Assemble a Scenario from parsed config-file sections."""
    if "system" not in sections:
        raise ValueError("configuration is missing the [system] section")
    cfg = system_config_from_items(sections["system"])
    alphabet = alphabet_from_items(sections.get("alphabet", {}), cfg.alphabet_size)
    chan = sections.get("channel", {})
    p_paths = int(chan.get("paths", 1))
    sim = sections.get("simulation", {})
    return Scenario(
        name=sim.get("name", name),
        cfg=cfg,
        alphabet=alphabet,
        p_paths=p_paths,
        snr_grid_db=_parse_snr_grid(sim),
        min_bits=int(sim.get("min_bits", 100_000)),
        min_errors=int(sim.get("min_errors", 100)),
        seed=int(sim.get("seed", 1)),
        include_theory=sim.get("include_theory", "true").strip().lower()
        in ("1", "true", "yes", "on"),
    )
