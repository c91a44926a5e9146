"""Self-contained numeric invariant suites behind the `validate` subcommand."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import (
    apply_channel_time,
    build_effective_analytic,
    build_effective_matrix,
    sample_channel,
)
from .config import RandomSource, SystemConfig
from .mapping import PreChirpAlphabet, bits_to_frame, frame_bit_count
from .optimizer import (
    brute_objective,
    brute_objective_equal_symbols,
    build_objective_context,
    reduced_objective,
)
from .simulate import TABLE_ALPHABETS
from .transceiver import add_cpp, build_daft, modulate, remove_cpp


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def orthogonality_suite() -> list[CheckResult]:
    """Cross-pattern subcarrier orthogonality over the published alphabet values."""
    values = sorted({v for vals in TABLE_ALPHABETS.values() for v in vals})
    results = []
    for n in (4, 8, 16):
        c1 = (2 * 1 + 1) / (2 * n)
        worst_off = 0.0
        worst_diag = 0.0
        samples = np.arange(n)
        m = np.arange(n)
        for va in values:
            basis_a = np.exp(
                2j * np.pi * (c1 * samples[None, :] ** 2 + va * m[:, None] ** 2
                              + np.outer(m, samples) / n)
            ) / np.sqrt(n)
            for vb in values:
                basis_b = np.exp(
                    2j * np.pi * (c1 * samples[None, :] ** 2 + vb * m[:, None] ** 2
                                  + np.outer(m, samples) / n)
                ) / np.sqrt(n)
                gram = np.abs(basis_a @ basis_b.conj().T)
                off = gram - np.diag(np.diag(gram))
                worst_off = max(worst_off, float(np.max(off)))
                worst_diag = max(worst_diag, float(np.max(np.abs(np.diag(gram) - 1.0))))
        results.append(
            CheckResult(
                name=f"orthogonality N={n}",
                passed=worst_off < 1e-10 and worst_diag < 1e-10,
                detail=f"max off-diagonal {worst_off:.2e}, max diag deviation {worst_diag:.2e}",
            )
        )
    return results


def channel_suite(seed: int = 7, draws: int = 100) -> list[CheckResult]:
    """Analytic vs operator channel construction, and the sample-level pipeline."""
    cfg = SystemConfig(
        n_subcarriers=8,
        n_groups=2,
        alphabet_size=4,
        constellation_order=2,
        constellation_kind="PSK",
        max_delay=2,
        max_doppler=2,
        cpp_length=2,
    )
    alphabet = PreChirpAlphabet(TABLE_ALPHABETS[4])
    b_total = frame_bit_count(cfg)
    rng = RandomSource(seed).generator()
    worst_matrix = 0.0
    worst_pipeline = 0.0
    for _ in range(draws):
        frame = bits_to_frame(rng.integers(0, 2, b_total), cfg, alphabet)
        ch = sample_channel(cfg, 4, rng)
        analytic = build_effective_analytic(ch, cfg, alphabet, frame.pcpg)
        operator = build_effective_matrix(ch, cfg, alphabet, frame.pcpg)
        worst_matrix = max(
            worst_matrix, float(np.max(np.abs(analytic.matrix - operator.matrix)))
        )
        s = modulate(frame.symbols, cfg, alphabet, frame.pcpg)
        r = remove_cpp(
            apply_channel_time(add_cpp(s, cfg), ch, cfg, None, 0.0), cfg
        )
        y = build_daft(cfg, alphabet, frame.pcpg).daft @ r
        worst_pipeline = max(
            worst_pipeline,
            float(np.max(np.abs(y - operator.matrix @ frame.symbols))),
        )
    return [
        CheckResult(
            name="dual channel construction",
            passed=worst_matrix < 1e-9,
            detail=f"max entry deviation {worst_matrix:.2e} over {draws} draws",
        ),
        CheckResult(
            name="sample-level pipeline",
            passed=worst_pipeline < 1e-9,
            detail=f"max deviation from H_eff x: {worst_pipeline:.2e}",
        ),
    ]


def reduction_suite(seed: int = 11, trials: int = 4) -> list[CheckResult]:
    """Exact relationships between the brute-force and reduced objectives."""
    results = []
    for kind, order in (("PSK", 2), ("QAM", 4)):
        cfg = SystemConfig(
            n_subcarriers=4,
            n_groups=2,
            alphabet_size=2,
            constellation_order=order,
            constellation_kind=kind,
            max_delay=0,
            max_doppler=1,
            cpp_length=0,
        )
        ctx = build_objective_context(cfg, p_paths=2)
        scale = 2.0 ** (cfg.n_groups * cfg.group_size * cfg.bits_per_symbol + 1)
        rng = RandomSource(seed).generator()
        worst_full = 0.0
        worst_diag = 0.0
        for _ in range(trials):
            a1 = np.sort(rng.uniform(0.01, 0.99, 2))
            a2 = np.sort(rng.uniform(0.01, 0.99, 2))
            pair = ctx.pairs[int(rng.integers(len(ctx.pairs)))]
            d_full = brute_objective(a1, ctx, pair) - brute_objective(a2, ctx, pair)
            d_diag = brute_objective_equal_symbols(a1, ctx, pair) - (
                brute_objective_equal_symbols(a2, ctx, pair)
            )
            d_red = reduced_objective(a1, ctx, pair) - reduced_objective(a2, ctx, pair)
            ref = abs(brute_objective(a1, ctx, pair))
            worst_full = max(worst_full, abs(d_full) / ref)
            worst_diag = max(worst_diag, abs(d_diag - scale * d_red) / abs(scale * d_red))
        results.append(
            CheckResult(
                name=f"full-sum cancellation ({kind}{order})",
                passed=worst_full < 1e-10,
                detail=(
                    "all-pair brute differences vanish "
                    f"(worst relative residual {worst_full:.2e})"
                ),
            )
        )
        results.append(
            CheckResult(
                name=f"equal-symbol scaling ({kind}{order})",
                passed=worst_diag < 1e-8,
                detail=(
                    f"matched-symbol brute = 2^(b1*G+1) * reduced "
                    f"(worst relative error {worst_diag:.2e})"
                ),
            )
        )
    return results


SUITES = {
    "orthogonality": orthogonality_suite,
    "channel": channel_suite,
    "reduction": reduction_suite,
}


def run_suites(which: str = "all") -> list[CheckResult]:
    if which == "all":
        out: list[CheckResult] = []
        for fn in SUITES.values():
            out.extend(fn())
        return out
    if which not in SUITES:
        raise ValueError(f"unknown suite {which!r}; choices: all, {', '.join(SUITES)}")
    return SUITES[which]()
