"""Chirp-domain transform matrices, modulation, and the chirp-periodic prefix."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import SystemConfig
from .mapping import PreChirpAlphabet, PreChirpPatternGroup


@dataclass(frozen=True, eq=False)
class DaftMatrices:
    """Forward transform A = Lambda_c2 @ F @ Lambda_c1 and its factors."""

    pre_chirp_diag: np.ndarray
    post_chirp_diag: np.ndarray
    dft: np.ndarray
    daft: np.ndarray


def build_daft(
    cfg: SystemConfig, alphabet: PreChirpAlphabet, pcpg: PreChirpPatternGroup
) -> DaftMatrices:
    """Materialize the transform matrices for one frame's pre-chirp pattern."""
    n = cfg.n_subcarriers
    if len(pcpg.assignment) != n:
        raise ValueError("pattern length does not match n_subcarriers")
    idx = np.arange(n)
    c2 = pcpg.values(alphabet)
    pre = np.diag(np.exp(-2j * np.pi * c2 * idx**2))
    post = np.diag(np.exp(-2j * np.pi * cfg.post_chirp * idx**2))
    dft = np.exp(-2j * np.pi * np.outer(idx, idx) / n) / np.sqrt(n)
    daft = pre @ dft @ post
    return DaftMatrices(pre_chirp_diag=pre, post_chirp_diag=post, dft=dft, daft=daft)


def modulate(
    x: np.ndarray,
    cfg: SystemConfig,
    alphabet: PreChirpAlphabet,
    pcpg: PreChirpPatternGroup,
) -> np.ndarray:
    """Time-domain samples s = A^H x (no prefix)."""
    x = np.asarray(x, dtype=complex)
    if x.shape != (cfg.n_subcarriers,):
        raise ValueError(f"x must have length {cfg.n_subcarriers}")
    a = build_daft(cfg, alphabet, pcpg).daft
    return a.conj().T @ x


def demodulate(
    r: np.ndarray,
    cfg: SystemConfig,
    alphabet: PreChirpAlphabet,
    pcpg_hypothesis: PreChirpPatternGroup,
) -> np.ndarray:
    """Chirp-domain samples y = A(pattern hypothesis) r."""
    r = np.asarray(r, dtype=complex)
    if r.shape != (cfg.n_subcarriers,):
        raise ValueError(f"r must have length {cfg.n_subcarriers}")
    a = build_daft(cfg, alphabet, pcpg_hypothesis).daft
    return a @ r


def add_cpp(s: np.ndarray, cfg: SystemConfig) -> np.ndarray:
    """Prepend the chirp-periodic prefix: s[n] = s[N+n] e^{-j2pi c1 (N^2+2Nn)}, n<0."""
    s = np.asarray(s, dtype=complex)
    n = cfg.n_subcarriers
    if s.shape != (n,):
        raise ValueError(f"expected a prefix-free frame of length {n}")
    l_cp = cfg.cpp_length
    if l_cp == 0:
        return s.copy()
    neg = np.arange(-l_cp, 0)
    prefix = s[n + neg] * np.exp(-2j * np.pi * cfg.post_chirp * (n**2 + 2 * n * neg))
    return np.concatenate([prefix, s])


def remove_cpp(r: np.ndarray, cfg: SystemConfig) -> np.ndarray:
    """Drop the first cpp_length samples."""
    r = np.asarray(r, dtype=complex)
    n, l_cp = cfg.n_subcarriers, cfg.cpp_length
    if r.shape != (n + l_cp,):
        raise ValueError(f"expected a prefixed frame of length {n + l_cp}")
    return r[l_cp:].copy()


def subcarrier_inner_product(
    m1: int, m2: int, c2_a: float, c2_b: float, c1: float, n: int
) -> complex:
    """Inner product of two chirp subcarriers carrying pre-chirps c2_a and c2_b.

    Off-diagonal pairs vanish; equal indices give a unit-modulus value whose
    phase carries the pre-chirp difference.
    """
    if not (0 <= m1 < n and 0 <= m2 < n):
        raise ValueError("subcarrier indices must lie in [0, N)")
    samples = np.arange(n)
    phi_a = np.exp(2j * np.pi * (c1 * samples**2 + c2_a * m1**2 + m1 * samples / n)) / np.sqrt(n)
    phi_b = np.exp(2j * np.pi * (c1 * samples**2 + c2_b * m2**2 + m2 * samples / n)) / np.sqrt(n)
    return complex(np.sum(phi_a * np.conj(phi_b)))
