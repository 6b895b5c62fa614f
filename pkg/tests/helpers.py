"""Shared test utilities: random states and mixtures with fixed seeds."""

import numpy as np

from noon_coherence import FixedNState, TwoModeDensityMatrix


def random_fixed_state(total_number: int, rng: np.random.Generator) -> FixedNState:
    amps = rng.normal(size=total_number + 1) + 1j * rng.normal(size=total_number + 1)
    return FixedNState.from_amplitudes(amps)


def embed_pure(state: FixedNState, cutoff: int) -> np.ndarray:
    """|psi><psi| on the (cutoff+1)^2 grid."""
    dim = cutoff + 1
    vec = np.zeros(dim * dim, dtype=complex)
    for m, amp in enumerate(state.amplitudes):
        vec[(state.total_number - m) * dim + m] = amp
    return np.outer(vec, vec.conj())


def random_mixture(
    cutoff: int, rng: np.random.Generator, components: int = 3
) -> TwoModeDensityMatrix:
    """Random mixture of fixed-N pure states with totals <= cutoff."""
    weights = rng.random(components)
    weights /= weights.sum()
    dim = (cutoff + 1) ** 2
    rho = np.zeros((dim, dim), dtype=complex)
    for w in weights:
        n = int(rng.integers(1, cutoff + 1))
        rho += w * embed_pure(random_fixed_state(n, rng), cutoff)
    return TwoModeDensityMatrix(cutoff, rho)


def close(a, b, tol=1e-10):
    """Absolute-or-relative closeness for quantities of any magnitude."""
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))
