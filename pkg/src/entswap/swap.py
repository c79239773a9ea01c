"""Closed-form entanglement swapping of two-qubit states.

Mode convention: the first input state occupies modes (1, 2), the second
modes (3, 4); the Bell-state measurement acts on modes (2, 3) and the
output state lives on modes (1, 4).

Each measurement outcome carries a normalization constant; the
conditional output state is the projected operator divided by it, and
the outcome probability is half the constant. The four constants of any
unit-trace input pair sum to 2, so the probabilities sum to 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qstate import (
    BellLabel,
    DensityMatrix,
    XState,
    bell_vector,
    partial_trace_23,
    tensor,
)

# A normalization at or below this is treated as an impossible outcome:
# the conditional state 0/0 carries no information.
NORMALIZATION_FLOOR = 1e-12

_S2 = 1.0 / np.sqrt(2.0)
# Bell amplitudes on (mode-2, mode-3) polarizations, H=0 / V=1.
_BELL_AMPS = {
    BellLabel.PHI_PLUS: (((0, 0), _S2), ((1, 1), _S2)),
    BellLabel.PHI_MINUS: (((0, 0), _S2), ((1, 1), -_S2)),
    BellLabel.PSI_PLUS: (((0, 1), _S2), ((1, 0), _S2)),
    BellLabel.PSI_MINUS: (((0, 1), _S2), ((1, 0), -_S2)),
}


class ImpossibleOutcome(Exception):
    """The requested measurement outcome has (numerically) zero probability."""

    def __init__(self, outcome: BellLabel, normalization: float):
        self.outcome = outcome
        self.normalization = normalization
        super().__init__(
            f"outcome {outcome} has normalization {normalization:.3e} "
            f"<= {NORMALIZATION_FLOOR}; the conditional state is undefined"
        )


@dataclass(frozen=True)
class SwapResult:
    """Output state on modes (1, 4) together with its outcome probability.

    ``state`` is None only for zero-probability outcomes reported by
    swap_all_outcomes.
    """

    state: "DensityMatrix | None"
    probability: float
    outcome: BellLabel


def _projected_14(a: np.ndarray, b: np.ndarray, outcome: BellLabel) -> np.ndarray:
    """Unnormalized operator on modes (1, 4) after projecting modes (2, 3)
    of a (x) b onto the chosen Bell state.

    Every output entry is the four-term bilinear combination of input
    entries obtained by contracting the two Bell amplitudes; its trace is
    the outcome probability.
    """
    a4 = a.reshape(2, 2, 2, 2)  # [m1, m2, m1', m2']
    b4 = b.reshape(2, 2, 2, 2)  # [m3, m4, m3', m4']
    out = np.zeros((2, 2, 2, 2), dtype=complex)
    amps = _BELL_AMPS[outcome]
    for (p, q), w in amps:
        for (r, s), v in amps:
            slab_a = a4[:, p, :, r]  # over (m1, m1')
            slab_b = b4[q, :, s, :]  # over (m4, m4')
            out += (np.conj(w) * v) * (
                slab_a[:, None, :, None] * slab_b[None, :, None, :]
            )
    return out.reshape(4, 4)


def swap_general(
    rho_a: DensityMatrix, rho_b: DensityMatrix, outcome: BellLabel
) -> SwapResult:
    """Swap two arbitrary two-qubit states for one measurement outcome.

    Raises ImpossibleOutcome when the outcome's normalization is at or
    below NORMALIZATION_FLOOR.
    """
    raw = _projected_14(rho_a.mat, rho_b.mat, outcome)
    probability = float(raw.trace().real)
    normalization = 2.0 * probability
    if normalization <= NORMALIZATION_FLOOR:
        raise ImpossibleOutcome(outcome, normalization)
    return SwapResult(
        state=DensityMatrix(raw / probability),
        probability=probability,
        outcome=outcome,
    )


def swap_x_params(
    chi_a: XState, chi_b: XState, outcome: BellLabel
) -> "tuple[XState, float]":
    """X-state fast path; returns the output X parameters and probability.

    Swapping two X-states closes within the X family, so the whole
    computation reduces to scalar arithmetic on the twelve parameters.
    Raises ImpossibleOutcome on a vanishing normalization.
    """
    c, d = chi_a, chi_b
    sign = 1.0 if outcome in (BellLabel.PSI_PLUS, BellLabel.PHI_PLUS) else -1.0
    if outcome in (BellLabel.PSI_PLUS, BellLabel.PSI_MINUS):
        n = (
            (c.c22 + c.c44) * (d.c11 + d.c22)
            + (c.c11 + c.c33) * (d.c33 + d.c44)
        )
        e11 = c.c22 * d.c11 + c.c11 * d.c33
        e22 = c.c22 * d.c22 + c.c11 * d.c44
        e33 = c.c44 * d.c11 + c.c33 * d.c33
        e44 = c.c44 * d.c22 + c.c33 * d.c44
        e14 = sign * (c.c23 * d.c14 + c.c14 * np.conj(d.c23))
        e23 = sign * (c.c23 * d.c23 + c.c14 * np.conj(d.c14))
    else:
        n = (
            (c.c11 + c.c33) * (d.c11 + d.c22)
            + (c.c22 + c.c44) * (d.c33 + d.c44)
        )
        e11 = c.c11 * d.c11 + c.c22 * d.c33
        e22 = c.c11 * d.c22 + c.c22 * d.c44
        e33 = c.c33 * d.c11 + c.c44 * d.c33
        e44 = c.c33 * d.c22 + c.c44 * d.c44
        e14 = sign * (c.c14 * d.c14 + c.c23 * np.conj(d.c23))
        e23 = sign * (c.c14 * d.c23 + c.c23 * np.conj(d.c14))
    if n <= NORMALIZATION_FLOOR:
        raise ImpossibleOutcome(outcome, n)
    out = XState(
        c11=e11 / n,
        c22=e22 / n,
        c33=e33 / n,
        c44=e44 / n,
        c14=e14 / n,
        c23=e23 / n,
    )
    return out, n / 2.0


def swap_x(chi_a: XState, chi_b: XState, outcome: BellLabel) -> SwapResult:
    """Swap two X-states; identical to swap_general on the embedded matrices."""
    out, probability = swap_x_params(chi_a, chi_b, outcome)
    return SwapResult(
        state=out.to_density_matrix(), probability=probability, outcome=outcome
    )


def swap_all_outcomes(rho_a: DensityMatrix, rho_b: DensityMatrix) -> "list[SwapResult]":
    """Evaluate all four measurement outcomes.

    Zero-probability outcomes are carried with probability 0.0 and no
    state instead of raising, so the four probabilities always sum to 1
    (within roundoff).
    """
    results = []
    for outcome in BellLabel:
        try:
            results.append(swap_general(rho_a, rho_b, outcome))
        except ImpossibleOutcome:
            results.append(SwapResult(state=None, probability=0.0, outcome=outcome))
    return results


def bell_projector_16(outcome: BellLabel) -> np.ndarray:
    """16x16 projector onto a Bell state of modes (2, 3), identity on (1, 4)."""
    bell23 = np.outer(bell_vector(outcome), bell_vector(outcome).conj()).reshape(
        2, 2, 2, 2
    )
    eye2 = np.eye(2)
    # index order (m1, m2, m3, m4, m1', m2', m3', m4')
    proj = np.einsum("ae,bcfg,dh->abcdefgh", eye2, bell23, eye2)
    return proj.reshape(16, 16)


def swap_oracle_16(
    rho_a: DensityMatrix, rho_b: DensityMatrix, outcome: BellLabel
) -> SwapResult:
    """Brute-force reference: project the full 16x16 joint state and trace.

    Builds rho_a (x) rho_b on modes (1, 2, 3, 4), applies the explicit
    Bell projector on modes (2, 3), traces those modes out and
    normalizes. Kept deliberately independent of swap_general's
    entrywise formulas so the two can cross-check each other.
    """
    joint = tensor(rho_a.mat, rho_b.mat)
    proj = bell_projector_16(outcome)
    projected = proj @ joint @ proj
    probability = float(projected.trace().real)
    if 2.0 * probability <= NORMALIZATION_FLOOR:
        raise ImpossibleOutcome(outcome, 2.0 * probability)
    reduced = partial_trace_23(projected)
    return SwapResult(
        state=DensityMatrix(reduced / probability),
        probability=probability,
        outcome=outcome,
    )
