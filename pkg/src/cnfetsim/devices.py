"""Device physics: chirality-derived CNFET parameters and drain-current models.

A carbon-nanotube FET channel is identified by its chirality pair (n, m).
The chirality fixes the tube diameter, the diameter fixes the threshold
voltage, and the threshold voltage is the single knob the gate library
turns to build majority-not / NAND / NOR inverters.

Both transistor models here are three-region square laws (cutoff, triode,
saturation), continuous in (vgs, vds), with drain/source symmetry so pass
transistors conduct in either direction.  They are deliberately simple:
closed forms keep the nonlinear solver testable against hand arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

# Graphene lattice constant in nm (sqrt(3) * carbon-carbon bond length).
DEFAULT_LATTICE_CONSTANT_NM = 0.249

# Empirical numerator of the threshold-voltage law, in V*nm.
VTH_NUMERATOR_V_NM = 0.42

# Zigzag chiralities searched when synthesizing a target threshold.
ZIGZAG_SEARCH_MIN_N = 4
ZIGZAG_SEARCH_MAX_N = 60


class Polarity(Enum):
    N = "n"
    P = "p"


class DeviceError(ValueError):
    """Invalid device parameter or unsatisfiable device request."""


class UnreachableThresholdError(DeviceError):
    """No zigzag chirality reaches the requested threshold voltage."""


@dataclass(frozen=True)
class Chirality:
    """Roll-up vector (n, m) of a nanotube, canonically ordered m <= n."""

    n: int
    m: int = 0

    def __post_init__(self) -> None:
        if self.n < 1:
            raise DeviceError(f"chirality requires n >= 1, got ({self.n},{self.m})")
        if self.m < 0 or self.m > self.n:
            raise DeviceError(
                f"chirality requires 0 <= m <= n, got ({self.n},{self.m})"
            )

    def __str__(self) -> str:
        return f"({self.n},{self.m})"


def is_semiconducting(c: Chirality) -> bool:
    """A tube conducts as a semiconductor iff (n - m) mod 3 != 0."""
    return (c.n - c.m) % 3 != 0


def diameter(c: Chirality, lattice_constant: float = DEFAULT_LATTICE_CONSTANT_NM) -> float:
    """Tube diameter in nm: a * sqrt(n^2 + n*m + m^2) / pi."""
    if lattice_constant <= 0:
        raise DeviceError(f"lattice constant must be positive, got {lattice_constant}")
    n, m = c.n, c.m
    return lattice_constant * math.sqrt(n * n + n * m + m * m) / math.pi


def threshold_voltage(d_nm: float) -> float:
    """Threshold magnitude in volts for a tube of diameter d (nm): 0.42 / d."""
    if not (d_nm > 0) or math.isinf(d_nm):
        raise DeviceError(f"diameter must be positive and finite, got {d_nm}")
    return VTH_NUMERATOR_V_NM / d_nm


def chirality_threshold(c: Chirality, lattice_constant: float = DEFAULT_LATTICE_CONSTANT_NM) -> float:
    """Threshold magnitude for a chirality (composition of the two laws)."""
    return threshold_voltage(diameter(c, lattice_constant))


def chirality_for_threshold(
    target_vth: float,
    tolerance: float,
    lattice_constant: float = DEFAULT_LATTICE_CONSTANT_NM,
) -> Chirality:
    """Semiconducting zigzag (n, 0) whose threshold is nearest target_vth.

    Searches n in [4, 60].  Ties break toward smaller n.  Raises
    UnreachableThresholdError when the best candidate misses by more
    than `tolerance`.
    """
    if target_vth <= 0:
        raise DeviceError(f"target threshold must be positive, got {target_vth}")
    best: Chirality | None = None
    best_err = math.inf
    for n in range(ZIGZAG_SEARCH_MIN_N, ZIGZAG_SEARCH_MAX_N + 1):
        cand = Chirality(n, 0)
        if not is_semiconducting(cand):
            continue
        err = abs(chirality_threshold(cand, lattice_constant) - target_vth)
        if err < best_err:
            best, best_err = cand, err
    assert best is not None
    if best_err > tolerance:
        raise UnreachableThresholdError(
            f"no zigzag (n,0), n in [{ZIGZAG_SEARCH_MIN_N},{ZIGZAG_SEARCH_MAX_N}], "
            f"within {tolerance} V of {target_vth} V (best {best} misses by {best_err:.4g} V)"
        )
    return best


@dataclass(frozen=True)
class CnfetParams:
    """Electrical parameters of one MOSFET-like CNFET.

    transconductance_per_tube is the square-law k of a single tube in
    A/V^2; the device conducts tube_count tubes in parallel.  Its default
    is a calibration constant chosen so a minimum inverter at 0.9 V
    drives femtofarad loads on a picosecond scale; it is recorded in the
    benchmark config and not claimed to be physical.
    """

    chirality: Chirality
    polarity: Polarity
    tube_count: int = 3
    transconductance_per_tube: float = 1e-4
    lattice_constant: float = DEFAULT_LATTICE_CONSTANT_NM

    def __post_init__(self) -> None:
        if self.tube_count < 1:
            raise DeviceError(f"tube_count must be >= 1, got {self.tube_count}")
        if self.transconductance_per_tube <= 0:
            raise DeviceError("transconductance_per_tube must be positive")
        if not is_semiconducting(self.chirality):
            raise DeviceError(
                f"chirality {self.chirality} is metallic; only semiconducting "
                f"tubes may form a transistor channel"
            )
        vth = self.threshold
        if not (vth > 0 and math.isfinite(vth)):
            raise DeviceError(f"derived threshold {vth} is not positive and finite")

    @property
    def threshold(self) -> float:
        return chirality_threshold(self.chirality, self.lattice_constant)

    @property
    def transconductance(self) -> float:
        return self.tube_count * self.transconductance_per_tube


@dataclass(frozen=True)
class MosfetParams:
    """Reference bulk-MOSFET parameters for the non-CNFET adder designs."""

    polarity: Polarity
    threshold: float
    transconductance: float
    channel_length_modulation: float = 0.0

    def __post_init__(self) -> None:
        if self.threshold <= 0:
            raise DeviceError(f"threshold magnitude must be positive, got {self.threshold}")
        if self.transconductance <= 0:
            raise DeviceError("transconductance must be positive")
        if self.channel_length_modulation < 0:
            raise DeviceError("channel_length_modulation must be >= 0")


def _square_law(k: float, vth: float, lam: float, vgs: float, vds: float) -> tuple[float, float, float]:
    """Forward N-type square law, valid for vds >= 0.

    Returns (id, gm, gds).  The (1 + lam*vds) factor applies in triode
    and saturation alike, which keeps the current C1 across the region
    boundary; scaling saturation only would leave a jump of
    lam*vds*i_sat there, and Newton limit-cycles on such a kink.
    """
    vov = vgs - vth
    if vov <= 0.0:
        return 0.0, 0.0, 0.0
    scale = 1.0 + lam * vds
    if vds < vov:
        base = k * (vov * vds - 0.5 * vds * vds)
        return base * scale, k * vds * scale, k * (vov - vds) * scale + base * lam
    i_sat = 0.5 * k * vov * vov
    return i_sat * scale, k * vov * scale, i_sat * lam


def _drain_current_n(k: float, vth: float, lam: float, vgs: float, vds: float) -> tuple[float, float, float]:
    """N-type current with drain/source symmetry for vds < 0."""
    if vds >= 0.0:
        return _square_law(k, vth, lam, vgs, vds)
    # Reversed conduction: roles of drain and source swap.
    i, gm, gds = _square_law(k, vth, lam, vgs - vds, -vds)
    return -i, -gm, gm + gds


def _drain_current(
    polarity: Polarity, k: float, vth: float, lam: float, vgs: float, vds: float
) -> tuple[float, float, float]:
    if polarity is Polarity.N:
        return _drain_current_n(k, vth, lam, vgs, vds)
    # P device mirrors the N math; conductances keep their sign.
    i, gm, gds = _drain_current_n(k, vth, lam, -vgs, -vds)
    return -i, gm, gds


def cnfet_current_and_derivs(p: CnfetParams, vgs: float, vds: float) -> tuple[float, float, float]:
    """(id, dId/dvgs, dId/dvds) for the solver's Newton stamps."""
    return _drain_current(p.polarity, p.transconductance, p.threshold, 0.0, vgs, vds)


def cnfet_drain_current(p: CnfetParams, vgs: float, vds: float) -> float:
    """Drain-to-source current in amperes (negative for a conducting P device)."""
    return cnfet_current_and_derivs(p, vgs, vds)[0]


def mosfet_current_and_derivs(p: MosfetParams, vgs: float, vds: float) -> tuple[float, float, float]:
    """(id, dId/dvgs, dId/dvds) for the solver's Newton stamps."""
    return _drain_current(
        p.polarity, p.transconductance, p.threshold, p.channel_length_modulation, vgs, vds
    )


def mosfet_drain_current(p: MosfetParams, vgs: float, vds: float) -> float:
    """Drain-to-source current in amperes (negative for a conducting P device)."""
    return mosfet_current_and_derivs(p, vgs, vds)[0]
