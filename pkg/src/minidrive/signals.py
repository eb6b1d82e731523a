"""Lighting and indicator state machine.

Headlights and turn/hazard indicators follow user requests in both driving
modes; brake and reverse lamps are recomputed automatically from the drive
state every update.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum

from .dynamics import Gear

BLINK_HZ = 1.0  # indicator blink frequency, 50% duty


class HeadlightMode(IntEnum):
    OFF = 0
    LOW_BEAM = 1
    HIGH_BEAM = 2


class IndicatorMode(IntEnum):
    OFF = 0
    LEFT = 1
    RIGHT = 2
    HAZARD = 3


class TaillightLevel(IntEnum):
    OFF = 0
    PARTIAL = 1
    BRIGHT = 2


@dataclass(frozen=True)
class LightRequest:
    """Absolute requested lamp modes (the manually controllable ones)."""

    headlights: HeadlightMode = HeadlightMode.OFF
    indicators: IndicatorMode = IndicatorMode.OFF


@dataclass(frozen=True)
class SignalState:
    headlights: HeadlightMode = HeadlightMode.OFF
    indicators: IndicatorMode = IndicatorMode.OFF
    taillight_level: TaillightLevel = TaillightLevel.OFF
    reverse_on: bool = False
    blink_phase_on: bool = True  # floor(0) is even, so phase starts "on"


def blink_phase(sim_time: float, blink_hz: float = BLINK_HZ) -> bool:
    """True during the lit half of the blink cycle."""
    return math.floor(sim_time * 2.0 * blink_hz) % 2 == 0


def update_signals(
    prev: SignalState,
    requests: LightRequest | None,
    gear: Gear,
    braking: bool,
    sim_time: float,
    blink_hz: float = BLINK_HZ,
) -> SignalState:
    """Recompute the full lamp state; pure function of its arguments.

    requests=None keeps the previous manually requested modes. Brake and
    reverse lamps are always automatic.
    """
    headlights = prev.headlights if requests is None else requests.headlights
    indicators = prev.indicators if requests is None else requests.indicators
    if braking:
        taillight = TaillightLevel.BRIGHT
    elif headlights is not HeadlightMode.OFF:
        taillight = TaillightLevel.PARTIAL
    else:
        taillight = TaillightLevel.OFF
    return SignalState(
        headlights=headlights,
        indicators=indicators,
        taillight_level=taillight,
        reverse_on=gear is Gear.REVERSE,
        blink_phase_on=blink_phase(sim_time, blink_hz),
    )
