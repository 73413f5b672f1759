"""Intent translation and closed-loop assurance.

An intent states what the user wants moved ("this payload, by this
deadline, at this reliability"); the translator turns it into controller
parameters through a small deterministic rule table keyed on tightness,
the ratio of packets to expected usable slots. The assurance check reads
a finished trace back against the intent and reports drift.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .core import ConfigError, ControlParams
from .environment import ScenarioConfig, expected_price

PRIORITIES = ("cost_saver", "balanced", "delay_critical")

# translator rule-table constants; tuning choices, so every emitted report
# carries them in its header
SLOT_DURATION_S = 1.0
PACKET_SIZE_MB = 10.0
V_BASE = 20.0
TIGHTNESS_BANDS = (0.5, 0.8)
EPS_BY_BAND = (0.5, 1.0, 2.0)
PRIORITY_MULTIPLIER = 2.0


@dataclass(frozen=True)
class IntentSpec:
    """A service request: move payload_mb within deadline_s at reliability_pct."""

    payload_mb: float
    deadline_s: float
    reliability_pct: float
    priority: str = "balanced"

    def __post_init__(self) -> None:
        if self.payload_mb <= 0:
            raise ConfigError(f"payload_mb must be positive, got {self.payload_mb!r}")
        if self.deadline_s <= 0:
            raise ConfigError(f"deadline_s must be positive, got {self.deadline_s!r}")
        if not 0 < self.reliability_pct <= 100:
            raise ConfigError(
                f"reliability_pct must be in (0, 100], got {self.reliability_pct!r}"
            )
        if self.priority not in PRIORITIES:
            raise ConfigError(
                f"priority must be one of {', '.join(PRIORITIES)}; got {self.priority!r}"
            )


@dataclass(frozen=True)
class TranslationResult:
    """Controller parameters derived from an intent, plus the sizing facts."""

    params: ControlParams
    n_packets: int
    deadline_slots: int
    tightness: float
    feasible: bool


@dataclass(frozen=True)
class AssuranceReport:
    """Verdict of checking a trace against an intent."""

    delivered_packets: int
    required_packets: int
    deadline_met: bool
    reliability_met: bool
    verdict: str
    drift_warnings: tuple[tuple[int, str], ...]


def translate_intent(
    intent: IntentSpec,
    scenario: ScenarioConfig,
    slot_duration_s: float = SLOT_DURATION_S,
    packet_size_mb: float = PACKET_SIZE_MB,
) -> TranslationResult:
    """Map an intent onto (v, eps_d) through the tightness rule table.

    Tightness is n_packets over the expected count of slots where both
    resources are available within the deadline. Loose intents get a low
    deferral weight and a high cost weight; tight ones the reverse.
    Tightness above 1 yields feasible=False, with parameters still
    emitted so the caller can decide what to do.
    """
    if slot_duration_s <= 0:
        raise ConfigError(f"slot_duration_s must be positive, got {slot_duration_s!r}")
    if packet_size_mb <= 0:
        raise ConfigError(f"packet_size_mb must be positive, got {packet_size_mb!r}")

    n_packets = math.ceil(intent.payload_mb / packet_size_mb)
    deadline_slots = math.floor(intent.deadline_s / slot_duration_s)
    if deadline_slots < 1:
        raise ConfigError(
            f"deadline_s={intent.deadline_s} is shorter than one slot "
            f"({slot_duration_s} s); nothing can be scheduled"
        )

    joint_availability = scenario.avail_prob_ris * scenario.avail_prob_spectrum
    if joint_availability > 0:
        tightness = n_packets / (joint_availability * deadline_slots)
    else:
        tightness = math.inf

    if tightness < TIGHTNESS_BANDS[0]:
        eps_d = EPS_BY_BAND[0]
    elif tightness < TIGHTNESS_BANDS[1]:
        eps_d = EPS_BY_BAND[1]
    else:
        eps_d = EPS_BY_BAND[2]
    v = max(1.0, V_BASE * (1.0 - tightness)) if math.isfinite(tightness) else 1.0

    if intent.priority == "cost_saver":
        v *= PRIORITY_MULTIPLIER
    elif intent.priority == "delay_critical":
        eps_d *= PRIORITY_MULTIPLIER

    mean_price = expected_price(scenario.price_low, scenario.price_high)
    params = ControlParams(
        v=v,
        eps_d=eps_d,
        expected_price_ris=mean_price,
        expected_price_spectrum=mean_price,
    )
    return TranslationResult(
        params=params,
        n_packets=n_packets,
        deadline_slots=deadline_slots,
        tightness=tightness,
        feasible=tightness <= 1,
    )


def derive_scenario(
    translation: TranslationResult,
    base: ScenarioConfig,
    streaming: bool = False,
) -> ScenarioConfig:
    """Scenario for running the translated intent.

    Bulk (default): the payload already exists, so it becomes the initial
    backlog, no further arrivals, horizon = deadline, and the virtual queue
    freezes once the backlog clears so a finished upload stops leasing.
    Streaming: arrivals spread over the window as Bernoulli draws instead.
    """
    if streaming:
        return replace(
            base,
            initial_backlog=0,
            arrival_prob=translation.n_packets / translation.deadline_slots,
            horizon_slots=translation.deadline_slots,
        )
    return replace(
        base,
        initial_backlog=translation.n_packets,
        arrival_prob=0.0,
        horizon_slots=translation.deadline_slots,
        freeze_z_when_empty=True,
    )


def required_packet_count(reliability_pct: float, n_packets: int) -> int:
    """Packets needed to meet the reliability fraction, ceiling semantics.

    Multiplies before dividing: 99% of 100 must be exactly 99, and
    ceil(0.99 * 100) is not safe in floating point.
    """
    return math.ceil(reliability_pct * n_packets / 100.0)


def assure(trace, intent: IntentSpec, translation: TranslationResult) -> AssuranceReport:
    """Check a finished trace against the intent it was meant to serve.

    Delivered packets are actual departures (a lease against an empty
    queue moves nothing) within the deadline window. Checkpoints every
    tenth of the deadline linearly extrapolate the service rate and warn
    when the projection falls short.
    """
    horizon = len(trace)
    if horizon == 0:
        raise ConfigError("cannot assure an empty trace")
    deadline = translation.deadline_slots

    q_before = trace.column("q_before")
    q_after = trace.column("q_after")
    arrival = trace.column("arrival")

    initial_backlog = float(q_before[0]) - float(arrival[0])
    if initial_backlog > 0 and initial_backlog != translation.n_packets:
        raise ConfigError(
            f"translation expects {translation.n_packets} packets but the trace "
            f"starts with a backlog of {initial_backlog:g}"
        )

    window = min(horizon, deadline)
    served = q_before[:window] - q_after[:window]  # departures, not leases
    cumulative = np.cumsum(served)
    delivered = int(cumulative[-1])
    required = required_packet_count(intent.reliability_pct, translation.n_packets)
    reliability_met = delivered >= required
    deadline_met = reliability_met if horizon >= deadline else False

    warnings: list[tuple[int, str]] = []
    interval = math.ceil(deadline / 10)
    checkpoint = interval
    while checkpoint <= window:
        seen = float(cumulative[checkpoint - 1])
        projected = seen * (deadline / checkpoint)
        if projected < required:
            warnings.append(
                (
                    checkpoint,
                    f"slot {checkpoint}: {seen:g} delivered, projecting "
                    f"{projected:.1f} by slot {deadline}, below required {required}",
                )
            )
        checkpoint += interval

    return AssuranceReport(
        delivered_packets=delivered,
        required_packets=required,
        deadline_met=deadline_met,
        reliability_met=reliability_met,
        verdict="pass" if reliability_met else "fail",
        drift_warnings=tuple(warnings),
    )


def intent_from_dict(data: dict) -> IntentSpec:
    """Build an IntentSpec from parsed JSON, rejecting unknown fields."""
    if not isinstance(data, dict):
        raise ConfigError(f"intent document must be a JSON object, got {type(data).__name__}")
    allowed = {"payload_mb", "deadline_s", "reliability_pct", "priority"}
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise ConfigError(f"unknown intent fields: {', '.join(unknown)}")
    missing = sorted({"payload_mb", "deadline_s", "reliability_pct"} - set(data))
    if missing:
        raise ConfigError(f"intent is missing required fields: {', '.join(missing)}")
    return IntentSpec(**data)


def intent_to_dict(intent: IntentSpec) -> dict:
    return {
        "payload_mb": intent.payload_mb,
        "deadline_s": intent.deadline_s,
        "reliability_pct": intent.reliability_pct,
        "priority": intent.priority,
    }


def translation_to_dict(translation: TranslationResult) -> dict:
    return {
        "n_packets": translation.n_packets,
        "deadline_slots": translation.deadline_slots,
        "tightness": translation.tightness,
        "feasible": translation.feasible,
        "params": {
            "v": translation.params.v,
            "eps_d": translation.params.eps_d,
            "expected_price_ris": translation.params.expected_price_ris,
            "expected_price_spectrum": translation.params.expected_price_spectrum,
        },
    }


def translation_from_dict(data: dict) -> TranslationResult:
    """Inverse of translation_to_dict, for reloading emitted JSON."""
    try:
        params = ControlParams(
            v=data["params"]["v"],
            eps_d=data["params"]["eps_d"],
            expected_price_ris=data["params"]["expected_price_ris"],
            expected_price_spectrum=data["params"]["expected_price_spectrum"],
        )
        return TranslationResult(
            params=params,
            n_packets=data["n_packets"],
            deadline_slots=data["deadline_slots"],
            tightness=data["tightness"],
            feasible=data["feasible"],
        )
    except KeyError as exc:
        raise ConfigError(f"translation document is missing field {exc.args[0]!r}") from exc


def report_to_dict(report: AssuranceReport) -> dict:
    return {
        "delivered_packets": report.delivered_packets,
        "required_packets": report.required_packets,
        "deadline_met": report.deadline_met,
        "reliability_met": report.reliability_met,
        "verdict": report.verdict,
        "drift_warnings": [
            {"slot": slot, "message": message} for slot, message in report.drift_warnings
        ],
    }
