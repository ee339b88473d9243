"""Simulation and analysis toolkit for the weakly forced Bonhoeffer-van der
Pol oscillator and its autonomous multi-time-scale embedding."""

from .models import ParameterSet, PrototypeParams, StateOriginal, StateRescaled, StateStandard
from .integrate import EventSpec, IntegratorConfig, SectionEvent, Trajectory, integrate, poincare_section

__all__ = [
    "ParameterSet",
    "PrototypeParams",
    "StateOriginal",
    "StateStandard",
    "StateRescaled",
    "IntegratorConfig",
    "EventSpec",
    "SectionEvent",
    "Trajectory",
    "integrate",
    "poincare_section",
]

__version__ = "0.1.0"
