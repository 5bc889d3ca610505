"""Composition of exactly solvable one-dimensional Schroedinger potentials."""
from .catalog import (
    Family,
    NodelessSolution,
    PotentialSpec,
    check_boundary_conditions,
    custom_nodeless,
    eigenfunction,
    make_potential,
    nodeless_scan,
    overshoot_state,
    rayleigh_quotient,
    seed_bracket,
    virtual_state,
    wronskian,
)
from .compose import Composition, CompositionChain, Faults, build_mapping, compose, iterate, sample_grid
from .interval import Interval
from .numerics import QuadSettings
from .verify import VerificationReport, full_report

__all__ = [
    "Family",
    "Interval",
    "NodelessSolution",
    "PotentialSpec",
    "QuadSettings",
    "Composition",
    "CompositionChain",
    "Faults",
    "VerificationReport",
    "make_potential",
    "eigenfunction",
    "virtual_state",
    "overshoot_state",
    "custom_nodeless",
    "seed_bracket",
    "nodeless_scan",
    "check_boundary_conditions",
    "rayleigh_quotient",
    "wronskian",
    "build_mapping",
    "compose",
    "iterate",
    "sample_grid",
    "full_report",
]
