"""Optical element program: stage types and JSON (de)serialization.

Modes are indexed 0..3 in the order (1H, 1V, 2H, 2V); paths are 1-based.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Union

import numpy as np

DIM = 4
MODE_NAMES = ("1H", "1V", "2H", "2V")


@dataclass(frozen=True)
class WaveplateTriple:
    """QWP(alpha) . HWP(beta) . QWP(gamma) == exp(i*global_phase) * target."""
    alpha: float
    beta: float
    gamma: float
    global_phase: float = 0.0

    def to_json(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta, "gamma": self.gamma,
                "global_phase": self.global_phase}


@dataclass(frozen=True)
class Routing:
    perm: tuple[int, ...]  # output mode i takes input mode perm[i]
    label: str = ""
    kind = "routing"


@dataclass(frozen=True)
class Waveplate:
    path: int
    plate: str
    angle: float
    label: str = ""
    kind = "waveplate"


@dataclass(frozen=True)
class BlockUnitary:
    """Independent polarization unitaries on path 1 and path 2 (None = untouched)."""
    paths: tuple[WaveplateTriple | None, WaveplateTriple | None]
    label: str = ""
    kind = "block_unitary"


@dataclass(frozen=True)
class Attenuator:
    angles: tuple[float, ...]
    lambda_scale: float = 1.0
    label: str = ""
    kind = "attenuator"


@dataclass(frozen=True)
class Phase:
    """Mode k picks up exp(-i (coeffs[k] - offset) t).

    ``hwp`` holds (path, slope, intercept) so that the HWP_t angle on that path
    is slope * t + intercept; it is derived metadata, never used in simulation.
    """
    coeffs: tuple[float, ...]
    offset: float = 0.0
    hwp: tuple[tuple[int, float, float], ...] = ()
    label: str = ""
    kind = "phase"

    @property
    def centered(self) -> np.ndarray:
        return np.asarray(self.coeffs, dtype=float) - self.offset


@dataclass(frozen=True)
class Blocker:
    modes: tuple[int, ...]
    label: str = ""
    kind = "blocker"


Stage = Union[Routing, Waveplate, BlockUnitary, Attenuator, Phase, Blocker]


@dataclass(frozen=True)
class CircuitIR:
    stages: tuple[Stage, ...]
    total_scale: float = 1.0
    dim: int = DIM
    detectors: tuple[int, ...] = (0, 1, 2, 3)  # detector k reads mode detectors[k]; vertex k
    provenance: dict = field(default_factory=dict, compare=False)

    @property
    def n_vertices(self) -> int:
        return len(self.detectors)

    def labels(self) -> list[str]:
        """Distinct consecutive stage labels, i.e. the block order."""
        out: list[str] = []
        for s in self.stages:
            if s.label and (not out or out[-1] != s.label):
                out.append(s.label)
        return out

    def replace_stage(self, index: int, stage: Stage) -> "CircuitIR":
        stages = list(self.stages)
        stages[index] = stage
        return CircuitIR(tuple(stages), self.total_scale, self.dim, self.detectors, dict(self.provenance))

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "total_scale": self.total_scale,
            "detectors": list(self.detectors),
            "provenance": self.provenance,
            "stages": [stage_to_json(s) for s in self.stages],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)

    @classmethod
    def from_json(cls, obj: dict) -> "CircuitIR":
        if obj.get("dim", DIM) != DIM:
            raise ValueError(f"only dim {DIM} circuits are supported")
        return cls(
            stages=tuple(stage_from_json(s) for s in obj["stages"]),
            total_scale=float(obj["total_scale"]),
            detectors=tuple(int(d) for d in obj.get("detectors", range(DIM))),
            provenance=dict(obj.get("provenance", {})),
        )

    @classmethod
    def loads(cls, text: str) -> "CircuitIR":
        return cls.from_json(json.loads(text))


def stage_to_json(s: Stage) -> dict:
    d: dict = {"kind": s.kind}
    if isinstance(s, Routing):
        d["perm"] = list(s.perm)
    elif isinstance(s, Waveplate):
        d.update(path=s.path, plate=s.plate, angle=s.angle)
    elif isinstance(s, BlockUnitary):
        d["paths"] = [None if p is None else p.to_json() for p in s.paths]
    elif isinstance(s, Attenuator):
        d.update(angles=list(s.angles), lambda_scale=s.lambda_scale)
    elif isinstance(s, Phase):
        d.update(coeffs=list(s.coeffs), offset=s.offset, hwp=[list(h) for h in s.hwp])
    elif isinstance(s, Blocker):
        d["modes"] = list(s.modes)
    else:
        raise TypeError(f"unknown stage {s!r}")
    if s.label:
        d["label"] = s.label
    return d


def stage_from_json(d: dict) -> Stage:
    kind = d.get("kind")
    label = d.get("label", "")
    if kind == "routing":
        perm = tuple(int(p) for p in d["perm"])
        if sorted(perm) != list(range(DIM)):
            raise ValueError(f"routing perm {perm} is not a permutation of {DIM} modes")
        return Routing(perm, label)
    if kind == "waveplate":
        if d["plate"] not in ("HWP", "QWP"):
            raise ValueError(f"unknown plate {d['plate']!r}")
        if d["path"] not in (1, 2):
            raise ValueError("waveplate path must be 1 or 2")
        return Waveplate(int(d["path"]), d["plate"], float(d["angle"]), label)
    if kind == "block_unitary":
        paths = tuple(None if p is None else WaveplateTriple(
            float(p["alpha"]), float(p["beta"]), float(p["gamma"]), float(p.get("global_phase", 0.0)))
            for p in d["paths"])
        if len(paths) != 2:
            raise ValueError("block_unitary needs exactly two path entries")
        return BlockUnitary(paths, label)
    if kind == "attenuator":
        angles = tuple(float(a) for a in d["angles"])
        if len(angles) != DIM:
            raise ValueError(f"attenuator needs {DIM} angles")
        return Attenuator(angles, float(d.get("lambda_scale", 1.0)), label)
    if kind == "phase":
        coeffs = tuple(float(c) for c in d["coeffs"])
        if len(coeffs) != DIM:
            raise ValueError(f"phase stage needs {DIM} coefficients")
        hwp = tuple((int(h[0]), float(h[1]), float(h[2])) for h in d.get("hwp", []))
        return Phase(coeffs, float(d.get("offset", 0.0)), hwp, label)
    if kind == "blocker":
        return Blocker(tuple(int(m) for m in d["modes"]), label)
    raise ValueError(f"unknown stage kind {kind!r}")
