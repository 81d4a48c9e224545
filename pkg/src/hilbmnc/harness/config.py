"""Scenario files: JSON documents validated with strict key checking.

Complex numbers are ``[re, im]`` pairs and matrices nested arrays of them.
See ``docs/formats.md`` for the field reference.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ..algebra import AlgebraShape, State, random_state
from ..hmodule import ModuleProjection, ModuleVector, random_projection, random_vector
from ..opmnc import AdjointableOperator, random_operator, random_theta_combination
from ..serialize import decode_array, vector_from_json
from ..setmnc import SampledSet, basis_set, finite_set, image_set, submodule_ball, unit_ball


class ConfigError(ValueError):
    pass


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ProjectionConfig(_Strict):
    name: str
    kind: Literal["head", "random", "matrix"]
    n: Optional[int] = None
    rank: Optional[int] = None
    seed: int = Field(0, ge=0, lt=2**64)
    blocks: Optional[list] = None


class OperatorConfig(_Strict):
    name: str
    kind: Literal["identity", "zero", "harmonic", "diagonal", "random_dense", "theta", "dense"]
    entries: Optional[list[float]] = None
    seed: int = Field(0, ge=0, lt=2**64)
    scale: float = 1.0
    support: Optional[int] = None
    terms: int = 2
    blocks: Optional[list] = None


class SetConfig(_Strict):
    name: str
    kind: Literal["unit_ball", "basis", "finite", "head_list", "submodule_ball", "operator_image"]
    count: int = Field(16, ge=1)
    radius: float = Field(1.0, gt=0)
    projection: Optional[str] = None
    operator: Optional[str] = None
    points: Optional[list[dict]] = None
    support: Optional[int] = None
    seed: int = Field(0, ge=0, lt=2**64)


class PairConfig(_Strict):
    kind: Literal["basis", "blocked", "witness"]
    states: Literal["tracial", "random"] = "tracial"
    breaks: Optional[list[int]] = None
    epsilon: Optional[float] = None
    seed: int = Field(0, ge=0, lt=2**64)


class WitnessConfig(_Strict):
    set: str
    epsilon: float = Field(gt=0)
    count: Optional[int] = None
    m_max: int = 8


class VerifyConfig(_Strict):
    trials: int = Field(20, ge=1)
    samples: int = Field(10, ge=1)


class Tolerances(_Strict):
    projection: float = 1e-9
    bracket: float = 1e-8


class Scenario(_Strict):
    algebra: list[int] = Field(default_factory=lambda: [1], min_length=1)
    N: int = Field(8, ge=1)
    seed: int = Field(0, ge=0, lt=2**64)
    n_max: Optional[int] = None
    m_range: list[int] = Field(default_factory=lambda: [1, 2, 3])
    tolerances: Tolerances = Field(default_factory=Tolerances)
    projections: list[ProjectionConfig] = Field(default_factory=list)
    operators: list[OperatorConfig] = Field(default_factory=list)
    sets: list[SetConfig] = Field(default_factory=list)
    pairs: list[PairConfig] = Field(default_factory=lambda: [PairConfig(kind="basis")])
    witness: Optional[WitnessConfig] = None
    verify: VerifyConfig = Field(default_factory=VerifyConfig)

    @model_validator(mode="after")
    def _references(self):
        names = {p.name for p in self.projections}
        ops = {o.name for o in self.operators}
        sets = {s.name for s in self.sets}
        if any(d < 1 for d in self.algebra):
            raise ValueError("algebra block dimensions must be positive")
        if self.n_max is not None and not 0 <= self.n_max <= self.N:
            raise ValueError(f"n_max must lie in 0..N = {self.N}")
        for i, s in enumerate(self.sets):
            if s.kind == "submodule_ball" and s.projection not in names:
                raise ValueError(f"sets[{i}].projection: unknown projection {s.projection!r}")
            if s.kind == "operator_image" and s.operator not in ops:
                raise ValueError(f"sets[{i}].operator: unknown operator {s.operator!r}")
            if s.kind == "finite" and not s.points:
                raise ValueError(f"sets[{i}].points: finite sets need points")
        for i, p in enumerate(self.pairs):
            if p.kind == "blocked" and not p.breaks:
                raise ValueError(f"pairs[{i}].breaks: blocked pairs need breaks")
            if p.kind == "witness" and p.epsilon is None:
                raise ValueError(f"pairs[{i}].epsilon: witness pairs need epsilon")
        if self.witness is not None and self.witness.set not in sets:
            raise ValueError(f"witness.set: unknown set {self.witness.set!r}")
        if any(m < 1 for m in self.m_range):
            raise ValueError("m_range entries must be >= 1")
        return self

    @property
    def shape(self) -> AlgebraShape:
        return AlgebraShape(tuple(self.algebra))

    @property
    def window(self) -> int:
        return self.N - 1 if self.n_max is None else self.n_max


def load_scenario(path: str | Path | None) -> Scenario:
    if path is None:
        return Scenario()
    try:
        raw = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from exc
    return parse_scenario(raw, str(path))


def parse_scenario(raw, where: str = "<config>") -> Scenario:
    try:
        return Scenario.model_validate(raw)
    except ValidationError as exc:
        lines = []
        for err in exc.errors():
            loc = ".".join(str(p) for p in err["loc"]) or "<root>"
            lines.append(f"{where}: {loc}: {err['msg']}")
        raise ConfigError("\n".join(lines)) from exc


# -- builders ----------------------------------------------------------------

def derive_seed(sc: Scenario, local: int) -> int:
    """Descriptor seed mixed with the scenario seed, so ``--seed`` reseeds everything."""
    return int(np.random.SeedSequence([sc.seed, local]).generate_state(1, dtype=np.uint64)[0])

def build_projection(sc: Scenario, desc: ProjectionConfig, validate: bool = True) -> ModuleProjection:
    shape, N = sc.shape, sc.N
    if desc.kind == "head":
        if desc.n is None:
            raise ConfigError(f"projection {desc.name!r}: head projections need n")
        return ModuleProjection(shape, N, head=desc.n)
    if desc.kind == "random":
        return random_projection(shape, N, seed=derive_seed(sc, desc.seed), rank=desc.rank)
    if not desc.blocks:
        raise ConfigError(f"projection {desc.name!r}: matrix projections need blocks")
    return ModuleProjection(shape, N, mats=[decode_array(b) for b in desc.blocks],
                            tol=sc.tolerances.projection, validate=validate)


def build_operator(sc: Scenario, desc: OperatorConfig) -> AdjointableOperator:
    shape, N = sc.shape, sc.N
    if desc.kind == "identity":
        return AdjointableOperator.identity(shape, N)
    if desc.kind == "zero":
        return AdjointableOperator.zero(shape, N)
    if desc.kind == "harmonic":
        return AdjointableOperator.harmonic(shape, N)
    if desc.kind == "diagonal":
        if desc.entries is None or len(desc.entries) != N:
            raise ConfigError(f"operator {desc.name!r}: diagonal needs {N} entries")
        return AdjointableOperator.diagonal(shape, desc.entries)
    if desc.kind == "random_dense":
        return random_operator(shape, N, seed=derive_seed(sc, desc.seed), scale=desc.scale)
    if desc.kind == "theta":
        k = 1 if desc.support is None else desc.support
        return random_theta_combination(shape, N, k, terms=desc.terms, seed=derive_seed(sc, desc.seed))
    if not desc.blocks:
        raise ConfigError(f"operator {desc.name!r}: dense operators need blocks")
    return AdjointableOperator(shape, N, [decode_array(b) for b in desc.blocks])


def build_set(sc: Scenario, desc: SetConfig, projections: dict, operators: dict) -> SampledSet:
    shape, N = sc.shape, sc.N
    if desc.kind == "unit_ball":
        return _named(unit_ball(shape, N, count=desc.count, seed=derive_seed(sc, desc.seed)), desc.name)
    if desc.kind == "basis":
        return _named(basis_set(shape, N), desc.name)
    if desc.kind == "finite":
        pts = [vector_from_json(p) for p in desc.points]
        for p in pts:
            if p.shape != shape or p.N != N:
                raise ConfigError(f"set {desc.name!r}: point does not live in A^N")
        return _named(finite_set(pts), desc.name)
    if desc.kind == "head_list":
        k = N if desc.support is None else desc.support
        rng = np.random.default_rng(derive_seed(sc, desc.seed))
        pts = []
        for _ in range(desc.count):
            x = random_vector(shape, N, rng, norm=desc.radius)
            pts.append(ModuleVector(shape, N, [np.where(np.arange(N)[:, None, None] < k, a, 0) for a in x.data]))
        return _named(finite_set(pts), desc.name)
    if desc.kind == "submodule_ball":
        return _named(submodule_ball(projections[desc.projection], desc.radius, desc.count,
                                         derive_seed(sc, desc.seed)), desc.name)
    T = operators[desc.operator]
    return _named(image_set(shape, N, T.mats, desc.radius, desc.count,
                                         derive_seed(sc, desc.seed)), desc.name)


def _named(E: SampledSet, name: str) -> SampledSet:
    E.label = name
    return E


def build_states(sc: Scenario, desc: PairConfig, M: int, rng) -> list[State]:
    if desc.states == "tracial":
        return [State.tracial(sc.shape)] * M
    return [random_state(sc.shape, rng) for _ in range(M)]
