"""Headless simulated-user driver.

A scripted evaluator stands in for the human: it scores individuals by
how closely their displacement matches a target vertex program over a
fixed sample of mesh vertices and times, picks the best few each
generation, and (in collaborative scenarios) injects a peer's best
individual on a fixed cadence.  Everything is deterministic under the
scenario seeds, so runs are byte-identical and comparable.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional

import numpy as np

from .codec import (
    CodecConfig,
    Genome,
    SearchSpace,
    VARIABLE_NAMES,
    genome_from_hex,
    names_to_mask,
)
from .collaboration import Hub
from .config import parse_key_values
from .errors import EvoformError
from .evolution import GAParams, Individual
from .expression import TWO_PI, ExpressionTree, evaluate_batch, genome_tree
from .mesh import Mesh, load_fixture

SAMPLE_VERTICES = 64
SAMPLE_TIMES = 8


@dataclass
class SimulatedEvaluator:
    """Deterministic stand-in for the human eye: RMS distance to a target."""

    target_tree: ExpressionTree
    target_channel_mask: int
    xs: np.ndarray
    ys: np.ndarray
    zs: np.ndarray
    ts: np.ndarray
    picks_per_generation: int = 3
    _target_coords: dict = field(default_factory=dict)

    @classmethod
    def build(cls, target: Genome, mesh: Mesh, seed: int,
              picks_per_generation: int = 3) -> "SimulatedEvaluator":
        rng = random.Random(seed)
        count = len(mesh.vertices)
        if count >= SAMPLE_VERTICES:
            picked = rng.sample(range(count), SAMPLE_VERTICES)
        else:
            picked = rng.choices(range(count), k=SAMPLE_VERTICES)
        times = [k * TWO_PI / SAMPLE_TIMES for k in range(SAMPLE_TIMES)]
        xs, ys, zs, ts = [], [], [], []
        for i in picked:
            v = mesh.vertices[i]
            for t in times:
                xs.append(v.x)
                ys.append(v.y)
                zs.append(v.z)
                ts.append(t)
        evaluator = cls(genome_tree(target), target.effective_channel_mask(),
                        np.array(xs), np.array(ys), np.array(zs), np.array(ts),
                        picks_per_generation)
        evaluator._target_coords = evaluator._displaced(
            evaluator.target_tree, evaluator.target_channel_mask)
        return evaluator

    def _displaced(self, tree: ExpressionTree, channel_mask: int) -> dict:
        e = evaluate_batch(tree, self.xs, self.ys, self.zs, self.ts)
        coords = {"x": self.xs.copy(), "y": self.ys.copy(), "z": self.zs.copy()}
        for bit, name in enumerate(("x", "y", "z")):
            if channel_mask >> bit & 1:
                coords[name] = coords[name] + e
        return coords

    def error(self, candidate: Individual) -> float:
        """RMS Euclidean distance between candidate- and target-displaced sample."""
        tree = genome_tree(candidate.genome)
        coords = self._displaced(tree, candidate.genome.effective_channel_mask())
        square = sum((coords[n] - self._target_coords[n]) ** 2 for n in ("x", "y", "z"))
        return float(math.sqrt(float(np.mean(square))))

    def pick(self, individuals) -> list[int]:
        errors = [self.error(ind) for ind in individuals]
        order = sorted(range(len(errors)), key=lambda i: (errors[i], i))
        return sorted(order[:self.picks_per_generation])


def deformation_error(candidate: Individual, evaluator: SimulatedEvaluator) -> float:
    return evaluator.error(candidate)


@dataclass(frozen=True)
class AgentSpec:
    name: str
    space: SearchSpace


@dataclass
class Scenario:
    mode: str  # "individual" | "collaborative"
    agents: list[AgentSpec]
    generations: int
    seeds: list[int]
    target_hex: str
    depth: int = 3
    inject_every: int = 5
    picks_per_generation: int = 3
    mesh_name: str = "sphere"
    visibility_k: int = 3
    params: GAParams = field(default_factory=GAParams)

    def __post_init__(self):
        if self.mode not in ("individual", "collaborative"):
            raise EvoformError(f"unknown scenario mode {self.mode!r}")
        if self.mode == "collaborative" and len(self.agents) < 2:
            raise EvoformError("collaborative scenarios need at least 2 agents")
        if not self.agents:
            raise EvoformError("scenario defines no agents")


def _parse_seeds(text: str) -> list[int]:
    text = text.strip()
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(part) for part in text.split(",") if part.strip()]


def _split_names(text: str) -> list[str]:
    return [p for p in text.replace(",", " ").split() if p]


def parse_scenario(text: str) -> Scenario:
    """Scenario file: a global key=value block plus one [agent NAME] section each."""
    sections: list[tuple[Optional[str], list[str]]] = [(None, [])]
    for line in text.splitlines():
        stripped = line.split("#", 1)[0].strip()
        if stripped.startswith("[") and stripped.endswith("]"):
            header = stripped[1:-1].strip()
            if not header.lower().startswith("agent"):
                raise EvoformError(f"unknown scenario section {stripped!r}")
            sections.append((header[5:].strip() or f"agent{len(sections)}", []))
        else:
            sections[-1][1].append(line)

    top = parse_key_values("\n".join(sections[0][1]))
    agents = []
    for name, lines in sections[1:]:
        body = parse_key_values("\n".join(lines))
        agents.append(AgentSpec(name, SearchSpace.from_names(
            _split_names(body["channels"]), _split_names(body["variables"]))))

    ga_kwargs = {}
    for key in ("N", "bias_generations"):
        if key in top:
            ga_kwargs[key] = int(top[key])
    for key in ("crossover_rate", "mutation_rate", "scaling_C",
                "pick_fitness", "floor_fitness"):
        if key in top:
            ga_kwargs[key] = float(top[key])

    return Scenario(
        mode=top["mode"],
        agents=agents,
        generations=int(top["generations"]),
        seeds=_parse_seeds(top["seeds"]),
        target_hex=top["target_genome"],
        depth=int(top.get("depth", 3)),
        inject_every=int(top.get("inject_every", 5)),
        picks_per_generation=int(top.get("picks_per_generation", 3)),
        mesh_name=top.get("mesh", "sphere"),
        visibility_k=int(top.get("visibility_k", 3)),
        params=GAParams(**ga_kwargs),
    )


def load_bundled_scenario(name: str) -> Scenario:
    text = resources.files("evoform").joinpath(f"scenarios/{name}.txt").read_text("utf-8")
    return parse_scenario(text)


@dataclass(frozen=True)
class MetricsRow:
    seed: int
    agent: str
    generation: int
    best_error: float


def _run_one_seed(scenario: Scenario, seed: int,
                  evaluator: SimulatedEvaluator) -> list[MetricsRow]:
    config = CodecConfig(scenario.depth)
    hub = Hub(config, scenario.params, seed=seed)
    if scenario.mode == "collaborative":
        room = hub.create_room([(a.name, a.space) for a in scenario.agents],
                               visibility_k=scenario.visibility_k,
                               mesh_id=scenario.mesh_name)
        session_ids = list(room.member_ids)
    else:
        session_ids = [hub.create_session(a.name, a.space, scenario.mesh_name).id
                       for a in scenario.agents]
    names = {sid: agent.name for sid, agent in zip(session_ids, scenario.agents)}

    rows: list[MetricsRow] = []
    for g in range(scenario.generations + 1):
        inject_now = (scenario.mode == "collaborative"
                      and scenario.inject_every > 0
                      and 0 < g < scenario.generations
                      and g % scenario.inject_every == 0)
        if inject_now:
            for sid in session_ids:
                for peer_id, visible in hub.peer_sample(sid).items():
                    donor = min(visible, key=lambda ind: (evaluator.error(ind), ind.id))
                    hub.inject(sid, peer_id, donor.id)

        for sid in session_ids:
            individuals = hub.session(sid).population.individuals
            best = min(evaluator.error(ind) for ind in individuals)
            rows.append(MetricsRow(seed, names[sid], g, best))

        if g == scenario.generations:
            break
        for sid in session_ids:
            picks = evaluator.pick(hub.session(sid).population.individuals)
            hub.set_picks(sid, picks)
            hub.step_session(sid)
    return rows


def run_scenario(scenario: Scenario) -> list[MetricsRow]:
    config = CodecConfig(scenario.depth)
    target = genome_from_hex(scenario.target_hex, config)
    mesh = load_fixture(scenario.mesh_name)
    rows: list[MetricsRow] = []
    for seed in scenario.seeds:
        evaluator = SimulatedEvaluator.build(target, mesh, seed,
                                             scenario.picks_per_generation)
        rows.extend(_run_one_seed(scenario, seed, evaluator))
    return rows


def metrics_to_csv(rows: list[MetricsRow]) -> str:
    lines = ["seed,agent,generation,best_error"]
    lines += [f"{r.seed},{r.agent},{r.generation},{r.best_error!r}" for r in rows]
    return "".join(line + "\n" for line in lines)


def final_best_errors(rows: list[MetricsRow], agent: str,
                      generation: int) -> list[float]:
    return [r.best_error for r in rows if r.agent == agent and r.generation == generation]


def median(values: list[float]) -> float:
    ordered = sorted(values)
    n = len(ordered)
    mid = n // 2
    return ordered[mid] if n % 2 else (ordered[mid - 1] + ordered[mid]) / 2.0


def xy_target_genome(config: CodecConfig = CodecConfig(3)) -> Genome:
    """Reference target needing both x and y: value ~ 0.51*x + 1.96 + 3.02*sin(y).

    Channels {x, y}; built directly so bundled scenario files can freeze
    its hex form.
    """
    if config.depth != 3:
        raise EvoformError("the reference target is laid out for depth 3")
    from .codec import BinaryOp, UnaryOp

    ADD, SUB, MUL = BinaryOp.ADD, BinaryOp.SUB, BinaryOp.MUL
    IDENT, SIN = UnaryOp.IDENTITY, UnaryOp.SIN
    binary_ops = (ADD, ADD, ADD, MUL, MUL, MUL, SUB)
    unary_ops = tuple([IDENT] * 12 + [SIN] + [IDENT] * 2)  # node 12 = leaf 5 (y)
    leaves = (
        (0, 0),      # x
        (4, 134),    # const ~0.5098
        (4, 153),    # const 2.0
        (4, 140),    # const ~0.9804
        (4, 166),    # const ~3.0196
        (1, 0),      # y, wrapped in sin by its unary slot
        (3, 0),      # t
        (3, 0),      # t  (t - t == 0 keeps the last pair inert)
    )
    channel_mask = names_to_mask("xy", ("x", "y", "z"))
    variable_mask = names_to_mask("xyt", VARIABLE_NAMES)
    return Genome(config, channel_mask, variable_mask, binary_ops, unary_ops, leaves)
