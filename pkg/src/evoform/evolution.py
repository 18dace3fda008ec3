"""Per-session interactive GA over flat genome bit strings.

Picks act as the subjective evaluation: picked individuals get a high
fitness and survive unchanged (elitism); everyone else competes through
linearly scaled roulette selection, one-point crossover over the body
bits, and per-bit mutation.  Headers never mutate and flow only through
bitwise OR, so a population's search space can grow but never shrink.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace
from typing import Optional

from .codec import CodecConfig, Genome, HEADER_BITS, decode, encode
from .errors import InvalidPickError


@dataclass(frozen=True)
class Provenance:
    kind: str  # "native" | "injected"
    origin: Optional[str] = None  # donor session id for injected copies
    bias_remaining: int = 0

    @classmethod
    def native(cls) -> "Provenance":
        return cls("native")

    @classmethod
    def injected(cls, origin: str, bias_generations: int) -> "Provenance":
        return cls("injected", origin, bias_generations)


@dataclass(frozen=True)
class Individual:
    id: int
    genome: Genome
    fitness: float = 0.0
    provenance: Provenance = field(default_factory=Provenance.native)


@dataclass(frozen=True)
class Population:
    individuals: tuple[Individual, ...]
    generation: int = 0
    next_id: int = 0  # id allocator for offspring, unique within a session

    @property
    def size(self) -> int:
        return len(self.individuals)


@dataclass(frozen=True)
class GAParams:
    N: int = 9
    crossover_rate: float = 0.9
    mutation_rate: Optional[float] = None  # None resolves to 1/total_bits
    scaling_C: float = 2.0
    pick_fitness: float = 1.0
    floor_fitness: float = 0.1
    bias_generations: int = 2

    def __post_init__(self):
        if not 0.0 <= self.crossover_rate <= 1.0:
            raise ValueError("crossover_rate must be in [0, 1]")
        if self.mutation_rate is not None and not 0.0 <= self.mutation_rate <= 1.0:
            raise ValueError("mutation_rate must be in [0, 1]")
        if self.scaling_C <= 1.0:
            raise ValueError("scaling_C must exceed 1")
        if not self.pick_fitness > self.floor_fitness > 0.0:
            raise ValueError("need pick_fitness > floor_fitness > 0")

    def resolved_mutation_rate(self, config: CodecConfig) -> float:
        return self.mutation_rate if self.mutation_rate is not None else 1.0 / config.total_bits


def seed_population(config: CodecConfig, params: GAParams, space, seed: int) -> Population:
    from .codec import random_genome  # local to keep module import order flat

    rng = random.Random(seed)
    individuals = tuple(
        Individual(i, random_genome(config, rng.getrandbits(32), space))
        for i in range(params.N)
    )
    return Population(individuals, generation=0, next_id=params.N)


def _validate_picks(pop: Population, picks) -> frozenset:
    picks = frozenset(picks)
    for i in picks:
        if not 0 <= i < pop.size:
            raise InvalidPickError(f"pick index {i} outside population of {pop.size}")
    return picks


def assign_fitness(pop: Population, picks, params: GAParams) -> Population:
    """Picked individuals get pick_fitness, the rest floor_fitness.

    Injected individuals still carrying bias are then raised to the
    population maximum so they survive long enough to leave a mark.
    """
    picks = _validate_picks(pop, picks)
    assigned = [
        replace(ind, fitness=params.pick_fitness if i in picks else params.floor_fitness)
        for i, ind in enumerate(pop.individuals)
    ]
    peak = max(ind.fitness for ind in assigned)
    biased = tuple(
        replace(ind, fitness=max(ind.fitness, peak))
        if ind.provenance.kind == "injected" and ind.provenance.bias_remaining > 0
        else ind
        for ind in assigned
    )
    return replace(pop, individuals=biased)


def scale_fitness(raw: list[float], C: float) -> list[float]:
    """Linear scaling: preserve the mean, map the max to C times the mean.

    If that line would push the minimum negative, rescale so the minimum
    lands at zero instead (mean still preserved).  All-equal input is
    returned unchanged.
    """
    mean = sum(raw) / len(raw)
    peak = max(raw)
    low = min(raw)
    if peak == low:
        return list(raw)
    a = (C - 1.0) * mean / (peak - mean)
    b = mean * (1.0 - a)
    if a * low + b < 0.0:
        a = mean / (mean - low)
        b = -a * low
    return [a * f + b for f in raw]


def crossover(a: Genome, b: Genome, point: int) -> tuple[Genome, Genome]:
    """One-point crossover over the body bits; headers OR into both children."""
    config = a.config
    body_len = config.body_bits
    if not 0 < point < body_len:
        raise InvalidPickError(f"crossover point {point} outside (0, {body_len})")
    body_a = encode(a)[HEADER_BITS:]
    body_b = encode(b)[HEADER_BITS:]
    header = format(a.channel_mask | b.channel_mask, "03b") + \
        format(a.variable_mask | b.variable_mask, "04b")
    child_a = decode(header + body_a[:point] + body_b[point:], config)
    child_b = decode(header + body_b[:point] + body_a[point:], config)
    return child_a, child_b


def _or_header_clone(a: Genome, b: Genome) -> tuple[Genome, Genome]:
    channel = a.channel_mask | b.channel_mask
    variable = a.variable_mask | b.variable_mask
    return (replace(a, channel_mask=channel, variable_mask=variable),
            replace(b, channel_mask=channel, variable_mask=variable))


def _mutate(genome: Genome, rate: float, rng: random.Random) -> Genome:
    bits = encode(genome)
    body = list(bits[HEADER_BITS:])
    for i in range(len(body)):
        if rng.random() < rate:
            body[i] = "1" if body[i] == "0" else "0"
    return decode(bits[:HEADER_BITS] + "".join(body), genome.config)


def _roulette(rng: random.Random, individuals, scaled: list[float]) -> Individual:
    total = sum(scaled)
    r = rng.random() * total
    acc = 0.0
    for ind, f in zip(individuals, scaled):
        acc += f
        if r < acc:
            return ind
    return individuals[-1]


def step(pop: Population, picks, params: GAParams, seed: int) -> Population:
    """Advance one generation.

    Picked individuals are copied unchanged; the remaining slots are
    filled by roulette parents recombined over the body bits.  Pure in
    (pop, picks, params, seed).
    """
    picks = _validate_picks(pop, picks)
    if len(picks) > params.N:
        raise InvalidPickError("more picks than population slots")
    evaluated = assign_fitness(pop, picks, params)
    scaled = scale_fitness([ind.fitness for ind in evaluated.individuals], params.scaling_C)

    config = evaluated.individuals[0].genome.config
    mutation_rate = params.resolved_mutation_rate(config)
    rng = random.Random(seed)

    survivors: list[Individual] = []
    for i in sorted(picks):
        elite = evaluated.individuals[i]
        if elite.provenance.kind == "injected" and elite.provenance.bias_remaining > 0:
            elite = replace(elite, provenance=replace(
                elite.provenance, bias_remaining=elite.provenance.bias_remaining - 1))
        survivors.append(elite)

    next_id = pop.next_id
    offspring: list[Individual] = []
    needed = params.N - len(survivors)
    while len(offspring) < needed:
        parent_a = _roulette(rng, evaluated.individuals, scaled)
        parent_b = _roulette(rng, evaluated.individuals, scaled)
        if rng.random() < params.crossover_rate:
            point = rng.randrange(1, config.body_bits)
            child_a, child_b = crossover(parent_a.genome, parent_b.genome, point)
        else:
            child_a, child_b = _or_header_clone(parent_a.genome, parent_b.genome)
        for child in (child_a, child_b):
            if len(offspring) == needed:
                break
            child = _mutate(child, mutation_rate, rng)
            offspring.append(Individual(next_id, child, fitness=0.0))
            next_id += 1

    return Population(tuple(survivors + offspring),
                      generation=pop.generation + 1,
                      next_id=next_id)
