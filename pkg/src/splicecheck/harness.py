"""Random instance generation and the fuzzing loop.

Instance streams are keyed by ``(seed, trial index)`` so any trial can be
regenerated on its own.
"""

from __future__ import annotations

import json
import logging
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .errors import PreconditionError
from .graph import (
    OMEGA,
    ExtendedNat,
    Graph,
    ReturnPathClass,
    VertexClass,
    purely_infinite_report,
    reaches,
    return_path_class,
    strong_component,
    vertex_class,
)
from .verifier import verify_cuntz_splice_invariance

log = logging.getLogger(__name__)

REPAIR_ATTEMPTS = 20


@dataclass(frozen=True)
class FuzzConfig:
    seed: int = 0
    trials: int = 200
    max_vertices: int = 8
    max_mult: int = 3

    def __post_init__(self):
        if self.max_vertices < 1 or self.max_mult < 1:
            raise ValueError("fuzz bounds must be >= 1")

    def rng(self, i: int) -> random.Random:
        return random.Random(f"{self.seed}:{i}")


def random_graph(
    rng: random.Random,
    max_vertices: int,
    max_mult: int,
    omega_entries: int = 0,
    min_vertices: int = 1,
) -> Graph:
    """Sparse random graph; sinks allowed, ``omega_entries`` ω-multiplicities sprinkled in."""
    n = rng.randint(min_vertices, max_vertices)
    vertices = [f"v{k}" for k in range(n)]
    density = rng.uniform(0.15, 0.6)
    mult = {}
    for u in vertices:
        for w in vertices:
            if rng.random() < density:
                mult[(u, w)] = rng.randint(1, max_mult)
    for _ in range(omega_entries):
        mult[(rng.choice(vertices), rng.choice(vertices))] = OMEGA
    return Graph(vertices, mult)


def _repair(g: Graph, rng: random.Random, max_mult: int) -> Optional[Graph]:
    """Push a random graph towards: all vertices regular, Condition (K), tails meet cycles."""
    for _ in range(REPAIR_ATTEMPTS):
        changes = {}
        for v in g.vertices:
            if vertex_class(g, v) is VertexClass.SINK:
                changes[(v, rng.choice(g.vertices))] = 1
        if changes:
            g = g.with_mult(changes)
            continue
        for v in g.vertices:
            if return_path_class(g, v) is ReturnPathClass.ONE:
                comp = sorted(strong_component(g, v), key=g.index.get)
                w = rng.choice(comp)
                loop = int(g.mult(w, w))
                if loop >= max_mult:
                    others = [u for u in comp if int(g.mult(u, u)) < max_mult]
                    if not others:
                        return None
                    w, loop = others[0], int(g.mult(others[0], others[0]))
                changes[(w, w)] = loop + 1
                break
        if changes:
            g = g.with_mult(changes)
            continue
        report = purely_infinite_report(g)
        if report.verdict:
            return g
        if report.bad_tails:
            on_cycle = [u for u in g.vertices if reaches(g, u, u)]
            if not on_cycle:
                return None
            w = next(u for u in g.vertices if u in report.bad_tails[0])
            changes[(w, rng.choice(on_cycle))] = 1
            g = g.with_mult(changes)
            continue
        return None
    return None


def gen_random_instance(cfg: FuzzConfig, i: int) -> Optional[tuple]:
    """A regular, purely infinite graph and a splice vertex, or ``None`` to skip."""
    rng = cfg.rng(i)
    g = random_graph(rng, cfg.max_vertices, cfg.max_mult)
    g = _repair(g, rng, cfg.max_mult)
    if g is None:
        return None
    candidates = [v for v in g.vertices if return_path_class(g, v) is ReturnPathClass.TWO_OR_MORE]
    if not candidates:
        return None
    return g, rng.choice(candidates)


def random_emitter_instance(rng: random.Random, max_vertices: int = 5, max_mult: int = 2) -> tuple:
    """A graph whose only singular vertex is the returned splice vertex ``v``.

    ``v`` gets one ω entry; sinks get an edge so nothing else is singular.
    ``v`` is forced to carry two loops when it does not already have two
    return paths, so the splice is always legal.
    """
    g = random_graph(rng, max_vertices, max_mult)
    v = rng.choice(g.vertices)
    fixes = {(u, rng.choice(g.vertices)): 1 for u in g.vertices if u != v and not g.successors(u)}
    g = g.with_mult(fixes)
    target = rng.choice(g.vertices)
    g = g.with_mult({(v, target): OMEGA})
    if return_path_class(g, v) is not ReturnPathClass.TWO_OR_MORE:
        loop = g.mult(v, v)
        g = g.with_mult({(v, v): OMEGA if loop.is_omega else ExtendedNat(2)})
    return g, v


@dataclass
class FuzzSummary:
    config: FuzzConfig
    passed: int = 0
    failed: int = 0
    skipped: int = 0
    failures: list = field(default_factory=list)
    dumped: list = field(default_factory=list)

    @property
    def trials(self) -> int:
        return self.passed + self.failed + self.skipped

    def to_json(self) -> dict:
        return {
            "seed": self.config.seed,
            "trials": self.trials,
            "passed": self.passed,
            "failed": self.failed,
            "skipped": self.skipped,
            "failures": self.failures,
            "dumped": sorted(self.dumped),
        }


def fuzz_run(
    cfg: FuzzConfig, dump_dir: Optional[Path] = None, corrupt_psi: bool = False
) -> FuzzSummary:
    summary = FuzzSummary(cfg)
    for i in range(cfg.trials):
        inst = gen_random_instance(cfg, i)
        if inst is None:
            summary.skipped += 1
            continue
        g, v = inst
        try:
            report = verify_cuntz_splice_invariance(g, v, corrupt_psi=corrupt_psi)
            ok, failed = report.verdict, report.failed_stages()
        except PreconditionError as exc:
            # generator produced something outside the hypotheses; that is a generator bug
            log.warning("trial %d rejected by preconditions: %s", i, exc)
            ok, failed = False, [f"precondition:{exc.criterion}"]
        if ok:
            summary.passed += 1
            continue
        summary.failed += 1
        summary.failures.append({"trial": i, "v": v, "failed": failed})
        if dump_dir is not None:
            dump_dir = Path(dump_dir)
            dump_dir.mkdir(parents=True, exist_ok=True)
            path = dump_dir / f"fail-seed{cfg.seed}-trial{i:05d}.json"
            # a plain graph document plus metadata, so `verify <file> <v>` replays it
            payload = dict(g.to_json(), splice_vertex=v, failed=failed, corrupt_psi=corrupt_psi)
            path.write_text(json.dumps(payload, indent=2, ensure_ascii=False) + "\n")
            summary.dumped.append(str(path))
    return summary
