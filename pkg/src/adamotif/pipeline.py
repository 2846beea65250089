"""End-to-end orchestration: graph in, motif scene out."""

from __future__ import annotations

import json
import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .alignment import AlignParams, align, match_nodes
from .assembly import BundleParams, GlobalLayoutParams, aggregate_edges, bundle_edges, global_motif_layout
from .clustering import APParams, cluster_representatives, cluster_subgraphs
from .community import detect_communities
from .embedding import EmbeddingParams, embed_subgraph
from .errors import AdaMotifError, DomainError, StageError
from .graph import Graph, guess_format, load_edge_list
from .layout import DecoratedLayout, LayoutParams, difference_layout, force_layout, representative_layouts
from .motif import MotifParams, build_motif
from .scene import LABEL_THRESHOLD, MotifScene, render
from .supergraph import synthesize_supergraph

log = logging.getLogger(__name__)

MODES = ("adamotif", "primitive")
OUTPUT_FORMATS = ("svg", "json", "both")
DUMPS = ("partition", "embeddings", "clusters", "supergraphs")


@dataclass(frozen=True)
class PipelineConfig:
    input: str | None = None
    input_format: str | None = None  # None: guessed from the file extension
    output: str | None = None
    output_format: str = "svg"
    seed: int = 42
    mode: str = "adamotif"
    resolution: float = 1.0
    embedding: EmbeddingParams = field(default_factory=EmbeddingParams)
    clustering: APParams = field(default_factory=APParams)
    alignment: AlignParams = field(default_factory=AlignParams)
    layout: LayoutParams = field(default_factory=LayoutParams)
    motif: MotifParams = field(default_factory=MotifParams)
    assembly: GlobalLayoutParams = field(default_factory=GlobalLayoutParams)
    bundling: BundleParams = field(default_factory=BundleParams)
    label_threshold: int = LABEL_THRESHOLD
    workers: int = 1
    dumps: frozenset[str] = frozenset()
    dump_dir: str | None = None
    report: str | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise DomainError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.output_format not in OUTPUT_FORMATS:
            raise DomainError(f"format must be one of {OUTPUT_FORMATS}, got {self.output_format!r}")
        unknown = set(self.dumps) - set(DUMPS)
        if unknown:
            raise DomainError(f"unknown dump kinds: {sorted(unknown)}")
        if self.workers < 1:
            raise DomainError("workers must be >= 1")
        if self.resolution <= 0:
            raise DomainError("resolution must be positive")

    def validate_paths(self) -> None:
        if self.input is not None and not os.path.isfile(self.input):
            raise DomainError(f"input file not found: {self.input}")
        for path in (self.output, self.report):
            if path:
                parent = os.path.dirname(os.path.abspath(path))
                if not os.path.isdir(parent):
                    raise DomainError(f"output directory does not exist: {parent}")

    def snapshot(self) -> dict:
        """JSON-native view of every parameter block."""
        blocks = {
            "resolution": self.resolution,
            "embedding": asdict(self.embedding),
            "clustering": asdict(self.clustering),
            "alignment": asdict(self.alignment),
            "layout": asdict(self.layout),
            "motif": asdict(self.motif),
            "assembly": asdict(self.assembly),
            "bundling": asdict(self.bundling),
            "label_threshold": self.label_threshold,
        }
        return json.loads(json.dumps(blocks))


@dataclass
class RunReport:
    stage_seconds: dict[str, float] = field(default_factory=dict)
    communities: int = 0
    clusters_level1: int = 0
    clusters_level2: int = 0
    matching: dict[str, float] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)
    canvas: tuple[float, float] | None = None

    @property
    def total_seconds(self) -> float:
        return sum(self.stage_seconds.values())

    def to_dict(self) -> dict:
        d = asdict(self)
        d["total_seconds"] = self.total_seconds
        return d


def derive_seed(master: int, index: int) -> int:
    """Stable per-work-item seed from the master seed and an item index."""
    return int(np.random.SeedSequence([int(master), int(index)]).generate_state(1)[0])


def _fan_out(fn, items, workers: int) -> list:
    if workers == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


class _Run:
    def __init__(self, cfg: PipelineConfig):
        self.cfg = cfg
        self.report = RunReport()

    @contextmanager
    def stage(self, name: str):
        start = time.perf_counter()
        try:
            yield
        except StageError:
            raise
        except Exception as exc:
            elapsed = time.perf_counter() - start
            self.report.stage_seconds[name] = elapsed
            raise StageError(name, elapsed, exc) from exc
        self.report.stage_seconds[name] = self.report.stage_seconds.get(name, 0.0) + time.perf_counter() - start

    def dump(self, kind: str, payload) -> None:
        if kind not in self.cfg.dumps:
            return
        base = self.cfg.output or self.cfg.input or "adamotif"
        stem = os.path.splitext(os.path.basename(base))[0]
        folder = self.cfg.dump_dir or os.path.dirname(os.path.abspath(base))
        path = os.path.join(folder, f"{stem}.{kind}.json")
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=1, sort_keys=True)
            fh.write("\n")
        log.info("wrote %s", path)


def load_input(cfg: PipelineConfig) -> Graph:
    if cfg.input is None:
        raise DomainError("no input graph given")
    fmt = cfg.input_format or guess_format(cfg.input)
    return load_edge_list(cfg.input, fmt)


def run_pipeline(cfg: PipelineConfig, graph: Graph | None = None, name: str | None = None):
    """Run every stage and return ``(scene, report)``. ``graph`` bypasses
    loading from ``cfg.input``."""
    run = _Run(cfg)
    report = run.report
    seed = cfg.seed

    with run.stage("load"):
        g = graph if graph is not None else load_input(cfg)
        if len(g) == 0:
            raise DomainError("input graph has no nodes")
    if g.self_loops_dropped:
        report.warnings.append(f"dropped {g.self_loops_dropped} self-loops")

    with run.stage("communities"):
        partition = detect_communities(g, cfg.resolution, seed)
        communities = partition.communities
    report.communities = partition.size
    run.dump("partition", {"assignment": partition.assignment, "communities": partition.members})

    with run.stage("embedding"):
        embeddings = _fan_out(lambda s: embed_subgraph(s, cfg.embedding), communities, cfg.workers)
    run.dump("embeddings", {"vectors": [e.values.tolist() for e in embeddings]})

    with run.stage("clustering"):
        level1 = cluster_subgraphs(embeddings, seed, cfg.clustering)
        reps = list(level1.exemplar_of)
        level2 = cluster_representatives(reps, embeddings, seed, cfg.clustering)
    report.clusters_level1 = level1.n_clusters
    report.clusters_level2 = level2.n_clusters
    for lvl in (level1, level2):
        if not lvl.converged:
            report.warnings.append(f"{lvl.level} clustering did not converge in {lvl.iterations} iterations")
    run.dump(
        "clusters",
        {
            "subgraph": {"member_of": list(level1.member_of), "exemplars": reps},
            "representative": {
                "member_of": list(level2.member_of),
                "exemplars": [level2.item(i) for i in level2.exemplar_of],
                "items": list(level2.items),
            },
        },
    )

    if cfg.mode == "adamotif":
        layouts = _adamotif_layouts(run, communities, level1, level2)
    else:
        layouts = _primitive_layouts(run, communities)

    with run.stage("motifs"):
        base_area = cfg.motif.resolve_base_area(len(g), cfg.assembly.canvas)
        mparams = replace(cfg.motif, base_area=base_area)

        def make(k):
            c = level1.member_of[k]
            return build_motif(k, layouts[k], c, len(communities[k]), mparams, level1.exemplar_of[c])

        motifs = _fan_out(make, list(range(len(communities))), cfg.workers)

    with run.stage("assembly"):
        edges = aggregate_edges(g, partition)
        gparams = replace(cfg.assembly, seed=derive_seed(seed, len(communities)))
        anchors, canvas = global_motif_layout(motifs, edges, gparams)
        if tuple(canvas) != tuple(cfg.assembly.canvas):
            report.warnings.append(f"canvas grown to {canvas[0]:.0f}x{canvas[1]:.0f}")
        motifs = [m.placed(a) for m, a in zip(motifs, anchors)]
        edges = bundle_edges(edges, motifs, cfg.bundling)
    report.canvas = tuple(canvas)

    metadata = {
        "dataset": name or (os.path.basename(cfg.input) if cfg.input else "graph"),
        "seed": seed,
        "mode": cfg.mode,
        "node_radius": cfg.motif.node_radius,
        "params": cfg.snapshot(),
    }
    scene = MotifScene(tuple(motifs), tuple(edges), tuple(canvas), metadata)
    return scene, report


def _adamotif_layouts(run: _Run, communities, level1, level2) -> list[DecoratedLayout]:
    cfg = run.cfg
    reps = list(level1.exemplar_of)
    rep_positions: dict[int, dict] = {}
    supergraphs = []

    with run.stage("supergraphs"):

        def synth(c2):
            member_idx = [reps[i] for i in level2.members(c2)]
            sg = synthesize_supergraph([communities[r] for r in member_idx], cfg.alignment, keys=member_idx)
            return member_idx, sg

        synthesized = _fan_out(synth, list(range(level2.n_clusters)), cfg.workers)

    with run.stage("layout"):

        def lay(item):
            member_idx, sg = item
            params = replace(cfg.layout, seed=derive_seed(cfg.seed, min(member_idx)))
            return representative_layouts(sg, params)

        all_positions = _fan_out(lay, synthesized, cfg.workers)
        for (member_idx, sg), positions in zip(synthesized, all_positions):
            for r, pos in zip(member_idx, positions):
                rep_positions[r] = pos
            run.report.warnings.extend(sg.warnings)
            supergraphs.append(
                {
                    "members": member_idx,
                    "basis": member_idx[sg.basis],
                    "nodes": list(sg.graph.nodes),
                    "edges": [list(e) for e in sg.graph.edges],
                    "provenance": {str(r): prov for r, prov in zip(member_idx, sg.provenance)},
                }
            )
    run.dump("supergraphs", {"supergraphs": supergraphs})

    with run.stage("difference"):

        def decorate(k):
            r = level1.exemplar_of[level1.member_of[k]]
            rep = communities[r]
            if k == r:
                return DecoratedLayout.plain(rep_positions[r], rep.graph), None
            sim = align(rep, communities[k], cfg.alignment.rank, cfg.alignment.bandwidth)
            matching = match_nodes(sim, rep, communities[k], cfg.alignment.quantile_threshold)
            return difference_layout(communities[k], rep, rep_positions[r], matching), matching

        results = _fan_out(decorate, list(range(len(communities))), cfg.workers)

    matchings = [m for _, m in results if m is not None]
    if matchings:
        fractions = [len(m.pairs) / max(1, min(len(m.nodes_a), len(m.nodes_b))) for m in matchings]
        run.report.matching = {
            "alignments": len(matchings),
            "matched_pairs": sum(len(m.pairs) for m in matchings),
            "mean_matched_fraction": float(np.mean(fractions)),
        }
    else:
        run.report.matching = {"alignments": 0, "matched_pairs": 0, "mean_matched_fraction": 1.0}
    return [lay for lay, _ in results]


def _primitive_layouts(run: _Run, communities) -> list[DecoratedLayout]:
    cfg = run.cfg
    with run.stage("layout"):

        def lay(k):
            params = replace(cfg.layout, seed=derive_seed(cfg.seed, k))
            return DecoratedLayout.plain(force_layout(communities[k], params), communities[k].graph)

        return _fan_out(lay, list(range(len(communities))), cfg.workers)


def write_outputs(scene: MotifScene, report: RunReport, cfg: PipelineConfig) -> list[str]:
    """Write the rendered scene (and report) to the configured paths."""
    written = []
    if cfg.output:
        stem, ext = os.path.splitext(cfg.output)
        formats = ("svg", "json") if cfg.output_format == "both" else (cfg.output_format,)
        for fmt in formats:
            path = cfg.output if len(formats) == 1 else f"{stem}.{fmt}"
            with open(path, "wb") as fh:
                fh.write(render(scene, fmt, cfg.label_threshold))
            written.append(path)
    if cfg.report:
        with open(cfg.report, "w", encoding="utf-8") as fh:
            json.dump(report.to_dict(), fh, indent=1, sort_keys=True)
            fh.write("\n")
        written.append(cfg.report)
    return written


__all__ = [
    "AdaMotifError",
    "PipelineConfig",
    "RunReport",
    "derive_seed",
    "load_input",
    "run_pipeline",
    "write_outputs",
]
