"""Batch verification over the catalog, conjecture searches, reports.

Runs are pure functions of (config, catalog): every random draw is seeded
from the config seed, and every dossier carries the instance files inline
so a hit can be replayed.  Searches never assert the open conjectures;
they tally evidence and dossier any would-be counterexample.
"""

from __future__ import annotations

import csv
import functools
import io
import json
import time
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from .algebra import StateFunctional, random_state
from .catalog import (random_permutation_action, random_quantum_action,
                      standard_actions)
from .coaction import CoAction, verify_coaction
from .envelope import envelope
from .errors import SizeGuardExceeded
from .fileio import coaction_to_dicts
from .isometry import (check_D, check_D_commutant, check_injectivity,
                       check_lip1_universal, check_lip_p_state,
                       check_lip_p_universal, check_theorem_main,
                       check_winf_universal, KappaConventionMismatch)
from .metric import random_metric_space
from .quantum_group import verify_quantum_group

# strongest first; every earlier condition must imply every later one
CONDITION_ORDER = ["D", "main", "Lip_inf", "Lip_3", "Lip_2", "Lip_1"]


@dataclass
class SearchConfig:
    kind: str = "catalog"            # catalog | sublevel | span
    n_range: Sequence[int] = (3, 4)
    metric_model: str = "shortest-path-graph"
    catalog: Optional[List[str]] = None   # entry names; None = all
    random_actions: int = 0
    state_samples: int = 10
    p_list: Sequence = (1, 2, 3, "inf")
    seed: int = 0
    time_budget: Optional[float] = None   # seconds; soft, between instances
    jobs: int = 1
    out: Optional[str] = None

    @staticmethod
    def from_dict(doc: dict) -> "SearchConfig":
        known = {f for f in SearchConfig.__dataclass_fields__}
        return SearchConfig(**{k: v for k, v in doc.items() if k in known})


@dataclass
class RunReport:
    kind: str
    config: dict
    instances: List[dict] = field(default_factory=list)
    implication_matrix: Dict[str, dict] = field(default_factory=dict)
    dossiers: List[dict] = field(default_factory=list)
    timing: Dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "config": self.config,
                "instances": self.instances,
                "implication_matrix": self.implication_matrix,
                "dossiers": self.dossiers, "timing": self.timing}

    @staticmethod
    def from_dict(doc: dict) -> "RunReport":
        return RunReport(kind=doc["kind"], config=doc["config"],
                         instances=doc["instances"],
                         implication_matrix=doc["implication_matrix"],
                         dossiers=doc["dossiers"], timing=doc["timing"])


# ---------------------------------------------------------------------------
# instance descriptors (picklable, replayable)


def instance_descriptors(config: SearchConfig) -> List[dict]:
    names = None if config.catalog is None else set(config.catalog)
    out = []
    for entry in standard_actions():
        if names is None or entry.name in names:
            out.append({"source": "catalog", "name": entry.name})
    for k in range(config.random_actions):
        seed = config.seed * 100003 + k
        if k % 3 == 2:
            out.append({"source": "random-quantum", "seed": seed})
        else:
            n_lo, n_hi = min(config.n_range), max(config.n_range)
            out.append({"source": "random-perm", "seed": seed,
                        "n": n_lo + (k % (n_hi - n_lo + 1)),
                        "model": config.metric_model})
    return out


def build_instance(desc: dict) -> CoAction:
    if desc["source"] == "catalog":
        for entry in standard_actions():
            if entry.name == desc["name"]:
                return entry.action
        raise KeyError(f"no catalog entry named {desc['name']!r}")
    if desc["source"] == "random-perm":
        space = random_metric_space(desc["n"], desc["seed"], desc["model"])
        return random_permutation_action(space, desc["seed"])
    if desc["source"] == "random-quantum":
        return random_quantum_action(desc["seed"])
    raise KeyError(f"unknown instance source {desc['source']!r}")


# ---------------------------------------------------------------------------
# per-instance verification


def _condition_flags(action: CoAction, p_list, tol: float) -> dict:
    """All universal verdicts; None with a guard note if an exact procedure
    hit its size guard (never conflated with a sampled pass)."""
    flags: Dict[str, Optional[bool]] = {}
    guards = []

    def run(tag, fn):
        try:
            flags[tag] = bool(fn().holds)
        except SizeGuardExceeded:
            flags[tag] = None
            guards.append(tag)

    run("D", lambda: check_D(action, tol))
    run("main", lambda: check_theorem_main(action, tol))
    run("Lip_inf", lambda: check_winf_universal(action, tol))
    for p in p_list:
        if p in ("inf", float("inf")):
            continue
        if p == 1:
            run("Lip_1", lambda: check_lip1_universal(action, tol))
        else:
            run(f"Lip_{p}", lambda p=p: check_lip_p_universal(action, p, tol))
    return {"flags": flags, "guards": guards}


def verify_instance(desc: dict, p_list=(1, 2, 3, "inf"), state_samples: int = 10,
                    tol: float = 1e-9, deep: bool = True) -> dict:
    """Everything the verification run records about one action."""
    t0 = time.time()
    action = build_instance(desc)
    rec: dict = {"descriptor": desc,
           "name": desc.get("name") or action.name}
    rec["quantum_group_residual"] = verify_quantum_group(action.group).worst()
    rec["coaction_residual"] = verify_coaction(action).worst()
    cond = _condition_flags(action, p_list, tol)
    rec["conditions"] = cond["flags"]
    rec["guards"] = cond["guards"]
    try:
        commutant = check_D_commutant(action, tol)
        rec["conditions"]["D_commutant"] = bool(commutant.holds)
    except KappaConventionMismatch:
        rec["conditions"]["D_commutant"] = None
        rec["guards"].append("D_commutant:kappa-convention")
    rec["injective"] = bool(check_injectivity(action))
    if deep:
        env = envelope(action, tol=tol)
        rec["envelope"] = {"dimension": env.dimension,
                           "iterations": env.iterations,
                           "killed_blocks": sorted(env.ideal.included_blocks)}
    # sampled per-state consistency
    sampled = {f"Lip_{p}": True for p in p_list}
    worst_state_margin = None
    for k in range(state_samples):
        psi = random_state(action.group.algebra, desc.get("seed", 0) * 977 + k)
        for p in p_list:
            v = check_lip_p_state(action, psi, float("inf") if p == "inf" else p,
                                  tol=max(tol, 1e-8))
            if not v.holds:
                sampled[f"Lip_{p}"] = False
                m = v.witness["margin"]
                if worst_state_margin is None or m > worst_state_margin:
                    worst_state_margin = m
    rec["sampled_states_hold"] = sampled
    rec["sampled_worst_margin"] = worst_state_margin
    # universal-holds => sampled-holds (tolerance slack allowed)
    rec["state_consistency"] = all(
        not (rec["conditions"].get(key) is True) or held
        for key, held in sampled.items())
    rec["seconds"] = time.time() - t0
    return rec


def implication_tallies(instances: List[dict]) -> Dict[str, dict]:
    """Counts per condition and per ordered implication; 'violations' lists
    (instance, stronger, weaker) triples where the tower failed."""
    held = {c: 0 for c in CONDITION_ORDER}
    failed = {c: 0 for c in CONDITION_ORDER}
    undecided = {c: 0 for c in CONDITION_ORDER}
    violations = []
    pattern_counts: Dict[str, int] = {}
    for rec in instances:
        flags = rec.get("conditions", {})
        pat = "".join("T" if flags.get(c) is True else
                      "F" if flags.get(c) is False else "?"
                      for c in CONDITION_ORDER)
        pattern_counts[pat] = pattern_counts.get(pat, 0) + 1
        for c in CONDITION_ORDER:
            v = flags.get(c)
            if v is True:
                held[c] += 1
            elif v is False:
                failed[c] += 1
            else:
                undecided[c] += 1
        for i, strong in enumerate(CONDITION_ORDER):
            for weak in CONDITION_ORDER[i + 1:]:
                if flags.get(strong) is True and flags.get(weak) is False:
                    violations.append({"instance": rec.get("name", "?"),
                                       "stronger": strong, "weaker": weak})
    return {"held": held, "failed": failed, "undecided": undecided,
            "patterns": pattern_counts, "violations": violations}


# ---------------------------------------------------------------------------
# the three run kinds


def _run_instances(config: SearchConfig, worker, collect) -> RunReport:
    report = RunReport(kind=config.kind, config=asdict(config))
    descs = instance_descriptors(config)
    t0 = time.time()
    skipped = 0
    if config.jobs > 1:
        import concurrent.futures as cf
        with cf.ProcessPoolExecutor(max_workers=config.jobs) as pool:
            for rec in pool.map(worker, descs):
                collect(report, rec)
    else:
        for desc in descs:
            if config.time_budget and time.time() - t0 > config.time_budget:
                skipped += 1
                continue
            collect(report, worker(desc))
    report.timing["seconds"] = time.time() - t0
    report.timing["instances"] = len(report.instances)
    report.timing["skipped_by_budget"] = skipped
    return report


def run_catalog_verification(config: SearchConfig) -> RunReport:
    worker = functools.partial(verify_instance, p_list=tuple(config.p_list),
                               state_samples=config.state_samples)

    def collect(report, rec):
        report.instances.append(rec)

    report = _run_instances(config, worker, collect)
    report.implication_matrix = implication_tallies(report.instances)
    return report


def _sublevel_worker_record(desc: dict) -> dict:
    action = build_instance(desc)
    rec = {"descriptor": desc, "name": desc.get("name") or action.name}
    try:
        rec["Lip_inf"] = bool(check_winf_universal(action).holds)
        rec["D"] = bool(check_D(action).holds)
    except SizeGuardExceeded:
        rec["Lip_inf"] = rec["D"] = None
        rec["guard"] = True
    rec["hit"] = rec["Lip_inf"] is True and rec["D"] is False
    return rec


def search_conjecture_sublevel(config: SearchConfig) -> RunReport:
    """Look for sublevel-coupling-universal actions that fail (D); a hit
    would be a counterexample dossier, never an assertion."""
    def collect(report, rec):
        report.instances.append(rec)
        if rec.get("hit"):
            action = build_instance(rec["descriptor"])
            group_doc, space_doc, act_doc = coaction_to_dicts(action)
            act_doc["group"], act_doc["space"] = group_doc, space_doc
            report.dossiers.append({"descriptor": rec["descriptor"],
                                    "coaction": act_doc})

    report = _run_instances(config, _sublevel_worker_record, collect)
    tallies = {"checked": len(report.instances),
               "hits": sum(1 for r in report.instances if r.get("hit")),
               "holds_both": sum(1 for r in report.instances
                                 if r.get("Lip_inf") and r.get("D")),
               "fails_both": sum(1 for r in report.instances
                                 if r.get("Lip_inf") is False and r.get("D") is False)}
    report.implication_matrix = tallies
    return report


def _span_record(desc: dict, p, state_samples: int, seed: int) -> dict:
    action = build_instance(desc)
    alg = action.group.algebra
    rec = {"descriptor": desc, "name": desc.get("name") or action.name,
           "p": p}
    pool: List[StateFunctional] = [action.group.counit_state()]
    from .quantum_group import haar_state
    from .algebra import extreme_state
    pool.append(haar_state(action.group).state)
    for k, b in enumerate(alg.blocks):
        if b == 1:  # block characters; classical points when A = C(G)
            pool.append(extreme_state(alg, k, np.array([1.0 + 0j])))
    for k in range(state_samples):
        pool.append(random_state(alg, seed + 7919 * k))
    iso_states = [psi for psi in pool
                  if check_lip_p_state(action, psi, p, tol=1e-8).holds]
    rec["sampled"] = len(pool)
    rec["isometric"] = len(iso_states)
    # span dimension trace under Gram-Schmidt
    basis: List[np.ndarray] = []
    trace = []
    for psi in iso_states:
        v = psi.as_vector()
        for b in basis:
            v = v - (b.conj() @ v) * b
        if np.linalg.norm(v) > 1e-9:
            basis.append(v / np.linalg.norm(v))
        trace.append(len(basis))
    rec["span_dimension_trace"] = trace

    def in_span(vec) -> bool:
        v = vec.copy()
        for b in basis:
            v = v - (b.conj() @ v) * b
        return bool(np.linalg.norm(v) <= 1e-8)

    # Whenever some isometric state has every inequality strict (the Haar
    # state of a transitive action, say), a whole neighborhood of it is
    # isometric and the span is everything, so the pool's own failing
    # states already sit inside the span.  Test those first.
    hits = []
    tested = 0
    for idx, psi in enumerate(pool):
        if in_span(psi.as_vector()):
            tested += 1
            if not check_lip_p_state(action, psi, p, tol=1e-8).holds:
                hits.append({"kind": "pool-state", "index": idx,
                             "state": _state_doc(psi)})
    # and probe beyond the convex hull: signed combinations of isometric
    # states repaired to states by mixing toward the barycenter
    if basis and len(iso_states) >= 2:
        rng = np.random.default_rng(seed)
        mean_vec = sum(s.as_vector() for s in iso_states) / len(iso_states)
        for _ in range(state_samples):
            coeffs = rng.normal(size=len(iso_states))
            vec = sum(c * s.as_vector() for c, s in zip(coeffs, iso_states))
            cand = StateFunctional.from_vector(alg, vec)
            tr = sum(float(np.trace(r).real) for r in cand.densities)
            if abs(tr) < 1e-9:
                continue
            vec = vec / tr
            lam = min(float(np.linalg.eigvalsh((r + r.conj().T) / 2)[0])
                      for r in StateFunctional.from_vector(alg, vec).densities)
            if lam < 0:
                # mix toward the barycenter until positive
                mean_lam = min(float(np.linalg.eigvalsh(r)[0]) for r in
                               StateFunctional.from_vector(alg, mean_vec).densities)
                if mean_lam <= 1e-12:
                    continue
                t = (-lam + 1e-9) / (mean_lam - lam + 1e-9)
                vec = (1 - t) * vec + t * mean_vec
            cand = StateFunctional.from_vector(alg, vec)
            if not cand.is_state(tol=1e-7):
                continue
            tested += 1
            if not check_lip_p_state(action, cand, p, tol=1e-8).holds:
                hits.append({"kind": "combination",
                             "state": _state_doc(cand)})
    rec["in_span_tested"] = tested
    rec["in_span_failures"] = len(hits)
    rec["hit"] = bool(hits)
    rec["failing_in_span_states"] = hits
    return rec


def _state_doc(psi: StateFunctional) -> dict:
    from .fileio import state_to_dict
    return state_to_dict(psi)


def search_conjecture_span(config: SearchConfig) -> RunReport:
    """Estimate the span of the (Lip_p)-isometric states by sampling, then
    test states inside the span; failures would contradict the span
    conjecture and are dossiered."""
    p = next((p for p in config.p_list if p != "inf"), 1)
    worker = functools.partial(_span_record, p=p,
                               state_samples=config.state_samples,
                               seed=config.seed)

    def collect(report, rec):
        report.instances.append(rec)
        if rec.get("hit"):
            action = build_instance(rec["descriptor"])
            group_doc, space_doc, act_doc = coaction_to_dicts(action)
            act_doc["group"], act_doc["space"] = group_doc, space_doc
            report.dossiers.append({"descriptor": rec["descriptor"],
                                    "coaction": act_doc,
                                    "p": rec["p"],
                                    "failures": rec["in_span_failures"],
                                    "failing_states": rec["failing_in_span_states"]})

    report = _run_instances(config, worker, collect)
    report.implication_matrix = {
        "checked": len(report.instances),
        "hits": sum(1 for r in report.instances if r.get("hit"))}
    return report


def run_search(config: SearchConfig) -> RunReport:
    if config.kind == "catalog":
        return run_catalog_verification(config)
    if config.kind == "sublevel":
        return search_conjecture_sublevel(config)
    if config.kind == "span":
        return search_conjecture_span(config)
    raise ValueError(f"unknown search kind {config.kind!r}")


# ---------------------------------------------------------------------------
# report emission


def emit_report(report: RunReport, fmt: str = "json",
                path: Optional[str] = None) -> str:
    if fmt == "json":
        text = json.dumps(report.to_dict(), indent=1, default=_json_default)
    elif fmt == "csv":
        text = _emit_csv(report)
    elif fmt == "markdown":
        text = _emit_markdown(report)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    return text


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, frozenset):
        return sorted(obj)
    raise TypeError(f"not JSON serializable: {type(obj)}")


def _emit_csv(report: RunReport) -> str:
    buf = io.StringIO()
    rows = report.instances
    cols = ["name"]
    for r in rows:
        for key in r:
            if key not in cols and not isinstance(r[key], (dict, list)):
                cols.append(key)
    for c in CONDITION_ORDER:
        cols.append(f"cond_{c}")
    writer = csv.writer(buf)
    writer.writerow(cols)
    for r in rows:
        row = []
        for c in cols:
            if c.startswith("cond_"):
                row.append(r.get("conditions", {}).get(c[5:], ""))
            else:
                row.append(r.get(c, ""))
        writer.writerow(row)
    return buf.getvalue()


def _emit_markdown(report: RunReport) -> str:
    lines = [f"# {report.kind} run", "",
             f"instances: {len(report.instances)}  "
             f"time: {report.timing.get('seconds', 0):.1f}s", ""]
    if report.kind == "catalog" and report.implication_matrix:
        m = report.implication_matrix
        lines.append("## Condition tallies")
        lines.append("")
        lines.append("| condition | held | failed | undecided |")
        lines.append("|---|---|---|---|")
        for c in CONDITION_ORDER:
            lines.append(f"| {c} | {m['held'][c]} | {m['failed'][c]} "
                         f"| {m['undecided'][c]} |")
        lines.append("")
        lines.append("## Verdict patterns (" + ", ".join(CONDITION_ORDER) + ")")
        lines.append("")
        lines.append("| pattern | count |")
        lines.append("|---|---|")
        for pat, cnt in sorted(m["patterns"].items()):
            lines.append(f"| `{pat}` | {cnt} |")
        lines.append("")
        lines.append(f"tower violations: {len(m['violations'])}")
    else:
        lines.append("## Summary")
        lines.append("")
        lines.append("| key | value |")
        lines.append("|---|---|")
        for k, v in report.implication_matrix.items():
            lines.append(f"| {k} | {v} |")
    if report.dossiers:
        lines.append("")
        lines.append(f"## Dossiers: {len(report.dossiers)}")
    lines.append("")
    return "\n".join(lines)
