"""Command-line entry point: validate, build-dataset, search, evaluate.

Exit codes: 0 success, 1 validation/eval failure, 2 IO or config error,
3 backend failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import dataset as dataset_mod
from .actions import build_single_shot_prompt, root_context
from .domain import (
    Action,
    Corpus,
    SchemaError,
    SearchConfig,
    instance_to_obj,
    load_corpus,
    load_instances,
    validate_instance,
    write_jsonl,
)
from .evaluation import evaluate_run
from .mcts import (
    MctsSearch,
    RankedAnswer,
    SearchResult,
    check_tree_invariants,
    result_from_obj,
    result_to_obj,
)
from .runtime import (
    AgentRuntime,
    BackendError,
    HttpBackend,
    MockBackend,
    SamplingRequest,
    ScriptedBackend,
    TemplateLibrary,
    render_prompt,
    request_fingerprint,
    parse_id_list,
    sample,
)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_IO = 2
EXIT_BACKEND = 3


def derive_instance_seed(base_seed: int, query_id: str) -> int:
    """Stable per-instance seed so parallel runs stay reproducible."""
    digest = hashlib.sha256(f"{base_seed}:{query_id}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


# ---------------------------------------------------------------------------
# Single-shot (no-search) modes
# ---------------------------------------------------------------------------


def single_shot_search(instance, corpus: Corpus, runtime: AgentRuntime, config: SearchConfig, enhanced: bool):
    """One decision-agent call over the full candidate pool; no tree.

    The reply's id mentions, in order, become the ranking (reciprocal-rank
    scores keep the ranked_answers sort invariant).
    Returns (SearchResult, trace_records).
    """
    ctx = root_context(instance, corpus)
    template_id, bindings = build_single_shot_prompt(ctx, corpus, config, enhanced)
    messages = render_prompt(template_id, bindings, runtime.library)
    request = SamplingRequest(
        messages=tuple(messages), temperature=config.temperature, n=1, max_tokens=config.max_tokens
    )
    response = sample(runtime.backend, request)
    text = response.texts[0]
    picked = parse_id_list(text, ctx.candidate_proteins)
    ranked = tuple(
        RankedAnswer(protein_id=pid, aggregate_score=1.0 / (rank + 1), support_count=1)
        for rank, pid in enumerate(picked)
    )
    result = SearchResult(
        query_molecule_id=instance.query_molecule_id,
        rollout_outcomes=(),
        ranked_answers=ranked,
        total_tokens=response.prompt_tokens + response.completion_tokens,
    )
    trace_records = [
        {
            "rollout": None,
            "kind": "single_shot",
            "action": template_id,
            "template_id": template_id,
            "prompt_sha256": request_fingerprint(request),
            "raw_texts": [text],
            "parsed": picked,
            "fallback": not picked,
            "prompt_tokens": response.prompt_tokens,
            "completion_tokens": response.completion_tokens,
            "node_ids": [],
        }
    ]
    return result, trace_records


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_validate(args) -> int:
    corpus = load_corpus(args.molecules, args.proteins, args.interactions, strict=not args.lenient)
    print(
        f"corpus: {len(corpus.molecules)} molecules, {len(corpus.proteins)} proteins, "
        f"{len(corpus.interactions)} interactions"
    )
    clean = True
    if args.instances:
        instances = load_instances(args.instances, strict=not args.lenient)
        bad = 0
        for inst in instances:
            violations = validate_instance(inst, corpus)
            if violations:
                bad += 1
                clean = False
                for violation in violations:
                    print(f"instance {inst.query_molecule_id}: {violation}")
        print(f"instances: {len(instances)} checked, {bad} with violations")
    return EXIT_OK if clean else EXIT_FAILED


def cmd_build_dataset(args) -> int:
    corpus = load_corpus(args.molecules, args.proteins, args.interactions, strict=not args.lenient)
    rules = dataset_mod.BuilderRules(
        min_query_proteins=args.min_query_proteins,
        max_query_proteins=args.max_query_proteins,
        min_candidate_proteins=args.min_candidate_proteins,
        max_candidate_proteins=args.max_candidate_proteins,
        max_candidates=args.max_candidates,
    )
    instances, report = dataset_mod.build_instances(corpus, rules)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_jsonl(out_dir / "instances.jsonl", (instance_to_obj(i) for i in instances))
    if args.dump_hits:
        from .retrieval import TOP_K_PER_METRIC, ranked_hits_to_objs, top_k

        def hit_records():
            for query_id in sorted(corpus.molecules):
                query = corpus.molecule(query_id)
                for metric in ("tanimoto", "cosine"):
                    hits = top_k(query, corpus, metric, TOP_K_PER_METRIC)
                    yield from ranked_hits_to_objs(query_id, hits)

        write_jsonl(out_dir / "ranked_hits.jsonl", hit_records())
    report_path = out_dir / "build_report.json"
    report_path.write_text(json.dumps(report.to_obj(), indent=2) + "\n", encoding="utf-8")
    if args.baseline:
        baseline = dataset_mod.build_baseline_dataset(instances)
        write_jsonl(out_dir / "baseline.jsonl", (dataset_mod.baseline_to_obj(b) for b in baseline))
    print(
        f"accepted {report.accepted} of {report.queries} queries "
        f"(rejections: {json.dumps(report.rejected, sort_keys=True)})"
    )
    return EXIT_OK


def _make_backend(args, instance_seed: int):
    if args.backend == "mock":
        return MockBackend(seed=instance_seed)
    if args.backend == "scripted":
        if not args.scripted_replies:
            raise SchemaError("--scripted-replies is required with --backend scripted")
        replies = json.loads(Path(args.scripted_replies).read_text(encoding="utf-8"))
        if not isinstance(replies, list):
            raise SchemaError("--scripted-replies must contain a JSON array of strings")
        return ScriptedBackend(replies)
    if args.backend == "http":
        if not args.base_url or not args.model:
            raise SchemaError("--base-url and --model are required with --backend http")
        return HttpBackend(base_url=args.base_url, model=args.model, max_retries=args.max_retries)
    raise SchemaError(f"unknown backend {args.backend!r}")


def _build_config(args) -> SearchConfig:
    obj = {}
    if args.config:
        obj = json.loads(Path(args.config).read_text(encoding="utf-8"))
        if not isinstance(obj, dict):
            raise SchemaError("config file must contain a JSON object")
    config = SearchConfig.from_obj(obj)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.rollouts is not None:
        overrides["rollouts"] = args.rollouts
    if args.temperature is not None:
        overrides["temperature"] = args.temperature
    if args.k_samples is not None:
        overrides["k_samples"] = args.k_samples
    if args.exploration_c is not None:
        overrides["exploration_c"] = args.exploration_c
    if args.max_tokens is not None:
        overrides["max_tokens"] = args.max_tokens
    if args.no_molecule_analysis:
        overrides["enable_molecule_analysis"] = False
    if args.no_interaction_analysis:
        overrides["enable_interaction_analysis"] = False
    if args.reward is not None:
        overrides["reward_mode"] = args.reward.replace("-", "_")
    if args.selection_pool is not None:
        overrides["selection_pool"] = args.selection_pool
    if args.ps_branching is not None:
        branching = dict(config.branching)
        branching[Action.PROTEIN_SELECTION] = args.ps_branching
        overrides["branching"] = branching
    return config.with_overrides(**overrides) if overrides else config


def _search_one(instance, corpus, args, config, library):
    instance_seed = derive_instance_seed(config.seed, instance.query_molecule_id)
    backend = _make_backend(args, instance_seed)
    runtime = AgentRuntime(backend=backend, library=library)
    instance_config = config.with_overrides(seed=instance_seed)
    out_dir = Path(args.out_dir)
    qid = instance.query_molecule_id

    trace_records = []
    try:
        if args.mode == "mcts":
            engine = MctsSearch(instance, corpus, runtime, instance_config)
            try:
                result = engine.run()
            finally:
                trace_records = engine.trace.records
                snapshot = engine.tree.snapshot()
                (out_dir / f"tree_{qid}.json").write_text(
                    json.dumps(snapshot, indent=2) + "\n", encoding="utf-8"
                )
            problems = check_tree_invariants(engine.tree)
            if problems:
                raise AssertionError(f"tree invariants violated for {qid}: {problems}")
        else:
            result, trace_records = single_shot_search(
                instance, corpus, runtime, instance_config, enhanced=(args.mode == "enhanced")
            )
    finally:
        write_jsonl(out_dir / f"trace_{qid}.jsonl", trace_records)

    (out_dir / f"result_{qid}.json").write_text(
        json.dumps(result_to_obj(result), indent=2) + "\n", encoding="utf-8"
    )
    return result


def cmd_search(args) -> int:
    corpus = load_corpus(args.molecules, args.proteins, args.interactions, strict=not args.lenient)
    instances = load_instances(args.instances, strict=not args.lenient)
    config = _build_config(args)
    library = TemplateLibrary(args.templates_dir) if args.templates_dir else None
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    if args.jobs > 1 and args.backend == "scripted":
        raise SchemaError("scripted backend replies are ordered; use --jobs 1")

    failures = []
    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            futures = {
                pool.submit(_search_one, inst, corpus, args, config, library): inst
                for inst in instances
            }
            for future, inst in futures.items():
                try:
                    future.result()
                except BackendError as exc:
                    failures.append((inst.query_molecule_id, exc))
    else:
        for inst in instances:
            try:
                _search_one(inst, corpus, args, config, library)
            except BackendError as exc:
                failures.append((inst.query_molecule_id, exc))

    done = len(instances) - len(failures)
    print(f"searched {done}/{len(instances)} instances -> {out_dir}")
    if failures:
        for qid, exc in failures:
            print(f"backend failure on {qid}: {exc}", file=sys.stderr)
        return EXIT_BACKEND
    return EXIT_OK


def cmd_evaluate(args) -> int:
    results_dir = Path(args.results_dir)
    if not results_dir.is_dir():
        raise SchemaError(f"results directory not found: {results_dir}")
    results = []
    for path in sorted(results_dir.glob("result_*.json")):
        results.append(result_from_obj(json.loads(path.read_text(encoding="utf-8"))))
    instances = load_instances(args.instances)
    mode = "gt" if args.topk == "gt" else "gt_plus_3"
    try:
        report = evaluate_run(results, instances, mode)
    except ValueError as exc:
        print(f"evaluation failed: {exc}", file=sys.stderr)
        return EXIT_FAILED
    print(f"mean recall ({args.topk}): {report.mean_recall:.4f} over {len(report.rows)} instances")
    if args.report:
        Path(args.report).write_text(
            json.dumps(report.to_obj(), indent=2) + "\n", encoding="utf-8"
        )
    if args.csv:
        Path(args.csv).write_text(report.to_csv(), encoding="utf-8")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def _add_corpus_args(parser):
    parser.add_argument("--molecules", required=True)
    parser.add_argument("--proteins", required=True)
    parser.add_argument("--interactions", required=True)
    parser.add_argument("--lenient", action="store_true", help="warn on unknown fields instead of rejecting")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="drugmcts", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="check corpus files and instance invariants")
    _add_corpus_args(p_validate)
    p_validate.add_argument("--instances")
    p_validate.set_defaults(func=cmd_validate)

    p_build = sub.add_parser("build-dataset", help="construct problem instances from a corpus")
    _add_corpus_args(p_build)
    p_build.add_argument("--out-dir", required=True)
    p_build.add_argument("--baseline", action="store_true", help="also emit the candidate-free projection")
    p_build.add_argument("--dump-hits", action="store_true", help="write per-query ranked-hit debug records")
    p_build.add_argument("--min-query-proteins", type=int, default=2)
    p_build.add_argument("--max-query-proteins", type=int, default=10)
    p_build.add_argument("--min-candidate-proteins", type=int, default=2)
    p_build.add_argument("--max-candidate-proteins", type=int, default=4)
    p_build.add_argument("--max-candidates", type=int, default=15)
    p_build.set_defaults(func=cmd_build_dataset)

    p_search = sub.add_parser("search", help="run the search (or a single-shot mode) per instance")
    _add_corpus_args(p_search)
    p_search.add_argument("--instances", required=True)
    p_search.add_argument("--out-dir", required=True)
    p_search.add_argument("--config", help="JSON file mirroring the search configuration")
    p_search.add_argument("--backend", choices=["mock", "scripted", "http"], default="mock")
    p_search.add_argument("--scripted-replies", help="JSON array of canned replies")
    p_search.add_argument("--base-url")
    p_search.add_argument("--model")
    p_search.add_argument("--max-retries", type=int, default=3)
    p_search.add_argument("--mode", choices=["mcts", "baseline", "enhanced"], default="mcts")
    p_search.add_argument("--seed", type=int)
    p_search.add_argument("--rollouts", type=int)
    p_search.add_argument("--temperature", type=float)
    p_search.add_argument("--k-samples", type=int)
    p_search.add_argument("--exploration-c", type=float)
    p_search.add_argument("--max-tokens", type=int)
    p_search.add_argument("--no-molecule-analysis", action="store_true")
    p_search.add_argument("--no-interaction-analysis", action="store_true")
    p_search.add_argument("--reward", choices=["combined", "relative-only"])
    p_search.add_argument("--ps-branching", type=int, help="children per protein-selection expansion")
    p_search.add_argument("--selection-pool", choices=["reference", "candidates"])
    p_search.add_argument("--templates-dir")
    p_search.add_argument("--jobs", type=int, default=1)
    p_search.set_defaults(func=cmd_search)

    p_eval = sub.add_parser("evaluate", help="compute recall over persisted results")
    p_eval.add_argument("--results-dir", required=True)
    p_eval.add_argument("--instances", required=True)
    p_eval.add_argument("--topk", choices=["gt", "gt+3"], default="gt")
    p_eval.add_argument("--report", help="write the report JSON here")
    p_eval.add_argument("--csv", help="write the per-instance CSV here")
    p_eval.set_defaults(func=cmd_evaluate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SchemaError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except BackendError as exc:
        print(f"backend error: {exc}", file=sys.stderr)
        return EXIT_BACKEND


if __name__ == "__main__":
    sys.exit(main())
