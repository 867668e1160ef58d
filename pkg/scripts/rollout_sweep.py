#!/usr/bin/env python3
"""Rollout-budget sweep: recall and token cost as the budget grows.

Runs the search once per rollout budget over an instance file, evaluates
both Top-K policies, and writes one CSV row per (budget, policy). With the
default mock backend this is a smoke-scale version of the rollout/token
trade-off study; point --backend http at a real endpoint for the full one.

Example:
    python scripts/rollout_sweep.py --out /tmp/sweep.csv --rollouts 1 2 4 8 12
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import tempfile
from pathlib import Path

REPO_ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO_ROOT / "src"))

from drugmcts.cli import main as cli_main  # noqa: E402
from drugmcts.domain import load_instances  # noqa: E402
from drugmcts.evaluation import evaluate_run  # noqa: E402
from drugmcts.mcts import result_from_obj  # noqa: E402

FIXTURES = REPO_ROOT / "tests" / "fixtures"


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--molecules", default=str(FIXTURES / "search_molecules.jsonl"))
    parser.add_argument("--proteins", default=str(FIXTURES / "search_proteins.jsonl"))
    parser.add_argument("--interactions", default=str(FIXTURES / "search_interactions.jsonl"))
    parser.add_argument("--instances", default=str(FIXTURES / "instances_oracle.jsonl"))
    parser.add_argument("--rollouts", type=int, nargs="+", default=[1, 2, 4, 8, 12, 24])
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--backend", default="mock")
    parser.add_argument("--base-url")
    parser.add_argument("--model")
    parser.add_argument("--jobs", type=int, default=1)
    parser.add_argument("--out", default="rollout_sweep.csv")
    args = parser.parse_args()

    instances = load_instances(args.instances)
    rows = []
    with tempfile.TemporaryDirectory(prefix="sweep_") as workdir:
        for budget in args.rollouts:
            out_dir = Path(workdir) / f"rollouts_{budget}"
            search_args = [
                "search",
                "--molecules", args.molecules,
                "--proteins", args.proteins,
                "--interactions", args.interactions,
                "--instances", args.instances,
                "--out-dir", str(out_dir),
                "--backend", args.backend,
                "--seed", str(args.seed),
                "--rollouts", str(budget),
                "--jobs", str(args.jobs),
            ]
            if args.base_url:
                search_args += ["--base-url", args.base_url]
            if args.model:
                search_args += ["--model", args.model]
            code = cli_main(search_args)
            if code != 0:
                raise SystemExit(f"search failed for rollouts={budget} (exit {code})")
            results = [
                result_from_obj(json.loads(path.read_text(encoding="utf-8")))
                for path in sorted(out_dir.glob("result_*.json"))
            ]
            for mode in ("gt", "gt_plus_3"):
                report = evaluate_run(results, instances, mode)
                rows.append(
                    {
                        "rollouts": budget,
                        "topk_mode": mode,
                        "mean_recall": report.mean_recall,
                        "total_tokens": report.total_tokens,
                        "instances": len(report.rows),
                    }
                )
                print(
                    f"rollouts={budget:3d} {mode:9s} recall={report.mean_recall:.4f} "
                    f"tokens={report.total_tokens}"
                )

    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(
            fh, fieldnames=["rollouts", "topk_mode", "mean_recall", "total_tokens", "instances"]
        )
        writer.writeheader()
        writer.writerows(rows)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
