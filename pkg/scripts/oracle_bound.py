#!/usr/bin/env python3
"""Brute-force recall upper bound for an oracle agent, per instance file.

An agent that names only ground-truth proteins can surface at most
min(rollouts, |GT|) distinct answers, so recall at K=|GT| is capped at
min(1, min(rollouts, |GT|) / |GT|). Prints the mean bound over all
instances. Deliberately flat and dependency-free: it reads the JSONL
itself rather than importing the package under test.
"""

import argparse
import json


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--instances", required=True)
    parser.add_argument("--rollouts", type=int, default=12)
    args = parser.parse_args()

    bounds = []
    with open(args.instances, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            record = json.loads(line)
            gt_size = len(record["ground_truth_protein_ids"])
            if gt_size == 0:
                raise SystemExit("instance with empty ground truth")
            bounds.append(min(1.0, min(args.rollouts, gt_size) / gt_size))
    if not bounds:
        raise SystemExit("no instances found")
    print(sum(bounds) / len(bounds))


if __name__ == "__main__":
    main()
