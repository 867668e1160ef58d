#!/usr/bin/env python3
"""Regenerate the checked-in test fixtures deterministically.

Three corpora are produced:

* search corpus + instances_toy.jsonl + instances_oracle.jsonl: disjoint
  per-instance blocks so pools and ground truths are exact by construction.
* builder corpus: disjoint similarity families, one per construction rule,
  so every rejection rule fires at least once and a flat-scan oracle can
  recompute the outcome. Family layout (per-family bit regions /
  embedding axes keep retrieval strictly in-family):
    accept, query range low/high, all candidates dropped, zero ground
    truth, oversized ground truth, 70% ratio breach, >15 candidates.

Run from the repo root: python scripts/make_fixtures.py
"""

from __future__ import annotations

import argparse
import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from drugmcts.domain import (  # noqa: E402
    Fingerprint,
    InteractionRecord,
    LiteratureRef,
    Molecule,
    PhyschemProfile,
    PocketDescriptor,
    ProblemInstance,
    Protein,
    StructuralProfile,
    instance_to_obj,
    interaction_to_obj,
    molecule_to_obj,
    protein_to_obj,
    write_jsonl,
)

SMILES_POOL = (
    "CCO", "c1ccccc1O", "CC(=O)Oc1ccccc1C(=O)O", "CCN(CC)CC", "C1CCNCC1",
    "c1ccc2[nH]ccc2c1", "CC(C)Cc1ccc(cc1)C(C)C(=O)O", "OCC(O)CO",
    "Clc1ccccc1", "CC(N)C(=O)O", "c1ccncc1", "CCOC(=O)C", "CN1CCCC1",
)
GROUP_POOL = ("hydroxyl", "carboxylic acid", "amide", "amine", "ether", "halide", "aromatic ring")
SCAFFOLD_POOL = ("c1ccccc1", "c1ccncc1", "C1CCCCC1", "c1ccc2ccccc2c1", "")
INTERACTION_TYPE_POOL = ("hydrogen-bond", "hydrophobic", "pi-stacking", "salt-bridge")
RESIDUE_POOL = ("SER", "HIS", "ASP", "LYS", "TYR", "PHE", "GLU", "ARG", "LEU", "VAL")


def make_molecule(rng: random.Random, mol_id: str, fingerprint, embedding) -> Molecule:
    return Molecule(
        id=mol_id,
        smiles=rng.choice(SMILES_POOL),
        fingerprint=fingerprint,
        embedding=embedding,
        structural=StructuralProfile(
            chiral_center_count=rng.randint(0, 3),
            scaffold=rng.choice(SCAFFOLD_POOL),
            functional_groups=tuple(
                sorted(rng.sample(GROUP_POOL, rng.randint(1, 3)))
            ),
        ),
        physchem=PhyschemProfile(
            molecular_weight=round(rng.uniform(150.0, 480.0), 2),
            logp=round(rng.uniform(-2.0, 5.0), 2),
            psa=round(rng.uniform(20.0, 140.0), 2),
            hbd=rng.randint(0, 5),
            hba=rng.randint(0, 10),
            rotatable_bonds=rng.randint(0, 10),
            heavy_atoms=rng.randint(10, 40),
        ),
    )


def make_protein(rng: random.Random, protein_id: str) -> Protein:
    n_pockets = rng.choice((0, 1, 1, 2))
    pockets = []
    for p in range(n_pockets):
        residues = tuple(
            (rng.choice(RESIDUE_POOL), rng.randint(20, 400), rng.choice("AB"))
            for _ in range(rng.randint(1, 3))
        )
        pockets.append(
            PocketDescriptor(
                pocket_label=f"site{p + 1}",
                residues=residues,
                interaction_types=tuple(
                    sorted(rng.sample(INTERACTION_TYPE_POOL, rng.randint(0, 2)))
                ),
                geometry_notes=rng.choice((None, "shallow groove", "deep cleft")),
            )
        )
    n_refs = rng.choice((0, 1, 2))
    literature = tuple(
        LiteratureRef(
            source_id=str(rng.randint(10_000_000, 39_999_999)),
            title=f"Binding study {i + 1} for {protein_id}",
            abstract=f"Reported affinity data and pocket characterization for {protein_id}.",
        )
        for i in range(n_refs)
    )
    return Protein(
        id=protein_id,
        pdb_id=rng.choice((None, f"{rng.randint(1, 9)}{''.join(rng.choices('ABCDEFWXYZ', k=3))}")),
        name=f"target protein {protein_id}",
        pocket_type=rng.choice(("kinase hinge", "GPCR orthosteric", "nuclear receptor", "protease cleft")),
        pockets=tuple(pockets),
        literature=literature,
    )


def region_fingerprint(region: int, member: int, n_bits: int = 256) -> Fingerprint:
    """16 bits starting at 16*region, with one member-specific bit cleared."""
    start = 16 * region
    indices = [start + i for i in range(16) if i != member % 16]
    return Fingerprint.from_indices(indices, n_bits=n_bits)


def axis_embedding(axis: int, member: int, dim: int = 16, jitter_axis: int | None = None):
    vec = [0.0] * dim
    vec[axis] = 1.0
    if jitter_axis is not None:
        vec[jitter_axis] = 0.001 * (member + 1)
    return tuple(vec)


# ---------------------------------------------------------------------------
# Search corpus: one toy instance + ten oracle instances, disjoint blocks
# ---------------------------------------------------------------------------


def build_search_fixture(rng: random.Random):
    molecules, proteins, interactions, toy, oracle = [], [], [], [], []

    def add_block(prefix: str, block_index: int, gt_size: int):
        """One instance block: query, 5 candidates, 8 proteins."""
        query_id = f"{prefix}00"
        candidate_ids = [f"{prefix}{i:02d}" for i in range(1, 6)]
        protein_ids = [f"P{prefix}{i}" for i in range(1, 9)]
        link_pattern = [(0, 1), (1, 2), (3, 4), (4, 5, 6), (6, 7)]

        for offset, mol_id in enumerate([query_id] + candidate_ids):
            molecules.append(
                make_molecule(
                    rng, mol_id,
                    region_fingerprint(block_index % 16, offset),
                    axis_embedding(block_index % 16, offset, jitter_axis=(block_index + 1) % 16),
                )
            )
        for pid in protein_ids:
            proteins.append(make_protein(rng, pid))

        for cand, pattern in zip(candidate_ids, link_pattern):
            for p_index in pattern:
                interactions.append(InteractionRecord(cand, protein_ids[p_index], True))
        # Query links span the pool; the first gt_size of them are the truth.
        gt_indices = [0, 2, 7, 4, 6][:gt_size]
        for p_index in gt_indices:
            interactions.append(InteractionRecord(query_id, protein_ids[p_index], True))
        # One negative pair for index-soundness coverage.
        interactions.append(InteractionRecord(query_id, protein_ids[3], False))

        return ProblemInstance(
            query_molecule_id=query_id,
            candidate_molecule_ids=frozenset(candidate_ids),
            candidate_protein_ids=frozenset(protein_ids),
            ground_truth_protein_ids=frozenset(protein_ids[i] for i in gt_indices),
        )

    toy.append(add_block("MT", 0, gt_size=3))
    for j in range(10):
        oracle.append(add_block(f"MO{j}", j + 1, gt_size=(j % 5) + 1))
    return molecules, proteins, interactions, toy, oracle


# ---------------------------------------------------------------------------
# Builder corpus: eight similarity families, one construction rule each
# ---------------------------------------------------------------------------


def build_builder_fixture(rng: random.Random):
    molecules, proteins, interactions = [], [], []
    protein_count = 0

    def new_proteins(n: int) -> list:
        nonlocal protein_count
        ids = [f"E{protein_count + i:03d}" for i in range(n)]
        protein_count += n
        for pid in ids:
            proteins.append(make_protein(rng, pid))
        return ids

    def family(prefix: str, region: int, axis: int, size: int):
        """size molecules sharing a fingerprint region and an embedding axis."""
        ids = [f"{prefix}{i:02d}" for i in range(size)]
        for member, mol_id in enumerate(ids):
            molecules.append(
                make_molecule(
                    rng, mol_id,
                    region_fingerprint(region, member),
                    axis_embedding(axis, member, jitter_axis=15),
                )
            )
        return ids

    def link(mol_id: str, protein_ids):
        for pid in protein_ids:
            interactions.append(InteractionRecord(mol_id, pid, True))

    # accept: query has 2 proteins, both inside the candidate pool of 6.
    ids = family("FA", 0, 0, 11)
    pool = new_proteins(6)
    link(ids[0], [pool[0], pool[1]])
    for i, mol_id in enumerate(ids[1:]):
        link(mol_id, [pool[i % 6], pool[(i + 1) % 6], pool[(i + 2) % 6]])

    # query range low / high: 1 and 11 interacting proteins.
    ids = family("FB", 1, 1, 11)
    pool = new_proteins(13)
    link(ids[0], [pool[0]])
    link(ids[1], pool[2:13])
    for i, mol_id in enumerate(ids[2:]):
        link(mol_id, [pool[i % 4], pool[(i + 1) % 4]])

    # no candidates: every neighbor has 1 or 5 proteins, outside [2, 4].
    ids = family("FC", 2, 2, 11)
    pool = new_proteins(7)
    link(ids[0], [pool[0], pool[1]])
    for i, mol_id in enumerate(ids[1:]):
        if i % 2 == 0:
            link(mol_id, [pool[2]])
        else:
            link(mol_id, [pool[2], pool[3], pool[4], pool[5], pool[6]])

    # zero ground truth: query proteins never appear in the candidate pool.
    ids = family("FD", 3, 3, 11)
    own = new_proteins(2)
    pool = new_proteins(5)
    link(ids[0], own)
    for i, mol_id in enumerate(ids[1:]):
        link(mol_id, [pool[i % 5], pool[(i + 1) % 5]])

    # oversized ground truth: all 6 query proteins are in the pool.
    ids = family("FE", 4, 4, 11)
    pool = new_proteins(9)
    link(ids[0], pool[:6])
    for i, mol_id in enumerate(ids[1:]):
        link(mol_id, [pool[i % 9], pool[(i + 1) % 9], pool[(i + 2) % 9]])

    # ratio breach: |GT|=3 against a pool of exactly 4 (3 > 2.8).
    ids = family("FF", 5, 5, 11)
    pool = new_proteins(4)
    link(ids[0], [pool[0], pool[1], pool[2]])
    for i, mol_id in enumerate(ids[1:]):
        link(mol_id, [pool[i % 4], pool[(i + 1) % 4]])

    # too many candidates: disjoint fingerprint and embedding crowds of 10.
    tanimoto_crowd = family("FGT", 6, 7, 10)
    cosine_crowd = family("FGC", 7, 6, 10)
    query_id = "FGQ00"
    molecules.append(
        make_molecule(rng, query_id, region_fingerprint(6, 15), axis_embedding(6, 15, jitter_axis=15))
    )
    pool = new_proteins(8)
    link(query_id, [pool[0], pool[1]])
    for i, mol_id in enumerate(tanimoto_crowd + cosine_crowd):
        link(mol_id, [pool[i % 8], pool[(i + 1) % 8]])

    return molecules, proteins, interactions


def write_corpus(out_dir: Path, stem: str, molecules, proteins, interactions):
    write_jsonl(out_dir / f"{stem}_molecules.jsonl", (molecule_to_obj(m) for m in molecules))
    write_jsonl(out_dir / f"{stem}_proteins.jsonl", (protein_to_obj(p) for p in proteins))
    write_jsonl(out_dir / f"{stem}_interactions.jsonl", (interaction_to_obj(r) for r in interactions))


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--out", default=str(Path(__file__).resolve().parent.parent / "tests" / "fixtures")
    )
    args = parser.parse_args()
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    rng = random.Random(20250801)
    molecules, proteins, interactions, toy, oracle = build_search_fixture(rng)
    write_corpus(out_dir, "search", molecules, proteins, interactions)
    write_jsonl(out_dir / "instances_toy.jsonl", (instance_to_obj(i) for i in toy))
    write_jsonl(out_dir / "instances_oracle.jsonl", (instance_to_obj(i) for i in oracle))

    molecules, proteins, interactions = build_builder_fixture(rng)
    write_corpus(out_dir, "builder", molecules, proteins, interactions)
    print(f"fixtures written to {out_dir}")


if __name__ == "__main__":
    main()
