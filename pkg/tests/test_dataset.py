from collections import Counter

from drugmcts.dataset import (
    BuilderRules,
    REJECTION_RULES,
    baseline_to_obj,
    build_baseline_dataset,
    build_instances,
)
from drugmcts.domain import dumps_canonical, instance_to_obj, validate_instance
from drugmcts.retrieval import cosine, tanimoto

from factories import corpus, molecule, protein


def flat_scan_oracle(c, rules=BuilderRules()):
    """Independent reimplementation of the construction rules as one flat scan."""
    accepted = []
    rejected = Counter({rule: 0 for rule in REJECTION_RULES})
    for query_id in sorted(c.molecules):
        query = c.molecule(query_id)
        query_proteins = c.mol_to_proteins.get(query_id, frozenset())
        if not rules.min_query_proteins <= len(query_proteins) <= rules.max_query_proteins:
            rejected["query_protein_range"] += 1
            continue
        tan, cos = [], []
        for other in c.molecules.values():
            if other.id == query_id:
                continue
            if query.fingerprint is not None and other.fingerprint is not None:
                tan.append((-tanimoto(query.fingerprint, other.fingerprint), other.id))
            if query.embedding is not None and other.embedding is not None:
                cos.append((-cosine(query.embedding, other.embedding), other.id))
        tan.sort()
        cos.sort()
        raw = {mid for _, mid in tan[:10]} | {mid for _, mid in cos[:10]}
        kept = {
            mid for mid in raw
            if rules.min_candidate_proteins
            <= len(c.mol_to_proteins.get(mid, frozenset()))
            <= rules.max_candidate_proteins
        }
        if not kept:
            rejected["no_candidates"] += 1
            continue
        if len(kept) > rules.max_candidates:
            rejected["too_many_candidates"] += 1
            continue
        pool = set()
        for mid in kept:
            pool |= c.mol_to_proteins.get(mid, frozenset())
        ground_truth = pool & query_proteins
        if not 1 <= len(ground_truth) <= 5:
            rejected["gt_size"] += 1
            continue
        if 10 * len(ground_truth) > 7 * len(pool):
            rejected["gt_ratio"] += 1
            continue
        accepted.append((query_id, frozenset(kept), frozenset(pool), frozenset(ground_truth)))
    return accepted, rejected


# ---------------------------------------------------------------------------
# Rule-by-rule behavior on tiny corpora
# ---------------------------------------------------------------------------


def _tiny_corpus(query_links, neighbor_links):
    """Query Q plus neighbors N1.. with explicit protein links."""
    n = len(neighbor_links)
    molecules = [molecule("Q", bits=[1, 2], embedding=[1.0, 0.0])]
    molecules += [
        molecule(f"N{i+1}", bits=[1, 2, 10 + i], embedding=[1.0, 0.01 * (i + 1)])
        for i in range(n)
    ]
    protein_ids = sorted({p for links in [query_links] + neighbor_links for p in links})
    proteins = [protein(pid) for pid in protein_ids]
    links = [("Q", p) for p in query_links]
    for i, plist in enumerate(neighbor_links):
        links += [(f"N{i+1}", p) for p in plist]
    return corpus(molecules, proteins, links)


def test_query_with_one_protein_rejected():
    c = _tiny_corpus(["P1"], [["P1", "P2"], ["P2", "P3"]])
    instances, report = build_instances(c)
    assert all(inst.query_molecule_id != "Q" for inst in instances)
    assert report.rejected["query_protein_range"] >= 1


def test_gt_ratio_rejection():
    # Q has 3 proteins, all in a pool of exactly 4: 3 > 0.7 * 4.
    c = _tiny_corpus(
        ["P1", "P2", "P3"],
        [["P1", "P2"], ["P2", "P3"], ["P3", "P4"]],
    )
    instances, report = build_instances(c)
    assert all(inst.query_molecule_id != "Q" for inst in instances)
    assert report.rejected["gt_ratio"] >= 1


def test_candidates_outside_protein_band_are_dropped():
    # N3 has five proteins, too promiscuous to stay a candidate.
    c = _tiny_corpus(
        ["P1", "P2"],
        [["P1", "P2"], ["P2", "P3"], ["P1", "P2", "P3", "P4", "P5"]],
    )
    instances, report = build_instances(c)
    accepted = {inst.query_molecule_id: inst for inst in instances}
    assert "Q" in accepted
    assert "N3" not in accepted["Q"].candidate_molecule_ids
    assert report.dropped_candidates >= 1


# ---------------------------------------------------------------------------
# Engineered fixture vs the flat-scan oracle
# ---------------------------------------------------------------------------


def test_builder_matches_flat_scan_oracle(builder_corpus):
    instances, report = build_instances(builder_corpus)
    expected_accepted, expected_rejected = flat_scan_oracle(builder_corpus)

    got = [
        (i.query_molecule_id, i.candidate_molecule_ids, i.candidate_protein_ids, i.ground_truth_protein_ids)
        for i in instances
    ]
    assert got == expected_accepted
    assert report.rejected == dict(expected_rejected)
    assert report.accepted == len(expected_accepted)


def test_builder_fixture_fires_every_rule(builder_corpus):
    _, report = build_instances(builder_corpus)
    for rule in REJECTION_RULES:
        assert report.rejected[rule] >= 1, f"rule {rule} never fired"
    assert report.accepted >= 1


def test_rejection_accounting_sums(builder_corpus):
    _, report = build_instances(builder_corpus)
    assert report.accepted + sum(report.rejected.values()) == report.queries
    assert report.queries == len(builder_corpus.molecules)


def test_emitted_instances_validate_cleanly(builder_corpus):
    instances, _ = build_instances(builder_corpus)
    for inst in instances:
        assert validate_instance(inst, builder_corpus) == []


def test_builder_deterministic(builder_corpus):
    first, _ = build_instances(builder_corpus)
    second, _ = build_instances(builder_corpus)
    lines1 = [dumps_canonical(instance_to_obj(i)) for i in first]
    lines2 = [dumps_canonical(instance_to_obj(i)) for i in second]
    assert lines1 == lines2


def test_tighter_candidate_cap_monotone(builder_corpus):
    wide, _ = build_instances(builder_corpus, BuilderRules(max_candidates=15))
    narrow, _ = build_instances(builder_corpus, BuilderRules(max_candidates=5))
    assert len(narrow) <= len(wide)


# ---------------------------------------------------------------------------
# Baseline projection
# ---------------------------------------------------------------------------


def test_baseline_projection(builder_corpus):
    instances, _ = build_instances(builder_corpus)
    baseline = build_baseline_dataset(instances)
    assert len(baseline) == len(instances)  # 1:1 mapping
    for inst, base in zip(instances, baseline):
        assert base.ground_truth_protein_ids == inst.ground_truth_protein_ids
        assert base.candidate_protein_ids == inst.candidate_protein_ids
        obj = baseline_to_obj(base)
        assert "candidate_molecule_ids" not in obj
