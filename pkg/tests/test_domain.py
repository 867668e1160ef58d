import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from drugmcts.domain import (
    Fingerprint,
    ProblemInstance,
    SchemaError,
    SearchConfig,
    dumps_canonical,
    instance_from_obj,
    instance_to_obj,
    interaction_to_obj,
    load_corpus,
    molecule_from_obj,
    molecule_to_obj,
    protein_from_obj,
    protein_to_obj,
    validate_instance,
    write_jsonl,
)

from factories import corpus, literature_ref, molecule, pocket, protein


# ---------------------------------------------------------------------------
# Fingerprints
# ---------------------------------------------------------------------------


def test_fingerprint_hex_is_msb_first():
    fp = Fingerprint.from_indices([0], n_bits=8)
    assert fp.to_hex() == "80"
    assert Fingerprint.from_indices([7], n_bits=8).to_hex() == "01"


def test_fingerprint_round_trip():
    fp = Fingerprint.from_indices([0, 5, 17, 31], n_bits=32)
    again = Fingerprint.from_hex(fp.to_hex(), 32)
    assert again == fp
    assert again.indices() == [0, 5, 17, 31]
    assert again.popcount() == 4


def test_fingerprint_rejects_bad_width():
    with pytest.raises(ValueError):
        Fingerprint.from_hex("ff", 16)
    with pytest.raises(ValueError):
        Fingerprint(n_bits=7, bits=0)


# ---------------------------------------------------------------------------
# load_corpus
# ---------------------------------------------------------------------------


def _write_corpus(tmp_path, molecules, proteins, interactions):
    write_jsonl(tmp_path / "molecules.jsonl", (molecule_to_obj(m) for m in molecules))
    write_jsonl(tmp_path / "proteins.jsonl", (protein_to_obj(p) for p in proteins))
    write_jsonl(tmp_path / "interactions.jsonl", interactions)
    return (
        tmp_path / "molecules.jsonl",
        tmp_path / "proteins.jsonl",
        tmp_path / "interactions.jsonl",
    )


def test_load_corpus_builds_indices(tmp_path):
    molecules = [molecule("M1", bits=[1]), molecule("M2", bits=[2]), molecule("M3", bits=[3])]
    proteins = [protein("P1"), protein("P2")]
    interactions = [
        {"molecule_id": "M1", "protein_id": "P1", "label": True},
        {"molecule_id": "M1", "protein_id": "P2", "label": True},
        {"molecule_id": "M2", "protein_id": "P1", "label": True},
        {"molecule_id": "M3", "protein_id": "P2", "label": True},
    ]
    paths = _write_corpus(tmp_path, molecules, proteins, interactions)
    loaded = load_corpus(*paths)

    # Brute-force oracle: rescan the interaction records directly.
    expected = {}
    for rec in interactions:
        expected.setdefault(rec["molecule_id"], set()).add(rec["protein_id"])
    assert {m: set(loaded.proteins_of(m)) for m in loaded.molecules} == {
        "M1": expected["M1"], "M2": expected["M2"], "M3": expected["M3"],
    }
    assert sorted(len(loaded.proteins_of(m)) for m in loaded.molecules) == [1, 1, 2]
    assert loaded.molecules_of("P1") == frozenset({"M1", "M2"})


def test_load_corpus_empty_interactions(tmp_path):
    paths = _write_corpus(tmp_path, [molecule("M1", bits=[1])], [protein("P1")], [])
    loaded = load_corpus(*paths)
    assert loaded.proteins_of("M1") == frozenset()
    assert loaded.molecules_of("P1") == frozenset()


def test_load_corpus_dangling_interaction(tmp_path):
    paths = _write_corpus(
        tmp_path,
        [molecule("M1", bits=[1])],
        [protein("P1")],
        [{"molecule_id": "GHOST", "protein_id": "P1", "label": True}],
    )
    with pytest.raises(SchemaError, match="GHOST"):
        load_corpus(*paths)


def test_load_corpus_reports_line_numbers(tmp_path):
    molecules_path = tmp_path / "molecules.jsonl"
    molecules_path.write_text(
        dumps_canonical(molecule_to_obj(molecule("M1", bits=[1]))) + "\n" + "{broken\n",
        encoding="utf-8",
    )
    write_jsonl(tmp_path / "proteins.jsonl", [])
    write_jsonl(tmp_path / "interactions.jsonl", [])
    with pytest.raises(SchemaError, match=r"molecules\.jsonl:2"):
        load_corpus(molecules_path, tmp_path / "proteins.jsonl", tmp_path / "interactions.jsonl")


def test_load_corpus_rejects_mixed_widths(tmp_path):
    paths = _write_corpus(
        tmp_path,
        [molecule("M1", bits=[1], n_bits=32), molecule("M2", bits=[1], n_bits=64)],
        [protein("P1")],
        [],
    )
    with pytest.raises(SchemaError, match="width"):
        load_corpus(*paths)


def test_load_corpus_rejects_mixed_embedding_dims(tmp_path):
    paths = _write_corpus(
        tmp_path,
        [molecule("M1", embedding=[1.0, 0.0]), molecule("M2", embedding=[1.0, 0.0, 0.0])],
        [protein("P1")],
        [],
    )
    with pytest.raises(SchemaError, match="dimension"):
        load_corpus(*paths)


def test_unknown_fields_strict_vs_lenient(tmp_path):
    obj = molecule_to_obj(molecule("M1", bits=[1]))
    obj["surprise"] = 1
    write_jsonl(tmp_path / "molecules.jsonl", [obj])
    write_jsonl(tmp_path / "proteins.jsonl", [])
    write_jsonl(tmp_path / "interactions.jsonl", [])
    with pytest.raises(SchemaError, match="surprise"):
        load_corpus(tmp_path / "molecules.jsonl", tmp_path / "proteins.jsonl", tmp_path / "interactions.jsonl")
    loaded = load_corpus(
        tmp_path / "molecules.jsonl", tmp_path / "proteins.jsonl", tmp_path / "interactions.jsonl",
        strict=False,
    )
    assert "M1" in loaded.molecules


def test_duplicate_molecule_id_rejected(tmp_path):
    paths = _write_corpus(tmp_path, [molecule("M1", bits=[1]), molecule("M1", bits=[2])], [], [])
    with pytest.raises(SchemaError, match="duplicate"):
        load_corpus(*paths)


# ---------------------------------------------------------------------------
# validate_instance
# ---------------------------------------------------------------------------


@pytest.fixture()
def small_corpus():
    molecules = [molecule(f"M{i}", bits=[i]) for i in range(1, 8)]
    proteins = [protein(f"P{i}") for i in range(1, 11)]
    links = [("M1", "P1"), ("M2", "P2")]
    return corpus(molecules, proteins, links)


def test_validate_gt_size_rule(small_corpus):
    inst = ProblemInstance(
        query_molecule_id="M1",
        candidate_molecule_ids=frozenset({"M2"}),
        candidate_protein_ids=frozenset({f"P{i}" for i in range(1, 11)}),
        ground_truth_protein_ids=frozenset({f"P{i}" for i in range(1, 7)}),
    )
    violations = validate_instance(inst, small_corpus)
    assert any("ground-truth size 6" in v for v in violations)


def test_validate_seventy_percent_rule(small_corpus):
    inst = ProblemInstance(
        query_molecule_id="M1",
        candidate_molecule_ids=frozenset({"M2"}),
        candidate_protein_ids=frozenset({"P1", "P2", "P3", "P4"}),
        ground_truth_protein_ids=frozenset({"P1", "P2", "P3"}),
    )
    violations = validate_instance(inst, small_corpus)
    assert any("70%" in v for v in violations)  # 3 > 0.7 * 4 = 2.8


def test_validate_seventy_percent_boundary_passes(small_corpus):
    # 7 of 10 sits exactly on the limit and must NOT violate.
    inst = ProblemInstance(
        query_molecule_id="M1",
        candidate_molecule_ids=frozenset({"M2"}),
        candidate_protein_ids=frozenset({f"P{i}" for i in range(1, 11)}),
        ground_truth_protein_ids=frozenset({f"P{i}" for i in range(1, 8)}),
    )
    violations = validate_instance(inst, small_corpus)
    assert not any("70%" in v for v in violations)


def test_validate_clean_instance(small_corpus):
    inst = ProblemInstance(
        query_molecule_id="M1",
        candidate_molecule_ids=frozenset({"M2", "M3"}),
        candidate_protein_ids=frozenset({"P1", "P2", "P3"}),
        ground_truth_protein_ids=frozenset({"P1", "P2"}),
    )
    assert validate_instance(inst, small_corpus) == []


def test_validate_query_in_candidates(small_corpus):
    inst = ProblemInstance(
        query_molecule_id="M1",
        candidate_molecule_ids=frozenset({"M1", "M2"}),
        candidate_protein_ids=frozenset({"P1", "P2", "P3"}),
        ground_truth_protein_ids=frozenset({"P1"}),
    )
    assert any("own candidate set" in v for v in validate_instance(inst, small_corpus))


# ---------------------------------------------------------------------------
# Round-trip serialization (property)
# ---------------------------------------------------------------------------

_ids = st.text(alphabet="ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789", min_size=1, max_size=8)
_floats = st.floats(allow_nan=False, allow_infinity=False, width=64)


@st.composite
def molecule_objs(draw):
    n_bits = 32
    bits = draw(st.lists(st.integers(min_value=0, max_value=n_bits - 1), max_size=8, unique=True))
    has_fp = draw(st.booleans())
    has_emb = draw(st.booleans())
    emb = draw(st.lists(_floats, min_size=2, max_size=4)) if has_emb else None
    mol = molecule(
        draw(_ids),
        bits=bits if has_fp else None,
        embedding=emb,
        n_bits=n_bits,
        smiles=draw(st.text(min_size=1, max_size=20).filter(str.strip)),
    )
    return molecule_to_obj(mol)


@given(molecule_objs())
@settings(max_examples=100)
def test_molecule_round_trip_bytes(obj):
    line = dumps_canonical(obj)
    parsed = molecule_from_obj(json.loads(line))
    assert dumps_canonical(molecule_to_obj(parsed)) == line


@given(
    st.lists(_ids, min_size=1, max_size=5, unique=True),
    st.lists(_ids, min_size=1, max_size=5, unique=True),
    _ids,
)
def test_instance_round_trip_bytes(cands, prots, qid):
    inst = ProblemInstance(
        query_molecule_id=qid,
        candidate_molecule_ids=frozenset(cands),
        candidate_protein_ids=frozenset(prots),
        ground_truth_protein_ids=frozenset(prots[:1]),
    )
    line = dumps_canonical(instance_to_obj(inst))
    assert dumps_canonical(instance_to_obj(instance_from_obj(json.loads(line)))) == line


def test_protein_round_trip_bytes():
    p = protein(
        "P1",
        pockets=[pocket(), pocket(label="site2", interaction_types=())],
        literature=[literature_ref()],
    )
    line = dumps_canonical(protein_to_obj(p))
    assert dumps_canonical(protein_to_obj(protein_from_obj(json.loads(line)))) == line


def test_fixture_files_round_trip(fixtures_dir):
    for name in ("search_molecules.jsonl", "search_proteins.jsonl", "search_interactions.jsonl"):
        for line in (fixtures_dir / name).read_text(encoding="utf-8").splitlines():
            obj = json.loads(line)
            if "smiles" in obj:
                again = molecule_to_obj(molecule_from_obj(obj))
            elif "pocket_type" in obj:
                again = protein_to_obj(protein_from_obj(obj))
            else:
                from drugmcts.domain import interaction_from_obj

                again = interaction_to_obj(interaction_from_obj(obj))
            assert dumps_canonical(again) == line


# ---------------------------------------------------------------------------
# Index soundness (property on fixtures)
# ---------------------------------------------------------------------------


def test_index_soundness(search_corpus):
    positive = {
        (r.molecule_id, r.protein_id) for r in search_corpus.interactions if r.label
    }
    for mol_id, protein_id in positive:
        assert protein_id in search_corpus.proteins_of(mol_id)
        assert mol_id in search_corpus.molecules_of(protein_id)
    # No spurious members beyond the rescan.
    for mol_id in search_corpus.molecules:
        assert search_corpus.proteins_of(mol_id) == frozenset(
            p for m, p in positive if m == mol_id
        )


# ---------------------------------------------------------------------------
# SearchConfig
# ---------------------------------------------------------------------------


def test_search_config_round_trip():
    cfg = SearchConfig(rollouts=24, seed=7, reward_mode="relative_only")
    again = SearchConfig.from_obj(cfg.to_obj())
    assert again == cfg


def test_search_config_rejects_end_branching():
    from drugmcts.domain import Action

    with pytest.raises(ValueError):
        SearchConfig(branching={Action.END: 2})


def test_search_config_rejects_unknown_fields():
    with pytest.raises(SchemaError):
        SearchConfig.from_obj({"rollout": 5})
