"""Shared domain types, invariants, and JSONL (de)serialization.

Every record type round-trips byte-identically through its canonical JSON
form: fixed key order, compact separators, sets as sorted arrays,
fingerprints as lowercase hex (most-significant nibble first).
"""

from __future__ import annotations

import enum
import json
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterator, Optional

logger = logging.getLogger(__name__)

DEFAULT_N_BITS = 2048


class SchemaError(Exception):
    """A record violates the on-disk schema. Carries file/line when known."""

    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None):
        self.path = path
        self.line = line
        prefix = ""
        if path is not None:
            prefix = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(prefix + message)


class Action(str, enum.Enum):
    """Node kinds along one search path, in pipeline order."""

    ROOT = "root"
    MOLECULE_ANALYSIS = "molecule_analysis"
    MOLECULE_SELECTION = "molecule_selection"
    INTERACTION_ANALYSIS = "interaction_analysis"
    PROTEIN_SELECTION = "protein_selection"
    END = "end"


# ---------------------------------------------------------------------------
# Fingerprints
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Fingerprint:
    """Fixed-width bitvector. Bit 0 is the most significant bit of the hex form."""

    n_bits: int
    bits: int

    def __post_init__(self):
        if self.n_bits <= 0 or self.n_bits % 4 != 0:
            raise ValueError(f"n_bits must be a positive multiple of 4, got {self.n_bits}")
        if self.bits < 0 or self.bits >> self.n_bits:
            raise ValueError("bit pattern wider than n_bits")

    @classmethod
    def from_hex(cls, hex_str: str, n_bits: int) -> "Fingerprint":
        if len(hex_str) != n_bits // 4:
            raise ValueError(
                f"hex length {len(hex_str)} does not encode {n_bits} bits"
            )
        return cls(n_bits=n_bits, bits=int(hex_str, 16) if hex_str else 0)

    @classmethod
    def from_indices(cls, indices, n_bits: int = DEFAULT_N_BITS) -> "Fingerprint":
        bits = 0
        for i in indices:
            if not 0 <= i < n_bits:
                raise ValueError(f"bit index {i} out of range for {n_bits} bits")
            bits |= 1 << (n_bits - 1 - i)
        return cls(n_bits=n_bits, bits=bits)

    def to_hex(self) -> str:
        return format(self.bits, f"0{self.n_bits // 4}x")

    def popcount(self) -> int:
        return self.bits.bit_count()

    def indices(self) -> list[int]:
        return [i for i in range(self.n_bits) if self.bits >> (self.n_bits - 1 - i) & 1]


# ---------------------------------------------------------------------------
# Molecules and proteins
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StructuralProfile:
    chiral_center_count: int
    scaffold: str
    functional_groups: tuple[str, ...]

    def __post_init__(self):
        if self.chiral_center_count < 0:
            raise ValueError("chiral_center_count must be >= 0")
        if any(not g for g in self.functional_groups):
            raise ValueError("functional group labels must be nonempty")


@dataclass(frozen=True)
class PhyschemProfile:
    molecular_weight: float
    logp: float
    psa: float
    hbd: int
    hba: int
    rotatable_bonds: int
    heavy_atoms: int

    def __post_init__(self):
        if self.molecular_weight <= 0:
            raise ValueError("molecular_weight must be > 0")
        if self.psa < 0:
            raise ValueError("psa must be >= 0")
        for name in ("hbd", "hba", "rotatable_bonds", "heavy_atoms"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")


@dataclass(frozen=True)
class Molecule:
    id: str
    smiles: str
    fingerprint: Optional[Fingerprint]
    embedding: Optional[tuple[float, ...]]
    structural: StructuralProfile
    physchem: PhyschemProfile

    def __post_init__(self):
        if not self.id:
            raise ValueError("molecule id must be nonempty")
        if not self.smiles:
            raise ValueError(f"molecule {self.id}: smiles must be nonempty")


@dataclass(frozen=True)
class PocketDescriptor:
    pocket_label: str
    residues: tuple[tuple[str, int, str], ...]
    interaction_types: tuple[str, ...]
    geometry_notes: Optional[str] = None

    def __post_init__(self):
        if not self.residues:
            raise ValueError("pocket descriptor requires at least one residue")


@dataclass(frozen=True)
class LiteratureRef:
    source_id: str
    title: str
    abstract: str

    def __post_init__(self):
        if not self.source_id:
            raise ValueError("literature source_id must be nonempty")


@dataclass(frozen=True)
class Protein:
    id: str
    pdb_id: Optional[str]
    name: str
    pocket_type: str
    pockets: tuple[PocketDescriptor, ...]
    literature: tuple[LiteratureRef, ...]

    def __post_init__(self):
        if not self.id:
            raise ValueError("protein id must be nonempty")


@dataclass(frozen=True)
class InteractionRecord:
    molecule_id: str
    protein_id: str
    label: bool


@dataclass(frozen=True)
class ProblemInstance:
    query_molecule_id: str
    candidate_molecule_ids: frozenset[str]
    candidate_protein_ids: frozenset[str]
    ground_truth_protein_ids: frozenset[str]


# ---------------------------------------------------------------------------
# Search configuration
# ---------------------------------------------------------------------------

DEFAULT_BRANCHING = {
    Action.MOLECULE_ANALYSIS: 4,
    Action.MOLECULE_SELECTION: 4,
    Action.INTERACTION_ANALYSIS: 4,
    Action.PROTEIN_SELECTION: 1,
    Action.END: 1,
}

DEFAULT_AFFIRMATIVE = ("yes", "affirmative")
DEFAULT_NEGATIVE = ("no", "negative")


@dataclass(frozen=True)
class SearchConfig:
    """All knobs for one search run. Mirrors the JSON config file one-to-one."""

    rollouts: int = 12
    temperature: float = 0.8
    k_samples: int = 4
    exploration_c: float = 1.41421356
    branching: dict = field(default_factory=lambda: dict(DEFAULT_BRANCHING))
    seed: int = 0
    reward_mode: str = "combined"  # combined | relative_only
    enable_molecule_analysis: bool = True
    enable_interaction_analysis: bool = True
    selection_pool: str = "reference"  # reference | candidates
    topk_mode: str = "gt"  # gt | gt_plus_3
    literature_budget: int = 2
    batched_reward_samples: bool = True
    max_tokens: Optional[int] = None
    affirmative_lexicon: tuple[str, ...] = DEFAULT_AFFIRMATIVE
    negative_lexicon: tuple[str, ...] = DEFAULT_NEGATIVE

    def __post_init__(self):
        if self.rollouts < 1:
            raise ValueError("rollouts must be >= 1")
        if self.k_samples < 1:
            raise ValueError("k_samples must be >= 1")
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.exploration_c < 0:
            raise ValueError("exploration_c must be >= 0")
        if self.reward_mode not in ("combined", "relative_only"):
            raise ValueError(f"unknown reward_mode {self.reward_mode!r}")
        if self.selection_pool not in ("reference", "candidates"):
            raise ValueError(f"unknown selection_pool {self.selection_pool!r}")
        if self.topk_mode not in ("gt", "gt_plus_3"):
            raise ValueError(f"unknown topk_mode {self.topk_mode!r}")
        for action, width in self.branching.items():
            if width < 1:
                raise ValueError(f"branching[{action}] must be >= 1")
        if self.branching.get(Action.END, 1) != 1:
            raise ValueError("end nodes always branch exactly once")

    def branching_for(self, action: Action) -> int:
        return self.branching.get(action, DEFAULT_BRANCHING[action])

    def with_overrides(self, **kwargs) -> "SearchConfig":
        return replace(self, **kwargs)

    def to_obj(self) -> dict:
        return {
            "rollouts": self.rollouts,
            "temperature": self.temperature,
            "k_samples": self.k_samples,
            "exploration_c": self.exploration_c,
            "branching": {a.value: n for a, n in sorted(self.branching.items(), key=lambda kv: kv[0].value)},
            "seed": self.seed,
            "reward_mode": self.reward_mode,
            "enable_molecule_analysis": self.enable_molecule_analysis,
            "enable_interaction_analysis": self.enable_interaction_analysis,
            "selection_pool": self.selection_pool,
            "topk_mode": self.topk_mode,
            "literature_budget": self.literature_budget,
            "batched_reward_samples": self.batched_reward_samples,
            "max_tokens": self.max_tokens,
            "affirmative_lexicon": list(self.affirmative_lexicon),
            "negative_lexicon": list(self.negative_lexicon),
        }

    @classmethod
    def from_obj(cls, obj: dict) -> "SearchConfig":
        known = {
            "rollouts", "temperature", "k_samples", "exploration_c", "branching",
            "seed", "reward_mode", "enable_molecule_analysis", "enable_interaction_analysis",
            "selection_pool", "topk_mode", "literature_budget", "batched_reward_samples",
            "max_tokens", "affirmative_lexicon", "negative_lexicon",
        }
        unknown = set(obj) - known
        if unknown:
            raise SchemaError(f"unknown config fields: {sorted(unknown)}")
        kwargs = dict(obj)
        if "branching" in kwargs:
            kwargs["branching"] = {Action(a): int(n) for a, n in kwargs["branching"].items()}
        for key in ("affirmative_lexicon", "negative_lexicon"):
            if key in kwargs:
                kwargs[key] = tuple(kwargs[key])
        return cls(**kwargs)


# ---------------------------------------------------------------------------
# Canonical JSON encoding
# ---------------------------------------------------------------------------


def dumps_canonical(obj) -> str:
    """Compact JSON with the key order the *_to_obj builders established."""
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


def molecule_to_obj(m: Molecule) -> dict:
    return {
        "id": m.id,
        "smiles": m.smiles,
        "fingerprint": (
            {"n_bits": m.fingerprint.n_bits, "hex": m.fingerprint.to_hex()}
            if m.fingerprint is not None
            else None
        ),
        "embedding": list(m.embedding) if m.embedding is not None else None,
        "structural": {
            "chiral_center_count": m.structural.chiral_center_count,
            "scaffold": m.structural.scaffold,
            "functional_groups": list(m.structural.functional_groups),
        },
        "physchem": {
            "molecular_weight": m.physchem.molecular_weight,
            "logp": m.physchem.logp,
            "psa": m.physchem.psa,
            "hbd": m.physchem.hbd,
            "hba": m.physchem.hba,
            "rotatable_bonds": m.physchem.rotatable_bonds,
            "heavy_atoms": m.physchem.heavy_atoms,
        },
    }


_MOLECULE_FIELDS = {"id", "smiles", "fingerprint", "embedding", "structural", "physchem"}
_STRUCTURAL_FIELDS = {"chiral_center_count", "scaffold", "functional_groups"}
_PHYSCHEM_FIELDS = {"molecular_weight", "logp", "psa", "hbd", "hba", "rotatable_bonds", "heavy_atoms"}
_PROTEIN_FIELDS = {"id", "pdb_id", "name", "pocket_type", "pockets", "literature"}
_POCKET_FIELDS = {"pocket_label", "residues", "interaction_types", "geometry_notes"}
_LITERATURE_FIELDS = {"source_id", "title", "abstract"}
_INTERACTION_FIELDS = {"molecule_id", "protein_id", "label"}
_INSTANCE_FIELDS = {
    "query_molecule_id", "candidate_molecule_ids", "candidate_protein_ids", "ground_truth_protein_ids",
}


def _check_fields(obj: dict, allowed: set, what: str, strict: bool):
    unknown = set(obj) - allowed
    if unknown:
        if strict:
            raise SchemaError(f"{what}: unknown fields {sorted(unknown)}")
        logger.warning("%s: ignoring unknown fields %s", what, sorted(unknown))


def _req(obj: dict, key: str, what: str):
    if key not in obj:
        raise SchemaError(f"{what}: missing field {key!r}")
    return obj[key]


def molecule_from_obj(obj: dict, strict: bool = True) -> Molecule:
    _check_fields(obj, _MOLECULE_FIELDS, "molecule", strict)
    fp_obj = _req(obj, "fingerprint", "molecule")
    fingerprint = None
    if fp_obj is not None:
        _check_fields(fp_obj, {"n_bits", "hex"}, "fingerprint", strict)
        fingerprint = Fingerprint.from_hex(_req(fp_obj, "hex", "fingerprint"), int(_req(fp_obj, "n_bits", "fingerprint")))
    emb_obj = _req(obj, "embedding", "molecule")
    embedding = tuple(float(x) for x in emb_obj) if emb_obj is not None else None
    s = _req(obj, "structural", "molecule")
    _check_fields(s, _STRUCTURAL_FIELDS, "structural", strict)
    p = _req(obj, "physchem", "molecule")
    _check_fields(p, _PHYSCHEM_FIELDS, "physchem", strict)
    try:
        return Molecule(
            id=str(_req(obj, "id", "molecule")),
            smiles=str(_req(obj, "smiles", "molecule")),
            fingerprint=fingerprint,
            embedding=embedding,
            structural=StructuralProfile(
                chiral_center_count=int(_req(s, "chiral_center_count", "structural")),
                scaffold=str(_req(s, "scaffold", "structural")),
                functional_groups=tuple(str(g) for g in _req(s, "functional_groups", "structural")),
            ),
            physchem=PhyschemProfile(
                molecular_weight=float(_req(p, "molecular_weight", "physchem")),
                logp=float(_req(p, "logp", "physchem")),
                psa=float(_req(p, "psa", "physchem")),
                hbd=int(_req(p, "hbd", "physchem")),
                hba=int(_req(p, "hba", "physchem")),
                rotatable_bonds=int(_req(p, "rotatable_bonds", "physchem")),
                heavy_atoms=int(_req(p, "heavy_atoms", "physchem")),
            ),
        )
    except ValueError as exc:
        raise SchemaError(f"molecule: {exc}") from exc


def protein_to_obj(p: Protein) -> dict:
    return {
        "id": p.id,
        "pdb_id": p.pdb_id,
        "name": p.name,
        "pocket_type": p.pocket_type,
        "pockets": [
            {
                "pocket_label": pk.pocket_label,
                "residues": [[name, num, chain] for name, num, chain in pk.residues],
                "interaction_types": list(pk.interaction_types),
                "geometry_notes": pk.geometry_notes,
            }
            for pk in p.pockets
        ],
        "literature": [
            {"source_id": ref.source_id, "title": ref.title, "abstract": ref.abstract}
            for ref in p.literature
        ],
    }


def protein_from_obj(obj: dict, strict: bool = True) -> Protein:
    _check_fields(obj, _PROTEIN_FIELDS, "protein", strict)
    pockets = []
    for pk in _req(obj, "pockets", "protein"):
        _check_fields(pk, _POCKET_FIELDS, "pocket", strict)
        residues = tuple(
            (str(r[0]), int(r[1]), str(r[2])) for r in _req(pk, "residues", "pocket")
        )
        pockets.append(
            PocketDescriptor(
                pocket_label=str(_req(pk, "pocket_label", "pocket")),
                residues=residues,
                interaction_types=tuple(str(t) for t in _req(pk, "interaction_types", "pocket")),
                geometry_notes=pk.get("geometry_notes"),
            )
        )
    literature = []
    for ref in _req(obj, "literature", "protein"):
        _check_fields(ref, _LITERATURE_FIELDS, "literature", strict)
        literature.append(
            LiteratureRef(
                source_id=str(_req(ref, "source_id", "literature")),
                title=str(_req(ref, "title", "literature")),
                abstract=str(_req(ref, "abstract", "literature")),
            )
        )
    try:
        return Protein(
            id=str(_req(obj, "id", "protein")),
            pdb_id=obj.get("pdb_id"),
            name=str(_req(obj, "name", "protein")),
            pocket_type=str(_req(obj, "pocket_type", "protein")),
            pockets=tuple(pockets),
            literature=tuple(literature),
        )
    except ValueError as exc:
        raise SchemaError(f"protein: {exc}") from exc


def interaction_to_obj(r: InteractionRecord) -> dict:
    return {"molecule_id": r.molecule_id, "protein_id": r.protein_id, "label": r.label}


def interaction_from_obj(obj: dict, strict: bool = True) -> InteractionRecord:
    _check_fields(obj, _INTERACTION_FIELDS, "interaction", strict)
    label = _req(obj, "label", "interaction")
    if not isinstance(label, bool):
        raise SchemaError("interaction: label must be a boolean")
    return InteractionRecord(
        molecule_id=str(_req(obj, "molecule_id", "interaction")),
        protein_id=str(_req(obj, "protein_id", "interaction")),
        label=label,
    )


def instance_to_obj(inst: ProblemInstance) -> dict:
    return {
        "query_molecule_id": inst.query_molecule_id,
        "candidate_molecule_ids": sorted(inst.candidate_molecule_ids),
        "candidate_protein_ids": sorted(inst.candidate_protein_ids),
        "ground_truth_protein_ids": sorted(inst.ground_truth_protein_ids),
    }


def instance_from_obj(obj: dict, strict: bool = True) -> ProblemInstance:
    _check_fields(obj, _INSTANCE_FIELDS, "instance", strict)
    return ProblemInstance(
        query_molecule_id=str(_req(obj, "query_molecule_id", "instance")),
        candidate_molecule_ids=frozenset(_req(obj, "candidate_molecule_ids", "instance")),
        candidate_protein_ids=frozenset(_req(obj, "candidate_protein_ids", "instance")),
        ground_truth_protein_ids=frozenset(_req(obj, "ground_truth_protein_ids", "instance")),
    )


# ---------------------------------------------------------------------------
# JSONL files
# ---------------------------------------------------------------------------


def iter_jsonl(path) -> Iterator[tuple[int, dict]]:
    """Yield (line_number, parsed_object) for every nonblank line."""
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"invalid JSON: {exc.msg}", path=str(path), line=lineno) from exc
            if not isinstance(obj, dict):
                raise SchemaError("record must be a JSON object", path=str(path), line=lineno)
            yield lineno, obj


def write_jsonl(path, objs) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        for obj in objs:
            fh.write(dumps_canonical(obj) + "\n")


def load_instances(path, strict: bool = True) -> list[ProblemInstance]:
    instances = []
    for lineno, obj in iter_jsonl(path):
        try:
            instances.append(instance_from_obj(obj, strict=strict))
        except SchemaError as exc:
            raise SchemaError(str(exc), path=str(path), line=lineno) from exc
    return instances


def write_instances(path, instances) -> None:
    write_jsonl(path, (instance_to_obj(i) for i in instances))


# ---------------------------------------------------------------------------
# Corpus
# ---------------------------------------------------------------------------


@dataclass
class Corpus:
    """Immutable after load; cross-reference indices cover label=true pairs only."""

    molecules: dict
    proteins: dict
    interactions: list
    mol_to_proteins: dict
    protein_to_mols: dict
    n_bits: Optional[int]
    embedding_dim: Optional[int]

    def molecule(self, mol_id: str) -> Molecule:
        try:
            return self.molecules[mol_id]
        except KeyError:
            raise KeyError(f"unknown molecule id {mol_id!r}") from None

    def protein(self, protein_id: str) -> Protein:
        try:
            return self.proteins[protein_id]
        except KeyError:
            raise KeyError(f"unknown protein id {protein_id!r}") from None

    def proteins_of(self, mol_id: str) -> frozenset:
        if mol_id not in self.molecules:
            raise KeyError(f"unknown molecule id {mol_id!r}")
        return self.mol_to_proteins.get(mol_id, frozenset())

    def molecules_of(self, protein_id: str) -> frozenset:
        if protein_id not in self.proteins:
            raise KeyError(f"unknown protein id {protein_id!r}")
        return self.protein_to_mols.get(protein_id, frozenset())


def load_corpus(molecules_path, proteins_path, interactions_path, strict: bool = True) -> Corpus:
    """Load the three JSONL files and build cross-reference indices.

    Verifies id uniqueness, uniform fingerprint width and embedding
    dimension, and that interactions reference known ids.
    """
    molecules: dict = {}
    n_bits = None
    embedding_dim = None
    for lineno, obj in iter_jsonl(molecules_path):
        try:
            mol = molecule_from_obj(obj, strict=strict)
        except SchemaError as exc:
            raise SchemaError(str(exc), path=str(molecules_path), line=lineno) from exc
        if mol.id in molecules:
            raise SchemaError(f"duplicate molecule id {mol.id!r}", path=str(molecules_path), line=lineno)
        if mol.fingerprint is not None:
            if n_bits is None:
                n_bits = mol.fingerprint.n_bits
            elif mol.fingerprint.n_bits != n_bits:
                raise SchemaError(
                    f"molecule {mol.id!r}: fingerprint width {mol.fingerprint.n_bits} != corpus width {n_bits}",
                    path=str(molecules_path), line=lineno,
                )
        if mol.embedding is not None:
            if embedding_dim is None:
                embedding_dim = len(mol.embedding)
            elif len(mol.embedding) != embedding_dim:
                raise SchemaError(
                    f"molecule {mol.id!r}: embedding dimension {len(mol.embedding)} != corpus dimension {embedding_dim}",
                    path=str(molecules_path), line=lineno,
                )
        molecules[mol.id] = mol

    proteins: dict = {}
    for lineno, obj in iter_jsonl(proteins_path):
        try:
            prot = protein_from_obj(obj, strict=strict)
        except SchemaError as exc:
            raise SchemaError(str(exc), path=str(proteins_path), line=lineno) from exc
        if prot.id in proteins:
            raise SchemaError(f"duplicate protein id {prot.id!r}", path=str(proteins_path), line=lineno)
        proteins[prot.id] = prot

    interactions: list = []
    mol_to_proteins: dict = {}
    protein_to_mols: dict = {}
    for lineno, obj in iter_jsonl(interactions_path):
        try:
            rec = interaction_from_obj(obj, strict=strict)
        except SchemaError as exc:
            raise SchemaError(str(exc), path=str(interactions_path), line=lineno) from exc
        if rec.molecule_id not in molecules:
            raise SchemaError(
                f"interaction references unknown molecule id {rec.molecule_id!r}",
                path=str(interactions_path), line=lineno,
            )
        if rec.protein_id not in proteins:
            raise SchemaError(
                f"interaction references unknown protein id {rec.protein_id!r}",
                path=str(interactions_path), line=lineno,
            )
        interactions.append(rec)
        if rec.label:
            mol_to_proteins.setdefault(rec.molecule_id, set()).add(rec.protein_id)
            protein_to_mols.setdefault(rec.protein_id, set()).add(rec.molecule_id)

    return Corpus(
        molecules=molecules,
        proteins=proteins,
        interactions=interactions,
        mol_to_proteins={k: frozenset(v) for k, v in mol_to_proteins.items()},
        protein_to_mols={k: frozenset(v) for k, v in protein_to_mols.items()},
        n_bits=n_bits,
        embedding_dim=embedding_dim,
    )


# ---------------------------------------------------------------------------
# Instance validation
# ---------------------------------------------------------------------------

MAX_GROUND_TRUTH = 5
MAX_CANDIDATE_MOLECULES = 15


def exceeds_pool_ratio(gt_size: int, pool_size: int) -> bool:
    """gt_size > 0.7 * pool_size, decided in exact integer arithmetic."""
    return 10 * gt_size > 7 * pool_size


def validate_instance(instance: ProblemInstance, corpus: Corpus) -> list[str]:
    """Return human-readable violations; empty list means the instance is valid."""
    violations = []
    qid = instance.query_molecule_id
    if qid not in corpus.molecules:
        violations.append(f"unknown query molecule id {qid!r}")
    for mid in sorted(instance.candidate_molecule_ids):
        if mid not in corpus.molecules:
            violations.append(f"unknown candidate molecule id {mid!r}")
    for pid in sorted(instance.candidate_protein_ids):
        if pid not in corpus.proteins:
            violations.append(f"unknown candidate protein id {pid!r}")
    for pid in sorted(instance.ground_truth_protein_ids):
        if pid not in corpus.proteins:
            violations.append(f"unknown ground-truth protein id {pid!r}")

    if not instance.ground_truth_protein_ids <= instance.candidate_protein_ids:
        extra = sorted(instance.ground_truth_protein_ids - instance.candidate_protein_ids)
        violations.append(f"ground truth not contained in candidate proteins: {extra}")
    gt_size = len(instance.ground_truth_protein_ids)
    if not 1 <= gt_size <= MAX_GROUND_TRUTH:
        violations.append(
            f"ground-truth size {gt_size} outside [1, {MAX_GROUND_TRUTH}]"
        )
    pool_size = len(instance.candidate_protein_ids)
    if exceeds_pool_ratio(gt_size, pool_size):
        violations.append(
            f"ground-truth size {gt_size} exceeds 70% of candidate protein pool "
            f"({gt_size} > {0.7 * pool_size:.1f})"
        )
    if len(instance.candidate_molecule_ids) > MAX_CANDIDATE_MOLECULES:
        violations.append(
            f"candidate molecule count {len(instance.candidate_molecule_ids)} exceeds {MAX_CANDIDATE_MOLECULES}"
        )
    if qid in instance.candidate_molecule_ids:
        violations.append("query molecule appears in its own candidate set")
    return violations
