"""Agent actions as context-transforming steps.

A search path accumulates one immutable ``SearchContext`` per node; each
action extends the parent context with exactly the fields it owns and
nothing else. Prompt builders keep all iteration orders sorted so rendered
prompts are deterministic, and blocks for absent upstream fields are
omitted rather than rendered empty.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

from .domain import Action, Corpus, Molecule, PocketDescriptor, Protein, SearchConfig
from .runtime import (
    BackendError,
    TemplateLibrary,
    parse_id_list,
    render_prompt,
    sample,
    SamplingRequest,
)


@dataclass(frozen=True)
class SearchContext:
    query_molecule: Molecule
    candidate_molecules: frozenset
    candidate_proteins: frozenset
    molecule_report: Optional[str] = None
    reference_molecules: Optional[frozenset] = None
    reference_proteins: Optional[frozenset] = None
    interaction_report: Optional[str] = None
    selected_protein: Optional[str] = None

    def __post_init__(self):
        if self.reference_molecules is not None and not self.reference_molecules <= self.candidate_molecules:
            raise ValueError("reference molecules must be a subset of candidate molecules")
        if self.reference_proteins is not None and not self.reference_proteins <= self.candidate_proteins:
            raise ValueError("reference proteins must be a subset of candidate proteins")


# Fields each action is allowed to set on top of its parent context.
ACTION_FIELDS = {
    Action.ROOT: (),
    Action.MOLECULE_ANALYSIS: ("molecule_report",),
    Action.MOLECULE_SELECTION: ("reference_molecules", "reference_proteins"),
    Action.INTERACTION_ANALYSIS: ("interaction_report",),
    Action.PROTEIN_SELECTION: ("selected_protein",),
    Action.END: (),
}


def root_context(instance, corpus: Corpus) -> SearchContext:
    """Root of a search: the instance's persisted retrieval pools."""
    return SearchContext(
        query_molecule=corpus.molecule(instance.query_molecule_id),
        candidate_molecules=frozenset(instance.candidate_molecule_ids),
        candidate_proteins=frozenset(instance.candidate_protein_ids),
    )


def successor_map(config: SearchConfig) -> dict:
    """Legal action order; ablation flags splice analysis steps out."""
    chain = [Action.ROOT]
    if config.enable_molecule_analysis:
        chain.append(Action.MOLECULE_ANALYSIS)
    chain.append(Action.MOLECULE_SELECTION)
    if config.enable_interaction_analysis:
        chain.append(Action.INTERACTION_ANALYSIS)
    chain.extend((Action.PROTEIN_SELECTION, Action.END))
    return {chain[i]: chain[i + 1] for i in range(len(chain) - 1)}


def selection_pool(ctx: SearchContext, config: SearchConfig) -> list:
    """Sorted pool the decision step selects from (reference set by default)."""
    if config.selection_pool == "reference" and ctx.reference_proteins is not None:
        pool = ctx.reference_proteins
    else:
        pool = ctx.candidate_proteins
    return sorted(pool)


# ---------------------------------------------------------------------------
# Deterministic text blocks
# ---------------------------------------------------------------------------


def format_molecule_profile(mol: Molecule) -> str:
    s, p = mol.structural, mol.physchem
    groups = ", ".join(s.functional_groups) if s.functional_groups else "none recorded"
    scaffold = s.scaffold if s.scaffold else "acyclic (no ring scaffold)"
    return (
        f"Molecule {mol.id} (SMILES {mol.smiles}): molecular weight {p.molecular_weight:.2f} Da, "
        f"logP {p.logp:.2f}, polar surface area {p.psa:.2f} A^2, {p.hbd} H-bond donors, "
        f"{p.hba} H-bond acceptors, {p.rotatable_bonds} rotatable bonds, {p.heavy_atoms} heavy atoms; "
        f"{s.chiral_center_count} chiral centers; scaffold: {scaffold}; functional groups: {groups}."
    )


def format_pocket_description(pocket: PocketDescriptor, protein: Protein) -> str:
    """One descriptive paragraph per pocket entry."""
    residue_bits = ", ".join(
        f"{name} {number} (chain {chain})" for name, number, chain in pocket.residues
    )
    text = (
        f"Pocket {pocket.pocket_label} of protein {protein.name} ({protein.id}) "
        f"is lined by residues {residue_bits}."
    )
    if pocket.interaction_types:
        text += " Observed interaction types: " + ", ".join(pocket.interaction_types) + "."
    if pocket.geometry_notes:
        text += f" Geometry: {pocket.geometry_notes}"
    return text


def format_protein_summary(protein: Protein) -> str:
    pdb = f", PDB {protein.pdb_id}" if protein.pdb_id else ""
    return (
        f"{protein.id}: {protein.name}{pdb}, pocket type {protein.pocket_type}, "
        f"{len(protein.pockets)} annotated pockets, {len(protein.literature)} literature snippets"
    )


def pocket_paragraphs(protein_ids, corpus: Corpus) -> str:
    """All pocket paragraphs for the given proteins; absences are stated."""
    parts = []
    for pid in sorted(protein_ids):
        protein = corpus.protein(pid)
        if protein.pockets:
            parts.extend(format_pocket_description(pk, protein) for pk in protein.pockets)
        else:
            parts.append(f"Protein {protein.name} ({protein.id}) has no annotated binding pockets.")
    return "\n\n".join(parts)


def literature_snippets(protein_ids, corpus: Corpus, budget: int) -> str:
    """Up to ``budget`` snippets per protein; absences are stated."""
    parts = []
    for pid in sorted(protein_ids):
        protein = corpus.protein(pid)
        refs = protein.literature[: max(budget, 0)]
        if refs:
            for ref in refs:
                parts.append(f"[{ref.source_id}] {protein.id}: {ref.title} - {ref.abstract}")
        else:
            parts.append(f"No literature snippets are available for protein {protein.id}.")
    return "\n".join(parts)


def _query_block(ctx: SearchContext) -> str:
    text = "Query molecule:\n" + format_molecule_profile(ctx.query_molecule)
    if ctx.molecule_report is not None:
        text += "\n\nQuery analysis report:\n" + ctx.molecule_report
    return text


# ---------------------------------------------------------------------------
# Prompt builders (template_id, bindings)
# ---------------------------------------------------------------------------


def build_molecule_analysis_prompt(ctx: SearchContext):
    return "molecule_analysis", {"query_profile": format_molecule_profile(ctx.query_molecule)}


def build_molecule_selection_prompt(ctx: SearchContext, corpus: Corpus):
    candidates = sorted(ctx.candidate_molecules)
    profiles = "\n".join(format_molecule_profile(corpus.molecule(mid)) for mid in candidates)
    return "molecule_selection", {
        "query_block": _query_block(ctx),
        "candidate_profiles": profiles,
        "candidate_ids": ", ".join(candidates),
    }


def build_interaction_analysis_prompt(ctx: SearchContext, corpus: Corpus, config: SearchConfig):
    molecule_ids = sorted(ctx.reference_molecules or ctx.candidate_molecules)
    protein_ids = sorted(
        ctx.reference_proteins if ctx.reference_proteins is not None else ctx.candidate_proteins
    )
    profiles = "\n".join(format_molecule_profile(corpus.molecule(mid)) for mid in molecule_ids)
    return "interaction_analysis", {
        "reference_profiles": profiles,
        "pocket_paragraphs": pocket_paragraphs(protein_ids, corpus),
        "literature_snippets": literature_snippets(protein_ids, corpus, config.literature_budget),
    }


def build_protein_selection_prompt(ctx: SearchContext, corpus: Corpus, config: SearchConfig):
    pool = selection_pool(ctx, config)
    evidence = []
    if ctx.reference_molecules is not None:
        evidence.append("Reference molecules: " + ", ".join(sorted(ctx.reference_molecules)))
    evidence.append("Binding pockets:\n" + pocket_paragraphs(pool, corpus))
    if ctx.interaction_report is not None:
        evidence.append("Interaction analysis:\n" + ctx.interaction_report)
    summaries = "\n".join(format_protein_summary(corpus.protein(pid)) for pid in pool)
    return "protein_selection", {
        "query_block": _query_block(ctx),
        "evidence_blocks": "\n\n".join(evidence),
        "protein_summaries": summaries,
        "protein_ids": ", ".join(pool),
    }


def build_interaction_judgment_prompt(protein_id: str, ctx: SearchContext, corpus: Corpus, config: SearchConfig):
    protein = corpus.protein(protein_id)
    return "interaction_judgment", {
        "protein_summary": format_protein_summary(protein),
        "pocket_paragraphs": pocket_paragraphs([protein_id], corpus),
        "literature_snippets": literature_snippets([protein_id], corpus, config.literature_budget),
        "query_block": _query_block(ctx),
    }


def build_single_shot_prompt(ctx: SearchContext, corpus: Corpus, config: SearchConfig, enhanced: bool):
    """One-call decision prompt used by the no-search baseline modes."""
    pool = sorted(ctx.candidate_proteins)
    pocket_types = "\n".join(
        f"{pid}: pocket type {corpus.protein(pid).pocket_type}" for pid in pool
    )
    if not enhanced:
        return "baseline_decision", {
            "query_smiles": ctx.query_molecule.smiles,
            "protein_pocket_types": pocket_types,
            "protein_ids": ", ".join(pool),
        }
    return "enhanced_decision", {
        "query_smiles": ctx.query_molecule.smiles,
        "query_profile": format_molecule_profile(ctx.query_molecule),
        "protein_pocket_types": pocket_types,
        "pocket_paragraphs": pocket_paragraphs(pool, corpus),
        "literature_snippets": literature_snippets(pool, corpus, config.literature_budget),
        "protein_ids": ", ".join(pool),
    }


# ---------------------------------------------------------------------------
# Applying sampled answers to contexts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ApplyResult:
    context: SearchContext
    parsed: object
    fallback: bool = False


def apply_molecule_analysis(ctx: SearchContext, text: str) -> ApplyResult:
    if not text.strip():
        raise ValueError("molecule analysis produced an empty report")
    return ApplyResult(context=replace(ctx, molecule_report=text), parsed=text)


def reference_proteins_for(molecule_ids, ctx: SearchContext, corpus: Corpus) -> frozenset:
    """Proteins of the kept molecules, restricted to the candidate pool."""
    pool: set = set()
    for mid in molecule_ids:
        pool |= corpus.proteins_of(mid)
    return frozenset(pool) & ctx.candidate_proteins


def apply_molecule_selection(ctx: SearchContext, corpus: Corpus, text: str) -> ApplyResult:
    kept = parse_id_list(text, ctx.candidate_molecules)
    fallback = not kept
    molecules = frozenset(kept) if kept else frozenset(ctx.candidate_molecules)
    proteins = reference_proteins_for(molecules, ctx, corpus)
    new_ctx = replace(ctx, reference_molecules=molecules, reference_proteins=proteins)
    return ApplyResult(context=new_ctx, parsed=sorted(molecules), fallback=fallback)


def apply_interaction_analysis(ctx: SearchContext, text: str) -> ApplyResult:
    if not text.strip():
        raise ValueError("interaction analysis produced an empty report")
    return ApplyResult(context=replace(ctx, interaction_report=text), parsed=text)


def apply_protein_selection(ctx: SearchContext, config: SearchConfig, text: str) -> ApplyResult:
    pool = selection_pool(ctx, config)
    if not pool:
        raise ValueError("protein selection pool is empty")
    parsed = parse_id_list(text, pool)
    if parsed:
        chosen, fallback = parsed[0], False
    else:
        chosen, fallback = pool[0], True
    return ApplyResult(context=replace(ctx, selected_protein=chosen), parsed=chosen, fallback=fallback)


# ---------------------------------------------------------------------------
# Single-shot operations (one sampled completion each)
# ---------------------------------------------------------------------------


def _sample_one(backend, template_id, bindings, config: SearchConfig, library=None, retries: int = 1) -> str:
    messages = render_prompt(template_id, bindings, library)
    request = SamplingRequest(
        messages=tuple(messages), temperature=config.temperature, n=1, max_tokens=config.max_tokens
    )
    for attempt in range(retries + 1):
        text = sample(backend, request).texts[0]
        if text.strip():
            return text
    raise BackendError(f"{template_id}: empty completion after {retries + 1} attempts")


def molecule_analysis(ctx: SearchContext, backend, config: SearchConfig, library: Optional[TemplateLibrary] = None) -> str:
    """Produce the query-molecule report from its serialized profiles."""
    template_id, bindings = build_molecule_analysis_prompt(ctx)
    return _sample_one(backend, template_id, bindings, config, library)


def molecule_selection(ctx: SearchContext, corpus: Corpus, backend, config: SearchConfig, library: Optional[TemplateLibrary] = None):
    """Filter the candidate pool; returns (kept molecules, their proteins)."""
    if not ctx.candidate_molecules:
        raise ValueError("no candidate molecules to select from")
    template_id, bindings = build_molecule_selection_prompt(ctx, corpus)
    text = _sample_one(backend, template_id, bindings, config, library)
    result = apply_molecule_selection(ctx, corpus, text)
    return result.context.reference_molecules, result.context.reference_proteins


def interaction_analysis(ctx: SearchContext, corpus: Corpus, backend, config: SearchConfig, library: Optional[TemplateLibrary] = None) -> str:
    """Produce the binding-evidence report over pockets and literature."""
    template_id, bindings = build_interaction_analysis_prompt(ctx, corpus, config)
    return _sample_one(backend, template_id, bindings, config, library)


def protein_selection(ctx: SearchContext, corpus: Corpus, backend, config: SearchConfig, library: Optional[TemplateLibrary] = None) -> str:
    """Pick one protein from the selection pool; falls back to the smallest id."""
    template_id, bindings = build_protein_selection_prompt(ctx, corpus, config)
    text = _sample_one(backend, template_id, bindings, config, library)
    return apply_protein_selection(ctx, config, text).context.selected_protein
