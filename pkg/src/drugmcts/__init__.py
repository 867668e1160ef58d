"""Tree search over a multi-agent retrieval pipeline for drug repositioning."""

from .domain import (
    Action,
    Corpus,
    Fingerprint,
    InteractionRecord,
    LiteratureRef,
    Molecule,
    PhyschemProfile,
    PocketDescriptor,
    ProblemInstance,
    Protein,
    SchemaError,
    SearchConfig,
    StructuralProfile,
    load_corpus,
    load_instances,
    validate_instance,
)
from .retrieval import RankedHit, candidate_proteins, cosine, retrieve_candidates, tanimoto, top_k
from .runtime import (
    AgentRuntime,
    BackendError,
    HttpBackend,
    MockBackend,
    PromptMessage,
    SamplingRequest,
    SamplingResponse,
    ScriptedBackend,
    TemplateLibrary,
    parse_id_list,
    parse_yes_no,
    render_prompt,
    sample,
)
from .actions import SearchContext, format_pocket_description, root_context
from .rewards import RewardBreakdown, absolute_reward, final_reward, relative_reward
from .mcts import (
    MctsSearch,
    RankedAnswer,
    RolloutOutcome,
    SearchNode,
    SearchResult,
    SearchTree,
    aggregate_answers,
    backpropagate,
    expand,
    run_search,
    select_leaf,
    simulate,
    uct_score,
)
from .dataset import BuilderRules, build_baseline_dataset, build_instances
from .evaluation import Report, evaluate_run, recall, topk_select

__all__ = [name for name in dir() if not name.startswith("_")]
