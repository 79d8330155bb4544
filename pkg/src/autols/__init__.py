"""Local search over automaton-described constraints."""

from .automata import (
    Alphabet,
    AlphabetError,
    Automaton,
    AutomatonError,
    ParseError,
    Symbol,
    build_offblock_pattern,
    build_pattern,
    build_stretch,
    parse_automaton,
    product,
    serialize_automaton,
    universal,
)
from .layered import EmptyLanguageError, LayeredGraph, count_paths, unroll
from .segments import ProbeRecord, ScriptedRng, SegmentationState, StaleRecordError
from .hamming import HammingState
from .model import (
    ConstraintSpec,
    DirectCheck,
    Instance,
    InstanceError,
    ModelState,
    build_rotating_instance,
    build_stlouis_instance,
    check_solution,
    initial_random,
    initial_tiled,
    load_instance,
    rotating_family_instance,
    solution_failures,
)
from .search import RunStats, SearchParams, run_solver, select_move, tabu_search
from .bench import BenchReport, run_bench

__version__ = "0.1.0"
