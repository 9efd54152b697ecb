"""Type-respecting embeddings of enumerated structures: weak types,
plus-structures, bounded family checks, amalgamation and arrow relations."""

from .errors import BudgetExceeded, InputError, Unsupported
from .structures import (
    EMBEDDING,
    MONOMORPHISM,
    Embedding,
    HereditaryFamily,
    Language,
    Structure,
    enumerate_embeddings,
    family_member,
    induced_substructure,
    initial_segment,
    is_irreducible,
    structure,
)
from .typetrees import meet_closure_shape, one_type_classes, same_type, type_tree
from .weaktypes import (
    PlusEmbedding,
    PlusStructure,
    WeakType,
    enumerate_weak_types,
    plus_structure,
    tree_of_weak_types,
    weak_type_of_tuple,
)
from .respect import FAILS, HOLDS, INCONCLUSIVE, CheckOutcome, is_family_type_respecting, is_type_respecting, prop1_transfer
from .amalgamation import AmalgamationInstance, check_family_binary, check_instance, paper_counterexample
from .ramsey import Coloring, ArrowResult, arrows, arrows_type_respecting, finite_degree, sierpinski_coloring

__version__ = "0.1.0"

__all__ = [
    "EMBEDDING",
    "MONOMORPHISM",
    "Embedding",
    "HereditaryFamily",
    "Language",
    "Structure",
    "enumerate_embeddings",
    "family_member",
    "induced_substructure",
    "initial_segment",
    "is_irreducible",
    "structure",
    "PlusEmbedding",
    "PlusStructure",
    "WeakType",
    "enumerate_weak_types",
    "plus_structure",
    "tree_of_weak_types",
    "weak_type_of_tuple",
    "BudgetExceeded",
    "InputError",
    "Unsupported",
    "meet_closure_shape",
    "one_type_classes",
    "same_type",
    "type_tree",
    "FAILS",
    "HOLDS",
    "INCONCLUSIVE",
    "CheckOutcome",
    "is_family_type_respecting",
    "is_type_respecting",
    "prop1_transfer",
    "AmalgamationInstance",
    "check_family_binary",
    "check_instance",
    "paper_counterexample",
    "Coloring",
    "ArrowResult",
    "arrows",
    "arrows_type_respecting",
    "finite_degree",
    "sierpinski_coloring",
]
