"""Dataset generation for many-sorted inverse frequent itemset mining.

Given a schema of single-valued and multi-valued attributes and support /
duplicate constraints, find a transactional dataset satisfying them, by
column generation over a succinct LP.
"""

__version__ = "0.1.0"

from .border import Border, compute_border, minimal_infrequent, negative_border
from .driver import ColgenResult, OracleResult, Termination, run_colgen, run_oracle
from .errors import (
    BorderTooLarge,
    CapSaturation,
    MsIfmError,
    NumericFailure,
    ParseError,
    SchemaMismatch,
    TooLarge,
    ValidationError,
)
from .io import emit_dataset, emit_instance, loads_dataset, parse_instance, read_dataset_file, read_instance_file
from .model import (
    EQUAL,
    SUBSET,
    ConstraintInstance,
    Dataset,
    DuplicateConstraint,
    MVSelection,
    Schema,
    SelectionList,
    SupportConstraint,
    SVSelection,
    Transaction,
    ViolationReport,
    count_transactions,
    support,
    verify,
)
from .pricing import Pricer
from .rounding import round_solution
