"""Exact model counting by dynamic programming on decomposition trees of the incidence graph."""

from .cnf import (Assignment, Clause, CnfFormula, ContractError, DimacsError, EmptyClauseError,
                  NormalizationReport, clauses_with_vars, emit_dimacs, normalize, parse_dimacs,
                  projection_set)
from .decomp import (AnnotatedTree, BudgetExceeded, DecompositionError, DecompositionTree,
                     NodeContext, WidthReport, annotate, emit_decomposition, exact_min_index_tree,
                     f_width, heuristic_tree, parse_decomposition, random_tree, width_report)
from .incidence import IncidenceGraph, build_incidence, cut_rank, index_of, iota
from .oracle import OracleBudget, brute_count, n_z_oracle, proper_shapes, shapes_of
from .shapedp import (CutFamilies, Shape, combine_tables, count_models, cut_families,
                      generates, leaf_table, restricted_shapes)

__version__ = "0.1.0"
