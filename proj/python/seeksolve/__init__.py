"""Seek-and-Solve table question answering.

Thin re-export of the compiled core; see the package README for the
pipeline itself.
"""

from ._seeksolve import (
    Error,
    Table,
    extract_subtable,
    load_table,
    normalize_answer,
    parse_seek,
    parse_solve,
    recount,
    render_tree,
    run,
    score_answer,
    table_from_json,
    tuple_list,
)

__all__ = [
    "Error",
    "Table",
    "extract_subtable",
    "load_table",
    "normalize_answer",
    "parse_seek",
    "parse_solve",
    "recount",
    "render_tree",
    "run",
    "score_answer",
    "table_from_json",
    "tuple_list",
]
