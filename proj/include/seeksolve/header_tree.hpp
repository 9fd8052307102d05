#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "seeksolve/table.hpp"

namespace seeksolve {

enum class Axis { row, column };

std::string_view axis_name(Axis axis); // "row" / "column"

/// One header cell in the hierarchy. `index` is the cell's anchor row (row
/// axis) or anchor column (column axis); the synthetic root uses -1.
/// `span_begin..span_end` is the inclusive range of data rows (or columns)
/// the subtree governs; children tile the parent span in order.
struct HeaderNode {
    std::string value;
    Axis axis = Axis::row;
    int index = -1;
    int span_begin = 0;
    int span_end = 0;
    std::vector<HeaderNode> children;

    bool is_leaf() const { return children.empty(); }
};

/// Per-axis hierarchy rooted at a synthetic "(root)" node.
struct HeaderTree {
    Axis axis = Axis::row;
    HeaderNode root;
    int leaf_count = 0;
};

/// A root-to-leaf path linearized into its node values (root excluded).
/// tuple_id is unique within a table and stable across runs.
struct TreePathTuple {
    Axis axis = Axis::row;
    std::vector<std::string> values;
    int leaf_index = 0;
    std::string tuple_id;

    bool operator==(const TreePathTuple&) const = default;
};

/// Hierarchy over the left_header_width columns. Tables with no row-header
/// columns get an implicit axis: one leaf per data row labeled "row N"
/// (1-based). Throws StructureError on non-laminar layouts.
HeaderTree build_row_tree(const Table& table);

/// Mirror of build_row_tree over the top_header_depth rows; the implicit
/// axis labels columns "column N".
HeaderTree build_column_tree(const Table& table);

/// One tuple per leaf in left-to-right depth-first order.
std::vector<TreePathTuple> linearize(const HeaderTree& tree);

/// "(axis: v1 | v2 | ... | vk)" with "\" and "|" escaped inside values.
std::string render_tuple(const TreePathTuple& tuple);

/// All row tuples followed by all column tuples; prompt display numbers the
/// combined list 1..N.
std::vector<TreePathTuple> merged_tuple_list(const HeaderTree& row_tree,
                                             const HeaderTree& col_tree);

/// Leaf spans paired with the span "one level back": the parent's span, or
/// the leaf's own span when the parent is the root. Indexed by leaf_index.
struct LeafSpan {
    int leaf_begin = 0;
    int leaf_end = 0;
    int widened_begin = 0;
    int widened_end = 0;
};
std::vector<LeafSpan> leaf_span_table(const HeaderTree& tree);

/// Indented dump for the build-tree CLI subcommand.
std::string render_tree(const HeaderTree& tree);

} // namespace seeksolve
