#include "seeksolve/simplify.hpp"

#include <algorithm>
#include <set>
#include <vector>

#include "seeksolve/errors.hpp"

namespace seeksolve {

namespace {

/// Indices (in table coordinates) of the rows or columns kept along one
/// axis: the header band plus the widened span of every selected leaf.
/// When no leaf on the axis is selected the whole axis survives.
std::vector<int> kept_indices(const HeaderTree& tree,
                              const std::vector<int>& selected_leaves,
                              int header_band, int total) {
    std::set<int> kept;
    for (int i = 0; i < header_band; ++i) kept.insert(i);
    if (selected_leaves.empty()) {
        for (int i = header_band; i < total; ++i) kept.insert(i);
    } else {
        std::vector<LeafSpan> spans = leaf_span_table(tree);
        for (int leaf : selected_leaves) {
            if (leaf < 0 || leaf >= static_cast<int>(spans.size()))
                throw SimplifyError("selected leaf index " + std::to_string(leaf) +
                                    " out of range for " +
                                    std::string(axis_name(tree.axis)) + " tree with " +
                                    std::to_string(spans.size()) + " leaves");
            for (int i = spans[leaf].widened_begin; i <= spans[leaf].widened_end; ++i)
                kept.insert(i);
        }
    }
    return {kept.begin(), kept.end()};
}

} // namespace

Table extract_subtable(const Table& table, const HeaderTree& row_tree,
                       const HeaderTree& col_tree, const SeekResult& result) {
    if (result.selected.empty())
        throw SimplifyError("cannot extract a sub-table from an empty selection");

    std::vector<int> row_leaves, col_leaves;
    for (const TreePathTuple& t : result.selected) {
        (t.axis == Axis::row ? row_leaves : col_leaves).push_back(t.leaf_index);
    }

    std::vector<int> rows =
        kept_indices(row_tree, row_leaves, table.data_row_begin(), table.n_rows);
    std::vector<int> cols =
        kept_indices(col_tree, col_leaves, table.data_col_begin(), table.n_cols);

    // Old index -> position in the compacted grid; -1 for dropped lines.
    std::vector<int> row_map(table.n_rows, -1), col_map(table.n_cols, -1);
    for (size_t i = 0; i < rows.size(); ++i) row_map[rows[i]] = static_cast<int>(i);
    for (size_t i = 0; i < cols.size(); ++i) col_map[cols[i]] = static_cast<int>(i);

    Table out;
    out.id = table.id;
    out.title = table.title;
    out.n_rows = static_cast<int>(rows.size());
    out.n_cols = static_cast<int>(cols.size());
    out.top_header_depth = table.top_header_depth;
    out.left_header_width = table.left_header_width;

    for (const Cell& cell : table.cells) {
        // Count the cell's surviving rows/columns; the kept set is a union
        // of spans, so the survivors are contiguous after compaction.
        int first_row = -1, n_cell_rows = 0;
        for (int r = cell.row; r <= cell.row_end(); ++r) {
            if (row_map[r] < 0) continue;
            if (first_row < 0) first_row = row_map[r];
            ++n_cell_rows;
        }
        int first_col = -1, n_cell_cols = 0;
        for (int c = cell.col; c <= cell.col_end(); ++c) {
            if (col_map[c] < 0) continue;
            if (first_col < 0) first_col = col_map[c];
            ++n_cell_cols;
        }
        if (n_cell_rows == 0 || n_cell_cols == 0) continue;

        Cell kept = cell;
        kept.row = first_row;
        kept.col = first_col;
        kept.row_span = n_cell_rows;
        kept.col_span = n_cell_cols;
        out.cells.push_back(std::move(kept));
    }

    out.validate();
    return out;
}

std::string format_hint(const SeekResult& result) {
    if (result.selected.empty())
        throw SimplifyError("cannot format a hint from an empty selection");

    std::string body;
    for (size_t i = 0; i < result.selected.size(); ++i) {
        if (i > 0) body += ", ";
        body += render_tuple(result.selected[i]);
    }
    return std::string(kHintPrefix) + body + ".";
}

} // namespace seeksolve
