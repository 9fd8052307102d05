#include "seeksolve/header_tree.hpp"

#include <map>
#include <sstream>

#include "seeksolve/errors.hpp"

namespace seeksolve {

namespace {

/// Axis-agnostic view of the grid: for the row tree, "item" means table row
/// and "level" means header column; the column tree swaps the two.
struct AxisView {
    const GridView& grid;
    Axis axis;
    int levels;      // header band size along the other axis
    int item_begin;  // first data row/column
    int item_end;    // one past the last data row/column

    const Cell& cell(int item, int level) const {
        return axis == Axis::row ? grid.at(item, level) : grid.at(level, item);
    }
    static int anchor_item(const Cell& c, Axis axis) {
        return axis == Axis::row ? c.row : c.col;
    }
    static int anchor_level(const Cell& c, Axis axis) {
        return axis == Axis::row ? c.col : c.row;
    }
    static int item_span(const Cell& c, Axis axis) {
        return axis == Axis::row ? c.row_span : c.col_span;
    }
    static int level_span(const Cell& c, Axis axis) {
        return axis == Axis::row ? c.col_span : c.row_span;
    }
};

[[noreturn]] void throw_non_laminar(const AxisView& view, const Cell& cell,
                                    int parent_begin, int parent_end) {
    std::ostringstream msg;
    msg << "non-laminar " << axis_name(view.axis) << " header: cell \"" << cell.text
        << "\" at (" << cell.row << "," << cell.col << ") spans "
        << axis_name(view.axis) << "s [" << AxisView::anchor_item(cell, view.axis) << ","
        << AxisView::anchor_item(cell, view.axis) + AxisView::item_span(cell, view.axis) - 1
        << "] which crosses its parent span [" << parent_begin << "," << parent_end << "]";
    throw StructureError(msg.str());
}

/// Children of the node whose cell occupies levels [.., next_level) over
/// items [begin, end]. Every covering cell at next_level must be anchored
/// inside the parent's item range, or the layout is not laminar.
std::vector<HeaderNode> build_children(const AxisView& view, int next_level,
                                       int begin, int end);

HeaderNode build_node(const AxisView& view, const Cell& cell) {
    HeaderNode node;
    node.value = cell.text;
    node.axis = view.axis;
    node.index = AxisView::anchor_item(cell, view.axis);
    node.span_begin = node.index;
    node.span_end = node.index + AxisView::item_span(cell, view.axis) - 1;
    int next_level = AxisView::anchor_level(cell, view.axis) +
                     AxisView::level_span(cell, view.axis);
    if (next_level < view.levels)
        node.children = build_children(view, next_level, node.span_begin, node.span_end);
    return node;
}

std::vector<HeaderNode> build_children(const AxisView& view, int next_level,
                                       int begin, int end) {
    std::vector<HeaderNode> children;
    int item = begin;
    while (item <= end) {
        const Cell& cell = view.cell(item, next_level);
        if (AxisView::anchor_level(cell, view.axis) != next_level ||
            AxisView::anchor_item(cell, view.axis) != item ||
            AxisView::anchor_item(cell, view.axis) +
                    AxisView::item_span(cell, view.axis) - 1 > end)
            throw_non_laminar(view, cell, begin, end);
        children.push_back(build_node(view, cell));
        item = children.back().span_end + 1;
    }
    return children;
}

int count_leaves(const HeaderNode& node) {
    if (node.is_leaf()) return 1;
    int n = 0;
    for (const HeaderNode& child : node.children) n += count_leaves(child);
    return n;
}

HeaderTree build_axis_tree(const Table& table, Axis axis) {
    GridView grid(table);
    AxisView view{grid, axis,
                  axis == Axis::row ? table.left_header_width : table.top_header_depth,
                  axis == Axis::row ? table.data_row_begin() : table.data_col_begin(),
                  axis == Axis::row ? table.n_rows : table.n_cols};

    HeaderTree tree;
    tree.axis = axis;
    tree.root.value = "(root)";
    tree.root.axis = axis;
    tree.root.index = -1;
    tree.root.span_begin = view.item_begin;
    tree.root.span_end = view.item_end - 1;

    if (view.levels == 0) {
        // Implicit axis: each data row/column is its own single-node path,
        // labeled 1-based the way humans reference flat tables.
        for (int item = view.item_begin; item < view.item_end; ++item) {
            HeaderNode leaf;
            leaf.value = std::string(axis_name(axis)) + " " +
                         std::to_string(item - view.item_begin + 1);
            leaf.axis = axis;
            leaf.index = item;
            leaf.span_begin = item;
            leaf.span_end = item;
            tree.root.children.push_back(std::move(leaf));
        }
    } else {
        tree.root.children =
            build_children(view, 0, view.item_begin, view.item_end - 1);
    }
    tree.leaf_count = count_leaves(tree.root);
    return tree;
}

std::string escape_tuple_value(const std::string& value) {
    std::string out;
    out.reserve(value.size());
    for (char ch : value) {
        if (ch == '\\' || ch == '|') out.push_back('\\');
        out.push_back(ch);
    }
    return out;
}

void collect_tuples(const HeaderNode& node, Axis axis,
                    std::vector<std::string>& path,
                    std::vector<TreePathTuple>& out) {
    path.push_back(node.value);
    if (node.is_leaf()) {
        TreePathTuple t;
        t.axis = axis;
        t.values = path;
        t.leaf_index = static_cast<int>(out.size());
        out.push_back(std::move(t));
    } else {
        for (const HeaderNode& child : node.children)
            collect_tuples(child, axis, path, out);
    }
    path.pop_back();
}

void render_tree_node(const HeaderNode& node, int depth, std::ostringstream& out) {
    for (int i = 0; i < depth; ++i) out << "  ";
    out << node.value << "  [" << node.span_begin << "-" << node.span_end << "]\n";
    for (const HeaderNode& child : node.children)
        render_tree_node(child, depth + 1, out);
}

void collect_leaf_spans(const HeaderNode& node, bool parent_is_root,
                        int parent_begin, int parent_end,
                        std::vector<LeafSpan>& out) {
    if (node.is_leaf()) {
        LeafSpan s;
        s.leaf_begin = node.span_begin;
        s.leaf_end = node.span_end;
        // Backtracking one level from a top-level leaf would reach the
        // synthetic root; the leaf's own span is used instead.
        s.widened_begin = parent_is_root ? node.span_begin : parent_begin;
        s.widened_end = parent_is_root ? node.span_end : parent_end;
        out.push_back(s);
        return;
    }
    for (const HeaderNode& child : node.children)
        collect_leaf_spans(child, false, node.span_begin, node.span_end, out);
}

} // namespace

std::string_view axis_name(Axis axis) {
    return axis == Axis::row ? "row" : "column";
}

HeaderTree build_row_tree(const Table& table) {
    return build_axis_tree(table, Axis::row);
}

HeaderTree build_column_tree(const Table& table) {
    return build_axis_tree(table, Axis::column);
}

std::vector<TreePathTuple> linearize(const HeaderTree& tree) {
    std::vector<TreePathTuple> out;
    std::vector<std::string> path;
    for (const HeaderNode& child : tree.root.children)
        collect_tuples(child, tree.axis, path, out);

    // tuple_id = axis-tagged path; duplicate paths are disambiguated by
    // appending the leaf index so Seek-Result matching keeps unique keys.
    std::map<std::string, int> seen;
    for (TreePathTuple& t : out) {
        std::string id(axis_name(t.axis));
        id += ":";
        for (size_t i = 0; i < t.values.size(); ++i) {
            if (i > 0) id += "|";
            id += escape_tuple_value(t.values[i]);
        }
        if (seen[id]++ > 0) id += "#" + std::to_string(t.leaf_index);
        t.tuple_id = std::move(id);
    }
    return out;
}

std::string render_tuple(const TreePathTuple& tuple) {
    std::string out = "(";
    out += axis_name(tuple.axis);
    out += ": ";
    for (size_t i = 0; i < tuple.values.size(); ++i) {
        if (i > 0) out += " | ";
        out += escape_tuple_value(tuple.values[i]);
    }
    out += ")";
    return out;
}

std::vector<TreePathTuple> merged_tuple_list(const HeaderTree& row_tree,
                                             const HeaderTree& col_tree) {
    std::vector<TreePathTuple> out = linearize(row_tree);
    for (TreePathTuple& t : linearize(col_tree)) out.push_back(std::move(t));
    return out;
}

std::vector<LeafSpan> leaf_span_table(const HeaderTree& tree) {
    std::vector<LeafSpan> out;
    for (const HeaderNode& child : tree.root.children)
        collect_leaf_spans(child, true, tree.root.span_begin, tree.root.span_end, out);
    return out;
}

std::string render_tree(const HeaderTree& tree) {
    std::ostringstream out;
    render_tree_node(tree.root, 0, out);
    return out.str();
}

} // namespace seeksolve
