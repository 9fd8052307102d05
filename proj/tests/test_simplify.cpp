#include <doctest.h>

#include <random>
#include <set>

#include "seeksolve/errors.hpp"
#include "seeksolve/header_tree.hpp"
#include "seeksolve/simplify.hpp"
#include "seeksolve/table.hpp"
#include "support/generators.hpp"

using namespace seeksolve;

namespace {

const std::string kRepoFixtures = SEEKSOLVE_REPO_FIXTURES;

struct GoldenCase {
    Table table;
    HeaderTree rows;
    HeaderTree cols;
    std::vector<TreePathTuple> merged;

    GoldenCase()
        : table(load_table_file(kRepoFixtures + "/samples/golden_table.json")),
          rows(build_row_tree(table)),
          cols(build_column_tree(table)),
          merged(merged_tuple_list(rows, cols)) {}

    /// Find a tuple by its rendered form, e.g. "(row: west)".
    TreePathTuple tuple(const std::string& rendered) const {
        for (const TreePathTuple& t : merged)
            if (render_tuple(t) == rendered) return t;
        FAIL("no tuple rendered as ", rendered);
        return {};
    }
};

} // namespace

TEST_CASE("selected leaves keep their widened spans plus the header band") {
    GoldenCase g;
    SeekResult sel{{g.tuple("(row: west)"), g.tuple("(column: 2022 | q2)")}, {}};
    Table sub = extract_subtable(g.table, g.rows, g.cols, sel);

    // q2 widens to 2022's full span (q1+q2); west keeps only itself.
    CHECK(sub.n_rows == 3);
    CHECK(sub.n_cols == 3);
    std::vector<std::vector<std::string>> expect = {
        {"region", "2022", "2022"},
        {"region", "q1", "q2"},
        {"west", "48", "50"},
    };
    CHECK(expanded_texts(sub) == expect);
    CHECK(sub.id == g.table.id);
    CHECK(sub.title == g.table.title);
    CHECK(sub.top_header_depth == 2);
    CHECK(sub.left_header_width == 1);
}

TEST_CASE("an axis with no selected tuples survives whole") {
    GoldenCase g;
    SeekResult sel{{g.tuple("(column: 2022 | q2)")}, {}};
    Table sub = extract_subtable(g.table, g.rows, g.cols, sel);

    CHECK(sub.n_rows == g.table.n_rows); // all data rows kept
    CHECK(sub.n_cols == 3);
    CHECK(expanded_texts(sub)[2] == std::vector<std::string>{"east", "51", "53"});
    CHECK(expanded_texts(sub)[4] == std::vector<std::string>{"all", "99", "103"});
}

TEST_CASE("header cells spanning only dropped lines disappear") {
    GoldenCase g;
    SeekResult sel{{g.tuple("(column: 2023 | q1)")}, {}};
    Table sub = extract_subtable(g.table, g.rows, g.cols, sel);

    CHECK(sub.n_cols == 2); // left header + the 2023 column
    std::vector<std::vector<std::string>> expect = {
        {"region", "2023"}, {"region", "q1"}, {"east", "57"},
        {"west", "52"},     {"all", "109"},
    };
    CHECK(expanded_texts(sub) == expect);
    // The 2022 header cell covered only dropped columns.
    for (const Cell& c : sub.cells) CHECK(c.text != "2022");
}

TEST_CASE("selecting every leaf reproduces the table unchanged") {
    GoldenCase g;
    SeekResult sel{g.merged, {}};
    CHECK(extract_subtable(g.table, g.rows, g.cols, sel) == g.table);
}

TEST_CASE("extraction is idempotent for a row-only selection") {
    GoldenCase g;
    SeekResult sel{{g.tuple("(row: east)"), g.tuple("(row: all)")}, {}};
    Table once = extract_subtable(g.table, g.rows, g.cols, sel);

    // The surviving rows are renumbered; reselect the same leaves on the
    // sub-table's own trees.
    HeaderTree rows2 = build_row_tree(once);
    HeaderTree cols2 = build_column_tree(once);
    SeekResult sel2{{}, {}};
    for (const TreePathTuple& t : merged_tuple_list(rows2, cols2))
        if (t.axis == Axis::row) sel2.selected.push_back(t);
    CHECK(extract_subtable(once, rows2, cols2, sel2) == once);
}

TEST_CASE("empty selections are rejected") {
    GoldenCase g;
    SeekResult empty;
    CHECK_THROWS_WITH_AS(extract_subtable(g.table, g.rows, g.cols, empty),
                         doctest::Contains("empty selection"), SimplifyError);
    CHECK_THROWS_WITH_AS(format_hint(empty), doctest::Contains("empty selection"),
                         SimplifyError);
}

TEST_CASE("out-of-range leaf indices are rejected") {
    GoldenCase g;
    TreePathTuple bogus;
    bogus.axis = Axis::row;
    bogus.leaf_index = 99;
    SeekResult sel{{bogus}, {}};
    CHECK_THROWS_WITH_AS(extract_subtable(g.table, g.rows, g.cols, sel),
                         doctest::Contains("out of range"), SimplifyError);
}

TEST_CASE("hints render the selection in order, comma separated") {
    GoldenCase g;
    SeekResult sel{{g.tuple("(row: west)"), g.tuple("(column: 2022 | q2)")}, {}};
    CHECK(format_hint(sel) ==
          "Look at these rows and columns: (row: west), (column: 2022 | q2).");

    SeekResult one{{g.tuple("(row: east)")}, {}};
    CHECK(format_hint(one) == "Look at these rows and columns: (row: east).");
}

TEST_CASE("sub-tables match an oracle built from the generation record") {
    std::mt19937 rng(41);
    for (int i = 0; i < 150; ++i) {
        testing::GeneratedTable gen = testing::make_laminar_table(rng);
        HeaderTree rows = build_row_tree(gen.table);
        HeaderTree cols = build_column_tree(gen.table);

        // Pick a random nonempty subset of leaves across both axes.
        SeekResult sel;
        std::set<int> expect_rows, expect_cols;
        bool any_row = false, any_col = false;
        auto pick = [&](Axis axis, const testing::AxisRecord& rec) {
            for (size_t leaf = 0; leaf < rec.leaves.size(); ++leaf) {
                if (rng() % 4 != 0) continue;
                TreePathTuple t;
                t.axis = axis;
                t.leaf_index = static_cast<int>(leaf);
                sel.selected.push_back(t);
                const testing::LeafRecord& lr = rec.leaves[leaf];
                for (int j = lr.parent_begin; j <= lr.parent_end; ++j)
                    (axis == Axis::row ? expect_rows : expect_cols).insert(j);
                (axis == Axis::row ? any_row : any_col) = true;
            }
        };
        pick(Axis::row, gen.rows);
        pick(Axis::column, gen.cols);
        if (sel.selected.empty()) continue;

        // Oracle: header band always kept; untouched axes survive whole.
        for (int r = 0; r < gen.table.top_header_depth; ++r) expect_rows.insert(r);
        for (int c = 0; c < gen.table.left_header_width; ++c) expect_cols.insert(c);
        if (!any_row)
            for (int r = 0; r < gen.table.n_rows; ++r) expect_rows.insert(r);
        if (!any_col)
            for (int c = 0; c < gen.table.n_cols; ++c) expect_cols.insert(c);

        Table sub = extract_subtable(gen.table, rows, cols, sel);
        REQUIRE(sub.n_rows == static_cast<int>(expect_rows.size()));
        REQUIRE(sub.n_cols == static_cast<int>(expect_cols.size()));

        std::vector<std::vector<std::string>> full = expanded_texts(gen.table);
        std::vector<std::vector<std::string>> got = expanded_texts(sub);
        int rr = 0;
        for (int r : expect_rows) {
            int cc = 0;
            for (int c : expect_cols) {
                REQUIRE(got[rr][cc] == full[r][c]);
                ++cc;
            }
            ++rr;
        }
    }
}
