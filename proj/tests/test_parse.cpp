#include <doctest.h>

#include "seeksolve/errors.hpp"
#include "seeksolve/header_tree.hpp"
#include "seeksolve/parse.hpp"
#include "seeksolve/table.hpp"

using namespace seeksolve;

namespace {

const std::string kRepoFixtures = SEEKSOLVE_REPO_FIXTURES;

/// Merged tuple list of the golden table:
///   (row: east) (row: west) (row: all)
///   (column: 2022 | q1) (column: 2022 | q2) (column: 2023 | q1)
std::vector<TreePathTuple> golden_tuples() {
    Table t = load_table_file(kRepoFixtures + "/samples/golden_table.json");
    return merged_tuple_list(build_row_tree(t), build_column_tree(t));
}

std::vector<std::string> ids(const SeekOutcome& o) {
    std::vector<std::string> out;
    for (const TreePathTuple& t : o.result.selected) out.push_back(t.tuple_id);
    return out;
}

} // namespace

TEST_CASE("seek responses split into rationale and exact tuple matches") {
    auto tuples = golden_tuples();
    SeekOutcome o = parse_seek(
        "The question wants west in q2 of 2022.\n"
        "Selected tuples: (row: west), (column: 2022 | q2)",
        tuples);
    CHECK(o.seek_cot == "The question wants west in q2 of 2022.");
    CHECK(ids(o) == std::vector<std::string>{"row:west", "column:2022|q2"});
    CHECK(o.result.unmatched_mentions.empty());
}

TEST_CASE("the last selection marker wins") {
    auto tuples = golden_tuples();
    SeekOutcome o = parse_seek(
        "Selected tuples: (row: east)\n"
        "Wait, the question says west.\n"
        "Selected tuples: (row: west)",
        tuples);
    CHECK(ids(o) == std::vector<std::string>{"row:west"});
    CHECK(o.seek_cot.find("Wait, the question says west.") != std::string::npos);
}

TEST_CASE("missing seek marker raises ParseError") {
    auto tuples = golden_tuples();
    CHECK_THROWS_WITH_AS(parse_seek("I pick the west row.", tuples),
                         doctest::Contains("Selected tuples:"), ParseError);
}

TEST_CASE("mentions match case- and whitespace-insensitively") {
    auto tuples = golden_tuples();
    SeekOutcome o = parse_seek(
        "cot\nSelected tuples: (Row: WEST), ( column: 2022|q2 )", tuples);
    CHECK(ids(o) == std::vector<std::string>{"row:west", "column:2022|q2"});
}

TEST_CASE("unparenthesized tails fall back to comma splitting") {
    auto tuples = golden_tuples();
    SeekOutcome o = parse_seek("cot\nSelected tuples: row: west, row: east", tuples);
    CHECK(ids(o) == std::vector<std::string>{"row:west", "row:east"});
}

TEST_CASE("a unique best token overlap is accepted") {
    auto tuples = golden_tuples();
    SeekOutcome o = parse_seek("cot\nSelected tuples: the west row", tuples);
    CHECK(ids(o) == std::vector<std::string>{"row:west"});
    CHECK(o.result.unmatched_mentions.empty());
}

TEST_CASE("overlap ties are refused, not guessed") {
    auto tuples = golden_tuples();
    // "q1" overlaps (column: 2022 | q1) and (column: 2023 | q1) equally.
    SeekOutcome o = parse_seek("cot\nSelected tuples: q1", tuples);
    CHECK(o.result.selected.empty());
    CHECK(o.result.unmatched_mentions == std::vector<std::string>{"q1"});
}

TEST_CASE("mentions sharing no tokens go unmatched") {
    auto tuples = golden_tuples();
    SeekOutcome o = parse_seek("cot\nSelected tuples: (banana)", tuples);
    CHECK(o.result.selected.empty());
    CHECK(o.result.unmatched_mentions == std::vector<std::string>{"banana"});
}

TEST_CASE("repeated mentions select a tuple once") {
    auto tuples = golden_tuples();
    SeekOutcome o =
        parse_seek("cot\nSelected tuples: (row: west), (row: west)", tuples);
    CHECK(ids(o) == std::vector<std::string>{"row:west"});
}

TEST_CASE("text outside tuple groups is ignored when groups exist") {
    auto tuples = golden_tuples();
    SeekOutcome o = parse_seek(
        "cot\nSelected tuples: (row: east) and maybe something else", tuples);
    CHECK(ids(o) == std::vector<std::string>{"row:east"});
    CHECK(o.result.unmatched_mentions.empty());
}

TEST_CASE("solve responses split into rationale and answers") {
    SolveOutcome o = parse_solve("The cell holds 1530.\nAnswer: 1530");
    CHECK(o.solve_cot == "The cell holds 1530.");
    CHECK(o.answers == std::vector<std::string>{"1530"});
}

TEST_CASE("missing answer marker raises ParseError") {
    CHECK_THROWS_WITH_AS(parse_solve("The cell holds 1530."),
                         doctest::Contains("Answer:"), ParseError);
}

TEST_CASE("the last answer marker wins") {
    SolveOutcome o = parse_solve("Answer: draft\nActually recheck.\nAnswer: final");
    CHECK(o.answers == std::vector<std::string>{"final"});
    CHECK(o.solve_cot.find("Actually recheck.") != std::string::npos);
}

TEST_CASE("answers split on semicolons first") {
    SolveOutcome o = parse_solve("cot\nAnswer: alpha; beta ;gamma");
    CHECK(o.answers == std::vector<std::string>{"alpha", "beta", "gamma"});
}

TEST_CASE("comma-space splitting is the fallback and spares numbers") {
    CHECK(parse_solve("cot\nAnswer: cats, dogs").answers ==
          std::vector<std::string>{"cats", "dogs"});
    CHECK(parse_solve("cot\nAnswer: 1,234").answers ==
          std::vector<std::string>{"1,234"});
    CHECK(parse_solve("cot\nAnswer: 12; 1,234").answers ==
          std::vector<std::string>{"12", "1,234"});
}

TEST_CASE("only the marker's own line feeds the answers") {
    SolveOutcome o = parse_solve("cot\nAnswer: 42\ntrailing commentary");
    CHECK(o.answers == std::vector<std::string>{"42"});
}

TEST_CASE("an empty answer line yields one empty answer") {
    SolveOutcome o = parse_solve("cot\nAnswer:");
    CHECK(o.answers == std::vector<std::string>{""});
}

TEST_CASE("ss-cot composition inserts the connective line") {
    SeekOutcome seek;
    seek.seek_cot = "First find the tuples.";
    SolveOutcome solve;
    solve.solve_cot = "Then read the cell.";
    CHECK(compose_ss_cot(seek, solve).text ==
          "First find the tuples.\n"
          "Let us look at the relevant tuples in the information given.\n"
          "Then read the cell.");
}
