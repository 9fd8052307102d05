#include <doctest.h>

#include <filesystem>

#include "seeksolve/errors.hpp"
#include "seeksolve/table.hpp"
#include "support/generators.hpp"

using namespace seeksolve;
namespace fs = std::filesystem;

namespace {

const std::string kFixtures = SEEKSOLVE_TEST_FIXTURES;
const std::string kRepoFixtures = SEEKSOLVE_REPO_FIXTURES;

Table small_hierarchical() {
    return load_table_file(kRepoFixtures + "/samples/golden_table.json");
}

Table flat_table() {
    Table t;
    t.id = "flat";
    t.n_rows = 3;
    t.n_cols = 2;
    t.top_header_depth = 1;
    t.cells = {{"a", 0, 0, 1, 1, true}, {"b", 0, 1, 1, 1, true},
               {"1", 1, 0},             {"2", 1, 1},
               {"3", 2, 0},             {"4", 2, 1}};
    t.validate();
    return t;
}

fs::path fresh_tmp_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / ("seeksolve-" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("cell geometry helpers") {
    Cell c{"x", 2, 1, 2, 3, false};
    CHECK(c.row_end() == 3);
    CHECK(c.col_end() == 3);
    CHECK(c.covers(2, 1));
    CHECK(c.covers(3, 3));
    CHECK_FALSE(c.covers(4, 1));
    CHECK_FALSE(c.covers(2, 0));
}

TEST_CASE("validate accepts a well-formed merged grid") {
    CHECK_NOTHROW(small_hierarchical().validate());
}

TEST_CASE("validate rejects structural defects") {
    Table t = flat_table();

    SUBCASE("overlapping cells") {
        t.cells.push_back({"extra", 1, 0});
        CHECK_THROWS_WITH_AS(t.validate(),
                             doctest::Contains("overlapping cells at (1,0)"),
                             DataError);
    }
    SUBCASE("uncovered coordinate") {
        t.cells.pop_back();
        CHECK_THROWS_WITH_AS(t.validate(), doctest::Contains("uncovered coordinate"),
                             DataError);
    }
    SUBCASE("span outside the grid") {
        t.cells[5].col_span = 2;
        CHECK_THROWS_WITH_AS(t.validate(), doctest::Contains("spans outside"),
                             DataError);
    }
    SUBCASE("no data rows left") {
        t.top_header_depth = 3;
        CHECK_THROWS_WITH_AS(t.validate(), doctest::Contains("no data rows"),
                             DataError);
    }
    SUBCASE("no data columns left") {
        t.left_header_width = 2;
        CHECK_THROWS_WITH_AS(t.validate(), doctest::Contains("no data columns"),
                             DataError);
    }
    SUBCASE("empty grid") {
        Table empty;
        CHECK_THROWS_AS(empty.validate(), DataError);
    }
}

TEST_CASE("grid view resolves merged spans to their anchor cell") {
    Table t = small_hierarchical();
    GridView grid(t);
    CHECK(grid.at(0, 0).text == "region");
    CHECK(grid.at(1, 0).text == "region"); // covered by the rowspan-2 anchor
    CHECK(grid.at(0, 2).text == "2022");   // covered by the colspan-2 anchor
    CHECK(grid.at(3, 2).text == "50");
}

TEST_CASE("expanded texts repeat merged cells into every covered slot") {
    auto texts = expanded_texts(small_hierarchical());
    CHECK(texts[0][0] == "region");
    CHECK(texts[1][0] == "region");
    CHECK(texts[0][1] == "2022");
    CHECK(texts[0][2] == "2022");
    CHECK(texts[0][3] == "2023");
}

TEST_CASE("cell text escaping") {
    CHECK(escape_cell_text("a|b") == "a\\|b");
    CHECK(escape_cell_text("a\\b") == "a\\\\b");
    CHECK(escape_cell_text("a\nb") == "a\\nb");
    CHECK(escape_cell_text("a\r\nb") == "a\\nb");
    CHECK(escape_cell_text("a\rb") == "a\\nb");
    CHECK(escape_cell_text("plain") == "plain");
}

TEST_CASE("markdown rendering") {
    SUBCASE("hierarchical table repeats merged headers and separates after the band") {
        CHECK(render_markdown(small_hierarchical()) ==
              "| region | 2022 | 2022 | 2023 |\n"
              "| region | q1 | q2 | q1 |\n"
              "| --- | --- | --- | --- |\n"
              "| east | 51 | 53 | 57 |\n"
              "| west | 48 | 50 | 52 |\n"
              "| all | 99 | 103 | 109 |");
    }
    SUBCASE("flat table separator sits after the single header row") {
        CHECK(render_markdown(flat_table()) ==
              "| a | b |\n| --- | --- |\n| 1 | 2 |\n| 3 | 4 |");
    }
    SUBCASE("no separator when there is no column header") {
        Table t = flat_table();
        t.top_header_depth = 0;
        t.cells[0].is_header = false;
        t.cells[1].is_header = false;
        CHECK(render_markdown(t) == "| a | b |\n| 1 | 2 |\n| 3 | 4 |");
    }
    SUBCASE("cell pipes are escaped so the column count is stable") {
        Table t = flat_table();
        t.cells[2].text = "x|y";
        std::string md = render_markdown(t);
        CHECK(md.find("x\\|y") != std::string::npos);
    }
}

TEST_CASE("interchange round trip preserves the table exactly") {
    Table t = small_hierarchical();
    CHECK(table_from_json(table_to_json(t)) == t);

    QaSample s;
    s.sample_id = "s-1";
    s.question = "what was the household income of west in q2 of 2022?";
    s.gold_answers = {"50"};
    s.table = t;
    QaSample back = sample_from_json(sample_to_json(s));
    CHECK(back.sample_id == s.sample_id);
    CHECK(back.question == s.question);
    CHECK(back.gold_answers == s.gold_answers);
    CHECK(back.table == s.table);
}

TEST_CASE("interchange sample files round trip through disk") {
    fs::path dir = fresh_tmp_dir("interchange");
    std::vector<QaSample> samples =
        load_interchange_samples(kRepoFixtures + "/samples/golden_sample.jsonl");
    REQUIRE(samples.size() == 1);
    save_interchange_samples(samples, dir / "roundtrip.jsonl");
    std::vector<QaSample> back = load_interchange_samples(dir / "roundtrip.jsonl");
    REQUIRE(back.size() == 1);
    CHECK(back[0].table == samples[0].table);
    CHECK(back[0].question == samples[0].question);
}

TEST_CASE("interchange loader errors name the offending line") {
    fs::path dir = fresh_tmp_dir("interchange-err");
    SUBCASE("missing gold answer") {
        seeksolve::testing::write_file(
            (dir / "bad.jsonl").string(),
            R"({"sample_id":"x","question":"q?","gold_answers":[],"table":)" +
                table_to_json(flat_table()).dump() + "}\n");
        CHECK_THROWS_WITH_AS(load_interchange_samples(dir / "bad.jsonl"),
                             doctest::Contains("missing gold answer"), DataError);
    }
    SUBCASE("empty question") {
        seeksolve::testing::write_file(
            (dir / "bad.jsonl").string(),
            R"({"sample_id":"x","question":"  ","gold_answers":["1"],"table":)" +
                table_to_json(flat_table()).dump() + "}\n");
        CHECK_THROWS_WITH_AS(load_interchange_samples(dir / "bad.jsonl"),
                             doctest::Contains("line 1"), DataError);
    }
    SUBCASE("unparseable json") {
        seeksolve::testing::write_file((dir / "bad.jsonl").string(), "{nope\n");
        CHECK_THROWS_AS(load_interchange_samples(dir / "bad.jsonl"), DataError);
    }
}

TEST_CASE("hitab adapter maps released files onto the table model") {
    std::vector<QaSample> samples =
        load_hitab(kFixtures + "/hitab/dev_samples.jsonl");
    REQUIRE(samples.size() == 3);

    CHECK(samples[0].sample_id == "dev-0001");
    CHECK(samples[0].question == "how many women worked in manufacturing in 2021?");
    CHECK(samples[0].gold_answers == std::vector<std::string>{"1530"});

    const Table& t1 = samples[0].table;
    CHECK(t1.id == "t0001");
    CHECK(t1.title == "employment by sector");
    CHECK(t1.n_rows == 5);
    CHECK(t1.n_cols == 5);
    CHECK(t1.top_header_depth == 2);
    CHECK(t1.left_header_width == 1);
    GridView grid(t1);
    CHECK(grid.at(1, 0).text == "sector"); // merged region expanded
    CHECK(grid.at(0, 2).text == "2020");
    CHECK(grid.at(0, 2).col_span == 2);
    CHECK(grid.at(3, 4).text == "1530");
    CHECK(grid.at(2, 0).is_header);
    CHECK_FALSE(grid.at(2, 1).is_header);

    // numeric answers arrive as JSON numbers and must be stringified
    CHECK(samples[2].gold_answers == std::vector<std::string>{"12"});
    GridView grid2(samples[2].table);
    CHECK(grid2.at(1, 0).text == "north");
    CHECK(grid2.at(2, 0).text == "north"); // rowspan-2 left header
    CHECK(samples[2].table.left_header_width == 2);
}

TEST_CASE("hitab adapter errors") {
    CHECK_THROWS_WITH_AS(load_hitab(kFixtures + "/hitab/bad/missing_answer.jsonl"),
                         doctest::Contains("missing gold answer"), DataError);
    CHECK_THROWS_WITH_AS(load_hitab(kFixtures + "/hitab/bad/missing_table.jsonl"),
                         doctest::Contains("missing table file"), DataError);
    CHECK_THROWS_WITH_AS(load_hitab(kFixtures + "/hitab/bad/ragged_table.jsonl"),
                         doctest::Contains("ragged texts matrix"), DataError);
}

TEST_CASE("wikitq adapter maps released files onto the table model") {
    std::vector<QaSample> samples =
        load_wikitq(kFixtures + "/wikitq/questions.tsv");
    REQUIRE(samples.size() == 5); // header line skipped

    CHECK(samples[0].sample_id == "nt-1");
    CHECK(samples[0].question == "which team had the most wins?");
    CHECK(samples[0].gold_answers == std::vector<std::string>{"Falcons"});
    const Table& t = samples[0].table;
    CHECK(t.top_header_depth == 1);
    CHECK(t.left_header_width == 0);
    CHECK(t.n_rows == 4);
    CHECK(t.n_cols == 3);
    GridView grid(t);
    CHECK(grid.at(0, 0).text == "Year");
    CHECK(grid.at(1, 1).text == "Falcons");

    // multi-answer gold values split on "|"
    CHECK(samples[2].gold_answers == std::vector<std::string>{"2019", "2020"});

    // quoted CSV fields: embedded comma and embedded newline
    GridView notes(samples[4].table);
    CHECK(notes.at(1, 1).text == "good, year");
    CHECK(notes.at(2, 1).text == "line one\nline two");
}

TEST_CASE("wikitq adapter errors") {
    CHECK_THROWS_WITH_AS(load_wikitq(kFixtures + "/wikitq/ragged_questions.tsv"),
                         doctest::Contains("ragged row"), DataError);
    CHECK_THROWS_WITH_AS(load_wikitq(kFixtures + "/wikitq/missing_table.tsv"),
                         doctest::Contains("unresolvable table reference"),
                         DataError);
}

TEST_CASE("generated laminar tables always validate") {
    std::mt19937 rng(7);
    for (int i = 0; i < 100; ++i) {
        seeksolve::testing::GeneratedTable gen =
            seeksolve::testing::make_laminar_table(rng);
        CHECK_NOTHROW(gen.table.validate());
        Table back = table_from_json(table_to_json(gen.table));
        CHECK(back == gen.table);
    }
}
