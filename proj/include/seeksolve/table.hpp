#pragma once

#include <compare>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace seeksolve {

/// One table cell anchored at its top-left coordinate. Merged regions are a
/// single Cell with row_span/col_span > 1.
struct Cell {
    std::string text;
    int row = 0;
    int col = 0;
    int row_span = 1;
    int col_span = 1;
    bool is_header = false;

    int row_end() const { return row + row_span - 1; }
    int col_end() const { return col + col_span - 1; }
    bool covers(int r, int c) const {
        return r >= row && r <= row_end() && c >= col && c <= col_end();
    }
    auto operator<=>(const Cell&) const = default;
};

/// Rectangular cell grid with merged-cell spans and header bookkeeping.
/// Every grid coordinate must be covered by exactly one cell's span, and
/// there must be at least one data row and one data column.
struct Table {
    std::string id;
    std::string title;
    int n_rows = 0;
    int n_cols = 0;
    int top_header_depth = 0;   // column-header rows
    int left_header_width = 0;  // row-header columns
    std::vector<Cell> cells;    // kept sorted by (row, col)

    int data_row_begin() const { return top_header_depth; }
    int data_col_begin() const { return left_header_width; }

    /// Throws DataError if the grid invariants do not hold.
    void validate() const;

    bool operator==(const Table&) const = default;
};

/// Coverage map over a validated table; answers "which cell covers (r, c)".
class GridView {
public:
    explicit GridView(const Table& table);
    const Cell& at(int row, int col) const;
    const Table& table() const { return *table_; }

private:
    const Table* table_;
    std::vector<int> index_;
};

/// The scored unit: one question over one table.
struct QaSample {
    std::string sample_id;
    Table table;
    std::string question;
    std::vector<std::string> gold_answers;
};

/// Pipe-delimited Markdown with one separator line after the final
/// column-header row. Merged cells repeat their text into every covered
/// position; pipes, backslashes, and newlines in cell text are escaped.
std::string render_markdown(const Table& table);

/// Cell text escaping used by render_markdown.
std::string escape_cell_text(const std::string& text);

/// n_rows x n_cols matrix of cell texts with spans expanded.
std::vector<std::vector<std::string>> expanded_texts(const Table& table);

// --- internal interchange format ---------------------------------------

nlohmann::json table_to_json(const Table& table);
Table table_from_json(const nlohmann::json& doc);
Table load_table_file(const std::filesystem::path& path);
void save_table_file(const Table& table, const std::filesystem::path& path);

/// Line-delimited QaSample records carrying interchange tables; the "custom"
/// dataset format consumed by the eval harness.
std::vector<QaSample> load_interchange_samples(const std::filesystem::path& path);
void save_interchange_samples(const std::vector<QaSample>& samples,
                              const std::filesystem::path& path);
nlohmann::json sample_to_json(const QaSample& sample);
QaSample sample_from_json(const nlohmann::json& doc);

// --- dataset adapters ---------------------------------------------------

/// HiTab adapter. `question_file` is the released line-delimited sample file;
/// per-table JSON documents are looked up next to it under tables/raw/ (or
/// tables/). Field mapping, sample line -> QaSample:
///   id -> sample_id, question -> question, answer[] -> gold_answers,
///   table_id -> table document <table_id>.json with
///     texts[][]               cell text matrix (anchor position holds text)
///     merged_regions[]        {first_row, last_row, first_column, last_column}
///     top_header_rows_num     Table.top_header_depth
///     left_header_columns_num Table.left_header_width
///     title                   Table.title
std::vector<QaSample> load_hitab(const std::filesystem::path& question_file);

/// WikiTQ adapter. `question_file` is the released tab-separated question
/// file (id, utterance, context, targetValue); `context` names a CSV/TSV
/// table file resolved relative to the question file's directory, then its
/// parent. Tables load flat: top_header_depth = 1, left_header_width = 0.
/// Multi-answer targetValue fields split on "|".
std::vector<QaSample> load_wikitq(const std::filesystem::path& question_file);

} // namespace seeksolve
