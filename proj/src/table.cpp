#include "seeksolve/table.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "seeksolve/errors.hpp"

namespace seeksolve {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

void sort_cells(Table& table) {
    std::sort(table.cells.begin(), table.cells.end(), [](const Cell& a, const Cell& b) {
        return std::tie(a.row, a.col) < std::tie(b.row, b.col);
    });
}

/// Cell text as stored in loader inputs: trimmed, with empty header cells
/// replaced by a placeholder so tuple elements stay unambiguous in prompts.
std::string loader_text(const std::string& raw, bool is_header) {
    std::string t = trim(raw);
    if (t.empty() && is_header) return "(empty)";
    return t;
}

std::string json_scalar_to_string(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_null()) return "";
    return v.dump();
}

json must_get(const json& doc, const char* field, const std::string& where) {
    auto it = doc.find(field);
    if (it == doc.end())
        throw DataError(where + ": missing field \"" + field + "\"");
    return *it;
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open file: " + path.string());
    return in;
}

} // namespace

void Table::validate() const {
    GridView check(*this); // exact-coverage check lives in GridView
    (void)check;
}

GridView::GridView(const Table& table) : table_(&table) {
    if (table.n_rows <= 0 || table.n_cols <= 0)
        throw DataError("table " + table.id + ": empty grid");
    if (table.top_header_depth < 0 || table.top_header_depth >= table.n_rows)
        throw DataError("table " + table.id + ": top_header_depth " +
                        std::to_string(table.top_header_depth) +
                        " leaves no data rows");
    if (table.left_header_width < 0 || table.left_header_width >= table.n_cols)
        throw DataError("table " + table.id + ": left_header_width " +
                        std::to_string(table.left_header_width) +
                        " leaves no data columns");

    index_.assign(static_cast<size_t>(table.n_rows) * table.n_cols, -1);
    for (size_t i = 0; i < table.cells.size(); ++i) {
        const Cell& c = table.cells[i];
        if (c.row_span < 1 || c.col_span < 1 || c.row < 0 || c.col < 0 ||
            c.row_end() >= table.n_rows || c.col_end() >= table.n_cols)
            throw DataError("table " + table.id + ": cell at (" +
                            std::to_string(c.row) + "," + std::to_string(c.col) +
                            ") spans outside the grid");
        for (int r = c.row; r <= c.row_end(); ++r) {
            for (int col = c.col; col <= c.col_end(); ++col) {
                int& slot = index_[static_cast<size_t>(r) * table.n_cols + col];
                if (slot != -1)
                    throw DataError("table " + table.id + ": overlapping cells at (" +
                                    std::to_string(r) + "," + std::to_string(col) + ")");
                slot = static_cast<int>(i);
            }
        }
    }
    for (int r = 0; r < table.n_rows; ++r)
        for (int c = 0; c < table.n_cols; ++c)
            if (index_[static_cast<size_t>(r) * table.n_cols + c] == -1)
                throw DataError("table " + table.id + ": uncovered coordinate (" +
                                std::to_string(r) + "," + std::to_string(c) + ")");
}

const Cell& GridView::at(int row, int col) const {
    return table_->cells[static_cast<size_t>(
        index_[static_cast<size_t>(row) * table_->n_cols + col])];
}

std::string escape_cell_text(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (size_t i = 0; i < text.size(); ++i) {
        char ch = text[i];
        switch (ch) {
        case '\\': out += "\\\\"; break;
        case '|': out += "\\|"; break;
        case '\n': out += "\\n"; break;
        case '\r':
            out += "\\n";
            if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
            break;
        default: out.push_back(ch);
        }
    }
    return out;
}

std::vector<std::vector<std::string>> expanded_texts(const Table& table) {
    GridView grid(table);
    std::vector<std::vector<std::string>> out(
        static_cast<size_t>(table.n_rows),
        std::vector<std::string>(static_cast<size_t>(table.n_cols)));
    for (int r = 0; r < table.n_rows; ++r)
        for (int c = 0; c < table.n_cols; ++c)
            out[r][c] = grid.at(r, c).text;
    return out;
}

std::string render_markdown(const Table& table) {
    auto texts = expanded_texts(table);
    std::ostringstream out;
    for (int r = 0; r < table.n_rows; ++r) {
        out << "|";
        for (int c = 0; c < table.n_cols; ++c)
            out << " " << escape_cell_text(texts[r][c]) << " |";
        if (r + 1 < table.n_rows) out << "\n";
        if (r + 1 == table.top_header_depth) {
            out << "|";
            for (int c = 0; c < table.n_cols; ++c) out << " --- |";
            out << "\n";
        }
    }
    return out.str();
}

// --- interchange ---------------------------------------------------------

json table_to_json(const Table& table) {
    json cells = json::array();
    for (const Cell& c : table.cells) {
        cells.push_back({{"text", c.text},
                         {"row", c.row},
                         {"col", c.col},
                         {"row_span", c.row_span},
                         {"col_span", c.col_span},
                         {"is_header", c.is_header}});
    }
    return {{"id", table.id},
            {"title", table.title},
            {"n_rows", table.n_rows},
            {"n_cols", table.n_cols},
            {"top_header_depth", table.top_header_depth},
            {"left_header_width", table.left_header_width},
            {"cells", std::move(cells)}};
}

Table table_from_json(const json& doc) {
    if (!doc.is_object()) throw DataError("table document: expected an object");
    Table t;
    t.id = must_get(doc, "id", "table document").get<std::string>();
    t.title = doc.value("title", std::string{});
    t.n_rows = must_get(doc, "n_rows", "table " + t.id).get<int>();
    t.n_cols = must_get(doc, "n_cols", "table " + t.id).get<int>();
    t.top_header_depth = must_get(doc, "top_header_depth", "table " + t.id).get<int>();
    t.left_header_width = must_get(doc, "left_header_width", "table " + t.id).get<int>();
    for (const json& jc : must_get(doc, "cells", "table " + t.id)) {
        Cell c;
        c.text = must_get(jc, "text", "table " + t.id + " cell").get<std::string>();
        c.row = must_get(jc, "row", "table " + t.id + " cell").get<int>();
        c.col = must_get(jc, "col", "table " + t.id + " cell").get<int>();
        c.row_span = jc.value("row_span", 1);
        c.col_span = jc.value("col_span", 1);
        c.is_header = jc.value("is_header", false);
        t.cells.push_back(std::move(c));
    }
    sort_cells(t);
    t.validate();
    return t;
}

Table load_table_file(const std::filesystem::path& path) {
    auto in = open_or_throw(path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw DataError(path.string() + ": " + e.what());
    }
    return table_from_json(doc);
}

void save_table_file(const Table& table, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write file: " + path.string());
    out << table_to_json(table).dump(2) << "\n";
}

json sample_to_json(const QaSample& sample) {
    return {{"sample_id", sample.sample_id},
            {"question", sample.question},
            {"gold_answers", sample.gold_answers},
            {"table", table_to_json(sample.table)}};
}

QaSample sample_from_json(const json& doc) {
    QaSample s;
    s.sample_id = must_get(doc, "sample_id", "sample record").get<std::string>();
    s.question = must_get(doc, "question", "sample " + s.sample_id).get<std::string>();
    if (trim(s.question).empty())
        throw DataError("sample " + s.sample_id + ": empty question");
    for (const json& a : must_get(doc, "gold_answers", "sample " + s.sample_id))
        s.gold_answers.push_back(json_scalar_to_string(a));
    if (s.gold_answers.empty())
        throw DataError("sample " + s.sample_id + ": missing gold answer");
    s.table = table_from_json(must_get(doc, "table", "sample " + s.sample_id));
    return s;
}

std::vector<QaSample> load_interchange_samples(const std::filesystem::path& path) {
    auto in = open_or_throw(path);
    std::vector<QaSample> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        try {
            out.push_back(sample_from_json(json::parse(line)));
        } catch (const json::exception& e) {
            throw DataError(path.string() + " line " + std::to_string(line_no) +
                            ": " + e.what());
        } catch (const DataError& e) {
            throw DataError(path.string() + " line " + std::to_string(line_no) +
                            ": " + e.what());
        }
    }
    return out;
}

void save_interchange_samples(const std::vector<QaSample>& samples,
                              const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write file: " + path.string());
    for (const QaSample& s : samples) out << sample_to_json(s).dump() << "\n";
}

// --- HiTab adapter --------------------------------------------------------

namespace {

Table load_hitab_table(const std::filesystem::path& path, const std::string& table_id) {
    auto in = open_or_throw(path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw DataError(path.string() + ": " + e.what());
    }

    const json texts = must_get(doc, "texts", "table " + table_id);
    if (!texts.is_array() || texts.empty())
        throw DataError("table " + table_id + ": empty texts matrix");
    Table t;
    t.id = table_id;
    t.title = trim(doc.value("title", std::string{}));
    t.n_rows = static_cast<int>(texts.size());
    t.n_cols = static_cast<int>(texts.at(0).size());
    t.top_header_depth = must_get(doc, "top_header_rows_num", "table " + table_id).get<int>();
    t.left_header_width = must_get(doc, "left_header_columns_num", "table " + table_id).get<int>();

    for (const json& row : texts)
        if (static_cast<int>(row.size()) != t.n_cols)
            throw DataError("table " + table_id + ": ragged texts matrix");

    auto is_header = [&](int r, int c) {
        return r < t.top_header_depth || c < t.left_header_width;
    };

    std::vector<char> covered(static_cast<size_t>(t.n_rows) * t.n_cols, 0);
    if (auto it = doc.find("merged_regions"); it != doc.end()) {
        for (const json& region : *it) {
            int r0 = must_get(region, "first_row", "table " + table_id).get<int>();
            int r1 = must_get(region, "last_row", "table " + table_id).get<int>();
            int c0 = must_get(region, "first_column", "table " + table_id).get<int>();
            int c1 = must_get(region, "last_column", "table " + table_id).get<int>();
            if (r0 < 0 || c0 < 0 || r1 < r0 || c1 < c0 || r1 >= t.n_rows || c1 >= t.n_cols)
                throw DataError("table " + table_id + ": merged region out of bounds");
            Cell cell;
            cell.row = r0;
            cell.col = c0;
            cell.row_span = r1 - r0 + 1;
            cell.col_span = c1 - c0 + 1;
            cell.is_header = is_header(r0, c0);
            cell.text = loader_text(json_scalar_to_string(texts.at(r0).at(c0)),
                                    cell.is_header);
            t.cells.push_back(std::move(cell));
            for (int r = r0; r <= r1; ++r)
                for (int c = c0; c <= c1; ++c)
                    covered[static_cast<size_t>(r) * t.n_cols + c] = 1;
        }
    }
    for (int r = 0; r < t.n_rows; ++r) {
        for (int c = 0; c < t.n_cols; ++c) {
            if (covered[static_cast<size_t>(r) * t.n_cols + c]) continue;
            Cell cell;
            cell.row = r;
            cell.col = c;
            cell.is_header = is_header(r, c);
            cell.text = loader_text(json_scalar_to_string(texts.at(r).at(c)),
                                    cell.is_header);
            t.cells.push_back(std::move(cell));
        }
    }
    sort_cells(t);
    t.validate();
    return t;
}

std::filesystem::path find_hitab_table_file(const std::filesystem::path& base_dir,
                                            const std::string& table_id) {
    const std::filesystem::path candidates[] = {
        base_dir / "tables" / "raw" / (table_id + ".json"),
        base_dir / "tables" / (table_id + ".json"),
        base_dir / (table_id + ".json"),
    };
    for (const auto& p : candidates)
        if (std::filesystem::exists(p)) return p;
    throw DataError("missing table file for table id \"" + table_id + "\"");
}

} // namespace

std::vector<QaSample> load_hitab(const std::filesystem::path& question_file) {
    auto in = open_or_throw(question_file);
    const auto base_dir = question_file.parent_path();
    std::vector<QaSample> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::exception& e) {
            throw DataError(question_file.string() + " line " + std::to_string(line_no) +
                            ": " + e.what());
        }
        auto where = question_file.filename().string() + " line " + std::to_string(line_no);
        QaSample s;
        s.sample_id = json_scalar_to_string(must_get(rec, "id", where));
        s.question = trim(json_scalar_to_string(must_get(rec, "question", where)));
        if (s.question.empty()) throw DataError(where + ": empty question");
        auto ans = rec.find("answer");
        if (ans == rec.end() || !ans->is_array() || ans->empty())
            throw DataError(where + ": missing gold answer");
        for (const json& a : *ans) s.gold_answers.push_back(json_scalar_to_string(a));
        std::string table_id = json_scalar_to_string(must_get(rec, "table_id", where));
        s.table = load_hitab_table(find_hitab_table_file(base_dir, table_id), table_id);
        out.push_back(std::move(s));
    }
    return out;
}

// --- WikiTQ adapter ---------------------------------------------------------

namespace {

std::vector<std::string> split_tsv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == '\t') {
            fields.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    fields.push_back(cur);
    return fields;
}

/// Minimal CSV reader: quoted fields, doubled-quote escapes, embedded
/// newlines inside quotes.
std::vector<std::vector<std::string>> read_delimited(const std::filesystem::path& path,
                                                     char delim) {
    auto in = open_or_throw(path);
    std::string content((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    bool row_started = false;
    for (size_t i = 0; i < content.size(); ++i) {
        char ch = content[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < content.size() && content[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(ch);
            }
            continue;
        }
        if (ch == '"' && field.empty()) {
            quoted = true;
            row_started = true;
        } else if (ch == delim) {
            row.push_back(field);
            field.clear();
            row_started = true;
        } else if (ch == '\n' || ch == '\r') {
            if (ch == '\r' && i + 1 < content.size() && content[i + 1] == '\n') ++i;
            if (row_started || !field.empty()) {
                row.push_back(field);
                rows.push_back(std::move(row));
            }
            row.clear();
            field.clear();
            row_started = false;
        } else {
            field.push_back(ch);
            row_started = true;
        }
    }
    if (row_started || !field.empty()) {
        row.push_back(field);
        rows.push_back(std::move(row));
    }
    return rows;
}

Table load_wikitq_table(const std::filesystem::path& path, const std::string& ref) {
    char delim = path.extension() == ".tsv" ? '\t' : ',';
    auto rows = read_delimited(path, delim);
    if (rows.size() < 2)
        throw DataError("table \"" + ref + "\": needs a header row and at least one data row");
    Table t;
    t.id = ref;
    t.n_rows = static_cast<int>(rows.size());
    t.n_cols = static_cast<int>(rows[0].size());
    t.top_header_depth = 1;
    t.left_header_width = 0;
    for (int r = 0; r < t.n_rows; ++r) {
        if (static_cast<int>(rows[r].size()) != t.n_cols)
            throw DataError("table \"" + ref + "\": ragged row " + std::to_string(r) +
                            " has " + std::to_string(rows[r].size()) + " fields, expected " +
                            std::to_string(t.n_cols));
        for (int c = 0; c < t.n_cols; ++c) {
            Cell cell;
            cell.row = r;
            cell.col = c;
            cell.is_header = r == 0;
            cell.text = loader_text(rows[r][c], cell.is_header);
            t.cells.push_back(std::move(cell));
        }
    }
    t.validate();
    return t;
}

std::vector<std::string> split_gold_list(const std::string& value) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : value) {
        if (ch == '|') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    out.push_back(trim(cur));
    return out;
}

} // namespace

std::vector<QaSample> load_wikitq(const std::filesystem::path& question_file) {
    auto in = open_or_throw(question_file);
    const auto base_dir = question_file.parent_path();
    std::vector<QaSample> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto fields = split_tsv_line(line);
        if (line_no == 1 && !fields.empty() && fields[0] == "id") continue; // header
        auto where = question_file.filename().string() + " line " + std::to_string(line_no);
        if (fields.size() < 4)
            throw DataError(where + ": expected 4 tab-separated fields, got " +
                            std::to_string(fields.size()));
        QaSample s;
        s.sample_id = trim(fields[0]);
        s.question = trim(fields[1]);
        if (s.question.empty()) throw DataError(where + ": empty question");
        std::string gold = trim(fields[3]);
        if (gold.empty()) throw DataError(where + ": missing gold answer");
        s.gold_answers = split_gold_list(gold);

        std::string ref = trim(fields[2]);
        std::filesystem::path table_path = base_dir / ref;
        if (!std::filesystem::exists(table_path))
            table_path = base_dir.parent_path() / ref;
        if (!std::filesystem::exists(table_path))
            throw DataError(where + ": unresolvable table reference \"" + ref + "\"");
        s.table = load_wikitq_table(table_path, ref);
        out.push_back(std::move(s));
    }
    return out;
}

} // namespace seeksolve
