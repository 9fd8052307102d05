// Python face of the pipeline: table I/O, header trees, sub-table
// extraction, response parsing, scoring, and whole evaluation runs. Values
// cross the boundary as plain Python types; structured records go through
// the same JSON documents the C++ side persists.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <json.hpp>

#include "seeksolve/errors.hpp"
#include "seeksolve/eval.hpp"
#include "seeksolve/header_tree.hpp"
#include "seeksolve/parse.hpp"
#include "seeksolve/prompt.hpp"
#include "seeksolve/simplify.hpp"
#include "seeksolve/table.hpp"

namespace py = pybind11;
using namespace seeksolve;

namespace {

Axis axis_from_name(const std::string& name) {
    if (name == "row") return Axis::row;
    if (name == "column") return Axis::column;
    throw ConfigError("axis must be \"row\" or \"column\", got \"" + name + "\"");
}

nlohmann::json parse_json_or_throw(const std::string& text) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("not valid JSON: ") + e.what());
    }
}

/// nlohmann document -> native Python object, via the stdlib json module.
py::object to_py(const nlohmann::json& doc) {
    return py::module_::import("json").attr("loads")(doc.dump());
}

std::vector<TreePathTuple> tuples_of(const Table& table) {
    return merged_tuple_list(build_row_tree(table), build_column_tree(table));
}

py::dict seek_outcome_to_py(const SeekOutcome& outcome) {
    py::dict out;
    out["seek_cot"] = outcome.seek_cot;
    py::list selected;
    for (const TreePathTuple& t : outcome.result.selected) {
        py::dict entry;
        entry["tuple_id"] = t.tuple_id;
        entry["axis"] = std::string(axis_name(t.axis));
        entry["values"] = t.values;
        entry["rendered"] = render_tuple(t);
        selected.append(entry);
    }
    out["selected"] = selected;
    out["unmatched_mentions"] = outcome.result.unmatched_mentions;
    return out;
}

/// Mentions resolve through the same matching cascade stage-1 responses go
/// through; anything unresolved is an error here rather than a recorded miss.
SeekResult resolve_mentions(const Table& table,
                            const std::vector<std::string>& mentions) {
    std::string line = std::string(kSeekMarker);
    for (size_t i = 0; i < mentions.size(); ++i)
        line += (i == 0 ? " " : ", ") + mentions[i];
    SeekOutcome outcome = parse_seek(line, tuples_of(table));
    if (!outcome.result.unmatched_mentions.empty()) {
        std::string joined;
        for (const std::string& m : outcome.result.unmatched_mentions)
            joined += (joined.empty() ? "" : ", ") + m;
        throw DataError("no tuple matches: " + joined);
    }
    return outcome.result;
}

} // namespace

PYBIND11_MODULE(_seeksolve, m) {
    m.doc() = "Seek-and-Solve table question answering core";

    py::register_exception<Error>(m, "Error");

    py::class_<Table>(m, "Table")
        .def_readonly("id", &Table::id)
        .def_readonly("title", &Table::title)
        .def_readonly("n_rows", &Table::n_rows)
        .def_readonly("n_cols", &Table::n_cols)
        .def_readonly("top_header_depth", &Table::top_header_depth)
        .def_readonly("left_header_width", &Table::left_header_width)
        .def("to_markdown", &render_markdown)
        .def("to_json", [](const Table& t) { return table_to_json(t).dump(2); })
        .def("cell_texts", &expanded_texts,
             "Cell text matrix with merged spans expanded.")
        .def("__eq__",
             [](const Table& a, const Table& b) { return a == b; })
        .def("__repr__", [](const Table& t) {
            return "<seeksolve.Table '" + t.id + "' " + std::to_string(t.n_rows) +
                   "x" + std::to_string(t.n_cols) + ">";
        });

    m.def("load_table", &load_table_file, py::arg("path"),
          "Read an interchange table document from disk.");
    m.def(
        "table_from_json",
        [](const std::string& text) { return table_from_json(parse_json_or_throw(text)); },
        py::arg("text"), "Parse an interchange table document.");

    m.def(
        "render_tree",
        [](const Table& table, const std::string& axis) {
            return render_tree(axis_from_name(axis) == Axis::row
                                   ? build_row_tree(table)
                                   : build_column_tree(table));
        },
        py::arg("table"), py::arg("axis"),
        "Indented dump of the row or column header tree.");

    m.def(
        "tuple_list",
        [](const Table& table) {
            py::list out;
            for (const TreePathTuple& t : tuples_of(table)) {
                py::dict entry;
                entry["tuple_id"] = t.tuple_id;
                entry["axis"] = std::string(axis_name(t.axis));
                entry["values"] = t.values;
                entry["rendered"] = render_tuple(t);
                out.append(entry);
            }
            return out;
        },
        py::arg("table"),
        "Merged row-then-column tuple list, one entry per header-tree leaf.");

    m.def(
        "extract_subtable",
        [](const Table& table, const std::vector<std::string>& mentions) {
            return extract_subtable(table, build_row_tree(table),
                                    build_column_tree(table),
                                    resolve_mentions(table, mentions));
        },
        py::arg("table"), py::arg("mentions"),
        "Sub-table keeping the mentioned tuples' rows and columns (widened "
        "one header level); mentions may be rendered tuples or loose names.");

    m.def(
        "parse_seek",
        [](const std::string& response, const Table& table) {
            return seek_outcome_to_py(parse_seek(response, tuples_of(table)));
        },
        py::arg("response"), py::arg("table"),
        "Split a stage-1 response at its \"Selected tuples:\" line and match "
        "the mentions against the table's tuple list.");

    m.def(
        "parse_solve",
        [](const std::string& response) {
            SolveOutcome outcome = parse_solve(response);
            py::dict out;
            out["solve_cot"] = outcome.solve_cot;
            out["answers"] = outcome.answers;
            return out;
        },
        py::arg("response"),
        "Split a stage-2 response at its \"Answer:\" line.");

    m.def("score_answer", &score_answer, py::arg("predicted"), py::arg("gold"),
          "Normalized multiset equality between answer lists.");
    m.def("normalize_answer", &normalize_answer, py::arg("item"),
          "The per-item normalization used by score_answer.");

    m.def(
        "run",
        [](const std::filesystem::path& config_path) {
            RunConfig cfg = load_run_config(config_path);
            std::vector<QaSample> samples = load_dataset(cfg);
            std::vector<Prediction> preds =
                cfg.mode == RunMode::two_stage ? run_two_stage(cfg, samples)
                                               : run_single_stage(cfg, samples);
            return to_py(report_to_json(report(preds)));
        },
        py::arg("config_path"),
        "Execute an evaluation run from a config file; returns the report "
        "as a dict. Outputs land under the config's run_dir.");

    m.def(
        "recount",
        [](const std::filesystem::path& trace_file) {
            return to_py(report_to_json(recount_trace(trace_file)));
        },
        py::arg("trace_file"),
        "Re-score a trace.jsonl and aggregate a fresh report dict.");
}
