#include "seeksolve/eval.hpp"

#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <fstream>

#include "seeksolve/errors.hpp"
#include "seeksolve/parse.hpp"
#include "seeksolve/simplify.hpp"

namespace seeksolve {

namespace {

std::string trim(std::string_view s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

enum class DatasetKind { custom, hitab, wikitq };

DatasetKind dataset_kind(const std::string& name) {
    if (name == "custom") return DatasetKind::custom;
    if (name.starts_with("hitab")) return DatasetKind::hitab;
    if (name.starts_with("wikitq")) return DatasetKind::wikitq;
    throw ConfigError("unknown dataset \"" + name +
                      "\"; expected custom, hitab_*, or wikitq_*");
}

std::filesystem::path resolve(const std::filesystem::path& path,
                              const std::filesystem::path& base_dir) {
    if (path.empty() || path.is_absolute() || base_dir.empty()) return path;
    return base_dir / path;
}

nlohmann::json prompt_to_json(const Prompt& prompt) {
    return {{"system", prompt.system_text},
            {"user", prompt.user_text},
            {"variant_tag", prompt.variant_tag}};
}

Prompt prompt_from_json(const nlohmann::json& doc) {
    Prompt p;
    p.system_text = doc.value("system", "");
    p.user_text = doc.value("user", "");
    p.variant_tag = doc.value("variant_tag", "");
    return p;
}

bool parse_number(const std::string& s, double& out) {
    if (s.empty()) return false;
    errno = 0;
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || errno == ERANGE) return false;
    out = v;
    return true;
}

bool items_match(const std::string& a, const std::string& b) {
    std::string na = normalize_answer(a), nb = normalize_answer(b);
    double x = 0, y = 0;
    if (parse_number(na, x) && parse_number(nb, y)) {
        double tol = 1e-6 * std::max(std::abs(x), std::abs(y));
        return std::abs(x - y) <= std::max(tol, 1e-6);
    }
    return na == nb;
}

/// Per-sample working state threaded through the batch phases.
struct WorkItem {
    const QaSample* sample = nullptr;
    Prediction pred;
    std::vector<TreePathTuple> tuples;
    HeaderTree row_tree;
    HeaderTree col_tree;
    bool tree_ok = false;
    std::optional<SeekOutcome> seek;
};

void add_flag(Prediction& pred, std::string_view flag) {
    if (!pred.has_flag(flag)) pred.flags.emplace_back(flag);
}

void finish_from_solve_response(WorkItem& item, const Completion& completion) {
    Prediction& pred = item.pred;
    if (!completion.ok()) {
        pred.stage2_response = "";
        add_flag(pred, kFlagStage2BackendError);
        return;
    }
    pred.stage2_response = completion.text;
    try {
        SolveOutcome solve = parse_solve(completion.text);
        pred.answers = solve.answers;
        pred.correct = score_answer(pred.answers, pred.gold_answers);
    } catch (const ParseError&) {
        add_flag(pred, kFlagAnswerParseFailed);
    }
}

} // namespace

std::string_view run_mode_name(RunMode mode) {
    return mode == RunMode::two_stage ? "two_stage" : "single_stage";
}

RunMode run_mode_from_name(const std::string& name) {
    if (name == "two_stage") return RunMode::two_stage;
    if (name == "single_stage") return RunMode::single_stage;
    throw ConfigError("unknown run mode \"" + name +
                      "\"; expected \"two_stage\" or \"single_stage\"");
}

RunConfig run_config_from_json(const nlohmann::json& doc,
                               const std::filesystem::path& base_dir) {
    RunConfig cfg;
    try {
        cfg.dataset = doc.value("dataset", cfg.dataset);
        dataset_kind(cfg.dataset);
        if (!doc.contains("dataset_path"))
            throw ConfigError("run config needs \"dataset_path\"");
        cfg.dataset_path =
            resolve(doc.at("dataset_path").get<std::string>(), base_dir);
        cfg.mode = run_mode_from_name(
            doc.value("mode", std::string(run_mode_name(cfg.mode))));
        cfg.variant = SolveVariant::from_tag(doc.value("variant", cfg.variant.tag()));
        cfg.demo_cot_kind = demo_cot_kind_from_name(doc.value(
            "demo_cot", std::string(demo_cot_kind_name(cfg.demo_cot_kind))));
        if (!doc.contains("demo"))
            throw ConfigError("run config needs \"demo\" (demonstration file)");
        cfg.demo_path = resolve(doc.at("demo").get<std::string>(), base_dir);
        if (!doc.contains("run_dir"))
            throw ConfigError("run config needs \"run_dir\"");
        cfg.run_dir = resolve(doc.at("run_dir").get<std::string>(), base_dir);

        if (doc.contains("backend")) {
            cfg.stage1_backend = backend_from_json(doc.at("backend"), base_dir);
            cfg.stage2_backend = cfg.stage1_backend;
        }
        if (doc.contains("stage1_backend"))
            cfg.stage1_backend = backend_from_json(doc.at("stage1_backend"), base_dir);
        if (doc.contains("stage2_backend"))
            cfg.stage2_backend = backend_from_json(doc.at("stage2_backend"), base_dir);
        if (!doc.contains("backend") && !doc.contains("stage2_backend") &&
            !(cfg.mode == RunMode::two_stage && doc.contains("stage1_backend")))
            throw ConfigError("run config needs a \"backend\" (or per-stage "
                              "\"stage1_backend\"/\"stage2_backend\")");
        if (cfg.mode == RunMode::two_stage && !doc.contains("backend") &&
            (!doc.contains("stage1_backend") || !doc.contains("stage2_backend")))
            throw ConfigError("two-stage runs need both stage backends (or a "
                              "shared \"backend\")");

        cfg.decode = decode_from_json(doc.value("decode", nlohmann::json::object()));
        cfg.parallelism = doc.value("parallelism", cfg.parallelism);
        cfg.limit = doc.value("limit", cfg.limit);
    } catch (const nlohmann::json::exception& err) {
        throw ConfigError(std::string("bad run config: ") + err.what());
    }

    if (!cfg.variant.realizable())
        throw ConfigError("variant " + cfg.variant.tag() + " is not realizable");
    if (cfg.parallelism < 1) throw ConfigError("parallelism must be >= 1");
    if (cfg.limit < 0) throw ConfigError("limit must be >= 0");
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open run config " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& err) {
        throw ConfigError("run config " + path.string() +
                          " is not valid JSON: " + err.what());
    }
    return run_config_from_json(doc, path.parent_path());
}

bool Prediction::has_flag(std::string_view flag) const {
    for (const std::string& f : flags)
        if (f == flag) return true;
    return false;
}

nlohmann::json prediction_to_json(const Prediction& pred) {
    return {{"sample_id", pred.sample_id},
            {"variant_tag", pred.variant_tag},
            {"stage1_prompt", prompt_to_json(pred.stage1_prompt)},
            {"stage2_prompt", prompt_to_json(pred.stage2_prompt)},
            {"stage1_digest", pred.stage1_digest},
            {"stage2_digest", pred.stage2_digest},
            {"stage1_response", pred.stage1_response},
            {"stage2_response", pred.stage2_response},
            {"seek_cot", pred.seek_cot},
            {"selected_tuple_ids", pred.selected_tuple_ids},
            {"unmatched_mentions", pred.unmatched_mentions},
            {"answers", pred.answers},
            {"gold_answers", pred.gold_answers},
            {"flags", pred.flags},
            {"correct", pred.correct}};
}

Prediction prediction_from_json(const nlohmann::json& doc) {
    try {
        Prediction pred;
        pred.sample_id = doc.at("sample_id").get<std::string>();
        pred.variant_tag = doc.value("variant_tag", "");
        pred.stage1_prompt =
            prompt_from_json(doc.value("stage1_prompt", nlohmann::json::object()));
        pred.stage2_prompt =
            prompt_from_json(doc.value("stage2_prompt", nlohmann::json::object()));
        pred.stage1_digest = doc.value("stage1_digest", "");
        pred.stage2_digest = doc.value("stage2_digest", "");
        pred.stage1_response = doc.value("stage1_response", "");
        pred.stage2_response = doc.value("stage2_response", "");
        pred.seek_cot = doc.value("seek_cot", "");
        pred.selected_tuple_ids =
            doc.value("selected_tuple_ids", std::vector<std::string>{});
        pred.unmatched_mentions =
            doc.value("unmatched_mentions", std::vector<std::string>{});
        pred.answers = doc.value("answers", std::vector<std::string>{});
        pred.gold_answers = doc.value("gold_answers", std::vector<std::string>{});
        pred.flags = doc.value("flags", std::vector<std::string>{});
        pred.correct = doc.value("correct", false);
        return pred;
    } catch (const nlohmann::json::exception& err) {
        throw DataError(std::string("bad trace record: ") + err.what());
    }
}

nlohmann::json report_to_json(const EvalReport& report) {
    nlohmann::json per_variant = nlohmann::json::object();
    for (const auto& [tag, stats] : report.per_variant)
        per_variant[tag] = {{"n", stats.n},
                            {"correct", stats.correct},
                            {"accuracy", stats.accuracy}};
    return {{"accuracy", report.accuracy},
            {"n_samples", report.n_samples},
            {"n_correct", report.n_correct},
            {"n_parse_failures", report.n_parse_failures},
            {"n_fallbacks", report.n_fallbacks},
            {"empty_run", report.empty_run},
            {"per_variant", std::move(per_variant)}};
}

std::vector<QaSample> load_dataset(const RunConfig& cfg) {
    std::vector<QaSample> samples;
    switch (dataset_kind(cfg.dataset)) {
        case DatasetKind::custom:
            samples = load_interchange_samples(cfg.dataset_path);
            break;
        case DatasetKind::hitab:
            samples = load_hitab(cfg.dataset_path);
            break;
        case DatasetKind::wikitq:
            samples = load_wikitq(cfg.dataset_path);
            break;
    }
    if (cfg.limit > 0 && static_cast<int>(samples.size()) > cfg.limit)
        samples.resize(static_cast<size_t>(cfg.limit));
    return samples;
}

std::string normalize_answer(const std::string& item) {
    std::string s = trim(item);
    if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                          (s.front() == '\'' && s.back() == '\'')))
        s = trim(s.substr(1, s.size() - 2));

    std::string folded;
    folded.reserve(s.size());
    bool pending_space = false;
    for (char ch : s) {
        if (std::isspace(static_cast<unsigned char>(ch))) {
            pending_space = !folded.empty();
            continue;
        }
        if (pending_space) folded.push_back(' ');
        pending_space = false;
        folded.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    }

    std::string out;
    out.reserve(folded.size());
    for (size_t i = 0; i < folded.size(); ++i) {
        if (folded[i] == ',' && i > 0 && i + 1 < folded.size() &&
            std::isdigit(static_cast<unsigned char>(folded[i - 1])) &&
            std::isdigit(static_cast<unsigned char>(folded[i + 1])))
            continue; // thousands separator
        out.push_back(folded[i]);
    }

    if (!out.empty() && out.back() == '%') {
        out.pop_back();
        out = trim(out);
    }
    return out;
}

bool score_answer(const std::vector<std::string>& predicted,
                  const std::vector<std::string>& gold) {
    if (predicted.size() != gold.size() || gold.empty()) return false;
    std::vector<bool> used(predicted.size(), false);
    for (const std::string& g : gold) {
        bool matched = false;
        for (size_t i = 0; i < predicted.size() && !matched; ++i) {
            if (used[i] || !items_match(predicted[i], g)) continue;
            used[i] = true;
            matched = true;
        }
        if (!matched) return false;
    }
    return true;
}

EvalReport report(const std::vector<Prediction>& predictions) {
    EvalReport out;
    out.n_samples = static_cast<int>(predictions.size());
    out.empty_run = predictions.empty();
    for (const Prediction& pred : predictions) {
        if (pred.correct) ++out.n_correct;
        if (pred.has_flag(kFlagSeekParseFailed) ||
            pred.has_flag(kFlagAnswerParseFailed))
            ++out.n_parse_failures;
        if (pred.has_flag(kFlagFallback)) ++out.n_fallbacks;
        VariantStats& stats = out.per_variant[pred.variant_tag];
        ++stats.n;
        if (pred.correct) ++stats.correct;
    }
    if (out.n_samples > 0)
        out.accuracy = static_cast<double>(out.n_correct) / out.n_samples;
    for (auto& [tag, stats] : out.per_variant)
        if (stats.n > 0) stats.accuracy = static_cast<double>(stats.correct) / stats.n;
    return out;
}

void write_run_outputs(const std::filesystem::path& run_dir,
                       const std::vector<Prediction>& predictions) {
    std::filesystem::create_directories(run_dir);
    {
        std::ofstream out(run_dir / "trace.jsonl", std::ios::binary | std::ios::trunc);
        for (const Prediction& pred : predictions)
            out << prediction_to_json(pred).dump() << "\n";
        if (!out)
            throw DataError("cannot write " + (run_dir / "trace.jsonl").string());
    }
    std::ofstream out(run_dir / "report.json", std::ios::binary | std::ios::trunc);
    out << report_to_json(report(predictions)).dump(2) << "\n";
    if (!out) throw DataError("cannot write " + (run_dir / "report.json").string());
}

std::vector<Prediction> load_trace(const std::filesystem::path& trace_file) {
    std::ifstream in(trace_file, std::ios::binary);
    if (!in) throw DataError("cannot open trace file " + trace_file.string());
    std::vector<Prediction> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        try {
            out.push_back(prediction_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& err) {
            throw DataError(trace_file.string() + ":" + std::to_string(line_no) +
                            ": not valid JSON: " + err.what());
        } catch (const DataError& err) {
            throw DataError(trace_file.string() + ":" + std::to_string(line_no) +
                            ": " + err.what());
        }
    }
    return out;
}

EvalReport recount_trace(const std::filesystem::path& trace_file) {
    std::vector<Prediction> predictions = load_trace(trace_file);
    for (Prediction& pred : predictions)
        pred.correct = score_answer(pred.answers, pred.gold_answers);
    return report(predictions);
}

std::vector<Prediction> run_two_stage(const RunConfig& cfg,
                                      const std::vector<QaSample>& samples,
                                      RunStats* stats) {
    Demonstration demo = load_demonstration(cfg.demo_path);
    Gateway stage1(cfg.stage1_backend, cfg.decode, cfg.run_dir / "cache");
    Gateway stage2(cfg.stage2_backend, cfg.decode, cfg.run_dir / "cache");

    std::vector<WorkItem> items(samples.size());
    for (size_t i = 0; i < samples.size(); ++i) {
        WorkItem& item = items[i];
        item.sample = &samples[i];
        item.pred.sample_id = samples[i].sample_id;
        item.pred.gold_answers = samples[i].gold_answers;
        try {
            item.row_tree = build_row_tree(samples[i].table);
            item.col_tree = build_column_tree(samples[i].table);
            item.tuples = merged_tuple_list(item.row_tree, item.col_tree);
            item.tree_ok = true;
            item.pred.stage1_prompt =
                build_seek_prompt(samples[i].question, item.tuples, demo);
            item.pred.stage1_digest = item.pred.stage1_prompt.digest();
        } catch (const StructureError&) {
            add_flag(item.pred, kFlagTreeError);
            add_flag(item.pred, kFlagFallback);
        }
    }

    // Stage 1, one batch for the whole run.
    std::vector<Prompt> seek_prompts;
    std::vector<size_t> seek_slots;
    for (size_t i = 0; i < items.size(); ++i) {
        if (!items[i].tree_ok) continue;
        seek_prompts.push_back(items[i].pred.stage1_prompt);
        seek_slots.push_back(i);
    }
    std::vector<Completion> seek_done =
        stage1.complete_batch(seek_prompts, cfg.parallelism);

    for (size_t s = 0; s < seek_slots.size(); ++s) {
        WorkItem& item = items[seek_slots[s]];
        if (!seek_done[s].ok()) {
            add_flag(item.pred, kFlagStage1BackendError);
            add_flag(item.pred, kFlagFallback);
            continue;
        }
        item.pred.stage1_response = seek_done[s].text;
        try {
            item.seek = parse_seek(seek_done[s].text, item.tuples);
            item.pred.seek_cot = item.seek->seek_cot;
            item.pred.unmatched_mentions = item.seek->result.unmatched_mentions;
            for (const TreePathTuple& t : item.seek->result.selected)
                item.pred.selected_tuple_ids.push_back(t.tuple_id);
        } catch (const ParseError&) {
            add_flag(item.pred, kFlagSeekParseFailed);
            add_flag(item.pred, kFlagFallback);
        }
    }

    // Stage 2: pick each sample's effective variant, then one batch.
    for (WorkItem& item : items) {
        SolveVariant variant = cfg.variant;
        std::optional<SeekOutcome> seek_for_prompt;
        SolveMaterials materials;

        if (!item.tree_ok) {
            // No trees, so no tuples, hints, or sub-tables are available.
            variant = SolveVariant{TableSlot::full_table, InfoSlot::none,
                                   CotSlot::from_scratch};
        } else if (!item.seek) {
            // Stage-1 failure: answer from scratch over the full table,
            // keeping the seek-independent tuple list if the variant had it.
            variant.cot_slot = CotSlot::from_scratch;
            variant.table_slot = TableSlot::full_table;
            if (variant.info_slot == InfoSlot::hint) variant.info_slot = InfoSlot::none;
            materials.tuples = item.tuples;
        } else if (item.seek->result.selected.empty()) {
            // Parsed fine but picked nothing: the full table stands in for
            // the sub-table and the full list for the hint.
            add_flag(item.pred, kFlagFallback);
            variant.table_slot = TableSlot::full_table;
            if (variant.info_slot == InfoSlot::hint)
                variant.info_slot = variant.cot_slot == CotSlot::consecutive
                                        ? InfoSlot::full_list
                                        : InfoSlot::none;
            seek_for_prompt = item.seek;
            materials.tuples = item.tuples;
        } else {
            seek_for_prompt = item.seek;
            materials.tuples = item.tuples;
            if (variant.info_slot == InfoSlot::hint)
                materials.hint = format_hint(item.seek->result);
            if (variant.table_slot == TableSlot::sub_table) {
                try {
                    materials.sub_table =
                        extract_subtable(item.sample->table, item.row_tree,
                                         item.col_tree, item.seek->result);
                } catch (const Error&) {
                    add_flag(item.pred, kFlagTreeError);
                    add_flag(item.pred, kFlagFallback);
                    variant.table_slot = TableSlot::full_table;
                }
            }
        }

        item.pred.variant_tag = variant.tag();
        item.pred.stage2_prompt =
            build_solve_prompt(item.sample->question, item.sample->table, variant,
                               seek_for_prompt, materials, demo);
        item.pred.stage2_digest = item.pred.stage2_prompt.digest();
    }

    std::vector<Prompt> solve_prompts;
    solve_prompts.reserve(items.size());
    for (const WorkItem& item : items) solve_prompts.push_back(item.pred.stage2_prompt);
    std::vector<Completion> solve_done =
        stage2.complete_batch(solve_prompts, cfg.parallelism);

    std::vector<Prediction> predictions;
    predictions.reserve(items.size());
    for (size_t i = 0; i < items.size(); ++i) {
        finish_from_solve_response(items[i], solve_done[i]);
        predictions.push_back(std::move(items[i].pred));
    }

    write_run_outputs(cfg.run_dir, predictions);
    if (stats) {
        stats->stage1_backend_calls = stage1.backend_calls();
        stats->stage2_backend_calls = stage2.backend_calls();
    }
    return predictions;
}

std::vector<Prediction> run_single_stage(const RunConfig& cfg,
                                         const std::vector<QaSample>& samples,
                                         RunStats* stats) {
    Demonstration demo = load_demonstration(cfg.demo_path);
    Gateway gateway(cfg.stage2_backend, cfg.decode, cfg.run_dir / "cache");

    std::vector<WorkItem> items(samples.size());
    for (size_t i = 0; i < samples.size(); ++i) {
        WorkItem& item = items[i];
        item.sample = &samples[i];
        item.pred.sample_id = samples[i].sample_id;
        item.pred.gold_answers = samples[i].gold_answers;
        try {
            std::vector<TreePathTuple> tuples = merged_tuple_list(
                build_row_tree(samples[i].table), build_column_tree(samples[i].table));
            item.pred.stage2_prompt = build_tqa_prompt(
                samples[i].question, samples[i].table, tuples, demo, cfg.demo_cot_kind);
        } catch (const StructureError&) {
            // No header trees means no tuple list; a bare full-table prompt
            // keeps the sample answerable.
            add_flag(item.pred, kFlagTreeError);
            add_flag(item.pred, kFlagFallback);
            item.pred.stage2_prompt = build_solve_prompt(
                samples[i].question, samples[i].table,
                SolveVariant{TableSlot::full_table, InfoSlot::none,
                             CotSlot::from_scratch},
                std::nullopt, SolveMaterials{}, demo);
        }
        item.pred.variant_tag = item.pred.stage2_prompt.variant_tag;
        item.pred.stage2_digest = item.pred.stage2_prompt.digest();
    }

    std::vector<Prompt> prompts;
    prompts.reserve(items.size());
    for (const WorkItem& item : items) prompts.push_back(item.pred.stage2_prompt);
    std::vector<Completion> done = gateway.complete_batch(prompts, cfg.parallelism);

    std::vector<Prediction> predictions;
    predictions.reserve(items.size());
    for (size_t i = 0; i < items.size(); ++i) {
        finish_from_solve_response(items[i], done[i]);
        predictions.push_back(std::move(items[i].pred));
    }

    write_run_outputs(cfg.run_dir, predictions);
    if (stats) stats->stage2_backend_calls = gateway.backend_calls();
    return predictions;
}

} // namespace seeksolve
