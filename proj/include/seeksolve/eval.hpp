#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "seeksolve/gateway.hpp"
#include "seeksolve/prompt.hpp"
#include "seeksolve/table.hpp"

namespace seeksolve {

enum class RunMode { two_stage, single_stage };

std::string_view run_mode_name(RunMode mode);
RunMode run_mode_from_name(const std::string& name);

/// One evaluation run. Two-stage runs may point each stage at a different
/// backend; single-stage runs use stage2_backend only.
struct RunConfig {
    std::string dataset = "custom"; // hitab_dev | hitab_test | wikitq_test | custom
    std::filesystem::path dataset_path;
    RunMode mode = RunMode::two_stage;
    SolveVariant variant{TableSlot::full_table, InfoSlot::full_list,
                         CotSlot::consecutive};
    DemoCotKind demo_cot_kind = DemoCotKind::ss_cot;
    std::filesystem::path demo_path;
    BackendSpec stage1_backend;
    BackendSpec stage2_backend;
    DecodeConfig decode;
    int parallelism = 1;
    std::filesystem::path run_dir;
    int limit = 0; // 0 = all samples
};

RunConfig run_config_from_json(const nlohmann::json& doc,
                               const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

// Flags recorded on predictions.
inline constexpr std::string_view kFlagSeekParseFailed = "seek-parse-failed";
inline constexpr std::string_view kFlagAnswerParseFailed = "answer-parse-failed";
inline constexpr std::string_view kFlagFallback = "fallback";
inline constexpr std::string_view kFlagTreeError = "tree-error";
inline constexpr std::string_view kFlagStage1BackendError = "stage1-backend-error";
inline constexpr std::string_view kFlagStage2BackendError = "stage2-backend-error";

/// Everything recorded about one sample: prompts, raw responses, parsed
/// outcomes, fallback flags, and the verdict.
struct Prediction {
    std::string sample_id;
    std::string variant_tag; // variant actually used, after any fallback
    Prompt stage1_prompt;
    Prompt stage2_prompt;
    std::string stage1_digest;
    std::string stage2_digest;
    std::string stage1_response;
    std::string stage2_response;
    std::string seek_cot;
    std::vector<std::string> selected_tuple_ids;
    std::vector<std::string> unmatched_mentions;
    std::vector<std::string> answers;
    std::vector<std::string> gold_answers;
    std::vector<std::string> flags;
    bool correct = false;

    bool has_flag(std::string_view flag) const;
};

nlohmann::json prediction_to_json(const Prediction& pred);
Prediction prediction_from_json(const nlohmann::json& doc);

struct VariantStats {
    int n = 0;
    int correct = 0;
    double accuracy = 0.0;
};

struct EvalReport {
    double accuracy = 0.0;
    int n_samples = 0;
    int n_correct = 0;
    int n_parse_failures = 0;
    int n_fallbacks = 0;
    bool empty_run = false;
    std::map<std::string, VariantStats> per_variant;

    bool operator==(const EvalReport&) const = default;
};

nlohmann::json report_to_json(const EvalReport& report);

/// Backend traffic counters surfaced to callers (not part of the report, so
/// reports stay byte-identical across cached reruns).
struct RunStats {
    int stage1_backend_calls = 0;
    int stage2_backend_calls = 0;
};

std::vector<QaSample> load_dataset(const RunConfig& cfg);

/// Seek then Solve per sample, with full-table fallback on empty or failed
/// Seek (flagged). Prompts run through the gateway in index order; responses
/// and the run cache land under cfg.run_dir.
std::vector<Prediction> run_two_stage(const RunConfig& cfg,
                                      const std::vector<QaSample>& samples,
                                      RunStats* stats = nullptr);

/// One TQA-solving call per sample with cfg.demo_cot_kind demonstrations.
std::vector<Prediction> run_single_stage(const RunConfig& cfg,
                                         const std::vector<QaSample>& samples,
                                         RunStats* stats = nullptr);

/// Normalized multiset equality between predicted and gold answers. Items
/// are trimmed, unquoted, lowercased, whitespace-collapsed, stripped of
/// thousands separators and a trailing "%", and compared numerically when
/// both sides parse as numbers (relative tolerance 1e-6, absolute near 0).
bool score_answer(const std::vector<std::string>& predicted,
                  const std::vector<std::string>& gold);

/// The per-item normalization used by score_answer, exposed for inspection.
std::string normalize_answer(const std::string& item);

EvalReport report(const std::vector<Prediction>& predictions);

/// trace.jsonl (one prediction per line) and report.json under run_dir.
void write_run_outputs(const std::filesystem::path& run_dir,
                       const std::vector<Prediction>& predictions);

std::vector<Prediction> load_trace(const std::filesystem::path& trace_file);

/// Re-scores every trace record from its stored answers and gold list and
/// aggregates a fresh report, independent of the persisted one.
EvalReport recount_trace(const std::filesystem::path& trace_file);

} // namespace seeksolve
