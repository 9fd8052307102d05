#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "seeksolve/errors.hpp"
#include "seeksolve/eval.hpp"
#include "seeksolve/header_tree.hpp"
#include "seeksolve/parse.hpp"
#include "seeksolve/prompt.hpp"
#include "seeksolve/simplify.hpp"
#include "seeksolve/table.hpp"

namespace {

using namespace seeksolve;

std::string numbered(const std::vector<TreePathTuple>& tuples) {
    std::string out;
    for (size_t i = 0; i < tuples.size(); ++i)
        out += std::to_string(i + 1) + ". " + render_tuple(tuples[i]) + "\n";
    return out;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct RunArgs {
    std::string config;
    std::string dataset, dataset_path, mode, variant, demo_cot, demo, run_dir;
    std::string endpoint, model;
    int parallelism = 0, seed = 0, max_tokens = 0, limit = 0;
    double temperature = 0.0;
};

int cmd_run(const CLI::App& sub, const RunArgs& args) {
    RunConfig cfg = load_run_config(args.config);

    if (sub.count("--dataset")) cfg.dataset = args.dataset;
    if (sub.count("--dataset-path")) cfg.dataset_path = args.dataset_path;
    if (sub.count("--mode")) cfg.mode = run_mode_from_name(args.mode);
    if (sub.count("--variant")) cfg.variant = SolveVariant::from_tag(args.variant);
    if (sub.count("--demo-cot"))
        cfg.demo_cot_kind = demo_cot_kind_from_name(args.demo_cot);
    if (sub.count("--demo")) cfg.demo_path = args.demo;
    if (sub.count("--run-dir")) cfg.run_dir = args.run_dir;
    if (sub.count("--endpoint")) {
        cfg.stage1_backend.endpoint = args.endpoint;
        cfg.stage2_backend.endpoint = args.endpoint;
    }
    if (sub.count("--model")) {
        cfg.stage1_backend.model_name = args.model;
        cfg.stage2_backend.model_name = args.model;
    }
    if (sub.count("--parallelism")) cfg.parallelism = args.parallelism;
    if (sub.count("--seed")) cfg.decode.seed = args.seed;
    if (sub.count("--max-tokens")) cfg.decode.max_tokens = args.max_tokens;
    if (sub.count("--temperature")) cfg.decode.temperature = args.temperature;
    if (sub.count("--limit")) cfg.limit = args.limit;
    if (cfg.parallelism < 1) throw ConfigError("parallelism must be >= 1");
    if (!cfg.variant.realizable())
        throw ConfigError("variant " + cfg.variant.tag() + " is not realizable");

    std::vector<QaSample> samples = load_dataset(cfg);
    RunStats stats;
    std::vector<Prediction> predictions =
        cfg.mode == RunMode::two_stage ? run_two_stage(cfg, samples, &stats)
                                       : run_single_stage(cfg, samples, &stats);

    std::cerr << "wrote " << (cfg.run_dir / "trace.jsonl").string() << " ("
              << predictions.size() << " samples, "
              << stats.stage1_backend_calls + stats.stage2_backend_calls
              << " backend calls)\n";
    std::cout << report_to_json(report(predictions)).dump(2) << "\n";
    return 0;
}

int cmd_eval(const std::string& run_dir) {
    EvalReport result = recount_trace(std::filesystem::path(run_dir) / "trace.jsonl");
    std::cout << report_to_json(result).dump(2) << "\n";
    return 0;
}

struct RenderArgs {
    std::string sample_file;
    int index = 0;
    std::string demo;
    std::string kind;
    std::string variant = "full_table+full_list+consecutive";
    std::string demo_cot = "ss_cot";
    std::string stage1_response_file;
    bool digest_only = false;
};

int cmd_render_prompt(const RenderArgs& args) {
    std::vector<QaSample> samples = load_interchange_samples(args.sample_file);
    if (args.index < 0 || args.index >= static_cast<int>(samples.size()))
        throw ConfigError("--index " + std::to_string(args.index) +
                          " is out of range; " + args.sample_file + " has " +
                          std::to_string(samples.size()) + " samples");
    const QaSample& sample = samples[static_cast<size_t>(args.index)];
    Demonstration demo = load_demonstration(args.demo);

    HeaderTree row_tree = build_row_tree(sample.table);
    HeaderTree col_tree = build_column_tree(sample.table);
    std::vector<TreePathTuple> tuples = merged_tuple_list(row_tree, col_tree);

    Prompt prompt;
    if (args.kind == "seek") {
        prompt = build_seek_prompt(sample.question, tuples, demo);
    } else if (args.kind == "tqa") {
        prompt = build_tqa_prompt(sample.question, sample.table, tuples, demo,
                                  demo_cot_kind_from_name(args.demo_cot));
    } else if (args.kind == "solve") {
        SolveVariant variant = SolveVariant::from_tag(args.variant);
        std::optional<SeekOutcome> seek;
        SolveMaterials materials;
        materials.tuples = tuples;
        if (!args.stage1_response_file.empty())
            seek = parse_seek(read_text_file(args.stage1_response_file), tuples);
        bool needs_seek = variant.cot_slot == CotSlot::consecutive ||
                          variant.info_slot == InfoSlot::hint ||
                          variant.table_slot == TableSlot::sub_table;
        if (needs_seek && !seek)
            throw ConfigError("variant " + variant.tag() +
                              " needs --stage1-response <file> holding a raw "
                              "stage-1 response");
        if (seek) {
            if (variant.info_slot == InfoSlot::hint)
                materials.hint = format_hint(seek->result);
            if (variant.table_slot == TableSlot::sub_table)
                materials.sub_table =
                    extract_subtable(sample.table, row_tree, col_tree, seek->result);
        }
        prompt = build_solve_prompt(sample.question, sample.table, variant, seek,
                                    materials, demo);
    } else {
        throw ConfigError("unknown prompt kind \"" + args.kind +
                          "\"; expected seek, solve, or tqa");
    }

    if (args.digest_only)
        std::cout << prompt.digest() << "\n";
    else
        std::cout << prompt.user_text << "\n";
    return 0;
}

int cmd_build_tree(const std::string& table_file, const std::string& axis) {
    Table table = load_table_file(table_file);
    HeaderTree tree =
        axis == "row" ? build_row_tree(table) : build_column_tree(table);
    std::cout << render_tree(tree);
    std::cout << "Tuples:\n" << numbered(linearize(tree));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Seek-and-Solve table question answering"};
    app.require_subcommand(1);

    RunArgs run_args;
    CLI::App* run = app.add_subcommand("run", "Execute an evaluation run");
    run->add_option("--config", run_args.config, "Run config file (JSON)")
        ->required();
    run->add_option("--dataset", run_args.dataset,
                    "Dataset kind: custom, hitab_*, wikitq_*");
    run->add_option("--dataset-path", run_args.dataset_path, "Question file");
    run->add_option("--mode", run_args.mode, "two_stage or single_stage");
    run->add_option("--variant", run_args.variant,
                    "Solve variant tag, e.g. full_table+full_list+consecutive");
    run->add_option("--demo-cot", run_args.demo_cot,
                    "Single-stage demonstration reasoning: vanilla or ss_cot");
    run->add_option("--demo", run_args.demo, "Demonstration file");
    run->add_option("--run-dir", run_args.run_dir, "Output directory");
    run->add_option("--endpoint", run_args.endpoint, "Backend endpoint (both stages)");
    run->add_option("--model", run_args.model, "Model name (both stages)");
    run->add_option("--parallelism", run_args.parallelism, "Concurrent requests");
    run->add_option("--seed", run_args.seed, "Decoding seed");
    run->add_option("--max-tokens", run_args.max_tokens, "Completion token cap");
    run->add_option("--temperature", run_args.temperature, "Sampling temperature");
    run->add_option("--limit", run_args.limit, "Evaluate only the first N samples");

    std::string eval_run_dir;
    CLI::App* eval = app.add_subcommand("eval", "Re-score a finished run directory");
    eval->add_option("--run-dir", eval_run_dir, "Directory holding trace.jsonl")
        ->required();

    RenderArgs render_args;
    CLI::App* render =
        app.add_subcommand("render-prompt", "Print one prompt without any backend");
    render->add_option("--sample", render_args.sample_file,
                       "Interchange sample file (JSONL)")
        ->required();
    render->add_option("--index", render_args.index, "Sample index (default 0)");
    render->add_option("--demo", render_args.demo, "Demonstration file")->required();
    render->add_option("--kind", render_args.kind, "seek, solve, or tqa")->required();
    render->add_option("--variant", render_args.variant, "Solve variant tag");
    render->add_option("--demo-cot", render_args.demo_cot, "vanilla or ss_cot");
    render->add_option("--stage1-response", render_args.stage1_response_file,
                       "File holding a raw stage-1 response (for solve variants "
                       "that continue from it)");
    render->add_flag("--digest", render_args.digest_only,
                     "Print the prompt digest instead of its text");

    std::string tree_table_file, tree_axis;
    CLI::App* tree = app.add_subcommand(
        "build-tree", "Print a table's header tree and tuple list");
    tree->add_option("--table", tree_table_file, "Interchange table file (JSON)")
        ->required();
    tree->add_option("--axis", tree_axis, "row or column")
        ->required()
        ->check(CLI::IsMember({"row", "column"}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(*run, run_args);
        if (eval->parsed()) return cmd_eval(eval_run_dir);
        if (render->parsed()) return cmd_render_prompt(render_args);
        if (tree->parsed()) return cmd_build_tree(tree_table_file, tree_axis);
    } catch (const seeksolve::Error& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    return 0;
}
