#include "seeksolve/prompt.hpp"

#include <fstream>

#include "seeksolve/digest.hpp"
#include "seeksolve/errors.hpp"
#include "seeksolve/simplify.hpp"

namespace seeksolve {

namespace {

constexpr std::string_view kSeekInstruction =
    "Read the question and the numbered list of tuples. Each tuple is one path "
    "through a table's row or column header tree, written as (axis: value | "
    "value | ...). Work out which rows and columns the question needs, then "
    "finish with one line of the form \"Selected tuples: ...\" repeating every "
    "relevant tuple exactly as it appears in the list.";

constexpr std::string_view kSolveInstruction =
    "Answer the question about the table below. Work through the reasoning "
    "first, then finish with one line of the form \"Answer: ...\" holding only "
    "the final answer. Separate multiple answers with \"; \".";

constexpr std::string_view kTqaInstruction =
    "Answer the question about the table below. The numbered tuples list every "
    "path through the table's row and column header trees. Work through the "
    "reasoning first, then finish with one line of the form \"Answer: ...\" "
    "holding only the final answer. Separate multiple answers with \"; \".";

std::string numbered_tuples(const std::vector<TreePathTuple>& tuples) {
    std::string out;
    for (size_t i = 0; i < tuples.size(); ++i) {
        if (i > 0) out += "\n";
        out += std::to_string(i + 1) + ". " + render_tuple(tuples[i]);
    }
    return out;
}

std::string table_block(const Table& table) {
    std::string out = "Table:";
    if (!table.title.empty()) out += " " + table.title;
    out += "\n" + render_markdown(table);
    return out;
}

std::vector<TreePathTuple> tuples_of(const Table& table) {
    return merged_tuple_list(build_row_tree(table), build_column_tree(table));
}

SeekOutcome parse_demo_seek(const Demonstration& demo,
                            const std::vector<TreePathTuple>& demo_tuples) {
    try {
        return parse_seek(demo.stage1_response, demo_tuples);
    } catch (const ParseError& err) {
        throw PromptError(std::string("demonstration stage-1 response is not "
                                      "parseable: ") +
                          err.what());
    }
}

std::string info_block(InfoSlot slot, const std::vector<TreePathTuple>& tuples,
                       const std::string& hint) {
    if (slot == InfoSlot::full_list)
        return "Information:\n" + numbered_tuples(tuples);
    return "Information:\n" + hint;
}

} // namespace

bool SolveVariant::realizable() const {
    if (table_slot == TableSlot::sub_table && info_slot == InfoSlot::full_list)
        return false;
    if (cot_slot == CotSlot::consecutive && info_slot == InfoSlot::none)
        return false;
    return true;
}

std::string SolveVariant::tag() const {
    std::string out = table_slot == TableSlot::full_table ? "full_table" : "sub_table";
    out += info_slot == InfoSlot::none        ? "+none"
           : info_slot == InfoSlot::full_list ? "+full_list"
                                              : "+hint";
    out += cot_slot == CotSlot::from_scratch ? "+from_scratch" : "+consecutive";
    return out;
}

SolveVariant SolveVariant::from_tag(const std::string& tag) {
    SolveVariant v;
    size_t a = tag.find('+');
    size_t b = a == std::string::npos ? std::string::npos : tag.find('+', a + 1);
    if (a == std::string::npos || b == std::string::npos)
        throw ConfigError("bad variant tag \"" + tag +
                          "\"; expected table+info+cot, e.g. "
                          "\"full_table+full_list+consecutive\"");
    std::string table = tag.substr(0, a);
    std::string info = tag.substr(a + 1, b - a - 1);
    std::string cot = tag.substr(b + 1);

    if (table == "full_table") v.table_slot = TableSlot::full_table;
    else if (table == "sub_table") v.table_slot = TableSlot::sub_table;
    else throw ConfigError("unknown table slot \"" + table + "\" in variant tag");

    if (info == "none") v.info_slot = InfoSlot::none;
    else if (info == "full_list") v.info_slot = InfoSlot::full_list;
    else if (info == "hint") v.info_slot = InfoSlot::hint;
    else throw ConfigError("unknown info slot \"" + info + "\" in variant tag");

    if (cot == "from_scratch") v.cot_slot = CotSlot::from_scratch;
    else if (cot == "consecutive") v.cot_slot = CotSlot::consecutive;
    else throw ConfigError("unknown cot slot \"" + cot + "\" in variant tag");
    return v;
}

std::vector<SolveVariant> SolveVariant::all_realizable() {
    std::vector<SolveVariant> out;
    for (TableSlot t : {TableSlot::full_table, TableSlot::sub_table})
        for (InfoSlot i : {InfoSlot::none, InfoSlot::full_list, InfoSlot::hint})
            for (CotSlot c : {CotSlot::from_scratch, CotSlot::consecutive}) {
                SolveVariant v{t, i, c};
                if (v.realizable()) out.push_back(v);
            }
    return out;
}

Demonstration demonstration_from_json(const nlohmann::json& doc) {
    try {
        Demonstration demo;
        demo.table = table_from_json(doc.at("table"));
        demo.question = doc.at("question").get<std::string>();
        demo.stage1_response = doc.at("stage1_response").get<std::string>();
        demo.stage2_response = doc.at("stage2_response").get<std::string>();
        demo.ss_cot_response = doc.at("ss_cot_response").get<std::string>();
        demo.answer = doc.at("answer").get<std::string>();
        return demo;
    } catch (const nlohmann::json::exception& err) {
        throw PromptError(std::string("bad demonstration document: ") + err.what());
    }
}

nlohmann::json demonstration_to_json(const Demonstration& demo) {
    return nlohmann::json{{"table", table_to_json(demo.table)},
                          {"question", demo.question},
                          {"stage1_response", demo.stage1_response},
                          {"stage2_response", demo.stage2_response},
                          {"ss_cot_response", demo.ss_cot_response},
                          {"answer", demo.answer}};
}

Demonstration load_demonstration(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw PromptError("cannot open demonstration file " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& err) {
        throw PromptError("demonstration file " + path.string() +
                          " is not valid JSON: " + err.what());
    }
    return demonstration_from_json(doc);
}

std::string Prompt::digest() const {
    return sha256_hex(system_text + '\x1f' + user_text);
}

Prompt build_seek_prompt(const std::string& question,
                         const std::vector<TreePathTuple>& tuples,
                         const Demonstration& demo) {
    if (tuples.empty())
        throw PromptError("stage-1 prompt needs a non-empty tuple list");

    std::string text(kSeekInstruction);
    text += "\n\n### Example\nTuples:\n";
    text += numbered_tuples(tuples_of(demo.table));
    text += "\nQuestion: " + demo.question;
    text += "\nResponse:\n" + demo.stage1_response;
    text += "\n\n### Task\nTuples:\n";
    text += numbered_tuples(tuples);
    text += "\nQuestion: " + question;
    text += "\nResponse:";

    return Prompt{"", std::move(text), "seek"};
}

Prompt build_solve_prompt(const std::string& question, const Table& table,
                          const SolveVariant& variant,
                          const std::optional<SeekOutcome>& seek,
                          const SolveMaterials& materials,
                          const Demonstration& demo) {
    if (!variant.realizable())
        throw PromptError("variant " + variant.tag() + " is not realizable");
    if (variant.table_slot == TableSlot::sub_table && !materials.sub_table)
        throw PromptError("variant " + variant.tag() + " needs a sub-table");
    if (variant.info_slot == InfoSlot::full_list && materials.tuples.empty())
        throw PromptError("variant " + variant.tag() + " needs the tuple list");
    if (variant.info_slot == InfoSlot::hint && !materials.hint)
        throw PromptError("variant " + variant.tag() + " needs a hint");
    if (variant.cot_slot == CotSlot::consecutive && !seek)
        throw PromptError("variant " + variant.tag() + " continues from Seek-CoT "
                          "but no stage-1 outcome was given");

    // Demonstration side: always the full demo table, with the info section
    // and reasoning style mirroring the variant.
    std::vector<TreePathTuple> demo_tuples = tuples_of(demo.table);
    std::optional<SeekOutcome> demo_seek;
    if (variant.info_slot == InfoSlot::hint ||
        variant.cot_slot == CotSlot::consecutive)
        demo_seek = parse_demo_seek(demo, demo_tuples);

    std::string text(kSolveInstruction);
    text += "\n\n### Example\n" + table_block(demo.table);
    if (variant.info_slot != InfoSlot::none) {
        std::string demo_hint =
            variant.info_slot == InfoSlot::hint ? format_hint(demo_seek->result) : "";
        text += "\n" + info_block(variant.info_slot, demo_tuples, demo_hint);
    }
    text += "\nQuestion: " + demo.question;
    if (variant.cot_slot == CotSlot::from_scratch) {
        text += "\nResponse: " + std::string(kFromScratchLeadIn) + ".\n" +
                demo.stage2_response;
    } else {
        text += "\nResponse: " + std::string(kConsecutiveLeadIn) + " " +
                demo_seek->seek_cot + "\n" + demo.stage2_response;
    }

    text += "\n\n### Task\n";
    text += table_block(variant.table_slot == TableSlot::sub_table
                            ? *materials.sub_table
                            : table);
    if (variant.info_slot != InfoSlot::none)
        text += "\n" + info_block(variant.info_slot, materials.tuples,
                                  materials.hint.value_or(""));
    text += "\nQuestion: " + question;
    if (variant.cot_slot == CotSlot::from_scratch) {
        text += "\nResponse: " + std::string(kFromScratchLeadIn);
    } else {
        text += "\nResponse: " + std::string(kConsecutiveLeadIn) + " " +
                seek->seek_cot;
    }

    return Prompt{"", std::move(text), "solve:" + variant.tag()};
}

Prompt build_tqa_prompt(const std::string& question, const Table& table,
                        const std::vector<TreePathTuple>& tuples,
                        const Demonstration& demo, DemoCotKind demo_cot_kind) {
    if (tuples.empty())
        throw PromptError("single-stage prompt needs a non-empty tuple list");

    const std::string& demo_response = demo_cot_kind == DemoCotKind::vanilla
                                           ? demo.stage2_response
                                           : demo.ss_cot_response;

    std::string text(kTqaInstruction);
    text += "\n\n### Example\n" + table_block(demo.table);
    text += "\nTuples:\n" + numbered_tuples(tuples_of(demo.table));
    text += "\nQuestion: " + demo.question;
    text += "\nResponse:\n" + demo_response;
    text += "\n\n### Task\n" + table_block(table);
    text += "\nTuples:\n" + numbered_tuples(tuples);
    text += "\nQuestion: " + question;
    text += "\nResponse:";

    return Prompt{"", std::move(text),
                  std::string("tqa:") + std::string(demo_cot_kind_name(demo_cot_kind))};
}

std::string_view demo_cot_kind_name(DemoCotKind kind) {
    return kind == DemoCotKind::vanilla ? "vanilla" : "ss_cot";
}

DemoCotKind demo_cot_kind_from_name(const std::string& name) {
    if (name == "vanilla") return DemoCotKind::vanilla;
    if (name == "ss_cot") return DemoCotKind::ss_cot;
    throw ConfigError("unknown demonstration reasoning kind \"" + name +
                      "\"; expected \"vanilla\" or \"ss_cot\"");
}

} // namespace seeksolve
