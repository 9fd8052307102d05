#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "seeksolve/header_tree.hpp"
#include "seeksolve/parse.hpp"
#include "seeksolve/table.hpp"

namespace seeksolve {

inline constexpr std::string_view kFromScratchLeadIn = "Let us think step by step";

enum class TableSlot { full_table, sub_table };
enum class InfoSlot { none, full_list, hint };
enum class CotSlot { from_scratch, consecutive };

/// Slot configuration selecting one Solve prompt version. A variant is
/// realizable unless it pairs the full tuple list with a sub-table (the list
/// would reference dropped rows and columns) or continues from Seek-CoT with
/// no information section (the lead-in refers to "the information given").
/// That leaves 8 realizable combinations.
struct SolveVariant {
    TableSlot table_slot = TableSlot::full_table;
    InfoSlot info_slot = InfoSlot::none;
    CotSlot cot_slot = CotSlot::from_scratch;

    bool realizable() const;
    std::string tag() const; // e.g. "full_table+full_list+consecutive"
    static SolveVariant from_tag(const std::string& tag);
    static std::vector<SolveVariant> all_realizable();

    bool operator==(const SolveVariant&) const = default;
};

/// The single worked example embedded in every prompt. Demonstrations always
/// render with the full table regardless of the query's table slot.
struct Demonstration {
    Table table;
    std::string question;
    std::string stage1_response;  // seek rationale + "Selected tuples:" line
    std::string stage2_response;  // solve rationale + "Answer:" line
    std::string ss_cot_response;  // combined reasoning + "Answer:" line
    std::string answer;
};

Demonstration demonstration_from_json(const nlohmann::json& doc);
nlohmann::json demonstration_to_json(const Demonstration& demo);
Demonstration load_demonstration(const std::filesystem::path& path);

/// A fully assembled prompt. Assembly is a pure function of its inputs.
struct Prompt {
    std::string system_text;
    std::string user_text;
    std::string variant_tag;

    /// Content digest over (system_text, user_text); keys scripted mocks.
    std::string digest() const;

    bool operator==(const Prompt&) const = default;
};

/// Query-side artifacts consumed by the Solve prompt slots.
struct SolveMaterials {
    std::vector<TreePathTuple> tuples; // merged list, for info = full_list
    std::optional<Table> sub_table;    // for table = sub_table
    std::optional<std::string> hint;   // for info = hint
};

enum class DemoCotKind { vanilla, ss_cot };

/// Stage-1 prompt: numbered tuple list and question, never the table grid.
/// Throws PromptError on an empty tuple list.
Prompt build_seek_prompt(const std::string& question,
                         const std::vector<TreePathTuple>& tuples,
                         const Demonstration& demo);

/// Stage-2 prompt for `variant`. `table` is always the full table; the
/// sub-table, hint, and tuple list come from `materials`. Throws PromptError
/// when a slot's inputs are missing.
Prompt build_solve_prompt(const std::string& question, const Table& table,
                          const SolveVariant& variant,
                          const std::optional<SeekOutcome>& seek,
                          const SolveMaterials& materials,
                          const Demonstration& demo);

/// Single-stage prompt over the full table and full tuple list; the
/// demonstration reasoning is either the demo's solve response (vanilla) or
/// its combined response (ss_cot).
Prompt build_tqa_prompt(const std::string& question, const Table& table,
                        const std::vector<TreePathTuple>& tuples,
                        const Demonstration& demo, DemoCotKind demo_cot_kind);

std::string_view demo_cot_kind_name(DemoCotKind kind);
DemoCotKind demo_cot_kind_from_name(const std::string& name);

} // namespace seeksolve
