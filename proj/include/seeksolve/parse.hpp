#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "seeksolve/header_tree.hpp"
#include "seeksolve/simplify.hpp"

namespace seeksolve {

inline constexpr std::string_view kSeekMarker = "Selected tuples:";
inline constexpr std::string_view kAnswerMarker = "Answer:";
inline constexpr std::string_view kConsecutiveLeadIn =
    "Let us look at the relevant tuples in the information given.";

/// Stage-1 response split into rationale and selection.
struct SeekOutcome {
    std::string seek_cot;
    SeekResult result;
};

/// Stage-2 response split into rationale and final answers.
struct SolveOutcome {
    std::string solve_cot;
    std::vector<std::string> answers;
};

/// Seek-CoT and Solve-CoT joined into one coherent reasoning path.
struct SsCot {
    std::string text;
};

/// Splits `text` at the last "Selected tuples:" marker. The tail is parsed
/// into tuple mentions and matched against `candidates`: first exactly, then
/// case/whitespace-insensitively, then by unique best token overlap. Ties are
/// refused and recorded in unmatched_mentions, never guessed. Throws
/// ParseError when the marker is absent.
SeekOutcome parse_seek(const std::string& text,
                       const std::vector<TreePathTuple>& candidates);

/// Splits `text` at the last "Answer:" marker; the rest of that line yields
/// the answers (split on ";" or ", "). Throws ParseError when the marker is
/// absent.
SolveOutcome parse_solve(const std::string& text);

/// seek_cot + connective line + solve_cot.
SsCot compose_ss_cot(const SeekOutcome& seek, const SolveOutcome& solve);

} // namespace seeksolve
