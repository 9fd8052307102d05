#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "seeksolve/header_tree.hpp"
#include "seeksolve/table.hpp"

namespace seeksolve {

/// Parsed Seek selection: tuples matched against the sample's merged tuple
/// list plus any mentions the parser could not map.
struct SeekResult {
    std::vector<TreePathTuple> selected;
    std::vector<std::string> unmatched_mentions;
};

inline constexpr std::string_view kHintPrefix = "Look at these rows and columns: ";

/// Sub-table induced by a Seek selection: each selected leaf is widened one
/// level to its parent's span; an axis with no selected tuples keeps all of
/// its data rows/columns; header rows and columns are always kept. Relative
/// order is preserved and surviving merged-cell spans are clipped.
/// Throws SimplifyError on an empty selection.
Table extract_subtable(const Table& table, const HeaderTree& row_tree,
                       const HeaderTree& col_tree, const SeekResult& result);

/// "Look at these rows and columns: <tuple>, <tuple>, ..." terminated with a
/// period. Throws SimplifyError on an empty selection.
std::string format_hint(const SeekResult& result);

} // namespace seeksolve
