#include "seeksolve/parse.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "seeksolve/errors.hpp"

namespace seeksolve {

namespace {

std::string trim(std::string_view s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::string rtrim(std::string_view s) {
    size_t e = s.size();
    while (e > 0 && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(0, e));
}

/// Lowercased copy with every whitespace character removed, so that
/// re-wrapped or re-spaced tuple mentions still compare equal.
std::string squeeze(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char ch : s) {
        if (std::isspace(static_cast<unsigned char>(ch))) continue;
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    }
    return out;
}

std::set<std::string> alnum_tokens(std::string_view s) {
    std::set<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (std::isalnum(static_cast<unsigned char>(ch))) {
            cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
        } else if (!cur.empty()) {
            out.insert(cur);
            cur.clear();
        }
    }
    if (!cur.empty()) out.insert(cur);
    return out;
}

/// Balanced top-level "(...)" groups in `tail`; text outside any group is
/// ignored. Falls back to comma-splitting when the tail has no groups at all.
std::vector<std::string> split_mentions(const std::string& tail) {
    std::vector<std::string> mentions;
    int depth = 0;
    size_t start = 0;
    for (size_t i = 0; i < tail.size(); ++i) {
        if (tail[i] == '(') {
            if (depth == 0) start = i + 1;
            ++depth;
        } else if (tail[i] == ')' && depth > 0) {
            --depth;
            if (depth == 0) mentions.push_back(trim(tail.substr(start, i - start)));
        }
    }
    if (mentions.empty()) {
        size_t pos = 0;
        while (pos <= tail.size()) {
            size_t comma = tail.find(',', pos);
            if (comma == std::string::npos) comma = tail.size();
            std::string piece = trim(std::string_view(tail).substr(pos, comma - pos));
            if (!piece.empty()) mentions.push_back(std::move(piece));
            pos = comma + 1;
        }
    }
    std::erase_if(mentions, [](const std::string& m) { return m.empty(); });
    return mentions;
}

struct CandidateKey {
    std::string inner;    // "row: west | q2"
    std::string rendered; // "(row: west | q2)"
    std::string squeezed_inner;
    std::string squeezed_rendered;
    std::set<std::string> tokens;
};

} // namespace

SeekOutcome parse_seek(const std::string& text,
                       const std::vector<TreePathTuple>& candidates) {
    size_t marker = text.rfind(kSeekMarker);
    if (marker == std::string::npos)
        throw ParseError("stage-1 response has no \"" + std::string(kSeekMarker) +
                         "\" line");

    SeekOutcome outcome;
    outcome.seek_cot = rtrim(std::string_view(text).substr(0, marker));
    std::string tail = trim(std::string_view(text).substr(marker + kSeekMarker.size()));

    std::vector<CandidateKey> keys;
    keys.reserve(candidates.size());
    for (const TreePathTuple& t : candidates) {
        CandidateKey k;
        k.rendered = render_tuple(t);
        k.inner = k.rendered.substr(1, k.rendered.size() - 2);
        k.squeezed_inner = squeeze(k.inner);
        k.squeezed_rendered = squeeze(k.rendered);
        k.tokens = alnum_tokens(k.inner);
        keys.push_back(std::move(k));
    }

    std::set<std::string> chosen;
    auto select = [&](size_t idx) {
        if (chosen.insert(candidates[idx].tuple_id).second)
            outcome.result.selected.push_back(candidates[idx]);
    };

    for (const std::string& mention : split_mentions(tail)) {
        size_t found = keys.size();
        for (size_t i = 0; i < keys.size() && found == keys.size(); ++i)
            if (mention == keys[i].inner || mention == keys[i].rendered) found = i;

        if (found == keys.size()) {
            std::string sq = squeeze(mention);
            for (size_t i = 0; i < keys.size() && found == keys.size(); ++i)
                if (sq == keys[i].squeezed_inner || sq == keys[i].squeezed_rendered)
                    found = i;
        }

        if (found == keys.size()) {
            // Last resort: the candidate sharing the most alnum tokens with
            // the mention, but only when that winner is unique.
            std::set<std::string> mention_tokens = alnum_tokens(mention);
            size_t best = keys.size(), best_score = 0;
            bool tied = false;
            for (size_t i = 0; i < keys.size(); ++i) {
                size_t score = 0;
                for (const std::string& tok : mention_tokens)
                    if (keys[i].tokens.count(tok)) ++score;
                if (score == 0) continue;
                if (score > best_score) {
                    best = i;
                    best_score = score;
                    tied = false;
                } else if (score == best_score) {
                    tied = true;
                }
            }
            if (best != keys.size() && !tied) found = best;
        }

        if (found == keys.size())
            outcome.result.unmatched_mentions.push_back(mention);
        else
            select(found);
    }
    return outcome;
}

SolveOutcome parse_solve(const std::string& text) {
    size_t marker = text.rfind(kAnswerMarker);
    if (marker == std::string::npos)
        throw ParseError("stage-2 response has no \"" + std::string(kAnswerMarker) +
                         "\" line");

    SolveOutcome outcome;
    outcome.solve_cot = rtrim(std::string_view(text).substr(0, marker));

    size_t line_end = text.find('\n', marker);
    if (line_end == std::string::npos) line_end = text.size();
    std::string tail =
        trim(std::string_view(text).substr(marker + kAnswerMarker.size(),
                                           line_end - marker - kAnswerMarker.size()));

    // ";" is the separator the prompts ask for; ", " is accepted as a common
    // substitute. A bare comma inside a number ("1,234") never splits.
    std::string sep = tail.find(';') != std::string::npos ? ";" : ", ";
    size_t pos = 0;
    while (pos <= tail.size()) {
        size_t next = tail.find(sep, pos);
        if (next == std::string::npos) next = tail.size();
        std::string piece = trim(std::string_view(tail).substr(pos, next - pos));
        if (!piece.empty()) outcome.answers.push_back(std::move(piece));
        pos = next + sep.size();
    }
    if (outcome.answers.empty()) outcome.answers.push_back("");
    return outcome;
}

SsCot compose_ss_cot(const SeekOutcome& seek, const SolveOutcome& solve) {
    SsCot out;
    out.text = seek.seek_cot + "\n" + std::string(kConsecutiveLeadIn) + "\n" +
               solve.solve_cot;
    return out;
}

} // namespace seeksolve
