#include "routeforge/parsers.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <sstream>

namespace routeforge {

namespace {

bool is_word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

std::string upper(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return s;
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

// Earliest standalone (word-boundary delimited) occurrence of token in
// haystack; both sides already uppercased.
std::size_t find_token(const std::string& haystack, const std::string& token) {
    std::size_t pos = 0;
    while ((pos = haystack.find(token, pos)) != std::string::npos) {
        const bool left_ok = pos == 0 || !is_word_char(haystack[pos - 1]);
        const std::size_t after = pos + token.size();
        const bool right_ok = after >= haystack.size() || !is_word_char(haystack[after]);
        if (left_ok && right_ok) return pos;
        ++pos;
    }
    return std::string::npos;
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string line;
    std::istringstream in(text);
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

}  // namespace

ParseResult<MatchOutcome> parse_match_response(const std::string& text,
                                               const CaseLibrary& library) {
    const std::string haystack = upper(text);

    std::size_t best_pos = std::string::npos;
    std::size_t best_len = 0;
    std::string best_id;
    bool best_is_no_match = false;

    auto consider = [&](const std::string& token, const std::string& id, bool no_match) {
        const std::size_t pos = find_token(haystack, upper(token));
        if (pos == std::string::npos) return;
        // Earliest occurrence wins; for identical positions prefer the
        // longer token so ids sharing a prefix stay unambiguous.
        if (pos < best_pos || (pos == best_pos && token.size() > best_len)) {
            best_pos = pos;
            best_len = token.size();
            best_id = id;
            best_is_no_match = no_match;
        }
    };

    for (const auto& entry : library.entries()) {
        consider(entry.case_id, entry.case_id, false);
    }
    consider("NO_MATCH", "", true);

    if (best_pos == std::string::npos) {
        return ParseResult<MatchOutcome>::failure(
            "UNPARSEABLE_MATCH", "response names no library case and is not NO_MATCH");
    }
    return ParseResult<MatchOutcome>::success(best_is_no_match ? MatchOutcome::no_match()
                                                               : MatchOutcome::match(best_id));
}

ParseResult<CandidateSolution> parse_solution_response(const std::string& text,
                                                       const StructuredProblemFormulation& spf) {
    using Result = ParseResult<CandidateSolution>;
    const int days = spf.output_format.days;
    const int city_count = static_cast<int>(spf.instance.cities.size());
    const std::vector<std::string> lines = split_lines(text);

    CandidateSolution solution;
    for (int day = 1; day <= days; ++day) {
        const std::regex day_line("^\\s*[Dd][Aa][Yy]\\s+" + std::to_string(day) +
                                  "\\s*:\\s*(.*)$");
        std::smatch m;
        const std::string* found = nullptr;
        std::string body;
        for (const auto& line : lines) {
            if (std::regex_match(line, m, day_line)) {
                found = &line;
                body = m[1].str();
                break;  // first block wins; later repeats are ignored
            }
        }
        if (!found) {
            return Result::failure("MISSING_DAY_LINE", "no line of the form 'Day " +
                                                           std::to_string(day) +
                                                           ": ...' was found in the response");
        }
        // Tolerate a sentence-final period after the last index.
        std::string route_text = trim(body);
        if (!route_text.empty() && route_text.back() == '.') {
            route_text.pop_back();
        }

        std::vector<int> route;
        std::size_t start = 0;
        bool malformed = route_text.empty();
        while (!malformed && start <= route_text.size()) {
            std::size_t arrow = route_text.find("->", start);
            const std::string token =
                trim(arrow == std::string::npos ? route_text.substr(start)
                                                : route_text.substr(start, arrow - start));
            if (token.empty() || token.size() > 9 ||
                !std::all_of(token.begin(), token.end(), [](char c) {
                    return std::isdigit(static_cast<unsigned char>(c));
                })) {
                malformed = true;
                break;
            }
            const int city = std::stoi(token);
            if (city >= city_count) {
                return Result::failure("INDEX_OUT_OF_RANGE",
                                       "city index " + token + " in line '" + *found +
                                           "' is outside 0.." + std::to_string(city_count - 1));
            }
            route.push_back(city);
            if (arrow == std::string::npos) break;
            start = arrow + 2;
        }
        if (malformed || route.size() < 2) {
            return Result::failure("MALFORMED_ROUTE_LINE",
                                   "line '" + *found +
                                       "' is not of the form 'Day " + std::to_string(day) +
                                       ": <i0> -> <i1> -> ... -> <i0>'");
        }
        solution.routes.push_back(std::move(route));
    }

    static const std::regex cost_line("[Tt]otal\\s+cost\\s*:\\s*([-+]?[0-9]*\\.?[0-9]+(?:[eE][-+]?[0-9]+)?)");
    std::smatch cm;
    if (std::regex_search(text, cm, cost_line)) {
        try {
            solution.reported_cost = std::stod(cm[1].str());
        } catch (...) {
            // Unusable number; the claimed cost is advisory anyway.
        }
    }
    solution.source = SolutionSource::Model;
    return Result::success(std::move(solution));
}

ConstraintSpec classify_constraint_sentence(const std::string& sentence) {
    static const std::regex day_depot(
        "day\\s+(\\d{1,6})\\s+must\\s+start\\s+and\\s+end\\s+at\\s+city\\s+(\\d{1,6})",
        std::regex::icase);
    static const std::regex starts_ends("starts?\\s+and\\s+ends?\\s+at\\s+city\\s+(\\d{1,6})",
                                        std::regex::icase);
    static const std::regex route_count("exactly\\s+(\\d{1,6})\\s+routes?", std::regex::icase);
    static const std::regex visit("visit", std::regex::icase);
    static const std::regex once("(exactly|only)\\s+once", std::regex::icase);

    std::smatch m;
    if (std::regex_search(sentence, m, day_depot)) {
        const int day = std::stoi(m[1].str());
        const int depot = std::stoi(m[2].str());
        return ConstraintSpec::depot_assigned_per_day({{day - 1, depot}});
    }
    if (std::regex_search(sentence, m, starts_ends)) {
        return ConstraintSpec::route_starts_ends_at_depot(std::stoi(m[1].str()));
    }
    if (std::regex_search(sentence, m, route_count)) {
        return ConstraintSpec::route_count_equals_days(std::stoi(m[1].str()));
    }
    if (std::regex_search(sentence, visit) && std::regex_search(sentence, once)) {
        return ConstraintSpec::visit_all_exactly_once();
    }
    return ConstraintSpec::free_text(sentence);
}

ParseResult<StructuredProblemFormulation> parse_generated_spf(const std::string& text) {
    using Result = ParseResult<StructuredProblemFormulation>;
    const std::vector<std::string> lines = split_lines(text);

    static const std::regex constraints_heading("^\\s*constraints\\s*:?\\s*$", std::regex::icase);
    static const std::regex problem_line("^\\s*problem\\s*:\\s*(.*)$", std::regex::icase);
    static const std::regex objective_line("^\\s*objective\\s*[:.]", std::regex::icase);
    static const std::regex output_format_line("^\\s*output\\s+format\\s*:", std::regex::icase);
    static const std::regex item_line("^\\s*(?:\\d+\\s*[.)]|[-*])\\s*(.+)$");

    StructuredProblemFormulation spf;
    spf.case_id = kGeneratedCaseId;

    bool in_constraints = false;
    bool saw_output_format = false;
    std::vector<std::string> sentences;
    std::smatch m;
    for (const auto& line : lines) {
        if (std::regex_match(line, m, problem_line) && spf.description.empty()) {
            spf.description = trim(m[1].str());
            continue;
        }
        if (std::regex_match(line, constraints_heading)) {
            in_constraints = true;
            continue;
        }
        if (std::regex_search(line, objective_line)) {
            in_constraints = false;
            continue;
        }
        if (std::regex_search(line, output_format_line)) {
            in_constraints = false;
            saw_output_format = true;
            continue;
        }
        if (in_constraints && std::regex_match(line, m, item_line)) {
            sentences.push_back(trim(m[1].str()));
        }
    }

    if (sentences.empty()) {
        return Result::failure("NO_CONSTRAINTS_FOUND",
                               "no numbered constraint list follows a 'Constraints:' heading");
    }
    if (!saw_output_format) {
        return Result::failure("NO_OUTPUT_FORMAT", "no 'Output format:' section was found");
    }

    // Per-day depot sentences merge into a single constraint that keeps the
    // position of the first of them.
    int depot_per_day_at = -1;
    for (const auto& sentence : sentences) {
        ConstraintSpec c = classify_constraint_sentence(sentence);
        if (c.kind == ConstraintKind::DepotAssignedPerDay) {
            if (depot_per_day_at < 0) {
                depot_per_day_at = static_cast<int>(spf.constraints.size());
                spf.constraints.push_back(std::move(c));
            } else {
                auto& merged = spf.constraints[depot_per_day_at].day_depots;
                for (const auto& [day, depot_city] : c.day_depots) merged[day] = depot_city;
            }
        } else {
            spf.constraints.push_back(std::move(c));
        }
    }

    spf.output_format.days = 0;  // unbound until bind_generated_spf
    return Result::success(std::move(spf));
}

SelfVerdict parse_self_verification_response(const std::string& text) {
    const std::string haystack = upper(text);

    // Violation wins over anything else: ambiguity must stay conservative.
    const std::size_t violation_pos = find_token(haystack, "VIOLATION");
    if (violation_pos != std::string::npos) {
        std::size_t start = violation_pos + std::string("VIOLATION").size();
        if (start < text.size() && text[start] == ':') ++start;
        std::size_t end = text.find('\n', start);
        if (end == std::string::npos) end = text.size();
        std::string description = trim(text.substr(start, end - start));
        if (description.empty()) description = "unspecified constraint violation";
        return {false, description};
    }
    if (find_token(haystack, "FEASIBLE") != std::string::npos) {
        return {true, ""};
    }
    return {false, "unparseable verdict"};
}

}  // namespace routeforge
