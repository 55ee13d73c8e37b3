#pragma once

// Problem and report files. Both are UTF-8 JSON documents.
//
// Single-agent problem:
//   {"format": "opval-problem/1", "kind": "single",
//    "x_size": 2, "y_size": 2, "u_size": 2,
//    "x_labels": [...], "y_labels": [...], "u_labels": [...],   (optional)
//    "joint": [p(0,0), p(0,1), ...],            row-major over (x, y)
//    "loss":  [l(0,0,0), l(0,0,1), ...]}        row-major over (x, y, u)
//
// Multi-agent problem:
//   {"format": "opval-problem/1", "kind": "multi",
//    "x_sizes": [...], "y_sizes": [...], "u_size": 3,
//    "joint": [...],   row-major over (X_1..X_m, Y_1..Y_k)
//    "loss":  [...]}   row-major over (X_1..X_m, Y_1..Y_k, U)
//
// "format" and "layout" are optional on input; unknown fields are rejected.

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "opval/core.hpp"
#include "opval/infotheory.hpp"
#include "opval/multiagent.hpp"
#include "opval/properties.hpp"
#include "opval/values.hpp"

namespace opval {

inline constexpr std::string_view kToolName = "opval";
inline constexpr std::string_view kToolVersion = "1.0.0";
inline constexpr std::string_view kProblemFormat = "opval-problem/1";

using ProblemFile = std::variant<DecisionProblem, MultiAgentProblem>;

/// Parses and validates a problem document. Errors carry ErrorCode::kParse
/// (with line and column for syntax errors, or the offending field) or the
/// validation code of the table that was rejected.
ProblemFile parse_problem(std::string_view text);

std::string emit_problem(const DecisionProblem& p);
std::string emit_problem(const MultiAgentProblem& p);
std::string emit_problem(const ProblemFile& p);

/// "sha256:<hex>" of the raw input bytes.
std::string input_digest(std::string_view bytes);

struct RunInfo {
  std::string command;
  std::string input_digest;
  std::uint64_t seed = 0;
};

std::string values_report(const RunInfo& info, const DecisionProblem& p,
                          LogBase base);

enum class AgentMode { kRankFirst, kRankLeaveOneOut, kOrder };

std::string agents_report(const RunInfo& info, const MultiAgentProblem& p,
                          AgentMode mode,
                          const std::map<std::size_t, std::size_t>& observed);

std::string check_report(const RunInfo& info, std::size_t trials,
                         const std::vector<PropertyVerdict>& verdicts);

}  // namespace opval
