#include "opval/cli.hpp"

#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "opval/io.hpp"

namespace opval {

namespace {

std::string read_input(const std::string& path, std::istream& in) {
  if (path == "-") {
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  }
  std::ifstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorCode::kParse, "cannot open " + path);
  return {std::istreambuf_iterator<char>(file), std::istreambuf_iterator<char>()};
}

std::size_t parse_index(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || text.front() == '-') {
    throw Error(ErrorCode::kUsage, "--observed: bad " + what + " '" + text + "'");
  }
  return static_cast<std::size_t>(v);
}

// "i=x,j=y" -> {i: x, j: y}
std::map<std::size_t, std::size_t> parse_observed(const std::string& text) {
  std::map<std::size_t, std::size_t> out;
  if (text.empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kUsage, "--observed expects i=x pairs, got '" + item + "'");
    }
    const std::size_t agent = parse_index(item.substr(0, eq), "agent index");
    const std::size_t value = parse_index(item.substr(eq + 1), "observed value");
    if (!out.emplace(agent, value).second) {
      throw Error(ErrorCode::kBadAgent,
                  "--observed lists agent " + std::to_string(agent) + " twice");
    }
  }
  return out;
}

void write_output(const std::string& path, const std::string& text,
                  std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorCode::kUsage, "cannot write " + path);
  file << text;
}

template <class T>
const T& expect_kind(const ProblemFile& f, const char* command) {
  if (const T* p = std::get_if<T>(&f)) return *p;
  throw Error(ErrorCode::kParse,
              std::string(command) + ": problem file has the wrong \"kind\"");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::istream& in,
            std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact values of perception, prediction, communication and "
               "common sense for finite decision problems"};
  app.require_subcommand(1);

  std::string path;
  std::string out_path;
  std::uint64_t seed = 0;
  bool bits = false;
  std::string mode = "rank-first";
  std::string observed;
  std::size_t trials = 200;

  auto* values = app.add_subcommand("values", "risks and values of a single-agent problem");
  values->add_option("path", path, "problem file, or - for stdin")->required();
  values->add_flag("--bits", bits, "report Shannon measures in bits");
  values->add_option("--seed", seed, "seed for the log-loss optimality spot check");
  values->add_option("--out", out_path, "write the report here instead of stdout");

  auto* agents = app.add_subcommand("agents", "rank or order the agents of a multi-agent problem");
  agents->add_option("path", path, "problem file, or - for stdin")->required();
  agents->add_option("--mode", mode, "rank-first | rank-loo | order")
      ->check(CLI::IsMember({"rank-first", "rank-loo", "order"}));
  agents->add_option("--observed", observed, "condition first on i=x[,j=y...]");
  agents->add_option("--seed", seed, "recorded in the report");
  agents->add_option("--out", out_path, "write the report here instead of stdout");

  auto* check = app.add_subcommand("check", "numerically verify the curvature properties");
  check->add_option("path", path, "problem file, or - for stdin")->required();
  check->add_option("--trials", trials, "sampled segments per property");
  check->add_option("--seed", seed, "base seed");
  check->add_option("--out", out_path, "write the report here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    const std::string text = read_input(path, in);
    const ProblemFile file = parse_problem(text);
    RunInfo info;
    info.input_digest = input_digest(text);
    info.seed = seed;

    if (values->parsed()) {
      info.command = "values";
      const auto& p = expect_kind<DecisionProblem>(file, "values");
      write_output(out_path,
                   values_report(info, p, bits ? LogBase::kBits : LogBase::kNats), out);
      return kExitOk;
    }
    if (agents->parsed()) {
      info.command = "agents";
      const auto& p = expect_kind<MultiAgentProblem>(file, "agents");
      const AgentMode m = mode == "order"      ? AgentMode::kOrder
                          : mode == "rank-loo" ? AgentMode::kRankLeaveOneOut
                                               : AgentMode::kRankFirst;
      write_output(out_path, agents_report(info, p, m, parse_observed(observed)), out);
      return kExitOk;
    }
    info.command = "check";
    if (trials == 0) throw Error(ErrorCode::kUsage, "--trials must be at least 1");
    const auto& p = expect_kind<DecisionProblem>(file, "check");
    const auto verdicts = run_property_suite(p.loss(), trials, seed);
    write_output(out_path, check_report(info, trials, verdicts), out);
    bool all = true;
    for (const auto& v : verdicts) {
      if (!v.pass) {
        all = false;
        err << "property " << v.name << " (" << to_string(v.direction)
            << ") failed: worst slack " << v.worst_slack << " beyond tolerance "
            << v.tolerance << "\n";
      }
    }
    return all ? kExitOk : kExitPropertyFailure;
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace opval
