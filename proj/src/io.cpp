#include "opval/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "json.hpp"

namespace opval {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

[[noreturn]] void field_error(const std::string& field,
                              const std::string& what) {
  throw Error(ErrorCode::kParse, "field '" + field + "': " + what);
}

std::string line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

void reject_unknown(const json& doc, const std::set<std::string>& known) {
  for (const auto& [key, value] : doc.items()) {
    if (!known.contains(key)) field_error(key, "unknown field");
  }
}

const json& require(const json& doc, const std::string& key) {
  const auto it = doc.find(key);
  if (it == doc.end()) field_error(key, "missing");
  return *it;
}

std::size_t read_size(const json& v, const std::string& field) {
  if (!v.is_number_unsigned() || v.get<std::uint64_t>() == 0) {
    field_error(field, "expected a positive integer");
  }
  return static_cast<std::size_t>(v.get<std::uint64_t>());
}

std::vector<std::size_t> read_sizes(const json& v, const std::string& field,
                                    bool allow_empty) {
  if (!v.is_array()) field_error(field, "expected an array of positive integers");
  if (v.empty() && !allow_empty) field_error(field, "must not be empty");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(read_size(v[i], field + "[" + std::to_string(i) + "]"));
  }
  return out;
}

std::vector<double> read_numbers(const json& v, const std::string& field) {
  if (!v.is_array()) field_error(field, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) {
      field_error(field + "[" + std::to_string(i) + "]", "expected a number");
    }
    out.push_back(v[i].get<double>());
  }
  return out;
}

std::vector<std::string> read_labels(const json& doc, const std::string& field) {
  const auto it = doc.find(field);
  if (it == doc.end()) return {};
  if (!it->is_array()) field_error(field, "expected an array of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < it->size(); ++i) {
    if (!(*it)[i].is_string()) {
      field_error(field + "[" + std::to_string(i) + "]", "expected a string");
    }
    out.push_back((*it)[i].get<std::string>());
  }
  return out;
}

// Runs a constructor and tags any validation failure with the field name.
template <class F>
auto with_field(const std::string& field, F&& make) {
  try {
    return make();
  } catch (const Error& e) {
    throw Error(e.code(), "field '" + field + "': " + e.what());
  }
}

DecisionProblem parse_single(const json& doc) {
  reject_unknown(doc, {"format", "kind", "layout", "x_size", "y_size", "u_size",
                       "x_labels", "y_labels", "u_labels", "joint", "loss"});
  const std::size_t nx = read_size(require(doc, "x_size"), "x_size");
  const std::size_t ny = read_size(require(doc, "y_size"), "y_size");
  const std::size_t nu = read_size(require(doc, "u_size"), "u_size");
  auto x_space = with_field("x_labels", [&] {
    return FiniteSpace(nx, read_labels(doc, "x_labels"));
  });
  auto y_space = with_field("y_labels", [&] {
    return FiniteSpace(ny, read_labels(doc, "y_labels"));
  });
  auto u_space = with_field("u_labels", [&] {
    return FiniteSpace(nu, read_labels(doc, "u_labels"));
  });
  auto joint = with_field("joint", [&] {
    return JointDistribution(nx, ny, read_numbers(require(doc, "joint"), "joint"));
  });
  auto loss = with_field("loss", [&] {
    return LossTensor(nx, ny, nu, read_numbers(require(doc, "loss"), "loss"));
  });
  return DecisionProblem(std::move(x_space), std::move(y_space),
                         std::move(u_space), std::move(joint), std::move(loss));
}

MultiAgentProblem parse_multi(const json& doc) {
  reject_unknown(doc, {"format", "kind", "layout", "x_sizes", "y_sizes",
                       "u_size", "joint", "loss"});
  auto x_sizes = read_sizes(require(doc, "x_sizes"), "x_sizes", false);
  auto y_sizes = read_sizes(require(doc, "y_sizes"), "y_sizes", true);
  const std::size_t nu = read_size(require(doc, "u_size"), "u_size");
  auto joint = read_numbers(require(doc, "joint"), "joint");
  auto loss = read_numbers(require(doc, "loss"), "loss");
  try {
    return MultiAgentProblem(std::move(x_sizes), std::move(y_sizes), nu,
                             std::move(joint), std::move(loss));
  } catch (const Error& e) {
    throw Error(e.code(), std::string("multi-agent problem: ") + e.what());
  }
}

ordered_json numbers(std::span<const double> values) {
  ordered_json a = ordered_json::array();
  for (double v : values) a.push_back(v);
  return a;
}

ordered_json indices(const std::vector<std::size_t>& values) {
  ordered_json a = ordered_json::array();
  for (std::size_t v : values) a.push_back(v);
  return a;
}

ordered_json header(const RunInfo& info) {
  ordered_json doc;
  doc["tool"] = kToolName;
  doc["version"] = kToolVersion;
  doc["command"] = info.command;
  doc["input_digest"] = info.input_digest;
  doc["seed"] = info.seed;
  return doc;
}

std::string finish(const ordered_json& doc) { return doc.dump(2) + "\n"; }

ordered_json space_json(const FiniteSpace& s) {
  ordered_json a = ordered_json::array();
  for (std::size_t i = 0; i < s.size(); ++i) a.push_back(s.label(i));
  return a;
}

ordered_json action_json(const SolvedAction& a, const FiniteSpace& u) {
  ordered_json o;
  o["action"] = a.action;
  o["label"] = u.label(a.action);
  o["objective_risk"] = a.objective_risk;
  o["true_risk"] = a.true_risk;
  return o;
}

ordered_json check_json(const IdentityCheck& c) {
  ordered_json o;
  o["identity"] = c.name;
  o["computed"] = c.computed;
  o["expected"] = c.expected;
  o["difference"] = c.difference;
  return o;
}

}  // namespace

ProblemFile parse_problem(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParse, "invalid JSON at " +
                                       line_column(text, e.byte ? e.byte - 1 : 0));
  }
  if (!doc.is_object()) throw Error(ErrorCode::kParse, "document must be an object");
  if (const auto it = doc.find("format"); it != doc.end()) {
    if (!it->is_string() || it->get<std::string>() != kProblemFormat) {
      field_error("format", "expected \"" + std::string(kProblemFormat) + "\"");
    }
  }
  if (const auto it = doc.find("layout"); it != doc.end() && !it->is_string()) {
    field_error("layout", "expected a string");
  }
  const json& kind = require(doc, "kind");
  if (kind == "single") return parse_single(doc);
  if (kind == "multi") return parse_multi(doc);
  field_error("kind", "expected \"single\" or \"multi\"");
}

std::string emit_problem(const DecisionProblem& p) {
  ordered_json doc;
  doc["format"] = kProblemFormat;
  doc["kind"] = "single";
  doc["layout"] = "joint row-major over (x, y); loss row-major over (x, y, u)";
  doc["x_size"] = p.nx();
  doc["y_size"] = p.ny();
  doc["u_size"] = p.nu();
  if (p.x_space().has_labels()) doc["x_labels"] = p.x_space().labels();
  if (p.y_space().has_labels()) doc["y_labels"] = p.y_space().labels();
  if (p.u_space().has_labels()) doc["u_labels"] = p.u_space().labels();
  doc["joint"] = numbers(p.joint().values());
  doc["loss"] = numbers(p.loss().values());
  return finish(doc);
}

std::string emit_problem(const MultiAgentProblem& p) {
  ordered_json doc;
  doc["format"] = kProblemFormat;
  doc["kind"] = "multi";
  doc["layout"] =
      "joint row-major over (X_1..X_m, Y_1..Y_k); loss appends U as last axis";
  doc["x_sizes"] = indices(p.x_sizes());
  doc["y_sizes"] = indices(p.y_sizes());
  doc["u_size"] = p.u_size();
  doc["joint"] = numbers(p.joint());
  doc["loss"] = numbers(p.loss());
  return finish(doc);
}

std::string emit_problem(const ProblemFile& p) {
  return std::visit([](const auto& v) { return emit_problem(v); }, p);
}

std::string input_digest(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::kParse, "failed to hash input");
  }
  std::string hex = "sha256:";
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

std::string values_report(const RunInfo& info, const DecisionProblem& p,
                          LogBase base) {
  const ValueReport r = value_report(p);
  ordered_json doc = header(info);

  ordered_json spaces;
  spaces["x"] = space_json(p.x_space());
  spaces["y"] = space_json(p.y_space());
  spaces["u"] = space_json(p.u_space());
  doc["spaces"] = spaces;

  ordered_json risks;
  risks["bar_u"] = r.risks.bar_u;
  risks["u_star"] = r.risks.u_star;
  risks["blind"] = r.risks.blind;
  risks["predictive"] = r.risks.predictive;
  risks["omniscient"] = r.risks.omniscient;
  doc["risks"] = risks;

  ordered_json values;
  values["common_sense"] = r.values.common_sense;
  values["perception"] = r.values.perception;
  values["prediction"] = r.values.prediction;
  values["perception_and_prediction"] = r.values.perception_and_prediction;
  values["communication"] = r.values.communication;
  doc["values"] = values;

  ordered_json opt;
  opt["bar_u"] = action_json(r.bar_u, p.u_space());
  opt["u_star"] = action_json(r.u_star, p.u_space());
  opt["blind"] = indices(r.blind.policy.map);
  opt["predictive"] = indices(r.predictive.policy.map);
  ordered_json omni = ordered_json::array();
  for (std::size_t x = 0; x < p.nx(); ++x) {
    ordered_json row = ordered_json::array();
    for (std::size_t y = 0; y < p.ny(); ++y) row.push_back(r.omniscient.policy(x, y));
    omni.push_back(row);
  }
  opt["omniscient"] = omni;
  doc["optimizers"] = opt;

  const auto joint = p.joint().values();
  const bool full_support =
      std::all_of(joint.begin(), joint.end(), [](double v) { return v > 0.0; });
  if (full_support) {
    const ShannonMeasures h = shannon_measures(p.joint(), base);
    ordered_json sh;
    sh["unit"] = base == LogBase::kBits ? "bits" : "nats";
    sh["hx"] = h.hx;
    sh["hy"] = h.hy;
    sh["hxy"] = h.hxy;
    sh["hy_given_x"] = h.hy_given_x;
    sh["hx_given_y"] = h.hx_given_y;
    sh["mi"] = h.mi;
    doc["shannon"] = sh;

    const LogLossCheck c = log_loss_realization_check(p.joint(), info.seed, 64, base);
    ordered_json ll;
    ordered_json rs = ordered_json::array();
    for (const auto& item : c.risks) rs.push_back(check_json(item));
    ordered_json vs = ordered_json::array();
    for (const auto& item : c.values) vs.push_back(check_json(item));
    ll["risks"] = rs;
    ll["values"] = vs;
    ll["max_difference"] = c.max_difference;
    ll["tolerance"] = kLogLossIdentityTolerance;
    ll["candidates"] = c.candidates;
    ll["worst_optimality_margin"] = c.worst_optimality_margin;
    ll["pass"] = c.pass;
    doc["log_loss_check"] = ll;
  }
  return finish(doc);
}

std::string agents_report(const RunInfo& info, const MultiAgentProblem& p,
                          AgentMode mode,
                          const std::map<std::size_t, std::size_t>& observed) {
  ordered_json doc = header(info);
  switch (mode) {
    case AgentMode::kRankFirst: doc["mode"] = "rank-first"; break;
    case AgentMode::kRankLeaveOneOut: doc["mode"] = "rank-loo"; break;
    case AgentMode::kOrder: doc["mode"] = "order"; break;
  }
  ordered_json obs = ordered_json::array();
  for (const auto& [agent, value] : observed) {
    ordered_json o;
    o["agent"] = agent;
    o["x"] = value;
    obs.push_back(o);
  }
  doc["observed"] = obs;

  const MultiAgentProblem q = condition_on_observations(p, observed);
  doc["agents"] = indices(q.agent_ids());

  if (mode == AgentMode::kOrder) {
    const OrderingReport r = greedy_order(q);
    std::vector<std::size_t> ids;
    for (std::size_t i : r.order) ids.push_back(q.agent_ids()[i]);
    doc["order"] = indices(ids);
    doc["step_risks"] = numbers(r.step_risks);
    doc["step_values"] = numbers(r.step_values);
    if (q.agent_count() <= 4) {
      const OrderingReport e = exhaustive_order(q);
      std::vector<std::size_t> eids;
      for (std::size_t i : e.order) eids.push_back(q.agent_ids()[i]);
      ordered_json diag;
      diag["note"] = "diagnostic: permutation minimizing the sum of step risks";
      diag["order"] = indices(eids);
      diag["step_risks"] = numbers(e.step_risks);
      doc["exhaustive_order"] = diag;
    }
    return finish(doc);
  }

  struct Entry {
    std::size_t agent;
    double value;
  };
  std::vector<Entry> entries;
  for (std::size_t i = 0; i < q.agent_count(); ++i) {
    const double v = mode == AgentMode::kRankFirst ? first_agent_value(q, i)
                                                   : leave_one_out_value(q, i);
    entries.push_back({q.agent_ids()[i], v});
  }
  std::stable_sort(entries.begin(), entries.end(),
                   [](const Entry& a, const Entry& b) { return a.value > b.value; });
  ordered_json ranking = ordered_json::array();
  for (const Entry& e : entries) {
    ordered_json o;
    o["agent"] = e.agent;
    o["value"] = e.value;
    ranking.push_back(o);
  }
  doc["ranking"] = ranking;
  return finish(doc);
}

std::string check_report(const RunInfo& info, std::size_t trials,
                         const std::vector<PropertyVerdict>& verdicts) {
  ordered_json doc = header(info);
  doc["trials"] = trials;
  doc["lambdas"] = numbers(kDefaultLambdas);
  bool all = true;
  ordered_json list = ordered_json::array();
  for (const PropertyVerdict& v : verdicts) {
    ordered_json o;
    o["name"] = v.name;
    o["direction"] = to_string(v.direction);
    o["trials"] = v.trials;
    o["no_convergence"] = v.no_convergence;
    o["worst_slack"] = v.worst_slack;
    o["tolerance"] = v.tolerance;
    o["pass"] = v.pass;
    list.push_back(o);
    all = all && v.pass;
  }
  doc["all_pass"] = all;
  doc["verdicts"] = list;
  return finish(doc);
}

}  // namespace opval
