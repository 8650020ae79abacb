#include "discospec/io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "discospec/errors.hpp"

namespace discospec {

json num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double get_num(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw ContractError("expected a number, got " + j.dump());
}

namespace {

const json& at(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ContractError(std::string("missing key '") + key + "'");
  return j.at(key);
}

double num_at(const json& j, const char* key) { return get_num(at(j, key)); }

template <class T>
T value_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

double num_or(const json& j, const char* key, double fallback) {
  return j.contains(key) ? get_num(j.at(key)) : fallback;
}

json nums(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

std::vector<double> get_nums(const json& j) {
  std::vector<double> v;
  for (const auto& x : j) v.push_back(get_num(x));
  return v;
}

json picks_json(const std::vector<Pick>& picks) {
  json a = json::array();
  for (const auto& p : picks) a.push_back({p.n, num(p.value)});
  return a;
}

std::vector<Pick> get_picks(const json& j) {
  std::vector<Pick> v;
  for (const auto& x : j) v.push_back({x.at(0).get<int>(), get_num(x.at(1))});
  return v;
}

Verdict verdict_from(const std::string& s) {
  for (Verdict v : {Verdict::Pass, Verdict::Fail, Verdict::Indeterminate})
    if (s == verdict_name(v)) return v;
  throw ContractError("unknown verdict '" + s + "'");
}

}  // namespace

void to_json(json& j, const Potential& q) {
  j = json::array();
  for (const auto& p : q.pieces()) {
    json c = json::array();
    for (double x : p.coeffs) c.push_back(num(x));
    j.push_back({{"interval", {num(p.x0), num(p.x1)}}, {"coeffs", c}});
  }
}

void from_json(const json& j, Potential& q) {
  if (!j.is_array()) throw ContractError("q must be a list of pieces");
  std::vector<Piece> pieces;
  for (const auto& e : j) {
    Piece p;
    const auto& iv = at(e, "interval");
    if (!iv.is_array() || iv.size() != 2) throw ContractError("interval must be [x0, x1]");
    p.x0 = get_num(iv[0]);
    p.x1 = get_num(iv[1]);
    const auto& c = at(e, "coeffs");
    if (!c.is_array() || c.empty() || c.size() > 4) throw ContractError("coeffs must hold 1 to 4 values");
    for (std::size_t i = 0; i < c.size(); ++i) p.coeffs[i] = get_num(c[i]);
    pieces.push_back(p);
  }
  q = pieces.empty() ? Potential() : Potential(std::move(pieces));
}

void to_json(json& j, const ProblemSpec& p) {
  j = json::object();
  j["q"] = p.q;
  j["h"] = num(p.h);
  if (const auto* r = std::get_if<Robin>(&p.right))
    j["right"] = {{"robin", num(r->coefficient)}};
  else
    j["right"] = "dirichlet";
  j["a1"] = num(p.jump.a1());
  j["a2"] = num(p.jump.a2());
}

void from_json(const json& j, ProblemSpec& p) {
  p.q = at(j, "q").get<Potential>();
  p.h = num_at(j, "h");
  const auto& r = at(j, "right");
  if (r.is_string() && r.get<std::string>() == "dirichlet")
    p.right = Dirichlet{};
  else if (r.is_object() && r.contains("robin"))
    p.right = Robin{get_num(r.at("robin"))};
  else
    throw ContractError("right must be {\"robin\": H} or \"dirichlet\"");
  p.jump = Transmission(num_at(j, "a1"), num_at(j, "a2"));
  p.validate();
}

void to_json(json& j, const PropagatorConfig& c) {
  j = {{"cells_per_unit", c.cells_per_unit}, {"refine_tol", num(c.refine_tol)}, {"max_bisections", c.max_bisections}};
}

void from_json(const json& j, PropagatorConfig& c) {
  const PropagatorConfig d;
  c.cells_per_unit = value_or(j, "cells_per_unit", d.cells_per_unit);
  c.refine_tol = num_or(j, "refine_tol", d.refine_tol);
  c.max_bisections = value_or(j, "max_bisections", d.max_bisections);
  c.validate();
}

void to_json(json& j, const Spectrum& s) {
  json v = json::array();
  for (const auto& e : s.values) v.push_back({{"n", e.n}, {"lambda", num(e.lambda)}, {"residual_abs", num(e.residual_abs)}});
  j = {{"problem", s.problem}, {"values", v}};
}

void from_json(const json& j, Spectrum& s) {
  s.problem = at(j, "problem").get<ProblemSpec>();
  s.values.clear();
  for (const auto& e : at(j, "values"))
    s.values.push_back({at(e, "n").get<int>(), num_at(e, "lambda"), num_or(e, "residual_abs", 0.0)});
  s.validate();
}

void to_json(json& j, const SpectralSubset& s) {
  j = {{"parent", s.parent},
       {"family", s.family == Family::BType ? "B" : "Binf"},
       {"picks", picks_json(s.picks)}};
}

void from_json(const json& j, SpectralSubset& s) {
  s.parent = value_or<std::string>(j, "parent", "");
  const auto f = value_or<std::string>(j, "family", "B");
  if (f != "B" && f != "Binf") throw ContractError("family must be \"B\" or \"Binf\"");
  s.family = f == "B" ? Family::BType : Family::BInfType;
  s.picks = get_picks(at(j, "picks"));
}

void to_json(json& j, const ConditionReport& r) {
  json m = json::array();
  for (const auto& [x, y] : r.margins) m.push_back({num(x), num(y)});
  json st = json::object();
  for (const auto& [k, v] : r.stats) st[k] = num(v);
  j = {{"condition", r.condition}, {"verdict", verdict_name(r.verdict)}, {"truncation", r.truncation},
       {"margins", m}, {"stats", st}, {"notes", r.notes}};
}

void from_json(const json& j, ConditionReport& r) {
  r.condition = at(j, "condition").get<std::string>();
  r.verdict = verdict_from(at(j, "verdict").get<std::string>());
  r.truncation = value_or(j, "truncation", 0);
  r.margins.clear();
  for (const auto& m : at(j, "margins")) r.margins.emplace_back(get_num(m.at(0)), get_num(m.at(1)));
  r.stats.clear();
  for (const auto& [k, v] : at(j, "stats").items()) r.stats[k] = get_num(v);
  r.notes = value_or<std::vector<std::string>>(j, "notes", {});
}

void to_json(json& j, const Unknowns& u) {
  j = json::array();
  if (u.q_head) j.push_back("q_head");
  if (u.h) j.push_back("h");
  if (u.H) j.push_back("H");
  if (u.a1) j.push_back("a1");
  if (u.a2) j.push_back("a2");
}

void from_json(const json& j, Unknowns& u) {
  u = {false, false, false, false, false};
  for (const auto& e : j) {
    const auto s = e.get<std::string>();
    if (s == "q_head")
      u.q_head = true;
    else if (s == "h")
      u.h = true;
    else if (s == "H")
      u.H = true;
    else if (s == "a1")
      u.a1 = true;
    else if (s == "a2")
      u.a2 = true;
    else
      throw ContractError("unknown parameter '" + s + "'");
  }
}

void to_json(json& j, const DataFamily& f) {
  switch (f.kind) {
    case DataFamily::Kind::Robin:
      j = "robin";
      break;
    case DataFamily::Kind::Dirichlet:
      j = "dirichlet";
      break;
    case DataFamily::Kind::FixedRobin:
      j = {{"robin_fixed", num(f.H_fixed)}};
      break;
  }
}

void from_json(const json& j, DataFamily& f) {
  if (j.is_string() && j.get<std::string>() == "robin")
    f = {DataFamily::Kind::Robin, 0.0};
  else if (j.is_string() && j.get<std::string>() == "dirichlet")
    f = {DataFamily::Kind::Dirichlet, 0.0};
  else if (j.is_object() && j.contains("robin_fixed"))
    f = {DataFamily::Kind::FixedRobin, get_num(j.at("robin_fixed"))};
  else
    throw ContractError("family must be \"robin\", \"dirichlet\" or {\"robin_fixed\": H}");
}

void to_json(json& j, const Params& p) {
  j = {{"q_head", nums(p.q_head)}, {"h", num(p.h)}, {"H", num(p.H)}, {"a1", num(p.a1)}, {"a2", num(p.a2)}};
}

void from_json(const json& j, Params& p) {
  p.q_head = get_nums(at(j, "q_head"));
  p.h = num_or(j, "h", 0.0);
  p.H = num_or(j, "H", 0.0);
  p.a1 = num_or(j, "a1", 1.0);
  p.a2 = num_or(j, "a2", 0.0);
}

void to_json(json& j, const InverseSetup& s) {
  json data = json::array();
  for (const auto& d : s.data) data.push_back({{"family", d.family}, {"target", picks_json(d.target)}});
  j = {{"b", num(s.b)},
       {"known_tail", s.known_tail},
       {"cells", s.cells},
       {"unknowns", s.unknowns},
       {"data", data},
       {"regularization", num(s.regularization)},
       {"initial", s.initial},
       {"config", s.cfg},
       {"max_iterations", s.max_iterations}};
  if (s.truth) j["truth"] = *s.truth;
}

void from_json(const json& j, InverseSetup& s) {
  s = InverseSetup{};
  s.b = num_at(j, "b");
  s.known_tail = at(j, "known_tail").get<Potential>();
  s.cells = at(j, "cells").get<int>();
  if (j.contains("unknowns")) s.unknowns = j.at("unknowns").get<Unknowns>();
  for (const auto& d : at(j, "data")) s.data.push_back({at(d, "family").get<DataFamily>(), get_picks(at(d, "target"))});
  s.regularization = num_or(j, "regularization", 0.0);
  s.initial = at(j, "initial").get<Params>();
  if (j.contains("truth")) s.truth = j.at("truth").get<Params>();
  if (j.contains("config")) s.cfg = j.at("config").get<PropagatorConfig>();
  s.max_iterations = value_or(j, "max_iterations", 200);
}

void to_json(json& j, const InverseResult& r) {
  json res = json::array();
  for (const auto& [n, v] : r.residuals) res.push_back({n, num(v)});
  json trace = json::array();
  for (const auto& t : r.trace) trace.push_back({t.iteration, num(t.misfit), num(t.damping)});
  j = {{"recovered", r.recovered}, {"residuals", res},         {"misfit", num(r.misfit)},
       {"misfit_doubled", num(r.misfit_doubled)}, {"trace", trace}, {"status", r.status}};
  json err = json::object();
  auto put = [&](const char* k, const std::optional<double>& v) {
    if (v) err[k] = num(*v);
  };
  put("q_max", r.q_error_max);
  put("q_l2", r.q_error_l2);
  put("h", r.h_error);
  put("H", r.H_error);
  put("a1", r.a1_error);
  put("a2", r.a2_error);
  if (!err.empty()) j["errors"] = err;
}

void from_json(const json& j, InverseResult& r) {
  r = InverseResult{};
  r.recovered = at(j, "recovered").get<Params>();
  for (const auto& e : at(j, "residuals")) r.residuals.emplace_back(e.at(0).get<int>(), get_num(e.at(1)));
  r.misfit = num_at(j, "misfit");
  r.misfit_doubled = num_at(j, "misfit_doubled");
  for (const auto& t : at(j, "trace")) r.trace.push_back({t.at(0).get<int>(), get_num(t.at(1)), get_num(t.at(2))});
  r.status = at(j, "status").get<std::string>();
  if (j.contains("errors")) {
    const auto& e = j.at("errors");
    auto get = [&](const char* k, std::optional<double>& v) {
      if (e.contains(k)) v = get_num(e.at(k));
    };
    get("q_max", r.q_error_max);
    get("q_l2", r.q_error_l2);
    get("h", r.h_error);
    get("H", r.H_error);
    get("a1", r.a1_error);
    get("a2", r.a2_error);
  }
}

void to_json(json& j, const ExperimentConfig& c) {
  j = {{"truth", c.truth},
       {"b", num(c.b)},
       {"cells", c.cells},
       {"unknowns", c.unknowns},
       {"sigmas", nums(c.sigmas)},
       {"n_max", c.n_max},
       {"runs", c.runs},
       {"seed", c.seed},
       {"extra_H", nums(c.extra_H)},
       {"data_resolution", c.data_resolution},
       {"agreement_tol", num(c.agreement_tol)},
       {"misfit_tol", num(c.misfit_tol)},
       {"config", c.cfg}};
}

void from_json(const json& j, ExperimentConfig& c) {
  c = ExperimentConfig{};
  c.truth = at(j, "truth").get<ProblemSpec>();
  c.b = num_or(j, "b", c.b);
  c.cells = value_or(j, "cells", c.cells);
  if (j.contains("unknowns")) c.unknowns = j.at("unknowns").get<Unknowns>();
  if (j.contains("sigmas")) c.sigmas = get_nums(j.at("sigmas"));
  c.n_max = value_or(j, "n_max", c.n_max);
  c.runs = value_or(j, "runs", c.runs);
  c.seed = value_or<std::uint64_t>(j, "seed", 0);
  if (j.contains("extra_H")) c.extra_H = get_nums(j.at("extra_H"));
  c.data_resolution = value_or(j, "data_resolution", c.data_resolution);
  c.agreement_tol = num_or(j, "agreement_tol", c.agreement_tol);
  c.misfit_tol = num_or(j, "misfit_tol", c.misfit_tol);
  if (j.contains("config")) c.cfg = j.at("config").get<PropagatorConfig>();
}

void to_json(json& j, const ExperimentRow& r) {
  j = {{"sigma", num(r.sigma)},         {"threshold", num(r.threshold)}, {"data_count", r.data_count},
       {"converged", r.converged},      {"spread", num(r.spread)},       {"agree", r.agree},
       {"runs", r.runs}};
}

void from_json(const json& j, ExperimentRow& r) {
  r.sigma = num_at(j, "sigma");
  r.threshold = num_at(j, "threshold");
  r.data_count = at(j, "data_count").get<int>();
  r.converged = at(j, "converged").get<int>();
  r.spread = num_at(j, "spread");
  r.agree = at(j, "agree").get<bool>();
  r.runs = at(j, "runs").get<std::vector<InverseResult>>();
}

void to_json(json& j, const ExperimentReport& r) { j = {{"truth_params", r.truth_params}, {"rows", r.rows}}; }

void from_json(const json& j, ExperimentReport& r) {
  r.truth_params = at(j, "truth_params").get<Params>();
  r.rows = at(j, "rows").get<std::vector<ExperimentRow>>();
}

json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ContractError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ContractError(path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ContractError("cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace discospec
