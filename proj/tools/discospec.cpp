// Command-line front end: one subcommand per module operation.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

#include "discospec/asymptotics.hpp"
#include "discospec/entire_probe.hpp"
#include "discospec/errors.hpp"
#include "discospec/forward.hpp"
#include "discospec/inverse.hpp"
#include "discospec/io.hpp"
#include "discospec/spectral_data.hpp"
#include "output.hpp"

namespace fs = std::filesystem;
using namespace discospec;
using cli::CsvWriter;
using cli::fmt;
using cli::Manifest;
using cplx = std::complex<double>;
using std::numbers::pi;

namespace {

constexpr int kExitContract = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitUsage = 64;

fs::path prepare_dir(const std::string& dir) {
  fs::create_directories(dir);
  return fs::path(dir);
}

fs::path parent_dir(const std::string& file) {
  fs::path p = fs::path(file).parent_path();
  if (p.empty()) p = ".";
  fs::create_directories(p);
  return p;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

ProblemSpec load_problem(const std::string& path, Manifest& m) {
  m.input(path);
  return read_json_file(path).get<ProblemSpec>();
}

// A spectrum file, or a problem file solved up to n_max.
Spectrum load_spectrum(const std::string& path, int n_max, const PropagatorConfig& cfg, Manifest& m) {
  m.input(path);
  const json j = read_json_file(path);
  if (j.contains("values")) return j.get<Spectrum>();
  return eigenvalues(j.get<ProblemSpec>(), n_max, cfg);
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> v;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw ContractError("bad number '" + item + "'");
    }
  }
  return v;
}

// ---------------------------------------------------------------- forward / asym

struct ForwardOpts {
  std::string problem, out;
  int nmax = 10;
  PropagatorConfig cfg;
};

int run_forward(const ForwardOpts& o) {
  Manifest man("forward", {{"problem", o.problem}, {"nmax", o.nmax}, {"out", o.out}, {"config", o.cfg}});
  const auto spec = eigenvalues(load_problem(o.problem, man), o.nmax, o.cfg);
  CsvWriter csv({"n", "lambda", "sqrt_lambda", "residual_abs"});
  for (const auto& v : spec.values)
    csv.row({fmt(long(v.n)), fmt(v.lambda), fmt(signed_sqrt(v.lambda)), fmt(v.residual_abs)});
  if (o.out.empty()) {
    std::cout << csv.str();
    return 0;
  }
  const fs::path dir = parent_dir(o.out);
  if (ends_with(o.out, ".json"))
    write_json_file(o.out, json(spec));
  else
    csv.write(o.out);
  man.output(o.out);
  man.write(dir);
  return 0;
}

int run_asym(const ForwardOpts& o) {
  Manifest man("asym", {{"problem", o.problem}, {"nmax", o.nmax}, {"out", o.out}, {"config", o.cfg}});
  const auto p = load_problem(o.problem, man);
  const auto spec = eigenvalues(p, o.nmax, o.cfg);
  const auto c = constants(p);
  const auto rep = residuals(spec, c);
  CsvWriter csv({"n", "sqrt_lambda", "predicted", "residual_times_n"});
  for (const auto& [n, r] : rep.residuals)
    csv.row({fmt(long(n)), fmt(signed_sqrt(spec.values[n].lambda)), fmt(predict_sqrt(family_of(p), c, n)), fmt(r)});
  if (o.out.empty()) {
    std::cout << csv.str();
    return 0;
  }
  const fs::path dir = parent_dir(o.out);
  csv.write(o.out);
  man.output(o.out);
  man.write(dir);
  return 0;
}

// ---------------------------------------------------------------- conditions

struct ConditionOpts {
  std::vector<std::string> spectra;
  std::string subsets, check = "all", out, mode = "density";
  std::optional<double> sigma;
  std::string sigmas;
  double b = 0.5;
  int nmax = 100;
  PropagatorConfig cfg;
};

int run_conditions(const ConditionOpts& o) {
  Manifest man("conditions", {{"spectra", o.spectra},
                              {"subsets", o.subsets},
                              {"check", o.check},
                              {"b", o.b},
                              {"nmax", o.nmax},
                              {"sigma", o.sigma ? json(*o.sigma) : json()},
                              {"sigmas", o.sigmas},
                              {"out", o.out}});
  std::vector<Spectrum> spectra;
  for (const auto& f : o.spectra) spectra.push_back(load_spectrum(f, o.nmax, o.cfg, man));
  if (spectra.empty()) throw ContractError("at least one spectrum is required");

  std::vector<SpectralSubset> subsets;
  std::vector<double> regular_sigmas;
  if (o.subsets.rfind("regular:sigma=", 0) == 0) {
    regular_sigmas = parse_list(o.subsets.substr(14));
    if (regular_sigmas.size() == 1) regular_sigmas.assign(spectra.size(), regular_sigmas[0]);
    if (regular_sigmas.size() != spectra.size()) throw ContractError("one sigma per spectrum, or a single sigma");
    for (std::size_t i = 0; i < spectra.size(); ++i)
      subsets.push_back(generate_regular_subset(spectra[i], regular_sigmas[i], o.spectra[i]).subset);
  } else {
    json lists;
    try {
      lists = json::parse(o.subsets);
    } catch (const json::exception&) {
      throw ContractError("--subsets must be regular:sigma=<v> or a JSON array of index lists");
    }
    if (!lists.is_array() || lists.size() != spectra.size()) throw ContractError("one index list per spectrum");
    for (std::size_t i = 0; i < spectra.size(); ++i)
      subsets.push_back(make_subset(spectra[i], lists[i].get<std::vector<int>>(), o.spectra[i]));
  }

  std::optional<double> sigma = o.sigma;
  if (!sigma && !regular_sigmas.empty() &&
      std::all_of(regular_sigmas.begin(), regular_sigmas.end(), [&](double s) { return s == regular_sigmas[0]; }))
    sigma = regular_sigmas[0];
  std::vector<double> sigmas = o.sigmas.empty() ? regular_sigmas : parse_list(o.sigmas);

  const bool all = o.check == "all";
  auto want = [&](const char* c) { return all || o.check == c; };
  std::vector<ConditionReport> reports;
  const int top = spectra[0].values.empty() ? 0 : spectra[0].values.back().n;
  if (want("I")) reports.push_back(check_condition_I(subsets[0], top));
  if (spectra.size() == 2) {
    if (want("density")) {
      if (!sigma) throw ContractError("density check needs --sigma");
      const auto grid = default_r_grid(spectra);
      reports.push_back(check_density_i(subsets[0], subsets[1], spectra[0], spectra[1], *sigma, grid));
    }
    if (want("summability") && (!all || (sigmas.size() == 2 && std::abs(sigmas[0] + sigmas[1] - 2 * o.b) <= 1e-12))) {
      if (sigmas.size() != 2) throw ContractError("summability check needs --sigmas s1,s2");
      reports.push_back(
          check_summability_ii(subsets[0], subsets[1], sigmas[0], sigmas[1], o.b, constants(spectra[1].problem).a));
    }
  } else if (spectra.size() >= 3 && want("multi")) {
    MultiParams mp;
    mp.b = o.b;
    if (o.mode == "density") {
      if (!sigma) throw ContractError("multi-spectra density check needs --sigma");
      mp.mode = MultiMode::DensityI;
      mp.sigma = *sigma;
    } else if (o.mode == "summability") {
      mp.mode = MultiMode::SummabilityII;
      mp.sigmas = sigmas;
    } else {
      throw ContractError("--mode must be density or summability");
    }
    reports.push_back(check_multi_N(subsets, spectra, mp));
  }
  if (reports.empty()) throw ContractError("no condition applies to the given inputs");

  json subsets_json = json::array();
  for (const auto& s : subsets) subsets_json.push_back(s);
  const json doc = {{"reports", reports}, {"subsets", subsets_json}};
  if (o.out.empty()) {
    std::cout << doc.dump(2) << '\n';
    return 0;
  }
  const fs::path dir = prepare_dir(o.out);
  write_json_file((dir / "report.json").string(), doc);
  man.output(dir / "report.json");
  for (const auto& r : reports) {
    CsvWriter csv({"x", "margin"});
    for (const auto& [x, y] : r.margins) csv.row({fmt(x), fmt(y)});
    const fs::path f = dir / ("margins_" + r.condition + ".csv");
    csv.write(f);
    man.output(f);
  }
  man.write(dir);
  return 0;
}

// ---------------------------------------------------------------- probe

struct ProbeOpts {
  std::vector<std::string> pair;
  double b = 0.5;
  std::string mode = "identity", out;
  int nmax = 999;
  double sigma1 = 0.5, sigma2 = 0.5, a = 0.0;
  PropagatorConfig cfg;
};

int run_probe(const ProbeOpts& o) {
  Manifest man("probe", {{"pair", o.pair}, {"b", o.b}, {"mode", o.mode}, {"nmax", o.nmax}, {"sigma1", o.sigma1},
                         {"sigma2", o.sigma2}, {"a", o.a}, {"out", o.out}, {"config", o.cfg}});
  const fs::path dir = prepare_dir(o.out);
  json summary = {{"mode", o.mode}};
  std::vector<std::pair<std::string, CsvWriter>> curves;

  std::optional<ProblemSpec> b, bt;
  if (o.mode != "phi") {
    if (o.pair.size() != 2) throw ContractError("--pair needs two problem files");
    b = load_problem(o.pair[0], man);
    bt = load_problem(o.pair[1], man);
  }

  if (o.mode == "identity") {
    CsvWriter csv({"k", "integral_re", "integral_im", "wronskian_re", "wronskian_im", "rel_diff"});
    std::vector<cplx> gi, gw;
    double gmax = 0.0;
    for (int i = 1; i <= 100; ++i) {
      const double k = 0.5 * i;
      gi.push_back(g_integral(*b, *bt, o.b, k, o.cfg));
      gw.push_back(g_wronskian(*b, *bt, k, o.cfg));
      gmax = std::max(gmax, std::abs(gw.back()));
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < gi.size(); ++i) {
      const double rel = std::abs(gi[i] - gw[i]) / std::max(std::abs(gw[i]), 1e-6 * gmax);
      worst = std::max(worst, rel);
      csv.row({fmt(0.5 * (i + 1)), fmt(gi[i].real()), fmt(gi[i].imag()), fmt(gw[i].real()), fmt(gw[i].imag()),
               fmt(rel)});
    }
    summary["max_rel_diff"] = worst;
    summary["max_abs_g"] = gmax;
    curves.emplace_back("identity.csv", csv);
  } else if (o.mode == "decay") {
    const Lattice lat[] = {Lattice::from_spectrum(eigenvalues(*b, o.nmax, o.cfg))};
    ScaledFn G = [&](cplx l) { return g_integral_scaled(*b, *bt, o.b, std::sqrt(l), o.cfg); };
    ScaledFn P = [&](cplx l) { return phi_product(lat, l, 100000).value; };
    std::vector<double> t;
    for (int i = 0; i <= 16; ++i) t.push_back(std::pow(10.0, 2.0 + 4.0 * i / 16));
    const auto rep = E_decay_probe(G, P, t);
    CsvWriter csv({"t", "log_abs_e", "skipped"});
    for (const auto& s : rep.samples) csv.row({fmt(s.t), fmt(s.log_abs_e), s.skipped ? "1" : "0"});
    summary["slope"] = num(rep.slope);
    curves.emplace_back("decay.csv", csv);
  } else if (o.mode == "growth") {
    const double x_eval = std::max(o.b, 0.5);
    ScaledFn g = [&](cplx k) { return g_wronskian_scaled(*b, *bt, k, o.cfg, x_eval); };
    std::vector<double> radii, th;
    for (int i = 1; i <= 200; ++i) radii.push_back(0.25 * i);
    for (int i = 0; i < 32; ++i) th.push_back(2 * pi * i / 32);
    const double cr[] = {10.0, 20.0, 30.0, 40.0, 50.0};
    const auto est = growth_scan(g, radii, th, cr);
    CsvWriter hc({"theta", "h"});
    for (std::size_t i = 0; i < th.size(); ++i) hc.row({fmt(th[i]), fmt(est.h[i])});
    CsvWriter zc({"r", "zeros_in_disk", "real_zeros", "ratio"});
    for (std::size_t i = 0; i < est.count_radii.size(); ++i)
      zc.row({fmt(est.count_radii[i]), fmt(est.zeros_in_disk[i]), fmt(est.real_zeros[i]), fmt(est.ratio[i])});
    summary["h_half_pi"] = est.h[8];
    summary["indicator_integral"] = est.indicator_integral;
    summary["type_bound"] = 2 * o.b;
    summary["indicator_bound"] = 4 * o.b / pi;
    curves.emplace_back("growth_h.csv", hc);
    curves.emplace_back("growth_zeros.csv", zc);
  } else if (o.mode == "phi") {
    const Lattice lat[] = {Lattice::alpha(o.sigma1), Lattice::beta(o.sigma2, o.a)};
    CsvWriter csv({"lambda_re", "lambda_im", "rel_diff", "rel_error"});
    double worst = 0.0, worst_bar = 0.0;
    for (int i = 0; i < 20; ++i) {
      const cplx l = std::polar(5.0 * (i + 1), 2 * pi * i / 20 + 0.1);
      const auto pv = phi_product(lat, l, 100000);
      const cplx ref = phi0(l, o.sigma1, o.sigma2, o.a) / (1.0 + o.a);
      const double rel = std::abs(pv.value.value() - ref) / std::abs(ref);
      worst = std::max(worst, rel);
      worst_bar = std::max(worst_bar, pv.rel_error);
      csv.row({fmt(l.real()), fmt(l.imag()), fmt(rel), fmt(pv.rel_error)});
    }
    summary["max_rel_diff"] = worst;
    summary["max_rel_error_bar"] = worst_bar;
    curves.emplace_back("phi.csv", csv);
  } else {
    throw ContractError("--mode must be identity, decay, growth or phi");
  }
  for (const auto& [name, csv] : curves) {
    csv.write(dir / name);
    man.output(dir / name);
  }
  write_json_file((dir / "summary.json").string(), summary);
  man.output(dir / "summary.json");
  man.write(dir);
  return 0;
}

// ---------------------------------------------------------------- invert / experiment

int run_invert(const std::string& setup_path, const std::string& out) {
  Manifest man("invert", {{"setup", setup_path}, {"out", out}});
  man.input(setup_path);
  const auto setup = read_json_file(setup_path).get<InverseSetup>();
  const auto res = reconstruct(setup);
  const fs::path dir = parent_dir(out);
  write_json_file(out, res);
  man.output(out);
  man.write(dir);
  std::cerr << "status " << res.status << ", misfit " << fmt(res.misfit) << '\n';
  return res.status == "converged" ? 0 : kExitNumerical;
}

int run_experiment(const std::string& config_path, const std::string& out) {
  Manifest man("experiment", {{"config", config_path}, {"out", out}});
  man.input(config_path);
  const auto config = read_json_file(config_path).get<ExperimentConfig>();
  const auto rep = uniqueness_experiment(config);
  const fs::path dir = prepare_dir(out);
  CsvWriter csv({"sigma", "threshold", "data_count", "converged", "runs", "spread", "agree"});
  for (const auto& row : rep.rows) {
    const fs::path f = dir / ("sigma_" + fmt(row.sigma) + ".json");
    write_json_file(f.string(), json{{"truth_params", rep.truth_params}, {"row", row}});
    man.output(f);
    csv.row({fmt(row.sigma), fmt(row.threshold), fmt(long(row.data_count)), fmt(long(row.converged)),
              fmt(long(row.runs.size())), fmt(row.spread), row.agree ? "1" : "0"});
  }
  csv.write(dir / "summary.csv");
  man.output(dir / "summary.csv");
  man.write(dir);
  return 0;
}

// ---------------------------------------------------------------- selftest

int run_selftest() {
  int failures = 0;
  auto report = [&](const std::string& name, bool ok) {
    std::cout << (ok ? "ok   " : "FAIL ") << name << '\n';
    failures += !ok;
  };
  auto free_problem = [](double a1, BoundaryCondition right) {
    ProblemSpec p;
    p.right = right;
    p.jump = Transmission(a1, 0.0);
    return p;
  };
  for (double a1 : {1.0, 2.0}) {
    const auto s = eigenvalues(free_problem(a1, Robin{0.0}), 20);
    double worst = std::abs(s.values[0].lambda);
    for (int n = 1; n <= 20; ++n) worst = std::max(worst, std::abs(s.values[n].lambda / (n * n * pi * pi) - 1.0));
    report("free Robin spectrum, a1 = " + fmt(a1), worst < 1e-9);
  }
  {
    const auto s = eigenvalues(free_problem(2.0, Dirichlet{}), 1);
    report("Dirichlet jump roots of cos k = -0.6",
           std::abs(std::sqrt(s.values[0].lambda) - 2.2142974355881813) < 1e-9 &&
               std::abs(std::sqrt(s.values[1].lambda) - 4.0688878715914054) < 1e-9);
  }
  {
    ProblemSpec p = free_problem(2.0, Robin{-0.2});
    p.q = Potential::constant(1.0);
    p.h = 0.3;
    p.jump = Transmission(2.0, 1.0);
    const auto c = constants(p);
    report("asymptotic constants", std::abs(c.a - 0.6) < 1e-15 && std::abs(c.omega0 - 1.2) < 1e-14 &&
                                       std::abs(*c.omega - 1.0) < 1e-14 && std::abs(*c.omega1 - 0.1) < 1e-13);
  }
  report("phi0 zero at pi / sigma1", std::abs(phi0((pi / 0.7) * (pi / 0.7), 0.7, 0.7, 0.0)) < 1e-12);
  {
    auto p = free_problem(1.0, Robin{0.0});
    auto pt = p;
    pt.h = 0.7;
    report("g at k = 0 equals the h difference", std::abs(g_integral(p, pt, 0.5, 0.0) - cplx(0.7)) < 1e-13);
  }
  return failures == 0 ? 0 : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral toolkit for Sturm-Liouville problems with a transmission condition at x = 1/2"};
  app.require_subcommand(1);
  app.set_version_flag("--version", DISCOSPEC_VERSION);

  auto add_cfg = [](CLI::App* sub, PropagatorConfig& cfg) {
    sub->add_option("--cells-per-unit", cfg.cells_per_unit, "propagation lattice cells per unit length");
  };

  ForwardOpts fwd;
  auto* forward = app.add_subcommand("forward", "eigenvalues lambda_0..lambda_nmax");
  forward->add_option("--problem", fwd.problem, "problem JSON")->required();
  forward->add_option("--nmax", fwd.nmax, "largest index")->check(CLI::NonNegativeNumber);
  forward->add_option("--out", fwd.out, "output .csv or .json (stdout CSV when omitted)");
  add_cfg(forward, fwd.cfg);

  ForwardOpts asy;
  asy.nmax = 100;
  auto* asym = app.add_subcommand("asym", "residuals against the two-term asymptotics");
  asym->add_option("--problem", asy.problem, "problem JSON")->required();
  asym->add_option("--nmax", asy.nmax, "largest index")->check(CLI::NonNegativeNumber);
  asym->add_option("--out", asy.out, "output CSV (stdout when omitted)");
  add_cfg(asym, asy.cfg);

  ConditionOpts con;
  auto* conditions = app.add_subcommand("conditions", "sufficiency conditions on spectral subsets");
  conditions->add_option("--spectra", con.spectra, "spectrum or problem JSON files")->required();
  conditions->add_option("--subsets", con.subsets, "regular:sigma=<v>[,<v>...] or a JSON array of index lists")
      ->required();
  conditions->add_option("--check", con.check, "I, density, summability, multi or all");
  conditions->add_option("--mode", con.mode, "multi-spectra mode: density or summability");
  conditions->add_option("--sigma", con.sigma, "density exponent sigma");
  conditions->add_option("--sigmas", con.sigmas, "comma-separated sigma_i for summability");
  conditions->add_option("--b", con.b, "known-tail start b");
  conditions->add_option("--nmax", con.nmax, "largest index when a problem file is given");
  conditions->add_option("--out", con.out, "output directory (stdout JSON when omitted)");
  add_cfg(conditions, con.cfg);

  ProbeOpts pr;
  auto* probe = app.add_subcommand("probe", "entire-function probes of a problem pair");
  probe->add_option("--pair", pr.pair, "problem JSON files B and B~")->expected(2);
  probe->add_option("--b", pr.b, "start of the shared tail");
  probe->add_option("--mode", pr.mode, "identity, decay, growth or phi")->required();
  probe->add_option("--nmax", pr.nmax, "computed eigenvalues in the decay lattice");
  probe->add_option("--sigma1", pr.sigma1, "phi mode: sigma1");
  probe->add_option("--sigma2", pr.sigma2, "phi mode: sigma2");
  probe->add_option("--a", pr.a, "phi mode: a");
  probe->add_option("--out", pr.out, "output directory")->required();
  add_cfg(probe, pr.cfg);

  std::string inv_setup, inv_out;
  auto* invert = app.add_subcommand("invert", "least-squares reconstruction");
  invert->add_option("--setup", inv_setup, "setup JSON")->required();
  invert->add_option("--out", inv_out, "result JSON")->required();

  std::string exp_config, exp_out;
  auto* experiment = app.add_subcommand("experiment", "multi-start uniqueness experiment");
  experiment->add_option("--config", exp_config, "experiment JSON")->required();
  experiment->add_option("--out", exp_out, "output directory")->required();

  auto* selftest = app.add_subcommand("selftest", "closed-form oracle checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*forward) return run_forward(fwd);
    if (*asym) return run_asym(asy);
    if (*conditions) return run_conditions(con);
    if (*probe) return run_probe(pr);
    if (*invert) return run_invert(inv_setup, inv_out);
    if (*experiment) return run_experiment(exp_config, exp_out);
    if (*selftest) return run_selftest();
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitContract;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "bad input: " << e.what() << '\n';
    return kExitContract;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitContract;
  }
  std::cerr << app.help();
  return kExitUsage;
}
