#include "discospec/inverse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "discospec/asymptotics.hpp"
#include "discospec/errors.hpp"
#include "discospec/forward.hpp"
#include "discospec/parallel.hpp"

namespace discospec {

using std::numbers::pi;

namespace {

double fd_step(double p) { return 1e-6 * (1.0 + std::abs(p)); }

double solve_one(const ProblemSpec& p, int n, const PropagatorConfig& cfg, std::span<const double> breaks) {
  const RealEvaluator ev(p, CellGrid::build(p.q, cfg.cells_per_unit, breaks));
  const int idx[] = {n};
  return eigenvalues_at(ev, idx, cfg.refine_tol, cfg.max_bisections)[0].lambda;
}

}  // namespace

double eig_gradient(const ProblemSpec& problem, int n, ParamKind kind, std::pair<double, double> cell,
                    const PropagatorConfig& cfg) {
  problem.validate();
  cfg.validate();
  if (n < 0) throw DomainError("eigenvalue index must be non-negative");
  if (kind == ParamKind::a1 || kind == ParamKind::a2) {
    const bool is_a1 = kind == ParamKind::a1;
    const double p0 = is_a1 ? problem.jump.a1() : problem.jump.a2();
    // Five-point stencil: rounding in lambda is amplified by 1/d, so a wider step with a
    // fourth-order rule is more accurate than the two-point rule at 1e-6.
    double d = 1e-4 * (1.0 + std::abs(p0));
    if (is_a1) d = std::min(d, 0.25 * p0);
    auto at = [&](double v) {
      ProblemSpec q = problem;
      q.jump = is_a1 ? Transmission(v, problem.jump.a2()) : Transmission(problem.jump.a1(), v);
      return solve_one(q, n, cfg, {});
    };
    return (8.0 * (at(p0 + d) - at(p0 - d)) - (at(p0 + 2 * d) - at(p0 - 2 * d))) / (12.0 * d);
  }
  if (kind == ParamKind::H && is_dirichlet(problem.right)) return 0.0;
  if (!(cell.first >= 0.0 && cell.first < cell.second && cell.second <= 1.0)) throw DomainError("bad cell bounds");
  const double breaks[] = {cell.first, cell.second};
  const double lambda = solve_one(problem, n, cfg, breaks);
  const auto m = eigenfunction_moments(problem, lambda, breaks, cfg);
  if (!(m.norm2 > 0.0) || !std::isfinite(m.norm2)) throw NumericalFailure("degenerate eigenfunction norm");
  switch (kind) {
    case ParamKind::Cell:
      return m.cell_integrals[0] / m.norm2;
    case ParamKind::h:
      return m.y0 * m.y0 / m.norm2;
    default:
      return m.y1 * m.y1 / m.norm2;
  }
}

int Unknowns::count(int cells) const {
  return (q_head ? cells : 0) + static_cast<int>(h) + static_cast<int>(a2) + static_cast<int>(a1) +
         static_cast<int>(H);
}

std::vector<double> InverseSetup::head_edges() const {
  if (!(b > 0.0 && b <= 1.0)) throw ContractError("b must lie in (0,1]");
  if (cells < 1) throw ContractError("at least one head cell is required");
  const double cpu = cfg.cells_per_unit;
  std::vector<double> e(static_cast<std::size_t>(cells) + 1);
  for (int i = 0; i < cells; ++i) e[i] = std::round(b * i / cells * cpu) / cpu;
  e[cells] = b;
  for (int i = 0; i < cells; ++i)
    if (!(e[i + 1] > e[i])) throw ContractError("too many head cells for the propagation lattice");
  return e;
}

ProblemSpec InverseSetup::problem(const Params& p, const DataFamily& family) const {
  if (static_cast<int>(p.q_head.size()) != cells) throw ContractError("head value count must equal cells");
  const auto edges = head_edges();
  ProblemSpec s;
  s.q = known_tail.with_head(edges, p.q_head);
  s.h = p.h;
  switch (family.kind) {
    case DataFamily::Kind::Robin:
      s.right = Robin{p.H};
      break;
    case DataFamily::Kind::Dirichlet:
      s.right = Dirichlet{};
      break;
    case DataFamily::Kind::FixedRobin:
      s.right = Robin{family.H_fixed};
      break;
  }
  s.jump = Transmission(p.a1, p.a2);
  return s;
}

void InverseSetup::validate() const {
  (void)head_edges();
  if (!(regularization >= 0.0)) throw ContractError("regularization must be non-negative");
  if (static_cast<int>(initial.q_head.size()) != cells) throw ContractError("initial head must have one value per cell");
  if (b < 0.5 && (unknowns.a1 || unknowns.a2 || unknowns.H))
    throw ContractError("with b < 1/2 the parameters a1, a2 and H must be known");
  std::size_t n_data = 0;
  std::vector<Pick> main_picks;
  for (const auto& d : data) {
    n_data += d.target.size();
    for (std::size_t i = 1; i < d.target.size(); ++i)
      if (d.target[i].n <= d.target[i - 1].n) throw ContractError("data indices must increase within a family");
    if (d.family.kind == DataFamily::Kind::Robin) main_picks.insert(main_picks.end(), d.target.begin(), d.target.end());
  }
  if (n_data == 0) throw ContractError("no spectral data");
  if (static_cast<int>(n_data) < unknowns.count(cells)) throw ContractError("more unknowns than data");
  if (unknowns.H) {
    int top = 0;
    for (const auto& p : main_picks) top = std::max(top, p.n);
    SpectralSubset s;
    s.picks = main_picks;
    if (main_picks.empty() || check_condition_I(s, top).verdict != Verdict::Pass)
      throw ContractError("an unknown H needs main-family data with both even and odd indices (condition (I))");
  }
  cfg.validate();
}

std::vector<double> projected_head(const InverseSetup& setup, const Potential& q) {
  const auto e = setup.head_edges();
  std::vector<double> v(e.size() - 1);
  for (std::size_t i = 0; i + 1 < e.size(); ++i) v[i] = q.integrate(e[i], e[i + 1]) / (e[i + 1] - e[i]);
  return v;
}

namespace {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct Model {
  const InverseSetup& s;
  std::vector<double> edges;

  explicit Model(const InverseSetup& setup) : s(setup), edges(setup.head_edges()) {}

  Vec pack(const Params& p) const {
    std::vector<double> v;
    if (s.unknowns.q_head) v.insert(v.end(), p.q_head.begin(), p.q_head.end());
    if (s.unknowns.h) v.push_back(p.h);
    if (s.unknowns.a2) v.push_back(p.a2);
    if (s.unknowns.a1) v.push_back(p.a1);
    if (s.unknowns.H) v.push_back(p.H);
    return Eigen::Map<Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
  }

  Params unpack(const Vec& x) const {
    Params p = s.initial;
    Eigen::Index k = 0;
    if (s.unknowns.q_head)
      for (int i = 0; i < s.cells; ++i) p.q_head[i] = x[k++];
    if (s.unknowns.h) p.h = x[k++];
    if (s.unknowns.a2) p.a2 = x[k++];
    if (s.unknowns.a1) p.a1 = x[k++];
    if (s.unknowns.H) p.H = x[k++];
    return p;
  }

  std::vector<std::vector<double>> solve(const Params& p, const PropagatorConfig& cfg) const {
    std::vector<std::vector<double>> out;
    for (const auto& d : s.data) {
      const ProblemSpec prob = s.problem(p, d.family);
      const RealEvaluator ev(prob, CellGrid::build(prob.q, cfg.cells_per_unit, edges));
      std::vector<int> idx;
      for (const auto& t : d.target) idx.push_back(t.n);
      std::vector<double> lam;
      for (const auto& v : eigenvalues_at(ev, idx, cfg.refine_tol, cfg.max_bisections)) lam.push_back(v.lambda);
      out.push_back(std::move(lam));
    }
    return out;
  }

  int data_rows() const {
    int n = 0;
    for (const auto& d : s.data) n += static_cast<int>(d.target.size());
    return n;
  }
  int reg_rows() const { return s.unknowns.q_head && s.regularization > 0.0 ? s.cells - 1 : 0; }

  Vec residual(const Params& p, const std::vector<std::vector<double>>& lam) const {
    Vec r(data_rows() + reg_rows());
    Eigen::Index k = 0;
    for (std::size_t f = 0; f < s.data.size(); ++f)
      for (std::size_t j = 0; j < s.data[f].target.size(); ++j) {
        const double kap = s.data[f].target[j].value;
        r[k++] = (lam[f][j] - kap) / (1.0 + std::abs(kap));
      }
    const double sr = std::sqrt(s.regularization);
    for (int i = 0; i < reg_rows(); ++i) r[k++] = sr * (p.q_head[i + 1] - p.q_head[i]);
    return r;
  }

  Mat jacobian(const Params& p, const std::vector<std::vector<double>>& lam) const {
    const int nu = s.unknowns.count(s.cells);
    Mat J = Mat::Zero(data_rows() + reg_rows(), nu);
    // Finite-difference columns for the jump parameters.
    std::vector<std::vector<std::vector<double>>> fd_plus, fd_minus;
    std::vector<int> fd_cols;
    auto fd = [&](bool is_a1, int col) {
      const double p0 = is_a1 ? p.a1 : p.a2;
      const double d = fd_step(p0);
      Params pp = p, pm = p;
      (is_a1 ? pp.a1 : pp.a2) = p0 + d;
      (is_a1 ? pm.a1 : pm.a2) = p0 - d;
      const auto lp = solve(pp, s.cfg);
      const auto lm = solve(pm, s.cfg);
      Eigen::Index row = 0;
      for (std::size_t f = 0; f < s.data.size(); ++f)
        for (std::size_t j = 0; j < s.data[f].target.size(); ++j, ++row)
          J(row, col) = (lp[f][j] - lm[f][j]) / (2.0 * d) / (1.0 + std::abs(s.data[f].target[j].value));
    };
    int col = s.unknowns.q_head ? s.cells : 0;
    const int col_h = s.unknowns.h ? col++ : -1;
    const int col_a2 = s.unknowns.a2 ? col++ : -1;
    const int col_a1 = s.unknowns.a1 ? col++ : -1;
    const int col_H = s.unknowns.H ? col++ : -1;
    if (col_a2 >= 0) fd(false, col_a2);
    if (col_a1 >= 0) fd(true, col_a1);

    std::vector<std::pair<std::size_t, std::size_t>> items;
    for (std::size_t f = 0; f < s.data.size(); ++f)
      for (std::size_t j = 0; j < s.data[f].target.size(); ++j) items.emplace_back(f, j);
    std::vector<Eigen::Index> row_of(items.size());
    for (std::size_t i = 0; i < items.size(); ++i) row_of[i] = static_cast<Eigen::Index>(i);
    std::vector<ProblemSpec> probs;
    for (const auto& d : s.data) probs.push_back(s.problem(p, d.family));
    parallel_for(items.size(), [&](std::size_t i) {
      const auto [f, j] = items[i];
      const auto m = eigenfunction_moments(probs[f], lam[f][j], edges, s.cfg);
      const double w = 1.0 / (1.0 + std::abs(s.data[f].target[j].value)) / m.norm2;
      const Eigen::Index row = row_of[i];
      if (s.unknowns.q_head)
        for (int c = 0; c < s.cells; ++c) J(row, c) = m.cell_integrals[c] * w;
      if (col_h >= 0) J(row, col_h) = m.y0 * m.y0 * w;
      if (col_H >= 0 && s.data[f].family.kind == DataFamily::Kind::Robin) J(row, col_H) = m.y1 * m.y1 * w;
    });
    const double sr = std::sqrt(s.regularization);
    for (int i = 0; i < reg_rows(); ++i) {
      J(data_rows() + i, i) = -sr;
      J(data_rows() + i, i + 1) = sr;
    }
    return J;
  }
};

double misfit_of(const Model& m, const Params& p, const PropagatorConfig& cfg) {
  return m.residual(p, m.solve(p, cfg)).squaredNorm();
}

}  // namespace

InverseResult reconstruct(const InverseSetup& setup) {
  setup.validate();
  const Model model(setup);
  Vec x = model.pack(setup.initial);
  Params p = model.unpack(x);
  auto lam = model.solve(p, setup.cfg);
  Vec r = model.residual(p, lam);
  double f = r.squaredNorm();

  InverseResult res;
  res.trace.push_back({0, f, 0.0});
  double mu = 1e-3;
  std::string status = "max-iterations";
  int rejections = 0;
  for (int it = 1; it <= setup.max_iterations; ++it) {
    if (f <= 1e-28) {
      status = "converged";
      break;
    }
    const Mat J = model.jacobian(p, lam);
    const Vec g = J.transpose() * r;
    if (g.norm() <= 1e-10 * std::max(J.norm(), 1e-300) * 1e-4) {
      status = "converged";
      break;
    }
    const Mat A = J.transpose() * J;
    Vec diag = A.diagonal();
    const double dmax = diag.maxCoeff();
    for (Eigen::Index i = 0; i < diag.size(); ++i) diag[i] = std::max(diag[i], 1e-12 * dmax);
    bool accepted = false;
    while (!accepted) {
      Mat M = A;
      M.diagonal() += mu * diag;
      const Vec step = M.ldlt().solve(-g);
      const Vec xn = x + step;
      const Params pn = model.unpack(xn);
      bool ok = step.allFinite() && pn.a1 > 0.0;
      double fn = INFINITY;
      std::vector<std::vector<double>> ln;
      Vec rn;
      if (ok) {
        try {
          ln = model.solve(pn, setup.cfg);
          rn = model.residual(pn, ln);
          fn = rn.squaredNorm();
        } catch (const Error&) {
          ok = false;
        }
      }
      if (ok && fn < f) {
        const double rel_step = step.norm() / (1.0 + x.norm());
        x = xn;
        p = pn;
        lam = std::move(ln);
        r = rn;
        f = fn;
        mu = std::max(mu / 3.0, 1e-12);
        accepted = true;
        rejections = 0;
        res.trace.push_back({it, f, mu});
        if (rel_step < 1e-14) status = "converged";
      } else {
        mu *= 4.0;
        if (++rejections > 40 || mu > 1e16) break;
      }
    }
    if (!accepted) {
      status = f <= 1e-20 ? "converged" : "stalled";
      break;
    }
    if (status == "converged") break;
  }

  res.recovered = p;
  res.status = status;
  // Fresh forward passes for the reported misfit.
  const auto fresh = model.solve(p, setup.cfg);
  const Vec rf = model.residual(p, fresh);
  res.misfit = rf.squaredNorm();
  for (std::size_t fi = 0, row = 0; fi < setup.data.size(); ++fi)
    for (std::size_t j = 0; j < setup.data[fi].target.size(); ++j, ++row)
      res.residuals.emplace_back(setup.data[fi].target[j].n, fresh[fi][j] - setup.data[fi].target[j].value);
  PropagatorConfig doubled = setup.cfg;
  doubled.cells_per_unit *= 2;
  res.misfit_doubled = misfit_of(model, p, doubled);

  if (setup.truth) {
    const Params& t = *setup.truth;
    const auto e = model.edges;
    double mx = 0.0, l2 = 0.0;
    for (int i = 0; i < setup.cells; ++i) {
      const double d = p.q_head[i] - t.q_head[i];
      mx = std::max(mx, std::abs(d));
      l2 += d * d * (e[i + 1] - e[i]);
    }
    res.q_error_max = mx;
    res.q_error_l2 = std::sqrt(l2);
    res.h_error = std::abs(p.h - t.h);
    res.H_error = std::abs(p.H - t.H);
    res.a1_error = std::abs(p.a1 - t.a1);
    res.a2_error = std::abs(p.a2 - t.a2);
  }
  return res;
}

std::pair<double, double> asymptotic_a1_H(const std::vector<Pick>& robin, const std::vector<Pick>& dirichlet) {
  // Two-parameter least squares y = c0 + c1 * s_n over the upper half of each index range.
  auto fit = [](const std::vector<Pick>& picks, auto&& row) {
    int top = 0;
    for (const auto& p : picks) top = std::max(top, p.n);
    Eigen::MatrixXd A(0, 2);
    Eigen::VectorXd y(0);
    for (const auto& p : picks) {
      if (p.n < std::max(4, top / 2)) continue;
      const auto [a0, a1v, rhs] = row(p);
      A.conservativeResize(A.rows() + 1, 2);
      y.conservativeResize(y.size() + 1);
      A(A.rows() - 1, 0) = a0;
      A(A.rows() - 1, 1) = a1v;
      y[y.size() - 1] = rhs;
    }
    if (A.rows() < 4) throw InsufficientData("not enough high-index data for the asymptotic initializer");
    return Eigen::Vector2d(A.colPivHouseholderQr().solve(y));
  };
  // Dirichlet: sqrt(mu_n) - (n + 1/2) pi = (-1)^n arcsin a + omega0 / (n pi).
  const auto d = fit(dirichlet, [](const Pick& p) {
    const double sgn = p.n % 2 == 0 ? 1.0 : -1.0;
    return std::tuple{sgn, 1.0 / (p.n * pi), signed_sqrt(p.value) - (p.n + 0.5) * pi};
  });
  // Robin: n pi (sqrt(lambda_n) - n pi) = omega + (-1)^n omega1.
  const auto r = fit(robin, [](const Pick& p) {
    const double sgn = p.n % 2 == 0 ? 1.0 : -1.0;
    return std::tuple{1.0, sgn, p.n * pi * (signed_sqrt(p.value) - p.n * pi)};
  });
  const double a = std::sin(std::clamp(d[0], -1.5, 1.5));
  const double a1 = std::sqrt((1.0 + a) / (1.0 - a));
  return {a1, r[0] - d[1]};
}

ExperimentReport uniqueness_experiment(const ExperimentConfig& config) {
  if (config.runs < 1) throw ContractError("at least one run is required");
  if (!std::holds_alternative<Robin>(config.truth.right)) throw ContractError("the ground truth needs a Robin H");
  config.truth.validate();
  const double H = std::get<Robin>(config.truth.right).coefficient;

  InverseSetup base;
  base.b = config.b;
  base.known_tail = config.truth.q;
  base.cells = config.cells;
  base.unknowns = config.unknowns;
  base.cfg = config.cfg;
  Params truth{projected_head(base, config.truth.q), config.truth.h, H, config.truth.jump.a1(),
               config.truth.jump.a2()};
  base.truth = truth;

  std::vector<DataFamily> families{{DataFamily::Kind::Robin, 0.0}, {DataFamily::Kind::Dirichlet, 0.0}};
  for (double hi : config.extra_H) families.push_back({DataFamily::Kind::FixedRobin, hi});
  PropagatorConfig data_cfg = config.cfg;
  data_cfg.cells_per_unit *= std::max(1, config.data_resolution);
  std::vector<Spectrum> spectra;
  for (const auto& fam : families) spectra.push_back(eigenvalues(base.problem(truth, fam), config.n_max, data_cfg));

  const double n_fam = static_cast<double>(families.size());
  const double threshold = config.extra_H.empty() ? config.b : 2.0 * config.b / n_fam;
  ExperimentReport rep;
  rep.truth_params = truth;
  for (std::size_t si = 0; si < config.sigmas.size(); ++si) {
    const double sigma = config.sigmas[si];
    InverseSetup setup = base;
    for (std::size_t f = 0; f < families.size(); ++f)
      setup.data.push_back({families[f], generate_regular_subset(spectra[f], sigma).subset.picks});
    ExperimentRow row;
    row.sigma = sigma;
    row.threshold = threshold;
    for (const auto& d : setup.data) row.data_count += static_cast<int>(d.target.size());
    row.runs.resize(static_cast<std::size_t>(config.runs));
    parallel_for(row.runs.size(), [&](std::size_t run) {
      std::seed_seq seq{config.seed, static_cast<std::uint64_t>(si), static_cast<std::uint64_t>(run)};
      std::mt19937_64 rng(seq);
      std::uniform_real_distribution<double> uq(-1.0, 3.0), uh(-1.0, 1.0), ua2(-1.0, 2.0), ua1(1.0, 3.0);
      InverseSetup s = setup;
      Params init = truth;
      if (s.unknowns.q_head)
        for (auto& v : init.q_head) v = uq(rng);
      if (s.unknowns.h) init.h = uh(rng);
      if (s.unknowns.a2) init.a2 = ua2(rng);
      if (s.unknowns.a1) init.a1 = ua1(rng);
      if (s.unknowns.H) init.H = uh(rng);
      s.initial = init;
      try {
        row.runs[run] = reconstruct(s);
      } catch (const Error& e) {
        row.runs[run].status = std::string("failed: ") + e.what();
        row.runs[run].misfit = INFINITY;
      }
    });
    std::vector<const InverseResult*> good;
    for (const auto& r : row.runs)
      if (r.misfit < config.misfit_tol) good.push_back(&r);
    row.converged = static_cast<int>(good.size());
    if (!good.empty()) {
      const Model m(base);
      std::vector<Vec> xs;
      for (const auto* g : good) xs.push_back(m.pack(g->recovered));
      for (Eigen::Index k = 0; k < xs[0].size(); ++k) {
        double lo = INFINITY, hi = -INFINITY;
        for (const auto& v : xs) {
          lo = std::min(lo, v[k]);
          hi = std::max(hi, v[k]);
        }
        row.spread = std::max(row.spread, hi - lo);
      }
    }
    row.agree = row.converged == config.runs && row.spread <= config.agreement_tol;
    auto key = [](const InverseResult& r) {
      double n2 = 0.0;
      for (double v : r.recovered.q_head) n2 += v * v;
      return std::tuple{std::sqrt(n2), r.recovered.h, r.recovered.a2};
    };
    std::stable_sort(row.runs.begin(), row.runs.end(),
                     [&](const InverseResult& a, const InverseResult& b) { return key(a) < key(b); });
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

}  // namespace discospec
