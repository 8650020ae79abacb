#include "discospec/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "discospec/errors.hpp"

namespace discospec {

using std::numbers::pi;

double signed_sqrt(double lambda) { return lambda >= 0.0 ? std::sqrt(lambda) : -std::sqrt(-lambda); }

AsymptoticConstants constants(const ProblemSpec& problem) {
  const double a1 = problem.jump.a1();
  const double s = a1 + 1.0 / a1;
  AsymptoticConstants c;
  c.a = (a1 - 1.0 / a1) / s;
  const double half_mean = 0.5 * problem.q.integrate(0.0, 1.0);
  const double jump_term = problem.jump.a2() / s;
  c.omega0 = jump_term + half_mean + problem.h;
  if (const auto* r = std::get_if<Robin>(&problem.right)) {
    const double H = r->coefficient;
    c.omega = c.omega0 + H;
    c.omega1 = jump_term + c.a * (problem.q.integrate(0.5, 1.0) + H - (half_mean + problem.h));
  }
  return c;
}

double gamma_n(double a, int n) { return (n + 0.5) * pi + (n % 2 == 0 ? 1.0 : -1.0) * std::asin(a); }

double leading_sqrt(Family family, double a, int n) { return family == Family::BType ? n * pi : gamma_n(a, n); }

double predict_sqrt(Family family, const AsymptoticConstants& c, int n) {
  const double lead = leading_sqrt(family, c.a, n);
  if (n <= 0) return lead;
  if (family == Family::BInfType) return lead + c.omega0 / (n * pi);
  const double w = c.omega.value_or(c.omega0);
  const double w1 = c.omega1.value_or(0.0);
  return lead + (w + (n % 2 == 0 ? w1 : -w1)) / (n * pi);
}

ResidualReport residuals(const Spectrum& spectrum, const AsymptoticConstants& c) {
  if (spectrum.values.size() < 8) throw InsufficientData("residuals need at least 8 eigenvalues");
  const Family fam = family_of(spectrum.problem);
  ResidualReport rep;
  for (const auto& v : spectrum.values) {
    if (v.n < 1) continue;
    rep.residuals.emplace_back(v.n, v.n * (signed_sqrt(v.lambda) - predict_sqrt(fam, c, v.n)));
  }
  const std::size_t from = rep.residuals.size() * 3 / 4;
  for (std::size_t i = from; i < rep.residuals.size(); ++i)
    rep.max_abs_last_quartile = std::max(rep.max_abs_last_quartile, std::abs(rep.residuals[i].second));
  return rep;
}

namespace {

// Least-squares intercept of r = L + s/n.
double fit_limit(const std::vector<std::pair<double, double>>& pts) {
  if (pts.size() < 2) throw InsufficientData("parity fit needs two points per parity");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(pts.size());
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return (sy - slope * sx) / n;
}

}  // namespace

ParityLimits parity_limits(const Spectrum& spectrum, int n_from) {
  const Family fam = family_of(spectrum.problem);
  const double a = constants(spectrum.problem).a;
  std::vector<std::pair<double, double>> even, odd;
  for (const auto& v : spectrum.values) {
    if (v.n < std::max(1, n_from)) continue;
    const double r = v.n * (signed_sqrt(v.lambda) - leading_sqrt(fam, a, v.n));
    (v.n % 2 == 0 ? even : odd).emplace_back(1.0 / v.n, r);
  }
  return {fit_limit(even), fit_limit(odd)};
}

}  // namespace discospec
