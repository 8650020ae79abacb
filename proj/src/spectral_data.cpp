#include "discospec/spectral_data.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "discospec/asymptotics.hpp"
#include "discospec/errors.hpp"

namespace discospec {

using std::numbers::pi;

std::vector<double> SpectralSubset::values() const {
  std::vector<double> v;
  v.reserve(picks.size());
  for (const auto& p : picks) v.push_back(p.value);
  return v;
}

void SpectralSubset::validate_against(const Spectrum& parent_spectrum) const {
  for (std::size_t i = 0; i < picks.size(); ++i) {
    if (i > 0 && picks[i].n <= picks[i - 1].n) throw ContractError("subset indices must increase strictly");
    const auto it = std::find_if(parent_spectrum.values.begin(), parent_spectrum.values.end(),
                                 [&](const SpectralValue& v) { return v.n == picks[i].n; });
    if (it == parent_spectrum.values.end() || it->lambda != picks[i].value)
      throw ContractError("pick " + std::to_string(picks[i].n) + " does not match the parent spectrum");
  }
}

SpectralSubset make_subset(const Spectrum& spectrum, std::span<const int> indices, std::string parent) {
  SpectralSubset s;
  s.parent = std::move(parent);
  s.family = family_of(spectrum.problem);
  for (int n : indices) {
    const auto it = std::find_if(spectrum.values.begin(), spectrum.values.end(),
                                 [&](const SpectralValue& v) { return v.n == n; });
    if (it == spectrum.values.end()) throw ContractError("index " + std::to_string(n) + " not in spectrum");
    s.picks.push_back({n, it->lambda});
  }
  std::sort(s.picks.begin(), s.picks.end(), [](const Pick& a, const Pick& b) { return a.n < b.n; });
  s.picks.erase(std::unique(s.picks.begin(), s.picks.end()), s.picks.end());
  return s;
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Pass:
      return "pass";
    case Verdict::Fail:
      return "fail";
    default:
      return "indeterminate";
  }
}

long counting(std::span<const double> values, double r) {
  const double r2 = r * r;
  return static_cast<long>(std::count_if(values.begin(), values.end(), [&](double x) { return x <= r2; }));
}

ConditionReport check_condition_I(const SpectralSubset& subset, int n_max) {
  if (subset.picks.empty()) throw ContractError("condition (I) needs a nonempty subset");
  long even = 0, odd = 0;
  for (const auto& p : subset.picks) (p.n % 2 == 0 ? even : odd) += 1;
  ConditionReport r;
  r.condition = "I";
  r.truncation = n_max;
  r.stats = {{"even", static_cast<double>(even)}, {"odd", static_cast<double>(odd)}};
  const long need = std::max(3L, static_cast<long>(n_max / 10));
  if (even >= need && odd >= need) {
    r.verdict = Verdict::Pass;
  } else {
    r.verdict = Verdict::Indeterminate;
    if (even == 0 || odd == 0) r.notes.push_back("leaning fail: one parity is absent");
  }
  return r;
}

namespace {

struct Fit {
  double slope = 0.0;
  double intercept = 0.0;
};

Fit least_squares(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) return {0.0, sy / n};
  const double slope = (n * sxy - sx * sy) / den;
  return {slope, (sy - slope * sx) / n};
}

std::vector<double> concat(std::span<const SpectralSubset> subsets) {
  std::vector<double> v;
  for (const auto& s : subsets)
    for (const auto& p : s.picks) v.push_back(p.value);
  return v;
}

std::vector<double> concat(std::span<const Spectrum> spectra) {
  std::vector<double> v;
  for (const auto& s : spectra)
    for (const auto& e : s.values) v.push_back(e.lambda);
  return v;
}

ConditionReport density(std::span<const double> s_vals, std::span<const double> l_vals, double sigma,
                        std::span<const double> r_grid, double eps_slope, int truncation) {
  if (r_grid.size() < 8) throw InsufficientData("density check needs at least 8 radii");
  for (std::size_t i = 1; i < r_grid.size(); ++i)
    if (!(r_grid[i] > r_grid[i - 1])) throw ContractError("r grid must increase");
  if (!(sigma > 0.0 && sigma <= 1.0)) throw ContractError("sigma must lie in (0,1]");
  if (eps_slope < 0.0) eps_slope = 0.01 * sigma / pi;
  ConditionReport rep;
  rep.condition = "density-i";
  rep.truncation = truncation;
  std::vector<double> rs, ms, ns, nl;
  const std::size_t half = r_grid.size() / 2;
  for (std::size_t i = 0; i < r_grid.size(); ++i) {
    const double r = r_grid[i];
    const double cs = static_cast<double>(counting(s_vals, r));
    const double cl = static_cast<double>(counting(l_vals, r));
    const double m = cs - sigma * cl;
    rep.margins.emplace_back(r, m);
    if (i >= half) {
      rs.push_back(r);
      ms.push_back(m);
      ns.push_back(cs);
      nl.push_back(cl);
    }
  }
  const double slope = least_squares(rs, ms).slope;
  const double slope_s = least_squares(rs, ns).slope;
  const double slope_l = least_squares(rs, nl).slope;
  const double min_margin = *std::min_element(ms.begin(), ms.end());
  rep.stats = {{"slope", slope},
               {"eps_slope", eps_slope},
               {"sigma", sigma},
               {"sigma_star", slope_l > 0.0 ? slope_s / slope_l : 0.0},
               {"min_margin_top_half", min_margin}};
  if (slope > eps_slope)
    rep.verdict = Verdict::Pass;
  else if (slope < -eps_slope)
    rep.verdict = Verdict::Fail;
  else
    rep.verdict = min_margin >= 0.0 ? Verdict::Pass : Verdict::Indeterminate;
  return rep;
}

struct SeriesTail {
  double total = 0.0;
  double tail = 0.0;
  double power = 0.0;  // fitted decay exponent of the positive terms in the tail half
  bool power_valid = false;
};

// Adds the terms of one series into `partial` (indexed by n) and summarizes it.
SeriesTail series(const SpectralSubset& s, double sigma, double a, bool dirichlet,
                  std::vector<std::pair<double, double>>& partial, std::vector<std::string>& notes,
                  const std::string& label) {
  SeriesTail st;
  const std::size_t count = s.picks.size();
  if (count == 0) return st;
  std::vector<double> terms(count, 0.0);
  for (std::size_t n = 0; n < count; ++n) {
    const double lattice = dirichlet ? gamma_n(a, static_cast<int>(n)) : n * pi;
    const double comp = lattice * lattice / (sigma * sigma);
    const double excess = std::max(0.0, s.picks[n].value - comp);
    if (n == 0) {
      if (excess > 0.0) notes.push_back(label + ": n = 0 excess " + std::to_string(excess) + " excluded");
      continue;
    }
    terms[n] = excess / (static_cast<double>(n) * n);
  }
  if (partial.size() < count) partial.resize(count, {0.0, 0.0});
  double acc = 0.0;
  for (std::size_t n = 1; n < count; ++n) {
    acc += terms[n];
    partial[n].first = static_cast<double>(n);
    partial[n].second += acc;
  }
  st.total = acc;
  const std::size_t from = count - std::max<std::size_t>(1, count / 10);
  for (std::size_t n = std::max<std::size_t>(from, 1); n < count; ++n) st.tail += terms[n];
  std::vector<double> lx, ly;
  for (std::size_t n = std::max<std::size_t>(count / 2, 1); n < count; ++n)
    if (terms[n] > 0.0) {
      lx.push_back(std::log(static_cast<double>(n)));
      ly.push_back(std::log(terms[n]));
    }
  if (lx.size() >= 4) {
    st.power = -least_squares(lx, ly).slope;
    st.power_valid = true;
  }
  return st;
}

Verdict summability_verdict(std::span<const SeriesTail> parts, ConditionReport& rep) {
  double total = 0.0, tail = 0.0;
  bool any_slow = false, any_power = false;
  double min_power = INFINITY;
  for (const auto& p : parts) {
    total += p.total;
    tail += p.tail;
    // A tail that carries real weight and decays no faster than 1/n marks divergence.
    if (p.power_valid && p.tail > 1e-6 && p.tail > 0.01 * p.total) {
      any_power = true;
      min_power = std::min(min_power, p.power);
      if (p.power <= 1.0) any_slow = true;
    }
  }
  rep.stats["partial_sum"] = total;
  rep.stats["last_decade"] = tail;
  if (any_power) rep.stats["tail_power"] = min_power;
  if (tail < 1e-6 || tail < 0.01 * total) return Verdict::Pass;
  if (any_slow) return Verdict::Fail;
  return Verdict::Indeterminate;
}

}  // namespace

ConditionReport check_density_i(const SpectralSubset& s1, const SpectralSubset& s2, const Spectrum& l1,
                                const Spectrum& l2, double sigma, std::span<const double> r_grid,
                                double eps_slope) {
  const SpectralSubset ss[] = {s1, s2};
  const Spectrum ls[] = {l1, l2};
  const auto sv = concat(ss);
  const auto lv = concat(ls);
  const int trunc = static_cast<int>(std::max(l1.values.size(), l2.values.size())) - 1;
  return density(sv, lv, sigma, r_grid, eps_slope, trunc);
}

ConditionReport check_summability_ii(const SpectralSubset& s1, const SpectralSubset& s2, double sigma1,
                                     double sigma2, double b, double a) {
  if (!(sigma1 >= 0.0 && sigma2 >= 0.0)) throw ContractError("sigmas must be non-negative");
  if (std::abs(sigma1 + sigma2 - 2.0 * b) > 1e-12) throw ContractError("sigma1 + sigma2 must equal 2b");
  if ((sigma1 == 0.0 && !s1.picks.empty()) || (sigma2 == 0.0 && !s2.picks.empty()))
    throw ContractError("sigma = 0 requires an empty subset");
  ConditionReport rep;
  rep.condition = "summability-ii";
  rep.truncation = static_cast<int>(std::max(s1.picks.size(), s2.picks.size()));
  const SeriesTail parts[] = {series(s1, sigma1, a, false, rep.margins, rep.notes, "S1"),
                              series(s2, sigma2, a, true, rep.margins, rep.notes, "S2")};
  rep.margins.erase(rep.margins.begin(), rep.margins.begin() + std::min<std::size_t>(1, rep.margins.size()));
  rep.verdict = summability_verdict(parts, rep);
  return rep;
}

RegularSelection generate_regular_subset(const Spectrum& spectrum, double sigma, std::string parent) {
  if (!(sigma > 0.0 && sigma <= 1.0)) throw ContractError("sigma must lie in (0,1]");
  RegularSelection out;
  out.subset.parent = std::move(parent);
  out.subset.family = family_of(spectrum.problem);
  if (spectrum.values.empty()) return out;
  const int n_max = spectrum.values.back().n;
  const bool dir = out.subset.family == Family::BInfType;
  const double a = constants(spectrum.problem).a;
  std::set<int> taken;
  for (int n = 0;; ++n) {
    int m;
    if (!dir) {
      m = static_cast<int>(std::lround(n / sigma));
    } else {
      // gamma_m grows by about pi per index; search the neighbourhood of the linear estimate.
      const double target = gamma_n(a, n) / sigma;
      const int guess = static_cast<int>(std::lround(target / pi - 0.5));
      m = std::max(0, guess - 2);
      for (int c = std::max(0, guess - 2); c <= guess + 2; ++c)
        if (std::abs(gamma_n(a, c) - target) < std::abs(gamma_n(a, m) - target)) m = c;
    }
    if (m > n_max) break;
    if (!taken.insert(m).second) continue;
    const auto it = std::find_if(spectrum.values.begin(), spectrum.values.end(),
                                 [&](const SpectralValue& v) { return v.n == m; });
    if (it == spectrum.values.end()) continue;
    out.subset.picks.push_back({m, it->lambda});
    if (n >= 1) {
      const double e = dir ? gamma_n(a, m) * sigma / gamma_n(a, n) - 1.0 : m * sigma / n - 1.0;
      out.eps.emplace_back(n, e);
    }
  }
  if (out.subset.picks.size() < 8)
    out.warnings.push_back("only " + std::to_string(out.subset.picks.size()) +
                           " picks within the available spectrum; sigma is small for this truncation");
  return out;
}

std::vector<double> default_r_grid(std::span<const Spectrum> spectra, int points) {
  if (points < 8) throw InsufficientData("r grid needs at least 8 points");
  double top = INFINITY;
  for (const auto& s : spectra)
    if (!s.values.empty()) top = std::min(top, s.values.back().lambda);
  if (!std::isfinite(top) || top <= 0.0) throw InsufficientData("spectra too short for an r grid");
  const double r_max = std::sqrt(top);
  std::vector<double> g(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) g[i] = r_max * (i + 1) / points;
  return g;
}

ConditionReport check_multi_N(std::span<const SpectralSubset> subsets, std::span<const Spectrum> spectra,
                              const MultiParams& params) {
  const std::size_t N = spectra.size();
  if (N < 3) throw ContractError("the multi-spectra check needs N >= 3");
  if (subsets.size() != N) throw ContractError("one subset per spectrum is required");
  if (!is_dirichlet(spectra[1].problem.right)) throw ContractError("the second family must be the Dirichlet one");
  std::vector<double> hs;
  for (std::size_t i = 0; i < N; ++i) {
    if (i == 1) continue;
    const auto* r = std::get_if<Robin>(&spectra[i].problem.right);
    if (!r) throw ContractError("only the second family may carry the Dirichlet condition");
    hs.push_back(r->coefficient);
  }
  std::sort(hs.begin(), hs.end());
  if (std::adjacent_find(hs.begin(), hs.end()) != hs.end()) throw ContractError("the H_i must be pairwise distinct");

  std::size_t total_picks = 0;
  for (const auto& s : subsets) total_picks += s.picks.size();
  const int trunc = static_cast<int>(spectra[0].values.size()) - 1;

  if (params.mode == MultiMode::DensityI) {
    const double threshold = 2.0 * params.b / static_cast<double>(N);
    const auto grid = params.r_grid.empty() ? default_r_grid(spectra) : params.r_grid;
    ConditionReport rep = density(concat(subsets), concat(spectra), params.sigma, grid, -1.0, trunc);
    rep.condition = "multi-N";
    rep.stats["threshold"] = threshold;
    if (!(params.sigma > threshold)) {
      rep.verdict = Verdict::Fail;
      rep.notes.push_back("sigma does not exceed 2b/N");
    }
    if (total_picks == 0) rep.verdict = Verdict::Fail;
    return rep;
  }

  ConditionReport rep;
  rep.condition = "multi-N";
  rep.truncation = trunc;
  if (total_picks == 0) {
    rep.verdict = Verdict::Fail;
    rep.notes.push_back("all subsets are empty");
    return rep;
  }
  if (params.sigmas.size() != N) throw ContractError("mode ii needs one sigma per family");
  double sum = 0.0;
  for (double s : params.sigmas) {
    if (!(s >= 0.0)) throw ContractError("sigmas must be non-negative");
    sum += s;
  }
  if (std::abs(sum - 2.0 * params.b) > 1e-12) throw ContractError("the sigmas must sum to 2b");
  std::vector<SeriesTail> parts;
  for (std::size_t i = 0; i < N; ++i) {
    if (params.sigmas[i] == 0.0) {
      if (!subsets[i].picks.empty()) throw ContractError("sigma = 0 requires an empty subset");
      continue;
    }
    const double a = constants(spectra[i].problem).a;
    parts.push_back(series(subsets[i], params.sigmas[i], a, i == 1, rep.margins, rep.notes,
                           "S" + std::to_string(i + 1)));
  }
  if (!rep.margins.empty()) rep.margins.erase(rep.margins.begin());
  rep.verdict = summability_verdict(parts, rep);
  return rep;
}

}  // namespace discospec
