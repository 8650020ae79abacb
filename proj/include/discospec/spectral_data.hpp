#pragma once

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "discospec/problem.hpp"

namespace discospec {

struct Pick {
  int n = 0;
  double value = 0.0;
  bool operator==(const Pick&) const = default;
};

/// Indexed selection from a parent spectrum.
struct SpectralSubset {
  std::string parent;
  Family family = Family::BType;
  std::vector<Pick> picks;

  std::vector<double> values() const;
  /// Picks must match the parent's (index, value) entries with strictly increasing indices.
  void validate_against(const Spectrum& parent_spectrum) const;
  bool operator==(const SpectralSubset&) const = default;
};

SpectralSubset make_subset(const Spectrum& spectrum, std::span<const int> indices, std::string parent = {});

enum class Verdict { Pass, Fail, Indeterminate };
const char* verdict_name(Verdict v);

struct ConditionReport {
  std::string condition;  // "I", "density-i", "summability-ii", "multi-N"
  Verdict verdict = Verdict::Indeterminate;
  std::vector<std::pair<double, double>> margins;  // margin curve or partial sums
  int truncation = 0;
  std::map<std::string, double> stats;
  std::vector<std::string> notes;
};

/// #{x in values : x <= r^2}.
long counting(std::span<const double> values, double r);

ConditionReport check_condition_I(const SpectralSubset& subset, int n_max);

/// Margin M(r) = N_{S1 u S2}(r) - sigma N_{L1 u L2}(r). eps_slope < 0 selects 0.01 sigma / pi.
ConditionReport check_density_i(const SpectralSubset& s1, const SpectralSubset& s2, const Spectrum& l1,
                                const Spectrum& l2, double sigma, std::span<const double> r_grid,
                                double eps_slope = -1.0);

/// Partial sums of (kappa_{1,n} - n^2 pi^2 / s1^2)_+ / n^2 and (kappa_{2,n} - gamma_n^2 / s2^2)_+ / n^2
/// for n >= 1, n the position inside each subset; `a` enters gamma_n.
ConditionReport check_summability_ii(const SpectralSubset& s1, const SpectralSubset& s2, double sigma1,
                                     double sigma2, double b, double a);

struct RegularSelection {
  SpectralSubset subset;
  std::vector<std::pair<int, double>> eps;  // (n, eps_n) for n >= 1
  std::vector<std::string> warnings;
};

/// Picks m(n) = round(n / sigma) (B-type) or the index whose gamma is nearest gamma_n / sigma.
RegularSelection generate_regular_subset(const Spectrum& spectrum, double sigma, std::string parent = {});

enum class MultiMode { DensityI, SummabilityII };

struct MultiParams {
  MultiMode mode = MultiMode::DensityI;
  double b = 0.5;
  double sigma = 0.0;          // mode i
  std::vector<double> sigmas;  // mode ii, one per family
  std::vector<double> r_grid;  // mode i; empty selects default_r_grid
};

/// N >= 3 families; the second spectrum is the Dirichlet family, the others carry distinct H.
ConditionReport check_multi_N(std::span<const SpectralSubset> subsets, std::span<const Spectrum> spectra,
                              const MultiParams& params);

/// Uniform grid of `points` radii up to the largest r at which every spectrum is complete.
std::vector<double> default_r_grid(std::span<const Spectrum> spectra, int points = 64);

}  // namespace discospec
