#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "discospec/problem.hpp"

namespace discospec {

/// Constants of the two-term eigenvalue asymptotics. `omega` and `omega1` exist only for a
/// Robin condition at x = 1.
struct AsymptoticConstants {
  double a = 0.0;
  double omega0 = 0.0;
  std::optional<double> omega;
  std::optional<double> omega1;
};

AsymptoticConstants constants(const ProblemSpec& problem);

/// (n + 1/2) pi + (-1)^n arcsin a.
double gamma_n(double a, int n);
/// Leading term: n pi for B-type spectra, gamma_n for the Dirichlet family.
double leading_sqrt(Family family, double a, int n);

/// Two-term approximant of sqrt(lambda_n); n = 0 gives the leading term only.
double predict_sqrt(Family family, const AsymptoticConstants& c, int n);

struct ResidualReport {
  std::vector<std::pair<int, double>> residuals;  // (n, n * (sqrt(lambda_n) - prediction)), n >= 1
  double max_abs_last_quartile = 0.0;
};

/// Negative eigenvalues enter through the signed root -sqrt(-lambda).
ResidualReport residuals(const Spectrum& spectrum, const AsymptoticConstants& c);

/// Even- and odd-index limits of n * (sqrt(lambda_n) - n pi), each estimated by a least-squares
/// fit r_n = L + s / n over indices n >= n_from.
struct ParityLimits {
  double even = 0.0;
  double odd = 0.0;
  double difference() const { return even - odd; }
};

ParityLimits parity_limits(const Spectrum& spectrum, int n_from);

double signed_sqrt(double lambda);

}  // namespace discospec
