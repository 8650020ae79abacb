#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "discospec/potential.hpp"
#include "discospec/problem.hpp"
#include "discospec/spectral_data.hpp"

namespace discospec {

enum class ParamKind { Cell, h, H, a1, a2 };

/// d lambda_n / d parameter. For ParamKind::Cell the parameter is a constant added to q on
/// [cell.first, cell.second]. a1 and a2 use central differences with step 1e-6 (1 + |p|).
double eig_gradient(const ProblemSpec& problem, int n, ParamKind kind, std::pair<double, double> cell = {0.0, 1.0},
                    const PropagatorConfig& cfg = {});

struct Unknowns {
  bool q_head = true;
  bool h = true;
  bool a2 = true;
  bool a1 = false;
  bool H = false;

  int count(int cells) const;
  bool operator==(const Unknowns&) const = default;
};

/// Right-end condition of one data family: the main Robin family (coefficient H, possibly
/// unknown), the Dirichlet family, or a Robin family with a fixed, known coefficient.
struct DataFamily {
  enum class Kind { Robin, Dirichlet, FixedRobin };
  Kind kind = Kind::Robin;
  double H_fixed = 0.0;
  bool operator==(const DataFamily&) const = default;
};

struct DataSet {
  DataFamily family;
  std::vector<Pick> target;
  bool operator==(const DataSet&) const = default;
};

struct Params {
  std::vector<double> q_head;
  double h = 0.0;
  double H = 0.0;
  double a1 = 1.0;
  double a2 = 0.0;
  bool operator==(const Params&) const = default;
};

struct InverseSetup {
  double b = 0.5;
  Potential known_tail;  // only its restriction to [b,1] is used
  int cells = 8;
  Unknowns unknowns;
  std::vector<DataSet> data;
  double regularization = 0.0;
  Params initial;  // values of the known parameters are taken from here as well
  std::optional<Params> truth;
  PropagatorConfig cfg;
  int max_iterations = 200;

  /// Head cell edges on [0,b], snapped to the propagation lattice.
  std::vector<double> head_edges() const;
  ProblemSpec problem(const Params& p, const DataFamily& family) const;
  void validate() const;
};

struct TraceEntry {
  int iteration = 0;
  double misfit = 0.0;
  double damping = 0.0;
};

struct InverseResult {
  Params recovered;
  std::vector<std::pair<int, double>> residuals;  // (index, lambda(recovered) - target), all data in order
  double misfit = 0.0;                           // recomputed from a fresh forward pass
  double misfit_doubled = 0.0;                   // same, at twice the cell resolution
  std::vector<TraceEntry> trace;                 // accepted steps only
  std::string status;                            // "converged", "stalled", "max-iterations"
  std::optional<double> q_error_max;             // max |q_i - q_i*| over head cells
  std::optional<double> q_error_l2;              // L2 norm on [0,b] of the head difference
  std::optional<double> h_error, H_error, a1_error, a2_error;
};

InverseResult reconstruct(const InverseSetup& setup);

/// Head values of `q` averaged over the setup's head cells.
std::vector<double> projected_head(const InverseSetup& setup, const Potential& q);

/// Estimates a1 and H from the high-index tails of a complete Robin spectrum and a complete
/// Dirichlet spectrum (two-term asymptotics); used to initialize reconstructions.
std::pair<double, double> asymptotic_a1_H(const std::vector<Pick>& robin, const std::vector<Pick>& dirichlet);

struct ExperimentConfig {
  ProblemSpec truth;        // Robin at x = 1
  double b = 0.5;
  int cells = 8;
  Unknowns unknowns;
  std::vector<double> sigmas{0.3, 0.45, 0.55, 0.7};
  int n_max = 40;
  int runs = 16;
  std::uint64_t seed = 0;
  std::vector<double> extra_H;  // nonempty: N-spectra mode with families Robin(H), Dirichlet, Robin(H_i)
  int data_resolution = 1;      // data generated at this multiple of cells_per_unit
  double agreement_tol = 1e-6;
  double misfit_tol = 1e-9;
  PropagatorConfig cfg;
};

struct ExperimentRow {
  double sigma = 0.0;
  double threshold = 0.0;
  int data_count = 0;
  int converged = 0;
  double spread = 0.0;  // max over parameters of (max - min) across converged runs
  bool agree = false;   // every run converged and spread <= agreement_tol
  std::vector<InverseResult> runs;  // ordered by (|q|_2, h, a2)
};

struct ExperimentReport {
  std::vector<ExperimentRow> rows;
  Params truth_params;
};

ExperimentReport uniqueness_experiment(const ExperimentConfig& config);

}  // namespace discospec
