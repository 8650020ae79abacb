#include "discospec/problem.hpp"

#include <cmath>

#include "discospec/errors.hpp"

namespace discospec {

Transmission::Transmission(double a1, double a2) : a1_(a1), a2_(a2) {
  if (!std::isfinite(a1) || !std::isfinite(a2)) throw DomainError("transmission coefficients must be finite");
  if (!(a1 > 0.0)) throw DomainError("transmission coefficient a1 must be positive");
}

void ProblemSpec::validate() const {
  if (!std::isfinite(h)) throw DomainError("h must be finite");
  if (const auto* r = std::get_if<Robin>(&right); r && !std::isfinite(r->coefficient))
    throw DomainError("Robin coefficient H must be finite");
}

std::vector<double> Spectrum::lambdas() const {
  std::vector<double> out;
  out.reserve(values.size());
  for (const auto& v : values) out.push_back(v.lambda);
  return out;
}

void Spectrum::validate() const {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i].n != static_cast<int>(i)) throw ContractError("spectrum indices must be contiguous from 0");
    if (i > 0 && !(values[i].lambda > values[i - 1].lambda))
      throw ContractError("spectrum must be strictly increasing");
  }
}

void PropagatorConfig::validate() const {
  if (cells_per_unit < 16) throw DomainError("cells_per_unit must be at least 16");
  if (!(refine_tol > 0.0)) throw DomainError("refine_tol must be positive");
  if (max_bisections < 1) throw DomainError("max_bisections must be positive");
}

}  // namespace discospec
