#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "annewton/objective.hpp"
#include "annewton/rng.hpp"

namespace annewton {

struct AcceptanceOptions {
  /// Stepsize of every simulated run. Only the linear-rate criterion checks
  /// it against its admissible window.
  double epsilon = 0.8;
  std::uint64_t seed = 1;
  /// Monte Carlo workers, 0 = hardware concurrency.
  unsigned threads = 0;
  /// When non-empty, the envelope margin per t is written here as CSV.
  std::string out_dir;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string measured;
  std::string required;
  double seconds = 0.0;
};

struct AcceptanceReport {
  std::vector<CriterionResult> results;
  bool all_passed() const;
};

/// Random connected graph with n in [2, 30], Laplacian or Metropolis weights
/// and random quadratic locals.
PenalizedObjective<double> random_quadratic_instance(Rng& rng);

/// Five agents on K5, W = I - L/8, f_i = (x - i)^2, alpha = 1.
template <class S>
std::shared_ptr<const PenalizedObjective<S>> fig1_objective() {
  std::vector<LocalSpec> specs;
  for (int i = 1; i <= 5; ++i) specs.push_back(LocalSpec::quadratic(1.0, i));
  return std::make_shared<const PenalizedObjective<S>>(
      make_objective<S>(laplacian_weights(Graph::complete(5), 0.125), 1.0, specs));
}

CriterionResult criterion_splitting_identity(const AcceptanceOptions& o);
CriterionResult criterion_spectral_certificates(const AcceptanceOptions& o);
CriterionResult criterion_coherence(const AcceptanceOptions& o);
CriterionResult criterion_expected_descent(const AcceptanceOptions& o);
CriterionResult criterion_derived_constants(const AcceptanceOptions& o);
CriterionResult criterion_linear_envelope(const AcceptanceOptions& o);
CriterionResult criterion_almost_sure(const AcceptanceOptions& o);
CriterionResult criterion_fig1_ordering(const AcceptanceOptions& o);
CriterionResult criterion_finite_differences(const AcceptanceOptions& o);
CriterionResult criterion_determinism(const AcceptanceOptions& o);

std::string format_result(const CriterionResult& r);

/// Runs all ten criteria in order, printing one line per criterion to `log`
/// as it completes.
AcceptanceReport run_acceptance(const AcceptanceOptions& o, std::ostream& log);

}  // namespace annewton
