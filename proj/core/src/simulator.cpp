#include "annewton/simulator.hpp"

#include <fmt/format.h>

namespace annewton {

std::string_view to_string(StepsizePolicy p) noexcept {
  switch (p) {
    case StepsizePolicy::Theorem1: return "theorem1";
    case StepsizePolicy::Theorem2: return "theorem2";
    case StepsizePolicy::Unchecked: return "unchecked";
  }
  return "unknown";
}

StepsizePolicy parse_stepsize_policy(std::string_view s) {
  if (s == "theorem1") return StepsizePolicy::Theorem1;
  if (s == "theorem2") return StepsizePolicy::Theorem2;
  if (s == "unchecked") return StepsizePolicy::Unchecked;
  throw Error(ErrorCode::ConfigParse,
              fmt::format("unknown stepsize policy '{}' (expected theorem1, theorem2 or unchecked)", s));
}

void check_stepsize(double epsilon, const RateSpectra& spectra, StepsizePolicy policy) {
  const double eps_max = max_stepsize(spectra);
  if (!(epsilon > 0.0))
    throw Error(ErrorCode::StepsizeInadmissible, fmt::format("epsilon = {} must be positive", epsilon));
  switch (policy) {
    case StepsizePolicy::Theorem1:
      if (epsilon > eps_max)
        throw Error(ErrorCode::StepsizeInadmissible,
                    fmt::format("epsilon = {} exceeds eps_max = 2(lambda/Lambda)^2 = {:.6g}", epsilon, eps_max));
      break;
    case StepsizePolicy::Theorem2:
      if (!(epsilon < std::min(1.0, eps_max)))
        throw Error(ErrorCode::StepsizeInadmissible,
                    fmt::format("epsilon = {} must be < min{{1, eps_max}} = {:.6g} (eps_max = {:.6g})", epsilon,
                                std::min(1.0, eps_max), eps_max));
      break;
    case StepsizePolicy::Unchecked: break;
  }
}

}  // namespace annewton
