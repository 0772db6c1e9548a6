#include "annewton/objective.hpp"

#include <fmt/format.h>

namespace annewton {

std::string LocalSpec::describe() const {
  switch (kind) {
    case Kind::Quadratic: return fmt::format("quadratic(a={:g}, b={:g})", a, b);
    case Kind::LogCoshRidge: return fmt::format("logcosh_ridge(a={:g}, b={:g}, r={:g})", a, b, r);
  }
  return "unknown";
}

}  // namespace annewton
