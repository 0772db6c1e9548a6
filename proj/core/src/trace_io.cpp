#include "annewton/trace_io.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "annewton/error.hpp"

namespace annewton {

namespace {

std::string real(double v) { return fmt::format("{:.17g}", v); }

template <class T>
std::string opt(const std::optional<T>& v) {
  if (!v) return {};
  if constexpr (std::is_floating_point_v<T>) return real(*v);
  else return fmt::format("{}", *v);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, fmt::format("cannot write '{}'", path));
  return out;
}

}  // namespace

void write_trace_csv(std::ostream& out, const Trace& trace) {
  out << kTraceHeader << '\n';
  for (const auto& r : trace.rows)
    out << r.t << ',' << opt(r.active) << ',' << real(r.F) << ',' << real(r.grad_norm) << ',' << real(r.rel_err)
        << ',' << opt(r.weighted_err) << ',' << r.messages << ',' << opt(r.clock) << '\n';
}

void write_aggregate_csv(std::ostream& out, const Aggregate& agg) {
  out << kAggregateHeader << '\n';
  for (const auto& r : agg.rows)
    out << r.t << ',' << real(r.mean_gap) << ',' << real(r.std_gap) << ',' << real(r.mean_rel_err) << ','
        << real(r.std_rel_err) << ',' << real(r.mean_weighted_err) << ',' << real(r.std_weighted_err) << '\n';
}

void write_trace_csv_file(const std::string& path, const Trace& trace) {
  auto out = open_out(path);
  write_trace_csv(out, trace);
}

void write_aggregate_csv_file(const std::string& path, const Aggregate& agg) {
  auto out = open_out(path);
  write_aggregate_csv(out, agg);
}

std::string trace_to_csv(const Trace& trace) {
  std::ostringstream ss;
  write_trace_csv(ss, trace);
  return ss.str();
}

}  // namespace annewton
