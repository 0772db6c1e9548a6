#pragma once

#include <iosfwd>
#include <string>

#include "annewton/simulator.hpp"

namespace annewton {

inline constexpr const char* kTraceHeader = "t,active,F,grad_norm,rel_err,weighted_err,messages,clock";
inline constexpr const char* kAggregateHeader =
    "t,mean_gap,std_gap,mean_rel_err,std_rel_err,mean_weighted_err,std_weighted_err";

/// Reals are written with 17 significant digits; empty optionals as empty
/// cells. Output is byte-identical for identical traces.
void write_trace_csv(std::ostream& out, const Trace& trace);
void write_aggregate_csv(std::ostream& out, const Aggregate& agg);

void write_trace_csv_file(const std::string& path, const Trace& trace);
void write_aggregate_csv_file(const std::string& path, const Aggregate& agg);

std::string trace_to_csv(const Trace& trace);

}  // namespace annewton
