#pragma once

#include <ostream>
#include <string>

#include "fedswitch/engine.hpp"

namespace fedswitch {

/// Shortest round-trip decimal rendering of a double; stable across runs.
std::string format_double(double v);

/// Writes the per-round trace as CSV with the fixed column set
///   t,g_hat,g_true,f_true,switch_weight,in_A,uplink_bytes,downlink_bytes
/// (in_A as 0/1). Output is byte-stable for identical traces.
void write_trace_csv(const RunTrace& trace, std::ostream& out);
void write_trace_csv(const RunTrace& trace, const std::string& path);

}  // namespace fedswitch
