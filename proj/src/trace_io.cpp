#include "fedswitch/trace_io.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

namespace fedswitch {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_trace_csv(const RunTrace& trace, std::ostream& out) {
  out << "t,g_hat,g_true,f_true,switch_weight,in_A,uplink_bytes,downlink_bytes\n";
  for (const auto& rec : trace.records) {
    out << rec.t << ',' << format_double(rec.g_hat) << ',' << format_double(rec.g_true)
        << ',' << format_double(rec.f_true) << ',' << format_double(rec.switch_weight)
        << ',' << (rec.in_A ? 1 : 0) << ',' << rec.uplink_bytes << ','
        << rec.downlink_bytes << '\n';
  }
}

void write_trace_csv(const RunTrace& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open trace file for writing: " + path);
  write_trace_csv(trace, out);
  if (!out) throw std::runtime_error("failed writing trace file: " + path);
}

}  // namespace fedswitch
