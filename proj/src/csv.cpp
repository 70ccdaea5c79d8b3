#include "popsim/harness.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace popsim {

namespace {

std::string real(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_real(const std::string& s, const std::string& field) {
  if (s == "nan") return std::nan("");
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw ConfigError(field, "not a number: '" + s + "'");
  return v;
}

template <typename Int>
Int parse_int(const std::string& s, const std::string& field) {
  Int v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ConfigError(field, "not an integer: '" + s + "'");
  return v;
}

}  // namespace

void write_records_csv(std::ostream& out, const std::vector<SweepRecord>& records) {
  out << kSweepCsvHeader << '\n';
  for (const auto& r : records) {
    out << r.method << ',' << r.N << ',' << real(r.alpha) << ',' << real(r.epsilon) << ',' << real(r.mean) << ','
        << real(r.std_dev) << ',' << r.cost_rv << ',' << real(r.wall_ms) << ',' << r.seed << ',' << r.replication
        << '\n';
  }
}

std::vector<SweepRecord> read_records_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kSweepCsvHeader) throw ConfigError("csv", "missing or unexpected header");
  std::vector<SweepRecord> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cols.push_back(cell);
    const std::string where = "csv line " + std::to_string(lineno);
    if (cols.size() != 10) throw ConfigError(where, "expected 10 columns");
    SweepRecord r;
    r.method = cols[0];
    r.N = parse_int<std::int64_t>(cols[1], where);
    r.alpha = parse_real(cols[2], where);
    r.epsilon = parse_real(cols[3], where);
    r.mean = parse_real(cols[4], where);
    r.std_dev = parse_real(cols[5], where);
    r.cost_rv = parse_int<std::int64_t>(cols[6], where);
    r.wall_ms = parse_real(cols[7], where);
    r.seed = parse_int<std::uint64_t>(cols[8], where);
    r.replication = parse_int<int>(cols[9], where);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace popsim
