#include "fedssca/trace_io.hpp"

#include <charconv>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace fedssca {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

template <typename T>
T parse_number(const std::string& s, const char* field) {
  T v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw std::invalid_argument(std::string("bad value '") + s + "' for " + field);
  }
  return v;
}

void write_record(std::ostream& out, const RoundRecord& r) {
  out << r.t << ',' << format_double(r.train_cost) << ',' << format_double(r.test_acc) << ',';
  if (r.slack) out << format_double(*r.slack);
  out << ',' << r.uplink_scalars << ',' << r.downlink_scalars << ',' << format_double(r.wall_ms) << '\n';
}

RoundRecord read_record(const std::vector<std::string>& f, std::size_t off) {
  RoundRecord r;
  r.t = parse_number<long>(f[off], "t");
  r.train_cost = parse_number<double>(f[off + 1], "train_cost");
  r.test_acc = parse_number<double>(f[off + 2], "test_acc");
  if (!f[off + 3].empty()) r.slack = parse_number<double>(f[off + 3], "slack");
  r.uplink_scalars = parse_number<std::uint64_t>(f[off + 4], "uplink_scalars");
  r.downlink_scalars = parse_number<std::uint64_t>(f[off + 5], "downlink_scalars");
  r.wall_ms = parse_number<double>(f[off + 6], "wall_ms");
  return r;
}

void expect_header(std::istream& in, const char* header) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("missing CSV header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header) throw std::invalid_argument("unexpected CSV header '" + line + "'");
}

}  // namespace

void write_trace_csv(std::ostream& out, const RoundTrace& trace) {
  out << kTraceHeader << '\n';
  for (const auto& r : trace.rows) write_record(out, r);
}

std::string trace_to_csv(const RoundTrace& trace) {
  std::ostringstream os;
  write_trace_csv(os, trace);
  return os.str();
}

RoundTrace parse_trace_csv(std::istream& in) {
  expect_header(in, kTraceHeader);
  RoundTrace trace;
  std::string line;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 7) throw std::invalid_argument("line " + std::to_string(lineno) + ": expected 7 fields");
    trace.rows.push_back(read_record(f, 0));
  }
  return trace;
}

RoundTrace parse_trace_csv(const std::string& text) {
  std::istringstream is(text);
  return parse_trace_csv(is);
}

void write_compare_csv(std::ostream& out, const std::vector<CompareRow>& rows) {
  out << kCompareHeader << '\n';
  for (const auto& r : rows) {
    out << r.algorithm << ',' << r.seed << ',';
    write_record(out, r.record);
  }
}

std::vector<CompareRow> parse_compare_csv(std::istream& in) {
  expect_header(in, kCompareHeader);
  std::vector<CompareRow> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 9) throw std::invalid_argument("compare row: expected 9 fields");
    rows.push_back({f[0], parse_number<std::uint64_t>(f[1], "seed"), read_record(f, 2)});
  }
  return rows;
}

RoundTrace average_traces(const std::vector<RoundTrace>& traces) {
  if (traces.empty()) throw std::invalid_argument("nothing to average");
  const std::size_t len = traces.front().rows.size();
  for (const auto& tr : traces) {
    if (tr.rows.size() != len) throw std::invalid_argument("traces differ in length");
  }
  const double n = static_cast<double>(traces.size());
  RoundTrace out;
  for (std::size_t k = 0; k < len; ++k) {
    RoundRecord r = traces.front().rows[k];
    double cost = 0, acc = 0, slack = 0, wall = 0;
    bool all_slack = true;
    for (const auto& tr : traces) {
      const auto& x = tr.rows[k];
      cost += x.train_cost;
      acc += x.test_acc;
      wall += x.wall_ms;
      if (x.slack) slack += *x.slack;
      else all_slack = false;
    }
    r.train_cost = cost / n;
    r.test_acc = acc / n;
    r.wall_ms = wall / n;
    r.slack = all_slack ? std::optional<double>(slack / n) : std::nullopt;
    out.rows.push_back(r);
  }
  return out;
}

std::optional<long> rounds_to_threshold(const RoundTrace& trace, double level) {
  for (const auto& r : trace.rows) {
    if (r.train_cost <= level) return r.t;
  }
  return std::nullopt;
}

std::uint64_t shard_hash(const ClientShard& shard) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&](const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 0x100000001b3ull;
    }
  };
  const Matrix& x = shard.samples.features();
  mix(x.data(), static_cast<std::size_t>(x.size()) * sizeof(double));
  const auto& y = shard.samples.labels();
  mix(y.data(), y.size() * sizeof(int));
  return h;
}

RunSummary summarize(const RoundTrace& trace, std::uint64_t seed) {
  if (trace.rows.empty()) throw std::invalid_argument("empty trace");
  const auto& last = trace.rows.back();
  return {last.train_cost, last.test_acc, last.slack, last.uplink_scalars, last.downlink_scalars, seed};
}

nlohmann::ordered_json to_json(const RunSummary& s) {
  nlohmann::ordered_json j;
  j["final_cost"] = s.final_cost;
  j["final_acc"] = s.final_acc;
  j["final_slack"] = s.final_slack ? nlohmann::ordered_json(*s.final_slack) : nlohmann::ordered_json(nullptr);
  j["uplink_total"] = s.uplink_total;
  j["downlink_total"] = s.downlink_total;
  j["seed"] = s.seed;
  return j;
}

}  // namespace fedssca
