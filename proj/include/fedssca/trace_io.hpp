#pragma once

// CSV and summary output for round traces.

#include "fedssca/federation.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace fedssca {

inline constexpr const char* kTraceHeader = "t,train_cost,test_acc,slack,uplink_scalars,downlink_scalars,wall_ms";
inline constexpr const char* kCompareHeader =
    "algorithm,seed,t,train_cost,test_acc,slack,uplink_scalars,downlink_scalars,wall_ms";

/// Shortest text that parses back to the same double.
std::string format_double(double v);

void write_trace_csv(std::ostream& out, const RoundTrace& trace);
std::string trace_to_csv(const RoundTrace& trace);
/// Throws std::invalid_argument on a malformed header or row.
RoundTrace parse_trace_csv(std::istream& in);
RoundTrace parse_trace_csv(const std::string& text);

struct CompareRow {
  std::string algorithm;
  std::uint64_t seed = 0;
  RoundRecord record;
};

void write_compare_csv(std::ostream& out, const std::vector<CompareRow>& rows);
std::vector<CompareRow> parse_compare_csv(std::istream& in);

/// Row-wise mean of traces with equal length. Slack is averaged only when
/// every input has it.
RoundTrace average_traces(const std::vector<RoundTrace>& traces);

/// First t whose train_cost <= level, or nullopt.
std::optional<long> rounds_to_threshold(const RoundTrace& trace, double level);

/// FNV-1a over the features and labels of one shard.
std::uint64_t shard_hash(const ClientShard& shard);

struct RunSummary {
  double final_cost = 0.0;
  double final_acc = 0.0;
  std::optional<double> final_slack;
  std::uint64_t uplink_total = 0;
  std::uint64_t downlink_total = 0;
  std::uint64_t seed = 0;
};

RunSummary summarize(const RoundTrace& trace, std::uint64_t seed);
nlohmann::ordered_json to_json(const RunSummary& s);

}  // namespace fedssca
