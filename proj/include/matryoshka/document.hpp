#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "matryoshka/euler_reference.hpp"
#include "matryoshka/mc_oracle.hpp"
#include "matryoshka/moment_engine.hpp"

namespace matryoshka {

inline constexpr const char* kToolVersion = "1.0.0";

/// Serialized result: `metadata` describes the request (command, process,
/// parameters, order, time, tool version); `payload` holds the results.
struct OutputDocument {
  nlohmann::json metadata = nlohmann::json::object();
  nlohmann::json payload = nlohmann::json::object();

  friend bool operator==(const OutputDocument&, const OutputDocument&) = default;
};

nlohmann::json moments_payload(const MomentVector& moments);
nlohmann::json bench_payload(const std::vector<BenchRecord>& records);
nlohmann::json simulate_payload(const EstimateReport& report);

/// Canonical number text: 17 significant digits, always with a decimal point
/// or exponent so that it re-parses as a double; NaN and infinities become null.
std::string format_number(double value);

/// Canonical JSON: sorted keys, two-space indentation, trailing newline.
std::string to_json_text(const OutputDocument& doc);
/// Throws InvalidInput for malformed text or a missing metadata/payload.
OutputDocument parse_json_text(const std::string& text);

/// A CSV table with a header row. Empty cells stand for absent values.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  friend bool operator==(const CsvTable&, const CsvTable&) = default;
};

/// Payload-specific schemas: moments `order,value`; bench
/// `method,delta,run_time_seconds,abs_error,rel_error`; simulate
/// `order,estimate,std_error`.
CsvTable to_csv_table(const OutputDocument& doc);
std::string to_csv_text(const CsvTable& table);
/// Parses and re-canonicalizes numeric cells. Throws InvalidInput.
CsvTable parse_csv_text(const std::string& text);

/// Fixed-width bench table with two significant digits.
std::string to_bench_table(const OutputDocument& doc);

}  // namespace matryoshka
