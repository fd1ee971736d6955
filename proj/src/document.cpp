#include "matryoshka/document.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "matryoshka/error.hpp"

namespace matryoshka {

using nlohmann::json;

namespace {

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void emit(const json& value, std::string& out, int depth) {
  const std::string pad(static_cast<std::size_t>(depth + 1) * 2, ' ');
  const std::string close_pad(static_cast<std::size_t>(depth) * 2, ' ');
  switch (value.type()) {
    case json::value_t::object: {
      if (value.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [key, item] : value.items()) {
        if (!first) out += ",\n";
        first = false;
        out += pad + json(key).dump() + ": ";
        emit(item, out, depth + 1);
      }
      out += "\n" + close_pad + "}";
      return;
    }
    case json::value_t::array: {
      if (value.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < value.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        emit(value[i], out, depth + 1);
      }
      out += "\n" + close_pad + "]";
      return;
    }
    case json::value_t::number_float:
      out += format_number(value.get<double>());
      return;
    default:
      out += value.dump();
      return;
  }
}

std::string cell(const json& v) {
  if (v.is_null()) return "";
  if (v.is_number_float()) return std::isfinite(v.get<double>()) ? format_number(v.get<double>()) : "";
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = line.find(sep, pos);
    out.push_back(line.substr(pos, next == std::string::npos ? std::string::npos : next - pos));
    if (next == std::string::npos) return out;
    pos = next + 1;
  }
}

std::string canonical_cell(const std::string& text) {
  if (text.empty()) return text;
  const bool integral = text.find_first_of(".eEnN") == std::string::npos;
  try {
    std::size_t used = 0;
    if (integral) {
      const long long v = std::stoll(text, &used);
      if (used == text.size()) return std::to_string(v);
    } else {
      const double v = std::stod(text, &used);
      if (used == text.size()) return format_number(v);
    }
  } catch (const std::exception&) {
  }
  return text;
}

std::string sci2(const json& v) {
  if (!v.is_number()) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1e", v.get<double>());
  return buf;
}

}  // namespace

json moments_payload(const MomentVector& moments) {
  json rows = json::array();
  for (std::size_t k = 0; k < moments.order(); ++k) {
    rows.push_back({{"order", k + 1}, {"value", number_or_null(moments.values[k])}});
  }
  return {{"kind", "moments"},
          {"stationary", moments.stationary()},
          {"time", moments.time ? json(*moments.time) : json(nullptr)},
          {"moments", std::move(rows)}};
}

json bench_payload(const std::vector<BenchRecord>& records) {
  json rows = json::array();
  for (const auto& r : records) {
    rows.push_back({{"method", r.method},
                    {"delta", r.delta ? json(*r.delta) : json(nullptr)},
                    {"run_time_seconds", number_or_null(r.run_time_seconds)},
                    {"median_run_time_seconds", number_or_null(r.median_run_time_seconds)},
                    {"abs_error", number_or_null(r.abs_error)},
                    {"rel_error", number_or_null(r.rel_error)},
                    {"order", r.order},
                    {"trials", r.trials}});
  }
  return {{"kind", "bench"}, {"records", std::move(rows)}};
}

json simulate_payload(const EstimateReport& report) {
  json rows = json::array();
  for (const auto& e : report.estimates) {
    rows.push_back({{"order", e.order},
                    {"estimate", number_or_null(e.mean)},
                    {"std_error", number_or_null(e.std_error)},
                    {"paths", e.paths}});
  }
  return {{"kind", "simulate"}, {"estimates", std::move(rows)}, {"warnings", report.warnings}};
}

std::string format_number(double value) {
  if (!std::isfinite(value)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  std::string s(buf);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

std::string to_json_text(const OutputDocument& doc) {
  const json root = {{"metadata", doc.metadata}, {"payload", doc.payload}};
  std::string out;
  emit(root, out, 0);
  out += "\n";
  return out;
}

OutputDocument parse_json_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::InvalidInput, std::string("malformed JSON document: ") + e.what());
  }
  if (!root.is_object() || !root.contains("metadata") || !root.contains("payload")) {
    throw Error(ErrorKind::InvalidInput, "document must have 'metadata' and 'payload'");
  }
  return {root["metadata"], root["payload"]};
}

CsvTable to_csv_table(const OutputDocument& doc) {
  const std::string kind = doc.payload.value("kind", "");
  CsvTable table;
  if (kind == "moments") {
    table.header = {"order", "value"};
    for (const auto& r : doc.payload["moments"]) table.rows.push_back({cell(r["order"]), cell(r["value"])});
  } else if (kind == "bench") {
    table.header = {"method", "delta", "run_time_seconds", "abs_error", "rel_error"};
    for (const auto& r : doc.payload["records"]) {
      table.rows.push_back({cell(r["method"]), cell(r["delta"]), cell(r["run_time_seconds"]),
                            cell(r["abs_error"]), cell(r["rel_error"])});
    }
  } else if (kind == "simulate") {
    table.header = {"order", "estimate", "std_error"};
    for (const auto& r : doc.payload["estimates"]) {
      table.rows.push_back({cell(r["order"]), cell(r["estimate"]), cell(r["std_error"])});
    }
  } else {
    throw Error(ErrorKind::InvalidInput, "unknown payload kind '" + kind + "'");
  }
  return table;
}

std::string to_csv_text(const CsvTable& table) {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + cells[i];
    out += "\n";
  };
  line(table.header);
  for (const auto& r : table.rows) line(r);
  return out;
}

CsvTable parse_csv_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  CsvTable table;
  if (!std::getline(in, line) || line.empty()) throw Error(ErrorKind::InvalidInput, "CSV has no header");
  table.header = split(line, ',');
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split(line, ',');
    if (cells.size() != table.header.size()) {
      throw Error(ErrorKind::InvalidInput, "CSV row has " + std::to_string(cells.size()) +
                                               " cells, header has " +
                                               std::to_string(table.header.size()));
    }
    for (auto& c : cells) c = canonical_cell(c);
    table.rows.push_back(std::move(cells));
  }
  return table;
}

std::string to_bench_table(const OutputDocument& doc) {
  std::ostringstream os;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-24s %-12s %-12s %-12s\n", "method", "run time", "abs error",
                "rel error");
  os << buf;
  for (const auto& r : doc.payload["records"]) {
    std::string label = r["method"].get<std::string>();
    if (!r["delta"].is_null()) label += " delta=" + sci2(r["delta"]);
    const bool closed = r["delta"].is_null();
    std::snprintf(buf, sizeof buf, "%-24s %-12s %-12s %-12s\n", label.c_str(),
                  (sci2(r["run_time_seconds"]) + " s").c_str(),
                  closed ? "." : sci2(r["abs_error"]).c_str(),
                  closed ? "." : sci2(r["rel_error"]).c_str());
    os << buf;
  }
  return os.str();
}

}  // namespace matryoshka
