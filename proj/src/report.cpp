#include "report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace wl {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::info: return "info";
    case Verdict::resource_limited: return "resource-limited";
  }
  return "?";
}

void ExperimentReport::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) fail(Errc::internal, "report row width does not match the header");
  rows.push_back(std::move(row));
}

Verdict ExperimentReport::aggregate() const {
  bool any_fail = false, any_limited = false;
  for (const auto& v : verdicts) {
    any_fail |= v.status == Verdict::fail;
    any_limited |= v.status == Verdict::resource_limited;
  }
  if (any_fail) return Verdict::fail;
  if (any_limited) return Verdict::resource_limited;
  return Verdict::pass;
}

std::string format_real(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string cell_text(const Cell& c) {
  struct V {
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(int64_t v) const { return std::to_string(v); }
    std::string operator()(double v) const { return format_real(v); }
    std::string operator()(const Rational& q) const { return to_string(q); }
    std::string operator()(const std::string& s) const { return s; }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
  };
  return std::visit(V{}, c);
}

nlohmann::ordered_json cell_json(const Cell& c) {
  struct V {
    nlohmann::ordered_json operator()(std::monostate) const { return nullptr; }
    nlohmann::ordered_json operator()(int64_t v) const { return v; }
    nlohmann::ordered_json operator()(double v) const {
      // Go through the 12-digit text so JSON and CSV agree.
      return std::stod(format_real(v));
    }
    nlohmann::ordered_json operator()(const Rational& q) const {
      return {{"num", numerator(q).str()}, {"den", denominator(q).str()}};
    }
    nlohmann::ordered_json operator()(const std::string& s) const { return s; }
    nlohmann::ordered_json operator()(bool b) const { return b; }
  };
  return std::visit(V{}, c);
}

}  // namespace

std::string to_csv(const ExperimentReport& r) {
  std::ostringstream os;
  for (size_t i = 0; i < r.columns.size(); ++i) os << (i ? "," : "") << csv_escape(r.columns[i]);
  os << "\n";
  for (const auto& row : r.rows) {
    for (size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_escape(cell_text(row[i]));
    os << "\n";
  }
  return os.str();
}

std::string to_json(const ExperimentReport& r) {
  nlohmann::ordered_json j;
  j["experiment"] = r.experiment;
  j["version"] = r.version;
  nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.config) cfg[k] = v;
  j["config"] = cfg;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : r.rows) {
    nlohmann::ordered_json o = nlohmann::ordered_json::object();
    for (size_t i = 0; i < row.size(); ++i) o[r.columns[i]] = cell_json(row[i]);
    rows.push_back(o);
  }
  j["rows"] = rows;
  nlohmann::ordered_json vs = nlohmann::ordered_json::array();
  for (const auto& v : r.verdicts)
    vs.push_back({{"name", v.name},
                  {"status", to_string(v.status)},
                  {"tolerance", v.tolerance},
                  {"observed", v.observed},
                  {"detail", v.detail}});
  j["verdicts"] = vs;
  return j.dump(2) + "\n";
}

std::string verdict_lines(const ExperimentReport& r) {
  std::ostringstream os;
  for (const auto& v : r.verdicts) {
    os << to_string(v.status) << "  " << v.name << "  observed=" << v.observed << "  tolerance=" << v.tolerance;
    if (!v.detail.empty()) os << "  (" << v.detail << ")";
    os << "\n";
  }
  return os.str();
}

std::vector<std::string> emit(const ExperimentReport& r, const std::string& format, const std::string& base) {
  if (format != "csv" && format != "json" && format != "both")
    fail(Errc::invalid_argument, "emit: format must be csv, json or both");
  std::vector<std::string> written;
  auto put = [&](const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(Errc::io, "cannot open " + path + " for writing");
    out << body;
    out.close();
    if (!out) fail(Errc::io, "write failed for " + path);
    written.push_back(path);
  };
  if (format == "csv" || format == "both") put(base + ".csv", to_csv(r));
  if (format == "json" || format == "both") put(base + ".json", to_json(r));
  return written;
}

}  // namespace wl
