#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "algebra.hpp"

namespace wl {

using Cell = std::variant<std::monostate, int64_t, double, Rational, std::string, bool>;

enum class Verdict { pass, fail, info, resource_limited };
const char* to_string(Verdict v);

struct VerdictEntry {
  std::string name;
  Verdict status = Verdict::info;
  std::string tolerance;  // declared tolerance, echoed in the output
  std::string observed;
  std::string detail;
};

struct ExperimentReport {
  std::string experiment;
  std::string version;
  std::map<std::string, std::string> config;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<VerdictEntry> verdicts;
  // Kept out of the serialized output so that reruns are byte-identical.
  double wall_seconds = 0;
  uint64_t states = 0;

  void add_row(std::vector<Cell> row);
  Verdict aggregate() const;  // fail > resource_limited > pass
};

std::string format_real(double x);  // 12 significant digits
std::string to_csv(const ExperimentReport& r);
std::string to_json(const ExperimentReport& r);
std::string verdict_lines(const ExperimentReport& r);
// Writes <base>.csv and/or <base>.json depending on format ("csv", "json", "both").
std::vector<std::string> emit(const ExperimentReport& r, const std::string& format, const std::string& base);

}  // namespace wl
