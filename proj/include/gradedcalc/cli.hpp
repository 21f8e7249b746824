#pragma once

// Problem documents: a small sectioned key = value format with operator
// expressions, and the command runner behind the gradedcalc tool.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gradedcalc {

class ParseError : public std::runtime_error {
public:
  ParseError(int line, int col, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + ":" + std::to_string(col) + ": " + msg),
        line(line), col(col), message(msg) {}
  int line, col;
  std::string message;
};

struct Entry {
  std::string key;
  std::string value;  // expressions are stored in canonical form
  int line = 0, col = 0;
  friend bool operator==(const Entry& a, const Entry& b) { return a.key == b.key && a.value == b.value; }
};

struct Section {
  std::string name;  // algebra, action, operator or command
  std::vector<Entry> entries;
  int line = 0;
  const Entry* find(const std::string& key) const;
  friend bool operator==(const Section& a, const Section& b) { return a.name == b.name && a.entries == b.entries; }
};

struct ProblemSpec {
  std::vector<Section> sections;
  const Section* section(const std::string& name) const;
  /// Value of section.key, if present.
  std::optional<std::string> get(const std::string& section, const std::string& key) const;
  friend bool operator==(const ProblemSpec& a, const ProblemSpec& b) { return a.sections == b.sections; }
};

/// Parses and resolves a document; throws ParseError with line:col.
ProblemSpec parse(const std::string& text);
std::string print(const ProblemSpec& spec);

/// Canonical text of an operator expression over Xhat(j), x(j), d(j).
std::string canonical_expression(const std::string& expr);

struct RunOptions {
  std::filesystem::path out = ".";
  std::uint64_t seed = 1;
  std::optional<std::vector<int>> truncation;
  std::optional<double> tolerance;
  unsigned threads = 1;
  std::string input;  // echoed into the report
};

struct RunResult {
  int exit_code = 0;  // 0 pass, 1 usage error, 2 verified failure, 3 inconclusive
  std::string verdict;
  std::string report;  // JSON object appended to <out>/report.json
};

class UsageError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

RunResult run(const ProblemSpec& spec, const RunOptions& opt);

}  // namespace gradedcalc
