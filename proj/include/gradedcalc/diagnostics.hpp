#pragma once

#include <string>
#include <vector>

namespace gradedcalc {

struct Issue {
  std::string kind;
  std::string witness;
};

/// Collected axiom violations; empty means valid.
struct Diagnostics {
  std::vector<Issue> issues;

  bool ok() const { return issues.empty(); }
  void add(std::string kind, std::string witness) { issues.push_back({std::move(kind), std::move(witness)}); }
  bool has(const std::string& kind) const {
    for (auto& i : issues)
      if (i.kind == kind) return true;
    return false;
  }
  std::string str() const {
    if (ok()) return "ok";
    std::string s;
    for (auto& i : issues) s += i.kind + ": " + i.witness + "\n";
    return s;
  }
};

}  // namespace gradedcalc
