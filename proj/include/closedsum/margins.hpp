#pragma once

#include <closedsum/numerics.hpp>

#include <cmath>
#include <map>
#include <string>
#include <vector>

namespace closedsum {

enum class Verdict { Satisfied, Violated, Borderline };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Satisfied: return "satisfied";
    case Verdict::Violated: return "violated";
    case Verdict::Borderline: return "borderline";
  }
  return "unknown";
}

/// Margins are oriented so that positive means the criterion holds.
inline Verdict verdict_for(double margin, double margin_tol) {
  if (std::abs(margin) <= margin_tol) return Verdict::Borderline;
  return margin > margin_tol ? Verdict::Satisfied : Verdict::Violated;
}

struct MarginEntry {
  std::string id;
  double margin = 0.0;
  Verdict verdict = Verdict::Borderline;
  bool estimate = false;  // sampled rather than exact
  bool vacuous = false;   // constraint space empty; margin is +inf
};

/// Named criteria with margins and verdicts, plus raw auxiliary quantities.
struct MarginReport {
  std::vector<MarginEntry> entries;
  std::map<std::string, double> values;
  std::map<std::string, bool> flags;

  MarginEntry& add(const std::string& id, double margin, const Tolerances& tol, bool estimate = false) {
    MarginEntry e;
    e.id = id;
    e.margin = margin;
    e.vacuous = std::isinf(margin) && margin > 0;
    e.verdict = e.vacuous ? Verdict::Satisfied : verdict_for(margin, tol.margin_tol);
    e.estimate = estimate;
    entries.push_back(e);
    return entries.back();
  }

  const MarginEntry* find(const std::string& id) const {
    for (const auto& e : entries)
      if (e.id == id) return &e;
    return nullptr;
  }

  const MarginEntry& at(const std::string& id) const {
    const MarginEntry* e = find(id);
    if (!e) throw Error(ErrorKind::InvalidArgument, "no report entry named " + id);
    return *e;
  }

  double margin(const std::string& id) const { return at(id).margin; }

  double value(const std::string& name) const {
    auto it = values.find(name);
    if (it == values.end()) throw Error(ErrorKind::InvalidArgument, "no report value named " + name);
    return it->second;
  }

  bool flag(const std::string& name) const {
    auto it = flags.find(name);
    if (it == flags.end()) throw Error(ErrorKind::InvalidArgument, "no report flag named " + name);
    return it->second;
  }

  void merge(const MarginReport& other, const std::string& prefix = "") {
    for (auto e : other.entries) {
      e.id = prefix + e.id;
      entries.push_back(e);
    }
    for (const auto& [k, v] : other.values) values[prefix + k] = v;
    for (const auto& [k, v] : other.flags) flags[prefix + k] = v;
  }
};

}  // namespace closedsum
