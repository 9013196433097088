#pragma once

#include <string>
#include <vector>

namespace qigraph {

/// One failed invariant.  `subject` names the entry/vertex/edge, `rule` the
/// invariant (short stable tag such as "cond3" or "orientation"), and
/// `detail` the witnesses.
struct Violation {
  std::string subject;
  std::string rule;
  std::string detail;

  friend bool operator==(const Violation&, const Violation&) = default;
};

class Report {
public:
  void add(std::string subject, std::string rule, std::string detail) {
    items_.push_back({std::move(subject), std::move(rule), std::move(detail)});
  }
  void append(const Report& other) {
    items_.insert(items_.end(), other.items_.begin(), other.items_.end());
  }

  bool ok() const { return items_.empty(); }
  bool has_rule(const std::string& rule) const {
    for (const auto& v : items_) {
      if (v.rule == rule) return true;
    }
    return false;
  }
  const std::vector<Violation>& items() const { return items_; }
  std::string str() const {
    std::string out;
    for (const auto& v : items_) out += v.subject + ": [" + v.rule + "] " + v.detail + "\n";
    return out;
  }

private:
  std::vector<Violation> items_;
};

}  // namespace qigraph
