#pragma once

#include <map>
#include <string>
#include <utility>

namespace proxframe {

/// Outcome of one empirical property check: a measured quantity, the bound it
/// must stay below, and the verdict. `passed` always equals measured <= bound.
struct PropertyReport {
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  bool passed = false;
  long samples = 0;
  std::map<std::string, double> details;
};

inline PropertyReport make_report(std::string name, double measured, double bound,
                                  long samples,
                                  std::map<std::string, double> details = {}) {
  PropertyReport r;
  r.name = std::move(name);
  r.measured = measured;
  r.bound = bound;
  r.passed = measured <= bound;
  r.samples = samples;
  r.details = std::move(details);
  return r;
}

}  // namespace proxframe
