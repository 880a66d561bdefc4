#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "proxframe/exact_prox.hpp"
#include "proxframe/report.hpp"

namespace proxframe {

/// Options shared by all verification suites. A zero sample count selects the
/// per-suite default; zero threads means PROXFRAME_THREADS or, failing that,
/// the machine parallelism. Results depend on the seed only, never on the
/// thread count.
struct VerifyOptions {
  std::uint64_t seed = 0;
  long samples = 0;
  int threads = 0;
};

/// Names of the individual suites, in execution order (excludes "all").
const std::vector<std::string>& suite_names();

/// Runs one suite ("all" runs every suite) and returns its reports.
std::vector<PropertyReport> run_suite(const std::string& name, const VerifyOptions& opts);

nlohmann::json report_to_json(const PropertyReport& report);
nlohmann::json reports_to_json(const std::vector<PropertyReport>& reports);
nlohmann::json comparison_to_json(const ShrinkProxComparison& cmp);

}  // namespace proxframe
