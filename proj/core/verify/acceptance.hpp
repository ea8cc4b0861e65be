#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rlab/report.hpp"

namespace rlab::verify {

struct SuiteOptions {
  std::uint64_t seed = 20240601;
  /// Adds wall-clock times to the report (which then is no longer
  /// reproducible byte for byte).
  bool timing = false;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  /// One-line summary of the decisive numbers.
  std::string summary;
  Json details;
  double runtime_ms = 0.0;
};

using Criterion = CriterionResult (*)(const SuiteOptions&);

CriterionResult chi_recovery(const SuiteOptions&);
CriterionResult pfaffian_routes(const SuiteOptions&);
CriterionResult curvature_identities(const SuiteOptions&);
CriterionResult warped_product(const SuiteOptions&);
CriterionResult ricci_dichotomy(const SuiteOptions&);
CriterionResult degenerate_pfaffian(const SuiteOptions&);
CriterionResult variation_formula(const SuiteOptions&);
CriterionResult determinant_fact(const SuiteOptions&);
CriterionResult foliation_suite(const SuiteOptions&);
/// Runs criteria 1–9 twice and compares the rendered reports byte for byte.
CriterionResult determinism(const SuiteOptions&);

/// Criteria 1–9 in order.
const std::vector<Criterion>& numeric_criteria();

/// All ten criteria; `progress` is called after each one.
std::vector<CriterionResult> run_all(const SuiteOptions& options,
                                     const std::function<void(const CriterionResult&)>& progress = {});

/// Report for a list of results: seed, per-criterion details and pass flags.
Json suite_report(const std::vector<CriterionResult>& results, const SuiteOptions& options);

/// "PASS  3  curvature identities  <summary>"
std::string status_line(const CriterionResult& r);

}  // namespace rlab::verify
