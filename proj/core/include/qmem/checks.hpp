#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace qmem::checks {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::string detail;
};

/// asymptotic, conservation, oracle, visibility, purity, hysteresis,
/// equivalence, determinism, all.
const std::vector<std::string>& suite_names();
bool is_suite(std::string_view name);

/// Throws DomainError for an unknown suite name.
std::vector<CriterionResult> run_suite(std::string_view suite);

/// Single criterion by number (1..12).
CriterionResult run_criterion(int id);

/// `[PASS] 05 name: measured=... threshold=... (detail)`
std::string format_result(const CriterionResult& result);

// Individual criteria.
CriterionResult quadratic_regime();
CriterionResult linear_regime();
CriterionResult flux_conservation();
CriterionResult moving_average_identity();
CriterionResult oracle_click_probability();
CriterionResult oracle_visibility();
CriterionResult loss_limit_law();
CriterionResult purity_pipeline();
CriterionResult hysteresis_structure();
CriterionResult series_parallel();
CriterionResult visibility_hysteresis();
CriterionResult determinism();

}  // namespace qmem::checks
