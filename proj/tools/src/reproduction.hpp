#pragma once
// Reproduction of the published numerical claims, grouped into the nine
// acceptance criteria. Shared by `hardy-perturb demo paper` and the
// acceptance test binary.
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hardy/hardy_core.hpp"

namespace hardy::repro {

struct Claim {
  int criterion = 0;
  std::string id;
  std::string expected;
  std::string computed;
  std::string tolerance;
  bool pass = false;
};

struct SuiteOptions {
  int truncation = 128;
  std::uint64_t seed = 1;
  ToleranceConfig tol;
  int property_trials = 100;
  int commutant_trials = 50;
};

/// Order used by the random property suite: the Krylov seeds need room for
/// phi to settle inside the frontier-safe prefix, which 32 does not give.
int property_truncation(int truncation);

std::vector<Claim> run_suite(const SuiteOptions& opts);

/// Claims belonging to one criterion, evaluated in isolation.
std::vector<Claim> run_criterion(int criterion, const SuiteOptions& opts);

constexpr int kCriteria = 9;
std::string criterion_title(int criterion);

nlohmann::json to_json(const Claim& c);
/// Fixed-width text table: claim / expected / computed / tolerance / pass.
std::string format_table(const std::vector<Claim>& claims);

}  // namespace hardy::repro
