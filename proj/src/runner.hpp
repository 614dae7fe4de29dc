#pragma once

#include <string>

#include "config.hpp"
#include "error.hpp"

namespace abf {

struct RunReport {
  Json body;
  int verdict = 0;  // 0 = yes/corroborated, 1 = no/falsified
  std::string csv;  // per-sample rows, when the run produces tabular data
};

RunReport run_tensor(const RunConfig& cfg, const Vec& x, const Vec& v);
RunReport run_classify(const RunConfig& cfg);
RunReport run_check(const RunConfig& cfg);
RunReport run_killing(const RunConfig& cfg);

// The acceptance suite: every criterion evaluated at its pinned tolerance,
// one entry per criterion. Implemented in selftest.cpp.
RunReport run_selftest(uint64_t seed);

Json vec_to_json(const Vec& v);
Json mat_to_json(const Mat& m);
Json error_json(Code code, const std::string& message);

const char* tool_version();

}  // namespace abf
