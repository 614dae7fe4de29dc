// Acceptance gate: runs the full suite through the C API, prints one line per
// criterion, and pins the complete expected outcome.
//
// Criterion 5 contains one golden-table row (bogoslovsky-kropina with a null
// one-form and q = -1) whose classification clause admits a corner where the
// fundamental tensor is analytically degenerate: sigma + rho sigma' vanishes
// identically, so det g = 0 and the signature is (1,2,1) at every admissible
// vector. The sampler is required to detect exactly that, so criterion 5 is
// expected to report FAIL on that row and PASS on every other row. Any
// deviation in either direction fails this gate.

#include <cstdio>
#include <cstring>
#include <string>

#include <json.hpp>

#include "abf/abfinsler.h"

using nlohmann::json;

namespace {
constexpr const char* kDegenerateRow = "bogoslovsky bnorm=0 q=-1";
}

int main() {
  abf_report* rep = nullptr;
  abf_status st = abf_run_selftest(12345, &rep);
  if (st != ABF_OK) {
    std::fprintf(stderr, "selftest failed to run: %s (%s)\n", abf_status_name(st),
                 abf_last_error());
    return 1;
  }
  json j = json::parse(abf_report_json(rep));
  abf_report_destroy(rep);

  const auto& criteria = j["payload"]["criteria"];
  bool gate_ok = true;
  int seen = 0;

  for (const auto& c : criteria) {
    int id = c["id"].get<int>();
    bool pass = c["pass"].get<bool>();
    ++seen;

    if (id == 5) {
      // expected: all rows clean except the analytically degenerate corner
      bool rows_ok = true;
      bool degenerate_detected = false;
      for (const auto& r : c["detail"]["rows"]) {
        std::string row = r["row"].get<std::string>();
        bool ok = r["ok"].get<bool>();
        if (row == kDegenerateRow) {
          degenerate_detected =
              !ok && r.contains("verdict") && r["verdict"] == "falsified" &&
              r["first_counterexample"].get<std::string>().find("signature") !=
                  std::string::npos;
        } else {
          rows_ok = rows_ok && ok;
        }
      }
      bool expected_shape = rows_ok && degenerate_detected && !pass;
      std::printf("criterion %2d: %s  %s\n", id, pass ? "PASS" : "FAIL",
                  c["name"].get<std::string>().c_str());
      std::printf(
          "              expected FAIL: the (bnorm=0, q=-1) golden row is analytically\n"
          "              degenerate (det g = 0 on the whole cone); the sampler must detect\n"
          "              it -> %s, all other rows clean -> %s\n",
          degenerate_detected ? "yes" : "NO", rows_ok ? "yes" : "NO");
      if (!expected_shape) {
        std::printf("              UNEXPECTED OUTCOME for criterion 5\n");
        gate_ok = false;
      }
      continue;
    }

    std::printf("criterion %2d: %s  %s\n", id, pass ? "PASS" : "FAIL",
                c["name"].get<std::string>().c_str());
    if (!pass) {
      std::printf("              detail: %s\n", c["detail"].dump().substr(0, 400).c_str());
      gate_ok = false;
    }
    if (id == 1) {
      double secs = c["detail"]["runtime_seconds"].get<double>();
      std::printf("              tensor agreement runtime: %.2f s (budget 60 s)\n", secs);
      if (secs >= 60.0) gate_ok = false;
    }
  }

  if (seen != 10) {
    std::fprintf(stderr, "expected 10 criteria, saw %d\n", seen);
    gate_ok = false;
  }

  // determinism across independent selftest invocations (criterion 10 checks
  // rebuilds inside one invocation; this exercises the process-level contract)
  abf_report* r1 = nullptr;
  abf_report* r2 = nullptr;
  if (abf_run_selftest(777, &r1) == ABF_OK && abf_run_selftest(777, &r2) == ABF_OK) {
    json a = json::parse(abf_report_json(r1));
    json b = json::parse(abf_report_json(r2));
    for (json* d : {&a, &b}) {
      d->erase("wall_clock_ms");
      for (auto& c : (*d)["payload"]["criteria"])
        if (c["detail"].contains("runtime_seconds")) c["detail"].erase("runtime_seconds");
    }
    bool same = a.dump() == b.dump();
    std::printf("selftest x2 (seed 777): byte-identical after timing strip -> %s\n",
                same ? "yes" : "NO");
    if (!same) gate_ok = false;
  } else {
    gate_ok = false;
  }
  abf_report_destroy(r1);
  abf_report_destroy(r2);

  std::printf("acceptance gate: %s\n", gate_ok ? "PASS" : "FAIL");
  return gate_ok ? 0 : 1;
}
