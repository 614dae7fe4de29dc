#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <string>

#include <json.hpp>

#include "abf/abfinsler.h"

using nlohmann::json;

namespace {

const char* kRanders = R"({
  "metric": {"builtin": "minkowski"},
  "oneform": {"components": [-0.70710678118654752, 0, 0, 0]},
  "psi": {"family": "randers"},
  "points": {"list": [[0, 0, 0, 0], [0.5, 0.1, -0.2, 0.3]]},
  "sampling": {"n_samples": 80, "rng_seed": 5},
  "output": "both"
})";

struct Model {
  abf_model* m = nullptr;
  explicit Model(const char* cfg) { REQUIRE(abf_model_create(cfg, &m) == ABF_OK); }
  ~Model() { abf_model_destroy(m); }
};

struct Report {
  abf_report* r = nullptr;
  ~Report() { abf_report_destroy(r); }
};

json strip_clock(const char* text) {
  json j = json::parse(text);
  j.erase("wall_clock_ms");
  return j;
}

}  // namespace

TEST_CASE("version and status names") {
  CHECK(abf_version() != nullptr);
  CHECK(std::strlen(abf_version()) > 0);
  CHECK(std::string(abf_status_name(ABF_OK)) == "Ok");
  CHECK(std::string(abf_status_name(ABF_E_S_ON_LIGHT_CONE)) == "SOnLightCone");
  CHECK(std::string(abf_status_name(ABF_E_EMPTY_CONE)) == "EmptyCone");
}

TEST_CASE("model creation failures set the status and the error message") {
  abf_model* m = nullptr;
  CHECK(abf_model_create("{not json", &m) == ABF_E_PARSE);
  CHECK(m == nullptr);
  CHECK(std::strlen(abf_last_error()) > 0);

  const char* bad = R"({"metric": {"builtin": "minkowski"},
                        "oneform": {"components": [0,0,0,0]},
                        "psi": {"family": "kundt", "k": 1, "m": 0, "p": 0.5}})";
  CHECK(abf_model_create(bad, &m) == ABF_E_VALIDATION);
  CHECK(abf_model_create(nullptr, &m) == ABF_E_INVALID_PARAMS);
}

TEST_CASE("classify verdict and payload") {
  Model model(kRanders);
  Report rep;
  REQUIRE(abf_run_classify(model.m, &rep.r) == ABF_OK);
  CHECK(abf_report_verdict(rep.r) == 0);
  json j = json::parse(abf_report_json(rep.r));
  CHECK(j["payload"]["is_spacetime"] == true);
  CHECK(j["payload"]["per_point"].size() == 2);
  CHECK(abf_report_csv(rep.r) == nullptr);  // classify has no tabular payload
}

TEST_CASE("check produces a corroborated report, CSV rows, and is deterministic") {
  Model model(kRanders);
  Report r1, r2;
  REQUIRE(abf_run_check(model.m, &r1.r) == ABF_OK);
  REQUIRE(abf_run_check(model.m, &r2.r) == ABF_OK);
  CHECK(abf_report_verdict(r1.r) == 0);

  json j = json::parse(abf_report_json(r1.r));
  CHECK(j["payload"]["verdict"] == "corroborated");
  CHECK(j["payload"]["total_samples"] == 160);

  // byte-identical runs modulo the wall clock
  CHECK(strip_clock(abf_report_json(r1.r)).dump() == strip_clock(abf_report_json(r2.r)).dump());

  const char* csv = abf_report_csv(r1.r);
  REQUIRE(csv != nullptr);
  std::string head(csv, std::strchr(csv, '\n') - csv);
  CHECK(head.find("point,sample") == 0);
  CHECK(head.find("det_g") != std::string::npos);
  CHECK(std::string(csv) == abf_report_csv(r2.r));
}

TEST_CASE("tensor on the light cone maps to SOnLightCone") {
  Model model(kRanders);
  Report rep;
  double x[4] = {0, 0, 0, 0};
  double v[4] = {1, 1, 0, 0};
  CHECK(abf_run_tensor(model.m, x, v, 4, &rep.r) == ABF_E_S_ON_LIGHT_CONE);
  CHECK(rep.r == nullptr);
  CHECK(std::string(abf_last_error()).find("A") != std::string::npos);
}

TEST_CASE("tensor returns both provenances and the signature") {
  Model model(kRanders);
  Report rep;
  double x[4] = {0, 0, 0, 0};
  double v[4] = {1, 0.2, 0.1, 0};
  REQUIRE(abf_run_tensor(model.m, x, v, 4, &rep.r) == ABF_OK);
  json j = json::parse(abf_report_json(rep.r));
  auto& payload = j["payload"];
  CHECK(payload["g"].contains("closed_form"));
  CHECK(payload["g"].contains("numeric_hessian"));
  double dc = payload["det_g"]["closed_form"].get<double>();
  double dn = payload["det_g"]["numeric_hessian"].get<double>();
  CHECK(dc == doctest::Approx(dn).epsilon(1e-6));
  CHECK(dc < 0);
  CHECK(payload["signature"]["n_pos"] == 1);
  CHECK(payload["signature"]["n_neg"] == 3);
  CHECK(payload["inverse_off_identity"].get<double>() <= 1e-8);
}

TEST_CASE("killing run on the conformal example") {
  json cfg = {
      {"metric", {{"builtin", "conformal-minkowski"}, {"q", 0.5}}},
      {"oneform",
       {{"components", {"exp(-0.5*x0)", "exp(-0.5*x0)", "0", "0"}}}},
      {"psi", {{"family", "bogoslovsky-kropina"}, {"q", 0.5}}},
      {"points", {{"box", {{"min", {-1, -1, -1, -1}}, {"max", {1, 1, 1, 1}}}}, {"count", 3}}},
      {"sampling", {{"n_samples", 60}, {"rng_seed", 11}}},
      {"killing",
       {{"xi", {"1", "0", "0", "0"}},
        {"kappa", 1.0},
        {"lambda2", -0.5},
        {"mu1", 1.0},
        {"mu2", 0.0},
        {"residual_tol", 1e-8}}}};
  Model model(cfg.dump().c_str());
  Report rep;
  REQUIRE(abf_run_killing(model.m, &rep.r) == ABF_OK);
  CHECK(abf_report_verdict(rep.r) == 0);
  json j = json::parse(abf_report_json(rep.r));
  auto& payload = j["payload"];
  CHECK(payload["is_killing"] == true);
  CHECK(payload["classification"] == "nontrivial Killing field");
  CHECK(payload["trivial_symmetry"]["trivial"] == false);
  CHECK(payload["nontrivial_conditions"]["pass"] == true);
}

TEST_CASE("empty cone surfaces as a status") {
  json cfg = json::parse(kRanders);
  cfg["oneform"]["components"] = {-1.2, 0, 0, 0};  // <b,b> = 1.44: the cone is empty
  Model model(cfg.dump().c_str());
  Report rep;
  CHECK(abf_run_check(model.m, &rep.r) == ABF_E_EMPTY_CONE);
}
