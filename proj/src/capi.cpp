#include "abf/abfinsler.h"

#include <new>
#include <string>

#include "config.hpp"
#include "error.hpp"
#include "runner.hpp"

using namespace abf;

struct abf_model {
  RunConfig cfg;
};

struct abf_report {
  std::string json;
  std::string csv;
  int verdict = 0;
};

namespace {

thread_local std::string g_last_error;

abf_status to_status(Code c) {
  switch (c) {
    case Code::Ok: return ABF_OK;
    case Code::ParseError: return ABF_E_PARSE;
    case Code::ValidationError: return ABF_E_VALIDATION;
    case Code::DegenerateMetric: return ABF_E_DEGENERATE_METRIC;
    case Code::SOnLightCone: return ABF_E_S_ON_LIGHT_CONE;
    case Code::DomainError: return ABF_E_DOMAIN;
    case Code::UnsupportedFamily: return ABF_E_UNSUPPORTED_FAMILY;
    case Code::StencilOutOfDomain: return ABF_E_STENCIL_OUT_OF_DOMAIN;
    case Code::SingularTensor: return ABF_E_SINGULAR_TENSOR;
    case Code::SingularBase: return ABF_E_SINGULAR_BASE;
    case Code::SingularUpdate: return ABF_E_SINGULAR_UPDATE;
    case Code::EmptyCone: return ABF_E_EMPTY_CONE;
    case Code::InvalidParams: return ABF_E_INVALID_PARAMS;
    case Code::DegenerateFit: return ABF_E_DEGENERATE_FIT;
    case Code::Internal: return ABF_E_INTERNAL;
  }
  return ABF_E_INTERNAL;
}

template <typename Fn>
abf_status guarded(Fn&& fn) {
  try {
    fn();
    return ABF_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return ABF_E_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return ABF_E_INTERNAL;
  }
}

abf_report* wrap(RunReport&& rep) {
  auto* out = new abf_report;
  out->json = rep.body.dump(2);
  out->csv = std::move(rep.csv);
  out->verdict = rep.verdict;
  return out;
}

}  // namespace

extern "C" {

const char* abf_version(void) { return tool_version(); }

const char* abf_status_name(abf_status status) {
  switch (status) {
    case ABF_OK: return "Ok";
    case ABF_E_PARSE: return "ParseError";
    case ABF_E_VALIDATION: return "ValidationError";
    case ABF_E_DEGENERATE_METRIC: return "DegenerateMetric";
    case ABF_E_S_ON_LIGHT_CONE: return "SOnLightCone";
    case ABF_E_DOMAIN: return "DomainError";
    case ABF_E_UNSUPPORTED_FAMILY: return "UnsupportedFamily";
    case ABF_E_STENCIL_OUT_OF_DOMAIN: return "StencilOutOfDomain";
    case ABF_E_SINGULAR_TENSOR: return "SingularTensor";
    case ABF_E_SINGULAR_BASE: return "SingularBase";
    case ABF_E_SINGULAR_UPDATE: return "SingularUpdate";
    case ABF_E_EMPTY_CONE: return "EmptyCone";
    case ABF_E_INVALID_PARAMS: return "InvalidParams";
    case ABF_E_DEGENERATE_FIT: return "DegenerateFit";
    case ABF_E_INTERNAL: return "Internal";
  }
  return "Unknown";
}

const char* abf_last_error(void) { return g_last_error.c_str(); }

abf_status abf_model_create(const char* config_json, abf_model** out) {
  if (!config_json || !out) {
    g_last_error = "null argument";
    return ABF_E_INVALID_PARAMS;
  }
  *out = nullptr;
  return guarded([&] {
    auto* m = new abf_model{parse_config_text(config_json)};
    *out = m;
  });
}

void abf_model_destroy(abf_model* model) { delete model; }

abf_status abf_run_tensor(abf_model* model, const double* x, const double* v, size_t dim,
                          abf_report** out) {
  if (!model || !x || !v || !out) {
    g_last_error = "null argument";
    return ABF_E_INVALID_PARAMS;
  }
  *out = nullptr;
  return guarded([&] {
    if (static_cast<int>(dim) != model->cfg.dim)
      fail(Code::InvalidParams, "x/v length does not match the configured dimension");
    Vec xv(dim), vv(dim);
    for (size_t i = 0; i < dim; ++i) {
      xv[i] = x[i];
      vv[i] = v[i];
    }
    *out = wrap(run_tensor(model->cfg, xv, vv));
  });
}

abf_status abf_run_classify(abf_model* model, abf_report** out) {
  if (!model || !out) {
    g_last_error = "null argument";
    return ABF_E_INVALID_PARAMS;
  }
  *out = nullptr;
  return guarded([&] { *out = wrap(run_classify(model->cfg)); });
}

abf_status abf_run_check(abf_model* model, abf_report** out) {
  if (!model || !out) {
    g_last_error = "null argument";
    return ABF_E_INVALID_PARAMS;
  }
  *out = nullptr;
  return guarded([&] { *out = wrap(run_check(model->cfg)); });
}

abf_status abf_run_killing(abf_model* model, abf_report** out) {
  if (!model || !out) {
    g_last_error = "null argument";
    return ABF_E_INVALID_PARAMS;
  }
  *out = nullptr;
  return guarded([&] { *out = wrap(run_killing(model->cfg)); });
}

abf_status abf_run_selftest(uint64_t seed, abf_report** out) {
  if (!out) {
    g_last_error = "null argument";
    return ABF_E_INVALID_PARAMS;
  }
  *out = nullptr;
  return guarded([&] { *out = wrap(run_selftest(seed)); });
}

const char* abf_report_json(const abf_report* report) {
  return report ? report->json.c_str() : nullptr;
}

const char* abf_report_csv(const abf_report* report) {
  return report && !report->csv.empty() ? report->csv.c_str() : nullptr;
}

int abf_report_verdict(const abf_report* report) { return report ? report->verdict : 1; }

void abf_report_destroy(abf_report* report) { delete report; }

}  // extern "C"
