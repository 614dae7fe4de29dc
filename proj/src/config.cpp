#include "config.hpp"

#include <fstream>

#include "error.hpp"
#include "rng.hpp"

namespace abf {

namespace {

std::vector<std::string> coordinate_names(int n) {
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) names.push_back("x" + std::to_string(i));
  return names;
}

double require_number(const Json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number())
    fail(Code::ValidationError, std::string("missing or non-numeric key '") + key + "'");
  return j[key].get<double>();
}

double number_or(const Json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number())
    fail(Code::ValidationError, std::string("key '") + key + "' must be a number");
  return j[key].get<double>();
}

Vec vec_from_json(const Json& j, int n, const char* what) {
  if (!j.is_array() || static_cast<int>(j.size()) != n)
    fail(Code::ValidationError, std::string(what) + " must be an array of length " +
                                    std::to_string(n));
  Vec v(n);
  for (int i = 0; i < n; ++i) {
    if (!j[i].is_number()) fail(Code::ValidationError, std::string(what) + " must be numeric");
    v[i] = j[i].get<double>();
  }
  return v;
}

Expr component_expr(const Json& j, int dim, const char* what) {
  auto names = coordinate_names(dim);
  if (j.is_number()) return Expr::constant(j.get<double>());
  if (j.is_string()) return Expr::parse(j.get<std::string>(), names);
  fail(Code::ValidationError,
       std::string(what) + " components must be numbers or expression strings");
}

MetricField metric_from_json(const Json& j, int dim) {
  if (j.contains("builtin")) {
    std::string name = j["builtin"].get<std::string>();
    if (name == "minkowski") return MetricField::minkowski(dim);
    if (name == "conformal-minkowski")
      return MetricField::conformal_minkowski(require_number(j, "q"), dim);
    fail(Code::ValidationError, "unknown metric builtin '" + name +
                                    "' (expected minkowski or conformal-minkowski)");
  }
  if (j.contains("components")) {
    const Json& rows = j["components"];
    if (!rows.is_array() || static_cast<int>(rows.size()) != dim)
      fail(Code::ValidationError, "metric components must be a dim x dim array");
    std::vector<std::vector<Expr>> comps(dim);
    for (int i = 0; i < dim; ++i) {
      if (!rows[i].is_array() || static_cast<int>(rows[i].size()) != dim)
        fail(Code::ValidationError, "metric components must be a dim x dim array");
      for (int k = 0; k < dim; ++k)
        comps[i].push_back(component_expr(rows[i][k], dim, "metric"));
    }
    return MetricField::from_expressions(comps);
  }
  fail(Code::ValidationError, "metric spec needs 'builtin' or 'components'");
}

OneFormField oneform_from_json(const Json& j, int dim) {
  if (!j.contains("components"))
    fail(Code::ValidationError, "oneform spec needs 'components'");
  const Json& comps = j["components"];
  if (!comps.is_array() || static_cast<int>(comps.size()) != dim)
    fail(Code::ValidationError, "oneform components must have length dim");
  bool all_const = true;
  for (const auto& c : comps)
    if (!c.is_number()) all_const = false;
  if (all_const) return OneFormField::constant(vec_from_json(comps, dim, "oneform components"));
  std::vector<Expr> ex;
  for (int i = 0; i < dim; ++i) ex.push_back(component_expr(comps[i], dim, "oneform"));
  return OneFormField::from_expressions(ex);
}

PsiSpec psi_from_json_inner(const Json& j) {
  if (!j.contains("family")) fail(Code::ValidationError, "psi spec needs 'family'");
  std::string family = j["family"].get<std::string>();
  if (family == "lorentzian") return PsiSpec::lorentzian(number_or(j, "kappa", 1.0));
  if (family == "randers") return PsiSpec::randers();
  if (family == "bogoslovsky-kropina" || family == "bogoslovsky")
    return PsiSpec::bogoslovsky_kropina(require_number(j, "q"));
  if (family == "kundt")
    return PsiSpec::kundt(require_number(j, "k"), require_number(j, "m"), require_number(j, "p"));
  if (family == "exponential") {
    if (!j.contains("P_expr") || !j["P_expr"].is_string())
      fail(Code::ValidationError, "exponential family needs 'P_expr'");
    return PsiSpec::exponential(j["P_expr"].get<std::string>(), number_or(j, "bb", 0.0));
  }
  if (family == "maxwell-boltzmann")
    return PsiSpec::maxwell_boltzmann(number_or(j, "kappa", 1.0), number_or(j, "bb", 1.0));
  if (family == "symmetry")
    return PsiSpec::symmetry_family(number_or(j, "c", 1.0), require_number(j, "lambda2"),
                                    require_number(j, "mu1"), require_number(j, "mu2"));
  fail(Code::ValidationError, "unknown psi family '" + family + "'");
}

// family invariants surface as config validation failures here
PsiSpec psi_from_json(const Json& j) {
  try {
    return psi_from_json_inner(j);
  } catch (const Error& e) {
    if (e.code() == Code::InvalidParams) fail(Code::ValidationError, e.what());
    throw;
  }
}

}  // namespace

RunConfig::RunConfig()
    : metric(MetricField::minkowski(4)),
      oneform(OneFormField::constant(Vec::Zero(4))),
      psi(PsiSpec::lorentzian(1.0)) {}

std::vector<Vec> RunConfig::resolve_points(uint64_t seed) const {
  if (!point_list.empty()) return point_list;
  std::vector<Vec> pts;
  for (int i = 0; i < box_count; ++i) {
    Rng rng = Rng::substream(seed ^ 0x706f696e7473ULL, static_cast<uint64_t>(i));
    Vec x(dim);
    for (int k = 0; k < dim; ++k) x[k] = rng.next_in(box_min[k], box_max[k]);
    pts.push_back(x);
  }
  return pts;
}

Json RunConfig::to_json() const {
  Json j;
  j["dimension"] = dim;
  j["metric"] = metric_json;
  j["oneform"] = oneform_json;
  j["psi"] = psi_json;
  j["points"] = points_json;
  j["sampling"] = {{"n_samples", sampling.n_samples},
                   {"rng_seed", sampling.rng_seed},
                   {"s_grid_size", sampling.s_grid_size},
                   {"s_probe_max", sampling.s_probe_max},
                   {"strict_eps", sampling.strict_eps}};
  if (reference_timelike) {
    Json r = Json::array();
    for (int i = 0; i < reference_timelike->size(); ++i) r.push_back((*reference_timelike)[i]);
    j["reference_timelike"] = r;
  }
  if (killing) {
    Json k;
    k["xi"] = killing->xi_exprs;
    if (killing->has_params) {
      if (killing->params.kappa) k["kappa"] = *killing->params.kappa;
      k["lambda2"] = killing->params.lambda2;
      k["mu1"] = killing->params.mu1;
      k["mu2"] = killing->params.mu2;
      k["c"] = killing->params.c;
    }
    k["residual_tol"] = killing->residual_tol;
    j["killing"] = k;
  }
  j["output"] = output;
  j["verbosity"] = verbosity;
  return j;
}

RunConfig parse_config(const Json& j) {
  RunConfig cfg;
  if (j.contains("dimension")) {
    if (!j["dimension"].is_number_integer())
      fail(Code::ValidationError, "dimension must be an integer");
    cfg.dim = j["dimension"].get<int>();
  }
  if (cfg.dim < 2 || cfg.dim > 8)
    fail(Code::ValidationError, "dimension must be between 2 and 8");

  if (!j.contains("metric")) fail(Code::ValidationError, "config needs a 'metric' section");
  cfg.metric_json = j["metric"];
  cfg.metric = metric_from_json(cfg.metric_json, cfg.dim);

  if (!j.contains("oneform")) fail(Code::ValidationError, "config needs a 'oneform' section");
  cfg.oneform_json = j["oneform"];
  cfg.oneform = oneform_from_json(cfg.oneform_json, cfg.dim);

  if (!j.contains("psi")) fail(Code::ValidationError, "config needs a 'psi' section");
  cfg.psi_json = j["psi"];
  cfg.psi = psi_from_json(cfg.psi_json);

  if (j.contains("points")) {
    cfg.points_json = j["points"];
    const Json& p = cfg.points_json;
    if (p.contains("list")) {
      for (const auto& row : p["list"])
        cfg.point_list.push_back(vec_from_json(row, cfg.dim, "point"));
      if (cfg.point_list.empty()) fail(Code::ValidationError, "points.list must be nonempty");
    } else if (p.contains("box")) {
      cfg.box_min = vec_from_json(p["box"]["min"], cfg.dim, "points.box.min");
      cfg.box_max = vec_from_json(p["box"]["max"], cfg.dim, "points.box.max");
      for (int i = 0; i < cfg.dim; ++i)
        if (!(cfg.box_min[i] <= cfg.box_max[i]))
          fail(Code::ValidationError, "points.box.min must be <= points.box.max");
      if (!p.contains("count") || !p["count"].is_number_integer() || p["count"].get<int>() < 1)
        fail(Code::ValidationError, "points.box needs a positive integer 'count'");
      cfg.box_count = p["count"].get<int>();
      cfg.has_box = true;
    } else {
      fail(Code::ValidationError, "points needs 'list' or 'box'");
    }
  } else {
    cfg.points_json = Json{{"list", Json::array({Json::array({0, 0, 0, 0})})}};
    cfg.point_list.push_back(Vec::Zero(cfg.dim));
  }

  if (j.contains("sampling")) {
    const Json& s = j["sampling"];
    cfg.sampling.n_samples = static_cast<int>(number_or(s, "n_samples", 1000));
    if (cfg.sampling.n_samples < 1) fail(Code::ValidationError, "n_samples must be >= 1");
    if (s.contains("rng_seed")) cfg.sampling.rng_seed = s["rng_seed"].get<uint64_t>();
    cfg.sampling.s_grid_size = static_cast<int>(number_or(s, "s_grid_size", 256));
    cfg.sampling.s_probe_max = number_or(s, "s_probe_max", 1e6);
    if (!(cfg.sampling.s_probe_max > 1)) fail(Code::ValidationError, "s_probe_max must be > 1");
    cfg.sampling.strict_eps = number_or(s, "strict_eps", 1e-9);
  }

  if (j.contains("reference_timelike"))
    cfg.reference_timelike = vec_from_json(j["reference_timelike"], cfg.dim, "reference_timelike");

  if (j.contains("killing")) {
    const Json& k = j["killing"];
    KillingSection ks;
    if (!k.contains("xi") || !k["xi"].is_array() ||
        static_cast<int>(k["xi"].size()) != cfg.dim)
      fail(Code::ValidationError, "killing.xi must be an array of dim expressions");
    auto names = coordinate_names(cfg.dim);
    for (const auto& comp : k["xi"]) {
      if (comp.is_number())
        ks.xi_exprs.push_back(Json(comp).dump());
      else if (comp.is_string())
        ks.xi_exprs.push_back(comp.get<std::string>());
      else
        fail(Code::ValidationError, "killing.xi components must be numbers or strings");
      Expr::parse(ks.xi_exprs.back(), names);  // validate eagerly
    }
    if (k.contains("lambda2") || k.contains("mu1") || k.contains("mu2")) {
      ks.has_params = true;
      ks.params.lambda2 = require_number(k, "lambda2");
      ks.params.mu1 = require_number(k, "mu1");
      ks.params.mu2 = require_number(k, "mu2");
      ks.params.c = number_or(k, "c", 1.0);
      if (k.contains("kappa")) ks.params.kappa = k["kappa"].get<double>();
      double scale = std::max({std::abs(ks.params.mu1), std::abs(ks.params.lambda2), 1.0});
      if (std::abs(ks.params.mu1 - 2.0 * ks.params.lambda2) <= 1e-14 * scale &&
          ks.params.mu2 == 0.0)
        fail(Code::ValidationError, "killing params: mu1 = 2*lambda2 with mu2 = 0 is excluded");
    }
    ks.residual_tol = number_or(k, "residual_tol", 1e-6);
    cfg.killing = ks;
  }

  if (j.contains("output")) {
    cfg.output = j["output"].get<std::string>();
    if (cfg.output != "json" && cfg.output != "csv" && cfg.output != "both")
      fail(Code::ValidationError, "output must be json, csv, or both");
  }
  if (j.contains("verbosity")) cfg.verbosity = j["verbosity"].get<int>();
  return cfg;
}

RunConfig parse_config_text(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    fail(Code::ParseError, std::string("config JSON: ") + e.what());
  }
  return parse_config(j);
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Code::ParseError, "cannot read config file '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_config_text(text);
}

}  // namespace abf
