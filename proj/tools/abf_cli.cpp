// Command-line front end. Everything substantive happens behind the C API in
// libabfinsler; this file only parses arguments, merges flag overrides into the
// config JSON, and formats output.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "abf/abfinsler.h"

namespace {

using nlohmann::json;

int fail_with(abf_status st) {
  json err = {{"error", {{"code", abf_status_name(st)}, {"message", abf_last_error()}}}};
  std::cerr << err.dump(2) << "\n";
  return 2;
}

std::vector<double> parse_csv_doubles(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
  return out;
}

struct CommonOpts {
  std::string config_path;
  std::string out_path;
  std::string format = "json";
  uint64_t seed = 0;
  bool seed_set = false;
  int samples = 0;
  std::string xi;
};

json load_config(const CommonOpts& opt) {
  std::ifstream in(opt.config_path);
  if (!in) throw CLI::ValidationError("--config", "cannot read " + opt.config_path);
  json cfg = json::parse(in, nullptr, true, true);  // allow comments
  if (opt.seed_set) cfg["sampling"]["rng_seed"] = opt.seed;
  if (opt.samples > 0) cfg["sampling"]["n_samples"] = opt.samples;
  if (!opt.format.empty()) cfg["output"] = opt.format;
  if (!opt.xi.empty()) {
    json comps = json::array();
    std::stringstream ss(opt.xi);
    std::string tok;
    while (std::getline(ss, tok, ',')) comps.push_back(tok);
    cfg["killing"]["xi"] = comps;
  }
  return cfg;
}

int emit(abf_report* rep, const CommonOpts& opt) {
  const char* json_text = abf_report_json(rep);
  const char* csv_text = abf_report_csv(rep);

  std::ostream* os = &std::cout;
  std::ofstream file;
  if (!opt.out_path.empty()) {
    file.open(opt.out_path);
    if (!file) {
      std::cerr << "cannot write " << opt.out_path << "\n";
      abf_report_destroy(rep);
      return 2;
    }
    os = &file;
  }

  if (opt.format == "csv") {
    if (!csv_text) {
      std::cerr << "this subcommand has no tabular payload; use --format json\n";
      abf_report_destroy(rep);
      return 2;
    }
    *os << csv_text;
  } else if (opt.format == "both") {
    *os << json_text << "\n";
    if (csv_text) *os << csv_text;
  } else {
    *os << json_text << "\n";
  }
  int verdict = abf_report_verdict(rep);
  abf_report_destroy(rep);
  return verdict == 0 ? 0 : 1;
}

int run_with_model(const CommonOpts& opt,
                   abf_status (*runner)(abf_model*, abf_report**)) {
  json cfg;
  try {
    cfg = load_config(opt);
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  abf_model* model = nullptr;
  abf_status st = abf_model_create(cfg.dump().c_str(), &model);
  if (st != ABF_OK) return fail_with(st);
  abf_report* rep = nullptr;
  st = runner(model, &rep);
  abf_model_destroy(model);
  if (st != ABF_OK) return fail_with(st);
  return emit(rep, opt);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"(alpha,beta)-metric Finsler spacetime toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(abf_version()));

  CommonOpts opt;
  std::string x_text = "0,0,0,0", v_text;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    if (needs_config)
      sub->add_option("--config", opt.config_path, "JSON configuration file")->required();
    sub->add_option("--seed", opt.seed, "RNG seed override")->each([&](const std::string&) {
      opt.seed_set = true;
    });
    sub->add_option("--samples", opt.samples, "cone samples per point override");
    sub->add_option("--out", opt.out_path, "write the report here instead of stdout");
    sub->add_option("--format", opt.format, "json | csv | both")->default_str("json");
  };

  CLI::App* tensor = app.add_subcommand(
      "tensor", "fundamental tensor, determinant, inverse and signature at one (x, v)");
  add_common(tensor, true);
  tensor->add_option("--x", x_text, "point coordinates, comma separated");
  tensor->add_option("--v", v_text, "tangent vector components, comma separated")->required();

  CLI::App* check = app.add_subcommand(
      "check", "sample the cones and test the spacetime conditions");
  add_common(check, true);

  CLI::App* classify =
      app.add_subcommand("classify", "analytic spacetime classification per probe point");
  add_common(classify, true);

  CLI::App* killing =
      app.add_subcommand("killing", "Killing-field residuals and symmetry classification");
  add_common(killing, true);
  killing->add_option("--xi", opt.xi,
                      "vector field components (expressions in x0..x3), comma separated");

  CLI::App* selftest = app.add_subcommand("selftest", "run the full acceptance suite");
  add_common(selftest, false);

  CLI11_PARSE(app, argc, argv);

  if (selftest->parsed()) {
    abf_report* rep = nullptr;
    abf_status st = abf_run_selftest(opt.seed, &rep);
    if (st != ABF_OK) return fail_with(st);
    return emit(rep, opt);
  }
  if (tensor->parsed()) {
    json cfg;
    try {
      cfg = load_config(opt);
    } catch (const std::exception& e) {
      std::cerr << e.what() << "\n";
      return 2;
    }
    abf_model* model = nullptr;
    abf_status st = abf_model_create(cfg.dump().c_str(), &model);
    if (st != ABF_OK) return fail_with(st);
    std::vector<double> x, v;
    try {
      x = parse_csv_doubles(x_text);
      v = parse_csv_doubles(v_text);
    } catch (const std::exception&) {
      std::cerr << "--x/--v must be comma-separated numbers\n";
      abf_model_destroy(model);
      return 2;
    }
    if (x.size() != v.size()) {
      std::cerr << "--x and --v must have the same length\n";
      abf_model_destroy(model);
      return 2;
    }
    abf_report* rep = nullptr;
    st = abf_run_tensor(model, x.data(), v.data(), v.size(), &rep);
    abf_model_destroy(model);
    if (st != ABF_OK) return fail_with(st);
    return emit(rep, opt);
  }
  if (check->parsed()) return run_with_model(opt, abf_run_check);
  if (classify->parsed()) return run_with_model(opt, abf_run_classify);
  if (killing->parsed()) return run_with_model(opt, abf_run_killing);
  return 2;
}
