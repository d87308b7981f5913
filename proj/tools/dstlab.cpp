// dstlab — simulate / verify / backlund / baxter front end.
//
//   dstlab verify --suite all --seed 1 --json
//   dstlab simulate --n 6 --bc quasi --xi 2 --t-final 2 --out traj.csv
//
// Options may also come from --config FILE.json (keys are the long flag names
// with dashes or underscores); anything given on the command line wins.

#include <fstream>
#include <functional>
#include <iostream>
#include <map>

#include <CLI11.hpp>
#include <json.hpp>

#include "dst/harness.hpp"

namespace {

using nlohmann::json;

std::string key_of(std::string k) {
  for (char& c : k)
    if (c == '_') c = '-';
  return k;
}

}  // namespace

int main(int argc, char** argv) {
  dst::RunConfig cfg;
  CLI::App app{"discrete self-trapping chain: simulation and identity checks", "dstlab"};
  app.set_version_flag("--version", std::string(dst::kArtifactVersion));
  app.require_subcommand(1);

  std::string config_path;
  int n = 0;
  std::map<std::string, std::function<void(const json&)>> setters;

  // every subcommand accepts the full flag set; irrelevant ones are ignored
  auto add_common = [&](CLI::App* sub) {
    auto reg = [&](const std::string& name, CLI::Option*, std::function<void(const json&)> set) {
      setters[name] = std::move(set);
    };
    reg("n", sub->add_option("--n", n, "chain length N"), [&](const json& v) { n = v.get<int>(); });
    reg("bc", sub->add_option("--bc", cfg.bc, "boundary condition")->check(CLI::IsMember({"periodic", "quasi", "open"})),
        [&](const json& v) { cfg.bc = v.get<std::string>(); });
    reg("xi", sub->add_option("--xi", cfg.xi, "quasiperiodic twist"), [&](const json& v) { cfg.xi = v.get<double>(); });
    reg("theta-minus", sub->add_option("--theta-minus", cfg.theta_minus, "open-chain left coupling"),
        [&](const json& v) { cfg.theta_minus = v.get<double>(); });
    reg("theta-plus", sub->add_option("--theta-plus", cfg.theta_plus, "open-chain right coupling"),
        [&](const json& v) { cfg.theta_plus = v.get<double>(); });
    reg("xi-minus", sub->add_option("--xi-minus", cfg.xi_minus, "quantum boundary parameter"),
        [&](const json& v) { cfg.xi_minus = v.get<double>(); });
    reg("xi-plus", sub->add_option("--xi-plus", cfg.xi_plus, "quantum boundary parameter"),
        [&](const json& v) { cfg.xi_plus = v.get<double>(); });
    reg("eta", sub->add_option("--eta", cfg.eta, "quantum deformation"), [&](const json& v) { cfg.eta = v.get<double>(); });
    reg("sigma", sub->add_option("--sigma", cfg.sigma, "Backlund parameter"),
        [&](const json& v) { cfg.sigma = v.get<double>(); });
    reg("m", sub->add_option("--m", cfg.m, "magnon number"), [&](const json& v) { cfg.m = v.get<int>(); });
    reg("dt", sub->add_option("--dt", cfg.dt, "time step"), [&](const json& v) { cfg.dt = v.get<double>(); });
    reg("t-final", sub->add_option("--t-final", cfg.t_final, "final time"),
        [&](const json& v) { cfg.t_final = v.get<double>(); });
    reg("amplitude", sub->add_option("--amplitude", cfg.amplitude, "initial data ~ U(-a, a)"),
        [&](const json& v) { cfg.amplitude = v.get<double>(); });
    reg("seed", sub->add_option("--seed", cfg.seed, "64-bit seed"),
        [&](const json& v) { cfg.seed = v.get<std::uint64_t>(); });
    reg("suite", sub->add_option("--suite", cfg.suite, "classical|rmatrix|backlund|quantum|baxter|all"),
        [&](const json& v) { cfg.suite = v.get<std::string>(); });
    reg("tol-scale", sub->add_option("--tol-scale", cfg.tol_scale, "multiply every tolerance"),
        [&](const json& v) { cfg.tol_scale = v.get<double>(); });
    reg("jobs", sub->add_option("--jobs", cfg.jobs, "worker threads"), [&](const json& v) { cfg.jobs = v.get<int>(); });
    reg("force", sub->add_flag("--force", cfg.force, "lift cost guards"), [&](const json& v) { cfg.force = v.get<bool>(); });
    reg("out", sub->add_option("--out", cfg.out, "CSV path (simulate) or report copy"),
        [&](const json& v) { cfg.out = v.get<std::string>(); });
    reg("json", sub->add_flag("--json", cfg.json, "print the JSON report instead of text"),
        [&](const json& v) { cfg.json = v.get<bool>(); });
    reg("inject-wrong-k", sub->add_flag("--inject-wrong-k", cfg.inject_wrong_k, "test hook for the rmatrix suite"),
        [&](const json& v) { cfg.inject_wrong_k = v.get<bool>(); });
    sub->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  };

  for (const char* name : {"simulate", "verify", "backlund", "baxter"}) {
    auto* sub = app.add_subcommand(name);
    add_common(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return dst::exit_code::usage;
  }

  CLI::App* sub = app.get_subcommands().front();
  cfg.subcommand = sub->get_name();

  auto given = [&](const std::string& key) { return sub->get_option("--" + key)->count() > 0; };

  if (!config_path.empty()) {
    try {
      std::ifstream in(config_path);
      const json file = json::parse(in);
      if (!file.is_object()) throw std::runtime_error("config must be a JSON object");
      for (const auto& [k, v] : file.items()) {
        const std::string key = key_of(k);
        auto it = setters.find(key);
        if (it == setters.end()) throw std::runtime_error("unknown config key '" + k + "'");
        if (!given(key)) it->second(v);
      }
    } catch (const std::exception& e) {
      std::cerr << "dstlab: bad config: " << e.what() << "\n";
      return dst::exit_code::usage;
    }
  }
  if (given("n") || n != 0) cfg.n = n;

  const dst::RunOutcome o = dst::run(cfg);
  if (cfg.subcommand == "simulate") {
    if (!cfg.out.empty() && !o.csv.empty()) {
      std::ofstream f(cfg.out);
      f << o.csv;
    }
  } else if (!cfg.out.empty()) {
    std::ofstream f(cfg.out);
    f << o.report.dump(2) << "\n";
  }
  std::cout << (cfg.json ? o.report.dump(2) + "\n" : dst::render_text(o.report));
  if (o.report.contains("error") && !cfg.json)
    std::cerr << "dstlab: " << o.report["error"]["message"].get<std::string>() << "\n";
  return o.exit_code;
}
