#include <cstdio>
#include <exception>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "chase/errors.hpp"
#include "chase/harness.hpp"
#include "chase/toml_lite.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw chase::IoError("cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chase-cs: adaptive chasing sampling experiments"};
  app.require_subcommand(1);

  CLI::App* run = app.add_subcommand("run", "run a study");
  std::string config_path, study, algorithm, preset, out_dir;
  std::optional<int> k;
  std::optional<double> snr_db;
  std::optional<long long> seed;
  std::optional<int> trials;
  run->add_option("--config", config_path, "config file (.toml or .json)");
  run->add_option("--study", study,
                  "single_run|sensors_vs_k|start_sweep|alpha_sweep|"
                  "convergence|noise");
  run->add_option("--k", k, "restrict the sparsity sweep to one value");
  run->add_option("--snr-db", snr_db, "measurement SNR in dB");
  run->add_option("--algorithm", algorithm, "ic|cc|baseline");
  run->add_option("--seed", seed, "base seed");
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--preset", preset, "desk|paper")
      ->check(CLI::IsMember({"desk", "paper"}));
  run->add_option("--trials", trials, "trials per sweep point");

  CLI11_PARSE(app, argc, argv);

  try {
    chase::ExperimentConfig cfg = chase::desk_preset();

    nlohmann::json file_json;
    if (!config_path.empty()) {
      const std::string text = read_file(config_path);
      if (ends_with(config_path, ".toml")) {
        file_json = chase::toml_lite_parse(text);
      } else {
        try {
          file_json = nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception& e) {
          throw chase::ConfigError(std::string("config parse error: ") +
                                   e.what());
        }
      }
      if (file_json.contains("preset")) preset = file_json.at("preset");
    }
    if (preset == "paper") cfg = chase::paper_preset();
    if (!config_path.empty()) cfg = chase::config_from_json(file_json, cfg);

    if (!study.empty()) cfg.study = chase::study_from_string(study);
    if (k) cfg.k_list = {*k};
    if (snr_db) {
      cfg.snr_list = {*snr_db};
      cfg.run_snr_db = *snr_db;
    }
    if (!algorithm.empty())
      cfg.only_method = chase::method_from_string(algorithm);
    if (seed) cfg.base_seed = static_cast<std::uint64_t>(*seed);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (trials) cfg.trials_per_point = *trials;

    const chase::StudyResult result = chase::run_study(cfg);
    std::printf("study %s: %zu sweep points x %d trials -> %s\n",
                chase::to_string(cfg.study).c_str(), result.points.size(),
                cfg.trials_per_point, cfg.output_dir.c_str());
  } catch (const chase::IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return 3;
  } catch (const chase::Error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
