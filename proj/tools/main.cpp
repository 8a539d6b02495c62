#include <cstdlib>
#include <algorithm>
#include <filesystem>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "becprobe/cli/config.hpp"
#include "becprobe/cli/runner.hpp"

namespace fs = std::filesystem;
using namespace becprobe::cli;

namespace {

fs::path preset_dir() {
  if (const char* env = std::getenv("BECPROBE_PRESET_DIR"); env && *env) return env;
  if (fs::is_directory(BECPROBE_PRESET_DIR)) return BECPROBE_PRESET_DIR;
  return BECPROBE_INSTALLED_PRESET_DIR;
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  std::error_code ec;
  for (const auto& e : fs::directory_iterator(preset_dir(), ec))
    if (e.path().extension() == ".yaml") names.push_back(e.path().stem().string());
  std::sort(names.begin(), names.end());
  return names;
}

int run(const Config& cfg, const fs::path& out_dir, int threads) {
  RunOptions opts;
  opts.out_dir = out_dir;
  opts.threads = threads;
  const auto summary = run_config(cfg, opts, std::cout);
  std::cout << "wrote " << summary.files.size() << " files to " << summary.directory.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Revival and photodetection scenarios for a condensate coupled to a probe field", "becprobe"};
  app.set_version_flag("--version", BECPROBE_VERSION);
  app.require_subcommand(1);

  std::string out_dir = "out";
  if (const char* env = std::getenv("BECPROBE_OUT_DIR"); env && *env) out_dir = env;
  int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  long long seed = 0;

  std::string config_path, preset;
  auto add_run_flags = [&](CLI::App* sub) {
    sub->add_option("--out-dir", out_dir, "Output root (default $BECPROBE_OUT_DIR or ./out)");
    sub->add_option("--threads", threads, "Products computed concurrently")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "Reserved; all computation is deterministic");
  };

  auto* run_cmd = app.add_subcommand("run", "Run a scenario config file");
  run_cmd->add_option("config", config_path, "YAML config")->required();
  add_run_flags(run_cmd);

  auto* preset_cmd = app.add_subcommand("preset", "Run a bundled preset");
  preset_cmd->add_option("name", preset, "Preset name, see list-presets")->required();
  add_run_flags(preset_cmd);

  auto* list_cmd = app.add_subcommand("list-presets", "List bundled presets");

  auto* validate_cmd = app.add_subcommand("validate", "Check a config file without running it");
  validate_cmd->add_option("config", config_path, "YAML config")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*list_cmd) {
      for (const auto& n : preset_names()) std::cout << n << "\n";
      return 0;
    }
    if (*validate_cmd) {
      const auto cfg = parse_config_file(config_path);
      std::cout << cfg.name << ": " << cfg.products.size() << " products ok\n";
      return 0;
    }
    if (*preset_cmd) {
      const fs::path path = preset_dir() / (preset + ".yaml");
      if (!fs::is_regular_file(path)) {
        std::cerr << "error: unknown preset '" << preset << "' (see list-presets)\n";
        return 2;
      }
      return run(parse_config_file(path.string()), out_dir, threads);
    }
    return run(parse_config_file(config_path), out_dir, threads);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
