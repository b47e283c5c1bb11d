// Batch front-end: runs the tasks of a JSON config and writes a JSON report.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "kstab/report.hpp"

namespace fs = std::filesystem;

namespace {

fs::path examples_dir() {
  if (const char* env = std::getenv("KSTAB_CONFIG_DIR")) return env;
  return KSTAB_CONFIG_DIR;
}

// A path that does not exist may name a bundled example, with or without ".json".
fs::path resolve_config(const std::string& arg) {
  if (fs::exists(arg)) return arg;
  for (const fs::path& candidate : {examples_dir() / arg, examples_dir() / (arg + ".json")})
    if (fs::exists(candidate)) return candidate;
  return arg;
}

int list_examples() {
  std::vector<fs::path> files;
  if (fs::is_directory(examples_dir()))
    for (const auto& e : fs::directory_iterator(examples_dir()))
      if (e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    std::string description;
    try {
      std::ifstream in(f);
      description = nlohmann::json::parse(in).value("description", "");
    } catch (const nlohmann::json::exception&) {
      description = "(unreadable)";
    }
    std::cout << f.stem().string() << "\t" << description << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Volumes, filtrations and stability invariants of big line bundles"};
  app.set_version_flag("--version", std::string(kstab::kToolkitVersion));
  bool list = false;
  app.add_flag("--list-examples", list, "List the bundled example configs");

  auto* run = app.add_subcommand("run", "Run the tasks of a config file");
  std::string config, out;
  std::vector<std::string> overrides;
  std::int64_t seed = -1;
  bool timing = false;
  run->add_option("config", config, "Config path or bundled example name")->required();
  run->add_option("--out", out, "Report path (default: stdout)");
  run->add_option("--tolerance-override", overrides, "key=value with key in quadrature, optimizer, gradient");
  run->add_option("--seed", seed, "Seed for multi-start optimization (overrides the config)")->check(CLI::NonNegativeNumber);
  run->add_flag("--timing", timing, "Record wall time per task (reports are then no longer byte-identical)");

  CLI11_PARSE(app, argc, argv);
  if (list) return list_examples();
  if (!*run) {
    std::cerr << app.help();
    return 2;
  }

  kstab::RunOptions options;
  options.timing = timing;
  if (seed >= 0) options.seed = static_cast<std::uint64_t>(seed);
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    double value = 0;
    try {
      if (eq == std::string::npos) throw std::invalid_argument("missing '='");
      std::size_t used = 0;
      value = std::stod(o.substr(eq + 1), &used);
      if (used != o.size() - eq - 1) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      std::cerr << "kstab: --tolerance-override expects key=value, got '" << o << "'\n";
      return 2;
    }
    options.tolerance_overrides.emplace_back(o.substr(0, eq), value);
  }

  const auto result = kstab::run_config_file(resolve_config(config), options);
  const std::string text = result.report.dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(out, std::ios::binary);
    if (!(f << text)) {
      std::cerr << "kstab: cannot write '" << out << "'\n";
      return 1;
    }
  }
  if (result.exit_code != 0 && !result.report.empty() && result.report.back().contains("error"))
    std::cerr << "kstab: " << result.report.back()["error"]["message"].get<std::string>() << "\n";
  return result.exit_code;
}
