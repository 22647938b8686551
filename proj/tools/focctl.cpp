#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "foc/errors.hpp"
#include "foc/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Fractional optimal control scenario runner"};
  std::string mode;
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  app.add_option("mode", mode, "fundamental | simulate | openloop | feedback | sweep")
      ->required()
      ->check(CLI::IsMember(foc::kModes));
  app.add_option("--config", config_path, "JSON scenario file")->required();
  app.add_option("--out", out_dir, "output directory (default: output.dir of the config)");
  auto* seed_opt = app.add_option("--seed", seed, "random seed (default: seed of the config)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? foc::kExitOk : foc::kExitConfig;
  }

  std::ifstream in(config_path, std::ios::binary);
  if (!in) {
    std::cerr << "cannot read " << config_path << '\n';
    return foc::kExitConfig;
  }
  std::stringstream buf;
  buf << in.rdbuf();

  foc::ScenarioConfig cfg;
  try {
    cfg = foc::parse_config(buf.str());
  } catch (const foc::ConfigError& e) {
    for (const auto& err : e.errors()) std::cerr << "config error: " << err << '\n';
    return foc::kExitConfig;
  }
  if (!cfg.mode.empty() && cfg.mode != mode) {
    std::cerr << "config error: mode: config says '" << cfg.mode << "' but '" << mode << "' was requested\n";
    return foc::kExitConfig;
  }
  if (*seed_opt) cfg.seed = seed;
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  return foc::run_scenario(cfg, mode, cfg.out_dir);
}
