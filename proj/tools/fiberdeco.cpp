// fiberdeco CLI: seeded, reproducible decoherence experiments writing CSV
// curves and JSON summaries. Exit codes: 0 success, 2 config error,
// 3 numerical/convergence error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "fiberdeco/experiments.hpp"

namespace {

void write_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + tmp + "'");
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

std::string key_table(const std::string& experiment) {
  std::string out = "Config keys (key = default  # description):\n";
  for (const auto& k : fiberdeco::config_keys(experiment)) {
    out += "  ";
    out += k.key;
    out += " = ";
    out += k.value;
    out += "  # ";
    out += k.help;
    out += "\n";
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fiberdeco: fiber-optic quantum decoherence experiments"};
  app.require_subcommand(0, 1);

  struct Options {
    std::string config_path;
    std::string out_prefix;
    std::uint64_t seed = 0;
    bool seed_given = false;
    bool dump_defaults = false;
  };

  std::map<std::string, Options> options;
  for (const std::string& name : fiberdeco::experiment_names()) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " experiment");
    Options& opt = options[name];
    sub->add_option("--config", opt.config_path, "config file (key = value lines)");
    sub->add_option("--out", opt.out_prefix, "output path prefix");
    sub->add_option("--seed", opt.seed, "override the config seed")
        ->each([&opt](const std::string&) { opt.seed_given = true; });
    sub->add_flag("--dump-defaults", opt.dump_defaults,
                  "print the default config and exit");
    sub->footer(key_table(name));
  }

  CLI11_PARSE(app, argc, argv);

  if (app.get_subcommands().empty()) {
    std::cout << app.help();
    return 0;
  }
  const std::string name = app.get_subcommands().front()->get_name();
  const Options& opt = options[name];

  try {
    if (opt.dump_defaults) {
      std::cout << fiberdeco::default_config_text(name);
      return 0;
    }
    fiberdeco::KeyValueConfig cfg;
    if (!opt.config_path.empty())
      cfg = fiberdeco::KeyValueConfig::parse_file(opt.config_path);
    if (opt.seed_given) cfg.set("seed", std::to_string(opt.seed));

    const fiberdeco::ExperimentOutput result = fiberdeco::run_experiment(name, cfg);
    const std::string prefix = opt.out_prefix.empty() ? name : opt.out_prefix;
    for (const auto& [suffix, content] : result.files) {
      const std::string path = prefix + "_" + suffix;
      write_atomic(path, content);
      std::cout << "wrote " << path << "\n";
    }
    return 0;
  } catch (const fiberdeco::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const fiberdeco::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
