// boundary_lab: command line driver for the experiments in teichtrop/lab.hpp.
// Exit codes: 0 all PASS, 1 some FAIL, 2 configuration error.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "teichtrop/lab.hpp"

#ifndef TEICHTROP_DATA_DIR
#define TEICHTROP_DATA_DIR "data"
#endif

namespace {

using namespace teichtrop;
namespace fs = std::filesystem;

struct Flags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<double> tolerance;
  std::optional<int> steps;
  std::string curve;  // twist-limit: a1, a2, c or all
};

lab::ExperimentConfig make_config(lab::ExperimentKind kind, const Flags& f) {
  io::Config raw = f.config.empty() ? io::Config{} : io::Config::load(f.config);
  lab::ExperimentConfig cfg = lab::config_from(raw, kind, TEICHTROP_DATA_DIR);
  if (!f.out.empty()) cfg.output_dir = f.out;
  if (f.seed) cfg.seed = *f.seed;
  if (f.tolerance) {
    switch (kind) {
      case lab::ExperimentKind::TwistLimit: cfg.tol.angular = *f.tolerance; break;
      case lab::ExperimentKind::RepCheck:
        cfg.tol.trace = *f.tolerance;
        cfg.tol.relator = *f.tolerance;
        break;
      case lab::ExperimentKind::Amoeba:
      case lab::ExperimentKind::Bergman: cfg.tol.cluster = *f.tolerance; break;
      case lab::ExperimentKind::Intersect: break;
    }
  }
  if (f.steps) {
    if (kind == lab::ExperimentKind::TwistLimit) {
      cfg.twist_count = *f.steps;
    } else if (kind == lab::ExperimentKind::Amoeba || kind == lab::ExperimentKind::Bergman) {
      if (*f.steps < 0) throw Error(ErrorCode::InvalidArgument, "--steps must be non-negative");
      cfg.samples = static_cast<std::size_t>(*f.steps);
    }
  }
  cfg.validate();
  return cfg;
}

int run(lab::ExperimentKind kind, const Flags& f) {
  lab::ExperimentConfig cfg;
  try {
    cfg = make_config(kind, f);
  } catch (const Error& e) {
    std::cerr << "configuration error: " << to_string(e.code()) << ": " << e.message() << "\n";
    return 2;
  }
  try {
    bool pass = true;
    switch (kind) {
      case lab::ExperimentKind::TwistLimit: {
        std::vector<int> curves;
        if (f.curve.empty())
          curves = {cfg.twist_curve};
        else if (f.curve == "all")
          curves = {0, 1, 2};
        else
          curves = {lab::parse_curve_index(f.curve)};
        for (int c : curves) {
          cfg.twist_curve = c;
          const auto r = lab::run_twist_limit(cfg);
          lab::write_outputs(r, cfg.output_dir);
          std::cout << lab::summary(r);
          pass = pass && r.pass;
        }
        break;
      }
      case lab::ExperimentKind::RepCheck: {
        const auto r = lab::run_rep_check(cfg);
        lab::write_outputs(r, cfg.output_dir);
        std::cout << lab::summary(r);
        pass = r.pass;
        break;
      }
      case lab::ExperimentKind::Amoeba: {
        for (const fs::path& p : cfg.varieties) {
          const auto r = lab::run_variety(p, cfg);
          lab::write_outputs(r, cfg.output_dir, "amoeba_" + p.stem().string());
          std::cout << lab::summary(r);
          pass = pass && r.pass;
        }
        break;
      }
      case lab::ExperimentKind::Bergman: {
        const auto r = lab::run_demo_suite(cfg);
        lab::write_outputs(r, cfg.output_dir);
        std::cout << lab::summary(r);
        pass = r.pass;
        break;
      }
      case lab::ExperimentKind::Intersect: {
        const auto r = lab::run_intersect(cfg);
        lab::write_outputs(r, cfg.output_dir);
        std::cout << lab::summary(r);
        pass = r.pass;
        break;
      }
    }
    return pass ? 0 : 1;
  } catch (const Error& e) {
    std::cerr << to_string(e.code()) << ": " << e.message() << "\n";
    const bool config_problem = e.code() == ErrorCode::InvalidArgument || e.code() == ErrorCode::ParseError;
    return config_problem ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Experiments on the log-trace and Thurston compactifications of genus-2 Teichmueller space"};
  app.require_subcommand(1);
  Flags flags;
  std::optional<lab::ExperimentKind> chosen;

  auto add = [&](const std::string& name, const std::string& help, lab::ExperimentKind kind) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", flags.config, "key-value config file")->check(CLI::ExistingFile);
    sub->add_option("--out", flags.out, "output directory");
    sub->add_option("--seed", flags.seed, "random seed");
    sub->add_option("--tolerance", flags.tolerance, "main tolerance of the experiment");
    sub->add_option("--steps", flags.steps, "twist steps (twist-limit) or samples (amoeba, bergman)");
    if (kind == lab::ExperimentKind::TwistLimit) sub->add_option("--curve", flags.curve, "pants curve a1, a2, c or all");
    sub->callback([&chosen, kind] { chosen = kind; });
  };
  add("twist-limit", "scaled lengths vs scaled log-traces along a twist sequence", lab::ExperimentKind::TwistLimit);
  add("rep-check", "relator, trace reality and |tr| >= 2 on the embedding family", lab::ExperimentKind::RepCheck);
  add("amoeba", "sample one variety's amoeba and cluster its far directions", lab::ExperimentKind::Amoeba);
  add("bergman", "Bergman dimension probe on the demo suite", lab::ExperimentKind::Bergman);
  add("intersect", "formula vs geometric intersection numbers on the curve table", lab::ExperimentKind::Intersect);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  return run(*chosen, flags);
}
