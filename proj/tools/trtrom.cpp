// Command-line pipeline: run-fom, make-basis, run-rom, run-baseline, compare.

#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "trtrom/baselines.hpp"
#include "trtrom/compare.hpp"
#include "trtrom/config.hpp"
#include "trtrom/error.hpp"
#include "trtrom/fom.hpp"
#include "trtrom/io.hpp"
#include "trtrom/pod.hpp"
#include "trtrom/rom.hpp"

namespace fs = std::filesystem;
using namespace trtrom;

namespace {

enum ExitCode : int { kOk = 0, kUsage = 1, kNumerical = 2 };

struct Common {
  std::string config;
  std::string out;

  RunConfig load() const { return config.empty() ? RunConfig::fleck_cummings() : RunConfig::load(config); }
  fs::path dir(const RunConfig& c) const { return out.empty() ? resolve_output_dir(c) : fs::path(out); }
};

fs::path stage_file(const fs::path& dir, const std::string& stem, std::size_t stage, const char* ext) {
  return dir / (stem + "_stage" + std::to_string(stage + 1) + ext);
}

void summarize(const char* what, const RunRecord& rec) {
  std::size_t outer = 0;
  double balance = 0.0;
  for (const auto& s : rec.steps) {
    outer += s.outer_iterations;
    balance = std::max(balance, s.energy_balance);
  }
  std::printf("%s: %zu steps, %zu outer iterations, max energy imbalance %.3g, %.2f s\n", what, rec.steps.size(),
              outer, balance, rec.wall_seconds);
}

int run_fom_cmd(const Common& opt) {
  const RunConfig cfg = opt.load();
  const fs::path dir = opt.dir(cfg);
  const Problem problem = cfg.problem();
  const FomResult result = run_fom(problem);
  write_fields_csv(dir / "fom_fields.csv", result.record, problem.mesh);
  write_history_csv(dir / "fom_history.csv", result.record);
  for (const auto& db : result.databases) {
    const fs::path p = stage_file(dir, "snapshots", db.stage, ".bin");
    write_database(p, db);
    std::printf("wrote %s (%zu columns)\n", p.c_str(), db.columns());
  }
  summarize("fom", result.record);
  return kOk;
}

std::vector<PodBasis> load_bases(const Problem& problem, const fs::path& dir) {
  const std::uint64_t fp = grid_fingerprint(problem.mesh, problem.quadrature, problem.material.groups());
  std::vector<PodBasis> bases;
  for (std::size_t s = 0; s < problem.time.stage_count(); ++s) bases.push_back(read_basis(stage_file(dir, "basis", s, ".bin"), fp));
  return bases;
}

int make_basis_cmd(const Common& opt) {
  const RunConfig cfg = opt.load();
  const fs::path dir = opt.dir(cfg);
  const Problem problem = cfg.problem();
  const std::uint64_t fp = grid_fingerprint(problem.mesh, problem.quadrature, problem.material.groups());
  const WeightOperator w(problem.mesh, problem.quadrature, problem.material.group_count());
  std::vector<Eigen::VectorXd> spectra;
  for (std::size_t s = 0; s < problem.time.stage_count(); ++s) {
    const SnapshotDatabase db = read_database(stage_file(dir, "snapshots", s, ".bin"), fp);
    const PodBasis basis = compute_pod_basis(db, w);
    write_basis(stage_file(dir, "basis", s, ".bin"), basis);
    spectra.push_back(weighted_singular_values(db, w));
    write_singular_values_csv(stage_file(dir, "singular_values", s, ".csv"), spectra.back());
    std::printf("stage %zu: %zu snapshots, numerical rank %zu\n", s + 1, db.columns(), basis.rank());
  }
  std::vector<double> eps;
  for (int k = 1; k <= 16; ++k) eps.push_back(std::pow(10.0, -k));
  write_ranks_csv(dir / "ranks_vs_eps.csv", eps, spectra);
  return kOk;
}

int run_rom_cmd(const Common& opt, std::optional<double> eps, const std::vector<std::size_t>& ranks_opt,
                const std::string& name) {
  RunConfig cfg = opt.load();
  if (eps) cfg.rom_eps = eps;
  if (!ranks_opt.empty()) cfg.rom_ranks = ranks_opt;
  cfg.validate();
  const fs::path dir = opt.dir(cfg);
  const Problem problem = cfg.problem();
  const std::vector<PodBasis> bases = load_bases(problem, dir);
  std::vector<std::size_t> ranks;
  if (!cfg.rom_ranks.empty()) {
    ranks = cfg.rom_ranks;
    if (ranks.size() != problem.time.stage_count())
      throw ConfigError("config key 'rom.ranks': expected " + std::to_string(problem.time.stage_count()) +
                        " entries, got " + std::to_string(ranks.size()));
  } else if (cfg.rom_eps) {
    ranks = ranks_for_eps(bases, *cfg.rom_eps);
  } else {
    throw ConfigError("config key 'rom.eps': run-rom needs --eps, --ranks, rom.eps or rom.ranks");
  }
  std::printf("ranks:");
  for (std::size_t r : ranks) std::printf(" %zu", r);
  std::printf("\n");
  const RunRecord rec = run_rom(problem, bases, ranks);
  write_fields_csv(dir / (name + "_fields.csv"), rec, problem.mesh);
  write_history_csv(dir / (name + "_history.csv"), rec);
  summarize(name.c_str(), rec);
  return kOk;
}

int run_baseline_cmd(const Common& opt, const std::string& kind_name) {
  const BaselineKind kind = parse_baseline_kind(kind_name);
  const RunConfig cfg = opt.load();
  const fs::path dir = opt.dir(cfg);
  const Problem problem = cfg.problem();
  const RunRecord rec = run_baseline(problem, kind);
  write_fields_csv(dir / (to_string(kind) + "_fields.csv"), rec, problem.mesh);
  write_history_csv(dir / (to_string(kind) + "_history.csv"), rec);
  summarize(to_string(kind).c_str(), rec);
  return kOk;
}

int compare_cmd(const std::string& run, const std::string& reference, const std::string& output) {
  const ErrorReport report = compare_runs(read_fields_csv(run), read_fields_csv(reference));
  const fs::path out(output);
  write_errors_csv(out, report);
  fs::path summary = out;
  summary.replace_filename(out.stem().string() + "_summary.csv");
  write_error_summary_csv(summary, report);
  std::printf("max error: T %.3e  E %.3e\n", report.max_temperature, report.max_energy);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multigroup thermal radiative transfer: full-order MLQD solver and POD-Galerkin reduced model"};
  app.require_subcommand(1);

  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", common.config, "INI configuration (default: Fleck-Cummings test)")
        ->check(CLI::ExistingFile);
    sub->add_option("-o,--out", common.out, "Output directory (overrides config and TRTROM_OUT)");
  };

  auto* fom = app.add_subcommand("run-fom", "Full-order run; writes fields, history and snapshot databases");
  add_common(fom);

  auto* basis = app.add_subcommand("make-basis", "POD bases, full singular-value spectra and rank-vs-eps table");
  add_common(basis);

  auto* rom = app.add_subcommand("run-rom", "Reduced-order run from stored bases");
  add_common(rom);
  std::optional<double> eps;
  std::vector<std::size_t> ranks;
  std::string rom_name = "rom";
  auto* eps_opt = rom->add_option("--eps", eps, "Rank criterion threshold");
  rom->add_option("--ranks", ranks, "Explicit per-stage ranks")->delimiter(',')->excludes(eps_opt);
  rom->add_option("--name", rom_name, "Output file prefix")->capture_default_str();

  auto* baseline = app.add_subcommand("run-baseline", "P1 or flux-limited diffusion run");
  add_common(baseline);
  std::string kind;
  baseline->add_option("--kind", kind, "p1 or fld")->required()->check(CLI::IsMember({"p1", "fld"}));

  auto* cmp = app.add_subcommand("compare", "Relative 2-norm errors of a run against a reference");
  std::string run_csv;
  std::string ref_csv;
  std::string out_csv = "errors.csv";
  cmp->add_option("--run", run_csv, "Fields CSV of the run")->required()->check(CLI::ExistingFile);
  cmp->add_option("--reference", ref_csv, "Fields CSV of the reference")->required()->check(CLI::ExistingFile);
  cmp->add_option("--output", out_csv, "Errors CSV to write")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*fom) return run_fom_cmd(common);
    if (*basis) return make_basis_cmd(common);
    if (*rom) return run_rom_cmd(common, eps, ranks, rom_name);
    if (*baseline) return run_baseline_cmd(common, kind);
    if (*cmp) return compare_cmd(run_csv, ref_csv, out_csv);
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kNumerical;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  }
  return kUsage;
}
