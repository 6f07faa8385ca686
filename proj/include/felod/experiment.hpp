#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "felod/methods.hpp"
#include "felod/norms.hpp"

namespace felod {

enum class CoefficientKind { PeriodicA1, PeriodicWell, LogNormal, Channels, Constant, File };

struct CoefficientSpec {
  CoefficientKind kind = CoefficientKind::PeriodicA1;
  double epsilon = 0.2;
  RandomFieldParams random;
  double value = 1.0;  ///< for Constant
  std::filesystem::path file;  ///< for File, read with read_grid_field
};

CoefficientField make_coefficient(const CoefficientSpec& spec, int fine_cells);

/// Flat key = value experiment description; see README for the schema.
struct ExperimentConfig {
  std::string experiment = "custom";
  std::string scale = "desk";  ///< "full" runs need RunOptions::full_scale
  Domain domain = Domain::UnitSquare;
  std::vector<double> H;       ///< several values make a convergence sweep
  double h = 0.0;
  double gamma0 = 10.0;
  std::vector<int> L;          ///< explicit levels (used when L0 is 0)
  double L0 = 0.0;             ///< when positive, L = choose_L(H, h, L0)
  CoefficientSpec coefficient;
  Omega1Region omega1;
  std::vector<Well> wells;     ///< nonempty: point sources instead of f = 1
  std::vector<Method> methods{Method::FeLodm, Method::Lodm};
  std::vector<std::string> regions{"omega", "omega1", "omega2"};
  bool export_solutions = false;
};

/// Parses "key = value" lines ('#' starts a comment). Throws std::invalid_argument on unknown keys
/// or malformed values.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Mesh sizes are written as decimals or as 2^-k.
double parse_size(const std::string& text);

struct RunOptions {
  std::filesystem::path outdir = "out";
  bool full_scale = false;
  int workers = 1;               ///< concurrent sweep points
  bool use_cache = true;         ///< reference solutions cached under outdir/cache
};

struct ErrorRow {
  std::string method;  ///< e.g. "fe-lodm[H=0.125,L=2]"
  std::string region;
  std::string norm;    ///< energy | l2 | linf
  double value = 0.0;
};

struct ConvergenceRow {
  double H = 0.0;
  int L = 0;
  double energy = 0.0;
  double l2 = 0.0;
  double linf = 0.0;
};

struct WbpRow {
  std::string method;
  std::vector<double> wbp;
};

struct SlopeFit {
  double slope = 0.0;
  double r2 = 0.0;
};

struct ExperimentResult {
  std::vector<ErrorRow> errors;
  std::vector<ConvergenceRow> convergence;  ///< FE-LODM (or LODM without Omega_1) per H
  std::vector<WbpRow> wbp;
  std::vector<std::pair<std::string, double>> seconds;  ///< wall time per method label, run order
  std::vector<std::pair<std::string, int>> dofs;        ///< solved system size per method label
  std::vector<std::string> notes;
  SlopeFit energy_slope;
  SlopeFit l2_slope;
};

/// Runs every method at every (H, L) point against the fine IPCDG reference and writes
/// errors.csv, convergence.csv (sweeps), wbp.txt (wells) and report.txt into options.outdir.
ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options);

/// Least-squares slope of log(error) against log(H); needs at least 3 positive points.
SlopeFit fit_convergence_slope(const std::vector<std::pair<double, double>>& points);

/// Reads a convergence CSV ("H,L,energy_rel,l2_rel,linf_rel") and fits both error columns.
std::pair<SlopeFit, SlopeFit> fit_convergence_csv(const std::filesystem::path& csv);

/// Experiment ids with a one-line description.
std::vector<std::pair<std::string, std::string>> experiment_catalog();

void write_errors_csv(std::ostream& out, const std::vector<ErrorRow>& rows);
void write_convergence_csv(std::ostream& out, const std::vector<ConvergenceRow>& rows);

}  // namespace felod
