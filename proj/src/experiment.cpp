#include "felod/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace felod {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Decimal, "a/b" or "2^-k".
double parse_number(const std::string& text) {
  const std::string t = trim(text);
  if (const auto caret = t.find('^'); caret != std::string::npos) {
    return std::pow(std::stod(t.substr(0, caret)), std::stod(t.substr(caret + 1)));
  }
  if (const auto slash = t.find('/'); slash != std::string::npos) {
    return std::stod(t.substr(0, slash)) / std::stod(t.substr(slash + 1));
  }
  std::size_t used = 0;
  const double v = std::stod(t, &used);
  if (used != t.size()) throw std::invalid_argument("malformed number '" + t + "'");
  return v;
}

Method parse_method(const std::string& s) {
  if (s == "reference") return Method::Reference;
  if (s == "ideal") return Method::Ideal;
  if (s == "fe-lodm") return Method::FeLodm;
  if (s == "lodm") return Method::Lodm;
  throw std::invalid_argument("unknown method '" + s + "'");
}

CoefficientKind parse_coefficient(const std::string& s) {
  if (s == "a1") return CoefficientKind::PeriodicA1;
  if (s == "awell") return CoefficientKind::PeriodicWell;
  if (s == "lognormal") return CoefficientKind::LogNormal;
  if (s == "channels") return CoefficientKind::Channels;
  if (s == "constant") return CoefficientKind::Constant;
  if (s == "file") return CoefficientKind::File;
  throw std::invalid_argument("unknown coefficient '" + s + "'");
}

Region parse_region(const std::string& s) {
  if (s == "omega") return Region::omega();
  if (s == "omega1") return Region::omega1();
  if (s == "omega2") return Region::omega2();
  throw std::invalid_argument("unknown region '" + s + "'");
}

std::string size_label(double s) {
  const double k = -std::log2(s);
  if (std::abs(k - std::round(k)) < 1e-12) return "2^-" + std::to_string(static_cast<int>(std::round(k)));
  std::ostringstream out;
  out << s;
  return out.str();
}

std::string point_label(Method m, double H, int L) {
  std::string label = method_name(m) + "[H=" + size_label(H);
  if (L >= 0) label += ",L=" + std::to_string(L);
  return label + "]";
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string reference_key(const ExperimentConfig& c) {
  std::ostringstream k;
  k << std::setprecision(17) << "v1|" << static_cast<int>(c.domain) << '|' << c.h << '|' << c.gamma0
    << '|' << static_cast<int>(c.coefficient.kind) << '|' << c.coefficient.epsilon << '|'
    << c.coefficient.random.sigma2 << '|' << c.coefficient.random.l1 << '|' << c.coefficient.random.l2
    << '|' << c.coefficient.random.resolution << '|' << c.coefficient.random.seed << '|'
    << c.coefficient.value;
  if (c.coefficient.kind == CoefficientKind::File) {
    std::ifstream in(c.coefficient.file, std::ios::binary);
    k << "|f" << std::string(std::istreambuf_iterator<char>(in), {});
  }
  for (const Rect& r : c.omega1.rects) k << "|r" << r.x0 << ',' << r.x1 << ',' << r.y0 << ',' << r.y1;
  for (const Well& w : c.wells) k << "|w" << w.position.x << ',' << w.position.y << ',' << w.rate;
  return k.str();
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

bool load_cached(const std::filesystem::path& path, int size, Vector& out) {
  std::ifstream in(path);
  int n = 0;
  if (!(in >> n) || n != size) return false;
  out.resize(n);
  for (int i = 0; i < n; ++i) {
    if (!(in >> out[i])) return false;
  }
  return true;
}

void store_cached(const std::filesystem::path& path, const Vector& v) {
  std::ostringstream s;
  s << std::setprecision(17) << v.size() << '\n';
  for (int i = 0; i < v.size(); ++i) s << v[i] << '\n';
  write_atomic(path, s.str());
}

struct PointOutput {
  std::vector<ErrorRow> errors;
  std::vector<ConvergenceRow> convergence;
  std::vector<WbpRow> wbp;
  std::vector<std::pair<std::string, double>> seconds;
  std::vector<std::pair<std::string, int>> dofs;
  std::vector<std::string> notes;
};

void append_errors(PointOutput& out, const std::string& label, const ErrorReport& report) {
  for (const auto& r : report.regions) {
    const std::string region = r.region + (r.absolute ? "(abs)" : "");
    out.errors.push_back({label, region, "energy", r.energy});
    out.errors.push_back({label, region, "l2", r.l2});
    out.errors.push_back({label, region, "linf", r.linf});
  }
}

std::string format_double(double v) {
  std::ostringstream s;
  s << std::setprecision(10) << v;
  return s.str();
}

}  // namespace

double parse_size(const std::string& text) {
  const double v = parse_number(text);
  if (!(v > 0.0 && v <= 1.0)) throw std::invalid_argument("mesh size out of range: " + text);
  return v;
}

CoefficientField make_coefficient(const CoefficientSpec& spec, int fine_cells) {
  switch (spec.kind) {
    case CoefficientKind::PeriodicA1:
      return AnalyticPeriodic{PeriodicFormula::Oscillating, spec.epsilon};
    case CoefficientKind::PeriodicWell:
      return AnalyticPeriodic{PeriodicFormula::WellProduct, spec.epsilon};
    case CoefficientKind::LogNormal: {
      RandomFieldParams p = spec.random;
      if (p.resolution <= 0) p.resolution = fine_cells;
      return generate_lognormal_field(p);
    }
    case CoefficientKind::Channels:
      return build_channel_field(high_contrast_channel_layout(),
                                 spec.random.resolution > 0 ? spec.random.resolution : fine_cells);
    case CoefficientKind::Constant:
      return ConstantField{spec.value};
    case CoefficientKind::File: {
      std::ifstream in(spec.file);
      if (!in) throw std::invalid_argument("cannot open coefficient file " + spec.file.string());
      return read_grid_field(in);
    }
  }
  throw std::invalid_argument("unknown coefficient kind");
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig c;
  c.coefficient.random.resolution = 0;
  double well_radius = 1e-5;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "experiment") {
        c.experiment = value;
      } else if (key == "scale") {
        if (value != "desk" && value != "full") throw std::invalid_argument("scale is desk or full");
        c.scale = value;
      } else if (key == "domain") {
        if (value == "square") c.domain = Domain::UnitSquare;
        else if (value == "lshape") c.domain = Domain::LShape;
        else throw std::invalid_argument("domain is square or lshape");
      } else if (key == "H") {
        c.H.clear();
        for (const auto& s : split(value, ',')) c.H.push_back(parse_size(s));
      } else if (key == "h") {
        c.h = parse_size(value);
      } else if (key == "gamma0") {
        c.gamma0 = parse_number(value);
      } else if (key == "L") {
        c.L.clear();
        for (const auto& s : split(value, ',')) c.L.push_back(std::stoi(s));
      } else if (key == "L0") {
        c.L0 = parse_number(value);
      } else if (key == "coefficient") {
        c.coefficient.kind = parse_coefficient(value);
      } else if (key == "epsilon") {
        c.coefficient.epsilon = parse_number(value);
      } else if (key == "sigma2") {
        c.coefficient.random.sigma2 = parse_number(value);
      } else if (key == "l1") {
        c.coefficient.random.l1 = parse_number(value);
      } else if (key == "l2") {
        c.coefficient.random.l2 = parse_number(value);
      } else if (key == "field_resolution") {
        c.coefficient.random.resolution = std::stoi(value);
      } else if (key == "seed") {
        c.coefficient.random.seed = std::stoull(value);
      } else if (key == "field_file") {
        c.coefficient.file = value;
      } else if (key == "value") {
        c.coefficient.value = parse_number(value);
      } else if (key == "omega1") {
        c.omega1.rects.clear();
        if (value != "none") {
          for (const auto& r : split(value, ';')) {
            const auto parts = split(r, ':');
            if (parts.size() != 4) throw std::invalid_argument("omega1 rectangles are x0:x1:y0:y1");
            c.omega1.rects.push_back({parse_number(parts[0]), parse_number(parts[1]),
                                      parse_number(parts[2]), parse_number(parts[3])});
          }
        }
      } else if (key == "wells") {
        c.wells.clear();
        for (const auto& w : split(value, ';')) {
          const auto parts = split(w, ':');
          if (parts.size() != 3) throw std::invalid_argument("wells are x:y:q");
          c.wells.push_back({{parse_number(parts[0]), parse_number(parts[1])}, parse_number(parts[2]), 0.0});
        }
      } else if (key == "well_radius") {
        well_radius = parse_number(value);
      } else if (key == "methods") {
        c.methods.clear();
        for (const auto& s : split(value, ',')) {
          const Method m = parse_method(s);
          if (m != Method::Reference) c.methods.push_back(m);
        }
      } else if (key == "regions") {
        c.regions = split(value, ',');
        for (const auto& r : c.regions) parse_region(r);
      } else if (key == "export_solutions") {
        c.export_solutions = value == "true" || value == "1";
      } else {
        throw std::invalid_argument("unknown key");
      }
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("line " + std::to_string(line_no) + " (" + key + "): " + e.what());
    } catch (const std::out_of_range& e) {
      throw std::invalid_argument("line " + std::to_string(line_no) + " (" + key + "): out of range");
    }
  }
  for (Well& w : c.wells) w.radius = well_radius;
  if (c.H.empty()) throw std::invalid_argument("config needs H");
  if (c.h <= 0.0) throw std::invalid_argument("config needs h");
  for (double H : c.H) {
    if (!(c.h < H)) throw std::invalid_argument("config needs h < H");
  }
  if (c.L0 <= 0.0 && c.L.empty()) throw std::invalid_argument("config needs L or L0");
  if (c.coefficient.kind == CoefficientKind::File && !std::filesystem::exists(c.coefficient.file)) {
    throw std::invalid_argument("coefficient file not found: " + c.coefficient.file.string());
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config " + path.string());
  return parse_config(in);
}

SlopeFit fit_convergence_slope(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) throw std::invalid_argument("slope fit needs at least 3 points");
  const int n = static_cast<int>(points.size());
  double mx = 0.0, my = 0.0;
  std::vector<double> x(n), y(n);
  for (int i = 0; i < n; ++i) {
    if (!(points[i].first > 0.0 && points[i].second > 0.0)) {
      throw std::invalid_argument("slope fit needs positive H and errors");
    }
    x[i] = std::log(points[i].first);
    y[i] = std::log(points[i].second);
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (int i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("slope fit needs distinct H");
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  return fit;
}

std::pair<SlopeFit, SlopeFit> fit_convergence_csv(const std::filesystem::path& csv) {
  std::ifstream in(csv);
  if (!in) throw std::invalid_argument("cannot open " + csv.string());
  std::string line;
  std::getline(in, line);
  if (trim(line) != "H,L,energy_rel,l2_rel,linf_rel") {
    throw std::invalid_argument("not a convergence CSV: " + csv.string());
  }
  std::vector<std::pair<double, double>> energy, l2;
  while (std::getline(in, line)) {
    const auto cols = split(line, ',');
    if (cols.size() != 5) continue;
    const double H = std::stod(cols[0]);
    energy.emplace_back(H, std::stod(cols[2]));
    l2.emplace_back(H, std::stod(cols[3]));
  }
  return {fit_convergence_slope(energy), fit_convergence_slope(l2)};
}

std::vector<std::pair<std::string, std::string>> experiment_catalog() {
  return {
      {"ex1-Lsweep", "periodic A1, eps=1/5, Omega_1=(1/4,3/8)^2: errors for L in {1,2,3,6,10} and ideal"},
      {"ex1-convergence", "periodic A1, eps=1/20: errors against H with L from the L0 rule, fitted slopes"},
      {"ex2-Lshape", "L-shaped domain, log-normal field: FE-LODM against LODM near the reentrant corner"},
      {"ex3-channels", "high-contrast channels and inclusions: FE-LODM against LODM"},
      {"ex4-well-periodic", "two wells, coefficient 1/((2+1.5 sin)(2+1.5 sin)), eps=1/64: well-bore pressures"},
      {"ex5-well-random", "two wells in a log-normal field: well-bore pressures"},
      {"custom", "any combination of the keys in the config schema"},
  };
}

void write_errors_csv(std::ostream& out, const std::vector<ErrorRow>& rows) {
  out << "method,region,norm,value\n";
  for (const auto& r : rows) out << r.method << ',' << r.region << ',' << r.norm << ',' << format_double(r.value) << '\n';
}

void write_convergence_csv(std::ostream& out, const std::vector<ConvergenceRow>& rows) {
  out << "H,L,energy_rel,l2_rel,linf_rel\n";
  for (const auto& r : rows) {
    out << format_double(r.H) << ',' << r.L << ',' << format_double(r.energy) << ','
        << format_double(r.l2) << ',' << format_double(r.linf) << '\n';
  }
}

ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  if (config.scale == "full" && !options.full_scale) {
    throw std::invalid_argument("config '" + config.experiment +
                                "' is a full-scale run; pass --full-scale to run it");
  }
  const int n_fine = dyadic_cells(config.h);
  const CoefficientField field = make_coefficient(config.coefficient, n_fine);
  const bool has_omega1 = !config.omega1.empty();
  std::vector<Region> regions;
  for (const auto& r : config.regions) {
    if (r == "omega1" && !has_omega1) continue;
    regions.push_back(parse_region(r));
  }
  LoadSpec load;
  if (config.wells.empty()) load.f = [](Point2) { return 1.0; };
  load.wells = config.wells;

  ExperimentResult result;
  if (!has_omega1) result.notes.push_back("Omega_1 is empty: FE-LODM coincides with LODM and is not run separately");

  // The fine space depends on Omega_1 and h only, so one reference serves every H.
  const DomainPartition ref_partition = partition_domain(config.domain, config.omega1, config.H.front(), config.h);
  const Discretization ref_disc = discretize(ref_partition, field, config.gamma0);
  const Vector ref_load = assemble_load(ref_disc, load);
  Vector reference;
  std::filesystem::create_directories(options.outdir);
  const auto cache_path = options.outdir / "cache" /
                          ("reference_" + [&] {
                            std::ostringstream s;
                            s << std::hex << fnv1a(reference_key(config));
                            return s.str();
                          }() + ".txt");
  if (!(options.use_cache && load_cached(cache_path, ref_disc.fine.size(), reference))) {
    const SolveResult ref = solve_reference(ref_disc, ref_load);
    reference = ref.solution;
    result.seconds.emplace_back("reference", ref.seconds);
    result.dofs.emplace_back("reference", ref.system_size);
    if (options.use_cache) {
      std::filesystem::create_directories(cache_path.parent_path());
      store_cached(cache_path, reference);
    }
  } else {
    result.notes.push_back("reference solution read from " + cache_path.string());
  }
  if (!config.wells.empty()) {
    result.wbp.push_back({"reference", compute_wbp(ref_partition, ref_disc.coeffs, ref_disc.fine,
                                                   reference, config.wells)});
  }

  const int npoints = static_cast<int>(config.H.size());
  std::vector<PointOutput> points(npoints);
  auto run_point = [&](int k) {
    PointOutput& out = points[k];
    const double H = config.H[k];
    const DomainPartition p = partition_domain(config.domain, config.omega1, H, config.h);
    const Discretization disc = discretize(p, field, config.gamma0);
    if (disc.fine.size() != ref_disc.fine.size()) throw std::logic_error("fine spaces differ across H");
    const Vector b = assemble_load(disc, load);
    const std::vector<int> levels =
        config.L0 > 0.0 ? std::vector<int>{choose_L(H, config.h, config.L0)} : config.L;

    auto record = [&](Method m, int L, const DomainPartition& part, const Discretization& d,
                      const SolveResult& r, const Vector& on_ref) {
      const std::string label = point_label(m, H, L);
      out.seconds.emplace_back(label, r.seconds);
      out.dofs.emplace_back(label, r.system_size);
      const ErrorReport rep = error_report(p, disc.coeffs, disc.fine, reference, on_ref, regions);
      append_errors(out, label, rep);
      if (!config.wells.empty()) {
        out.wbp.push_back({label, compute_wbp(part, d.coeffs, d.fine, r.solution, config.wells)});
      }
      if (config.export_solutions) {
        std::ostringstream s;
        write_solution(s, on_ref);
        write_atomic(options.outdir / ("solution_" + label + ".txt"), s.str());
      }
      return rep;
    };
    auto add_convergence = [&](int L, const ErrorReport& rep) {
      for (const auto& r : rep.regions) {
        if (r.region == "omega") out.convergence.push_back({H, L, r.energy, r.l2, r.linf});
      }
    };

    for (Method m : config.methods) {
      if (m == Method::Ideal) {
        try {
          const SolveResult r = solve_ideal(disc, b);
          record(m, -1, p, disc, r, r.solution);
        } catch (const std::length_error& e) {
          out.notes.push_back("ideal at H=" + size_label(H) + " skipped: " + e.what());
        }
      } else if (m == Method::FeLodm && has_omega1) {
        for (int L : levels) {
          const SolveResult r = solve_fe_lodm(disc, b, L);
          add_convergence(L, record(m, L, p, disc, r, r.solution));
        }
      } else if (m == Method::Lodm) {
        const DomainPartition p0 = partition_domain(config.domain, Omega1Region{}, H, config.h);
        const Discretization d0 = discretize(p0, field, config.gamma0);
        const Vector b0 = assemble_load(d0, load);
        for (int L : levels) {
          SolveResult r = solve_fe_lodm(d0, b0, L);
          r.method = Method::Lodm;
          const Vector on_ref = transfer_fine_function(p0, d0.fine, r.solution, p, disc.fine);
          const ErrorReport rep = record(m, L, p0, d0, r, on_ref);
          if (!has_omega1) add_convergence(L, rep);
        }
      }
    }
  };

  const int workers = std::max(1, std::min(options.workers, npoints));
  if (workers == 1) {
    for (int k = 0; k < npoints; ++k) run_point(k);
  } else {
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int k = next++; k < npoints; k = next++) {
          try {
            run_point(k);
          } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!error) error = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
  }

  for (auto& pt : points) {
    result.errors.insert(result.errors.end(), pt.errors.begin(), pt.errors.end());
    result.convergence.insert(result.convergence.end(), pt.convergence.begin(), pt.convergence.end());
    result.wbp.insert(result.wbp.end(), pt.wbp.begin(), pt.wbp.end());
    result.seconds.insert(result.seconds.end(), pt.seconds.begin(), pt.seconds.end());
    result.dofs.insert(result.dofs.end(), pt.dofs.begin(), pt.dofs.end());
    result.notes.insert(result.notes.end(), pt.notes.begin(), pt.notes.end());
  }

  // Slopes use one error per H: the largest level run at that H.
  std::vector<std::pair<double, double>> fe, fl2;
  for (const auto& r : result.convergence) {
    if (!fe.empty() && fe.back().first == r.H) {
      fe.back().second = r.energy;
      fl2.back().second = r.l2;
    } else {
      fe.emplace_back(r.H, r.energy);
      fl2.emplace_back(r.H, r.l2);
    }
  }
  const bool sweep = fe.size() >= 3;
  if (sweep) {
    result.energy_slope = fit_convergence_slope(fe);
    result.l2_slope = fit_convergence_slope(fl2);
  }

  {
    std::ostringstream s;
    write_errors_csv(s, result.errors);
    write_atomic(options.outdir / "errors.csv", s.str());
  }
  if (config.H.size() > 1) {
    std::ostringstream s;
    write_convergence_csv(s, result.convergence);
    write_atomic(options.outdir / "convergence.csv", s.str());
  }
  if (!result.wbp.empty()) {
    std::ostringstream s;
    for (const auto& w : result.wbp) {
      s << "# " << w.method << '\n';
      write_wbp(s, w.wbp);
    }
    write_atomic(options.outdir / "wbp.txt", s.str());
  }
  std::ostringstream rep;
  rep << "experiment " << config.experiment << " (" << config.scale << " scale)\n";
  rep << "h = " << size_label(config.h) << ", H = ";
  for (std::size_t i = 0; i < config.H.size(); ++i) rep << (i ? ", " : "") << size_label(config.H[i]);
  rep << ", gamma0 = " << config.gamma0 << "\n\n";
  rep << std::left << std::setw(32) << "method" << std::setw(10) << "region" << std::setw(8) << "norm"
      << "relative error\n";
  for (const auto& e : result.errors) {
    rep << std::setw(32) << e.method << std::setw(10) << e.region << std::setw(8) << e.norm
        << format_double(e.value) << '\n';
  }
  if (!result.wbp.empty()) {
    rep << "\nwell-bore pressures\n";
    for (const auto& w : result.wbp) {
      rep << w.method << ":";
      for (double v : w.wbp) rep << ' ' << format_double(v);
      rep << '\n';
    }
  }
  rep << "\nunknowns\n";
  for (const auto& [label, n] : result.dofs) rep << "  " << label << ": " << n << '\n';
  rep << "\nwall time (s)\n";
  for (const auto& [label, s] : result.seconds) rep << "  " << label << ": " << format_double(s) << '\n';
  for (const auto& n : result.notes) rep << "note: " << n << '\n';
  if (sweep) {
    rep << "\nslope energy = " << format_double(result.energy_slope.slope)
        << " (R2 = " << format_double(result.energy_slope.r2) << ")\n";
    rep << "slope l2 = " << format_double(result.l2_slope.slope) << " (R2 = " << format_double(result.l2_slope.r2)
        << ")\n";
  }
  write_atomic(options.outdir / "report.txt", rep.str());
  return result;
}

}  // namespace felod
