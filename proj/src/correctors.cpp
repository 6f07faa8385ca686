#include "felod/correctors.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>
#include <ostream>
#include <stdexcept>

namespace felod {

namespace {

struct ElementGroup {
  Patch patch;
  std::vector<int> elements;  // coarse elements whose patch is `patch`, increasing
};

std::vector<ElementGroup> group_by_patch(const DomainPartition& p, int L) {
  std::vector<ElementGroup> groups;
  std::map<std::vector<int>, int> index;
  for (int T = 0; T < p.coarse_omega2.num_triangles(); ++T) {
    Patch patch = element_patch(p, T, L);
    auto [it, inserted] = index.try_emplace(patch.elements, static_cast<int>(groups.size()));
    if (inserted) groups.push_back({std::move(patch), {}});
    groups[it->second].elements.push_back(T);
  }
  return groups;
}

SparseMatrix restrict_symmetric(const SparseMatrix& k, const std::vector<int>& idx) {
  std::vector<int> local(k.rows(), -1);
  for (std::size_t i = 0; i < idx.size(); ++i) local[idx[i]] = static_cast<int>(i);
  std::vector<Triplet> entries;
  for (std::size_t j = 0; j < idx.size(); ++j) {
    for (SparseMatrix::InnerIterator it(k, idx[j]); it; ++it) {
      if (const int r = local[it.row()]; r >= 0) entries.emplace_back(r, static_cast<int>(j), it.value());
    }
  }
  const int n = static_cast<int>(idx.size());
  SparseMatrix out(n, n);
  out.setFromTriplets(entries.begin(), entries.end());
  return out;
}

// Appends the entries of K_T P (rows: Omega_2 unknowns) for element T.
void append_element_rhs(const Discretization& d, int T, std::vector<Triplet>& out) {
  const DomainPartition& p = *d.partition;
  const int n1 = d.fine.n_omega1;
  auto emit = [&](int r, int c, double v) {
    if (r < n1 || c < 0 || v == 0.0) return;
    for (RowSparseMatrix::InnerIterator it(d.prolongation_rows, c); it; ++it) {
      out.emplace_back(r, static_cast<int>(it.col()), v * it.value());
    }
  };
  for (int t : p.children[T]) {
    const VolumeLocal& local = d.locals.omega2[t];
    for (int i = 0; i < 3; ++i) {
      if (local.dofs[i] < 0) continue;
      for (int j = 0; j < 3; ++j) emit(local.dofs[i], local.dofs[j], local.matrix[i * 3 + j]);
    }
  }
  for (int s : p.segments_of[T]) {
    for (int e : p.gamma_H[s].fine_edges) {
      const InterfaceLocal& local = d.locals.interface[e];
      for (int i = 3; i < 6; ++i) {
        if (local.dofs[i] < 0) continue;
        for (int j = 0; j < 6; ++j) emit(local.dofs[i], local.dofs[j], local.matrix[i * 6 + j]);
      }
    }
  }
}

// Dense right-hand side over the problem unknowns; `columns` receives the V_{h,H} indices of the
// columns, which are the basis functions touched by at least one entry.
DenseMatrix gather_rhs(const std::vector<Triplet>& entries, const std::vector<int>& unknowns,
                       int fine_size, int coarse_size, std::vector<int>& columns) {
  std::vector<int> row(fine_size, -1);
  for (std::size_t i = 0; i < unknowns.size(); ++i) row[unknowns[i]] = static_cast<int>(i);
  std::vector<int> col(coarse_size, -1);
  columns.clear();
  for (const Triplet& t : entries) {
    if (row[t.row()] >= 0 && col[t.col()] < 0) {
      col[t.col()] = 0;
      columns.push_back(t.col());
    }
  }
  std::sort(columns.begin(), columns.end());
  for (std::size_t j = 0; j < columns.size(); ++j) col[columns[j]] = static_cast<int>(j);
  DenseMatrix r = DenseMatrix::Zero(static_cast<int>(unknowns.size()), static_cast<int>(columns.size()));
  for (const Triplet& t : entries) {
    if (const int i = row[t.row()]; i >= 0) r(i, col[t.col()]) += t.value();
  }
  return r;
}

void append_solution(const DenseMatrix& q, const std::vector<int>& unknowns,
                     const std::vector<int>& columns, std::vector<Triplet>& out) {
  for (int j = 0; j < q.cols(); ++j) {
    for (int i = 0; i < q.rows(); ++i) {
      if (q(i, j) != 0.0) out.emplace_back(unknowns[i], columns[j], q(i, j));
    }
  }
}

template <class Body>
void run_groups(int count, Execution exec, Body&& body) {
  if (exec == Execution::Serial) {
    for (int g = 0; g < count; ++g) body(g);
    return;
  }
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 1)
  for (int g = 0; g < count; ++g) {
    try {
      body(g);
    } catch (...) {
#pragma omp critical(felod_corrector_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

std::string patch_label(const Patch& patch) {
  return "corrector patch of element " + std::to_string(patch.seed_element) + " (level " +
         std::to_string(patch.level) + ")";
}

}  // namespace

Discretization discretize(const DomainPartition& partition, const CoefficientField& field,
                          double gamma0, Execution exec) {
  Discretization d;
  d.partition = &partition;
  d.coeffs = sample_partition(field, partition);
  d.penalty = make_penalty(partition, gamma0);
  d.fine = make_layout(partition, SpaceKind::FineFine);
  d.coarse = make_layout(partition, SpaceKind::FineCoarse);
  d.locals = compute_local_forms(partition, d.coeffs, d.fine, d.penalty, exec);
  d.stiffness = assemble_from_locals(d.locals, d.fine.size());
  d.prolongation = prolongation(partition, d.fine, d.coarse);
  d.prolongation_rows = d.prolongation;
  d.weights = build_clement_weights(partition, d.fine, d.coarse);
  return d;
}

int choose_L(double H, double h, double L0) {
  if (!(h > 0.0 && h < H && H < 1.0) || !(L0 > 0.0)) {
    throw std::invalid_argument("choose_L needs 0 < h < H < 1 and L0 > 0");
  }
  return static_cast<int>(std::ceil(L0 * std::abs(std::log10(std::sqrt(H * h)))));
}

SparseMatrix corrector_rhs(const Discretization& disc, int T) {
  std::vector<Triplet> entries;
  append_element_rhs(disc, T, entries);
  SparseMatrix out(disc.fine.size(), disc.coarse.size());
  out.setFromTriplets(entries.begin(), entries.end());
  return out;
}

CorrectorProblem make_corrector_problem(const Discretization& disc, const Patch& patch) {
  CorrectorProblem problem;
  problem.patch = patch;
  problem.constraints = constraint_rows(*disc.partition, disc.fine, disc.weights, &patch);
  problem.unknowns = problem.constraints.columns;
  problem.stiffness = restrict_symmetric(disc.stiffness, problem.unknowns);
  return problem;
}

LocalCorrectorSolver::LocalCorrectorSolver(CorrectorProblem problem)
    : problem_(std::move(problem)),
      saddle_(problem_.stiffness, problem_.constraints.normalized(), patch_label(problem_.patch),
              problem_.patch.seed_element < 0 ? SpdBackend::Automatic : SpdBackend::Simplicial) {}

DenseMatrix LocalCorrectorSolver::solve(const DenseMatrix& rhs) const { return saddle_.solve(rhs); }

double LocalCorrectorSolver::constraint_residual(const DenseMatrix& q) const {
  if (q.size() == 0 || saddle_.constraint_count() == 0) return 0.0;
  const DenseMatrix r = saddle_.constraints() * q;
  double worst = 0.0;
  for (int j = 0; j < q.cols(); ++j) {
    const double scale = q.col(j).lpNorm<Eigen::Infinity>();
    if (scale > 0.0) worst = std::max(worst, r.col(j).lpNorm<Eigen::Infinity>() / scale);
  }
  return worst;
}

DenseMatrix solve_local_corrector(const CorrectorProblem& problem, const DenseMatrix& rhs) {
  return LocalCorrectorSolver(problem).solve(rhs);
}

std::vector<SparseMatrix> element_correctors(const Discretization& disc, int L, Execution exec) {
  const DomainPartition& p = *disc.partition;
  const auto groups = group_by_patch(p, L);
  std::vector<SparseMatrix> out(p.coarse_omega2.num_triangles());
  run_groups(static_cast<int>(groups.size()), exec, [&](int g) {
    const LocalCorrectorSolver solver(make_corrector_problem(disc, groups[g].patch));
    const auto& unknowns = solver.problem().unknowns;
    for (int T : groups[g].elements) {
      std::vector<Triplet> entries;
      append_element_rhs(disc, T, entries);
      std::vector<int> columns;
      const DenseMatrix rhs = gather_rhs(entries, unknowns, disc.fine.size(), disc.coarse.size(), columns);
      std::vector<Triplet> q;
      if (!columns.empty()) append_solution(solver.solve(rhs), unknowns, columns, q);
      out[T].resize(disc.fine.size(), disc.coarse.size());
      out[T].setFromTriplets(q.begin(), q.end());
    }
  });
  return out;
}

SparseMatrix MultiscaleBasis::basis(const Discretization& disc) const {
  return disc.prolongation - correctors;
}

MultiscaleBasis build_multiscale_basis(const Discretization& disc, int L, Execution exec) {
  if (L < 0) throw std::invalid_argument("patch level must be nonnegative");
  const DomainPartition& p = *disc.partition;
  const auto groups = group_by_patch(p, L);
  const int ng = static_cast<int>(groups.size());
  std::vector<std::vector<Triplet>> results(ng);
  std::vector<std::vector<int>> group_columns(ng);
  std::vector<double> residuals(ng, 0.0);
  run_groups(ng, exec, [&](int g) {
    std::vector<Triplet> entries;
    for (int T : groups[g].elements) append_element_rhs(disc, T, entries);
    if (entries.empty()) return;
    const LocalCorrectorSolver solver(make_corrector_problem(disc, groups[g].patch));
    const auto& unknowns = solver.problem().unknowns;
    const DenseMatrix rhs =
        gather_rhs(entries, unknowns, disc.fine.size(), disc.coarse.size(), group_columns[g]);
    if (group_columns[g].empty()) return;
    const DenseMatrix q = solver.solve(rhs);
    residuals[g] = solver.constraint_residual(q);
    append_solution(q, unknowns, group_columns[g], results[g]);
  });

  MultiscaleBasis basis;
  basis.level = L;
  basis.footprint.resize(disc.coarse.size());
  std::vector<char> corrected(disc.coarse.size(), 0);
  std::size_t total = 0;
  for (const auto& r : results) total += r.size();
  std::vector<Triplet> all;
  all.reserve(total);
  for (int g = 0; g < ng; ++g) {
    all.insert(all.end(), results[g].begin(), results[g].end());
    basis.constraint_residual = std::max(basis.constraint_residual, residuals[g]);
    for (int c : group_columns[g]) {
      corrected[c] = 1;
      auto& fp = basis.footprint[c];
      fp.insert(fp.end(), groups[g].patch.elements.begin(), groups[g].patch.elements.end());
    }
  }
  for (auto& fp : basis.footprint) {
    std::sort(fp.begin(), fp.end());
    fp.erase(std::unique(fp.begin(), fp.end()), fp.end());
  }
  for (int c = 0; c < disc.coarse.size(); ++c) {
    if (corrected[c]) basis.corrected.push_back(c);
  }
  basis.correctors.resize(disc.fine.size(), disc.coarse.size());
  basis.correctors.setFromTriplets(all.begin(), all.end());
  return basis;
}

SparseMatrix global_corrector(const Discretization& disc, int max_unknowns) {
  const DomainPartition& p = *disc.partition;
  if (disc.fine.n_omega2 > max_unknowns) {
    throw std::length_error("global corrector needs " + std::to_string(disc.fine.n_omega2) +
                            " unknowns, above the limit of " + std::to_string(max_unknowns));
  }
  CorrectorProblem problem;
  problem.patch.seed_element = -1;
  problem.patch.level = saturated_level;
  for (int T = 0; T < p.coarse_omega2.num_triangles(); ++T) problem.patch.elements.push_back(T);
  problem.constraints = constraint_rows(p, disc.fine, disc.weights, nullptr);
  problem.unknowns = problem.constraints.columns;
  problem.stiffness = restrict_symmetric(disc.stiffness, problem.unknowns);

  const SparseMatrix kp = disc.stiffness * disc.prolongation;
  std::vector<Triplet> entries;
  for (int j = 0; j < kp.outerSize(); ++j) {
    for (SparseMatrix::InnerIterator it(kp, j); it; ++it) {
      if (it.row() >= disc.fine.n_omega1) entries.emplace_back(it.row(), j, it.value());
    }
  }
  std::vector<int> columns;
  const DenseMatrix rhs =
      gather_rhs(entries, problem.unknowns, disc.fine.size(), disc.coarse.size(), columns);
  const LocalCorrectorSolver solver(std::move(problem));
  std::vector<Triplet> q;
  append_solution(solver.solve(rhs), solver.problem().unknowns, columns, q);
  SparseMatrix out(disc.fine.size(), disc.coarse.size());
  out.setFromTriplets(q.begin(), q.end());
  return out;
}

void write_correctors(std::ostream& out, const SparseMatrix& correctors) {
  const auto precision = out.precision(17);
  for (int j = 0; j < correctors.outerSize(); ++j) {
    for (SparseMatrix::InnerIterator it(correctors, j); it; ++it) {
      out << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
    }
  }
  out.precision(precision);
}

}  // namespace felod
