#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace agres {

struct Conductance {
  int x;  // x < y
  int y;
  double c;
  friend bool operator==(const Conductance&, const Conductance&) = default;
};

/// A resistance form on vertices 0..n-1, stored as the sorted list of
/// positive conductances. Zero conductances are never stored.
class FiniteForm {
 public:
  FiniteForm() = default;
  explicit FiniteForm(int n) : n_(n) {}
  /// Duplicate pairs are summed; nonpositive entries are dropped.
  FiniteForm(int n, std::vector<Conductance> edges);

  int size() const { return n_; }
  const std::vector<Conductance>& edges() const { return edges_; }
  double conductance(int x, int y) const;
  double total_conductance() const;

  /// energy(f) = 1/2 sum_{x != y} c_xy (f(x) - f(y))^2.
  double energy(const Eigen::VectorXd& f) const;
  FiniteForm scaled(double a) const;
  bool connected() const;

  Eigen::MatrixXd dense_laplacian() const;
  Eigen::SparseMatrix<double> sparse_laplacian() const;

  friend bool operator==(const FiniteForm&, const FiniteForm&) = default;

 private:
  int n_ = 0;
  std::vector<Conductance> edges_;
};

/// Accumulates weighted copies of forms onto a shared vertex set.
class FormBuilder {
 public:
  explicit FormBuilder(int n) : n_(n) {}
  void add(int x, int y, double c);
  /// Adds multiplier * form, with vertex k of form placed at ids[k].
  void add_form(const FiniteForm& form, const std::vector<int>& ids, double multiplier);
  FiniteForm build() &&;

 private:
  int n_;
  std::vector<Conductance> raw_;
};

/// Receives condition-number warnings; defaults to a line on stderr.
void set_warning_handler(std::function<void(const std::string&)> handler);
void warn(const std::string& message);

/// Schur complement onto keep (in the given order). Interior components are
/// eliminated independently.
FiniteForm trace(const FiniteForm& form, const std::vector<int>& keep);

/// Energy minimizing extension of values prescribed on boundary.
Eigen::VectorXd harmonic_extension(const FiniteForm& form, const std::vector<int>& boundary,
                                   const Eigen::VectorXd& values);

/// Grounded-Laplacian factorization reused across resistance queries.
class ResistanceSolver {
 public:
  explicit ResistanceSolver(const FiniteForm& form);
  ~ResistanceSolver();
  ResistanceSolver(ResistanceSolver&&) noexcept;
  ResistanceSolver& operator=(ResistanceSolver&&) noexcept;

  double resistance(int x, int y) const;
  /// Potential v with L v = e_x - e_y and v(ground) = 0.
  Eigen::VectorXd potential(int x, int y) const;
  Eigen::MatrixXd resistance_matrix() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

double effective_resistance(const FiniteForm& form, int x, int y);
/// Resistance between x and the set obtained by merging target to one node.
double effective_resistance(const FiniteForm& form, int x, const std::vector<int>& target);

struct FormComparison {
  double lower;
  double upper;
  double min_ratio;  // min R1/R2
  double max_ratio;  // max R1/R2
};

/// Constants with lower * E1 <= E2 <= upper * E1.
FormComparison form_comparison(const FiniteForm& form1, const FiniteForm& form2);

struct ResolventKernel {
  double alpha = 0;
  Eigen::VectorXd masses;
  Eigen::MatrixXd matrix;  // u(x, y)
};

/// Solves (L + alpha M) u = e_x column by column.
ResolventKernel resolvent(const FiniteForm& form, const Eigen::VectorXd& masses, double alpha);

/// Selected columns only; rows of the returned matrix index all vertices.
Eigen::MatrixXd resolvent_columns(const FiniteForm& form, const Eigen::VectorXd& masses, double alpha,
                                  const std::vector<int>& columns);

}  // namespace agres
