#include "agres/network.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <mutex>
#include <limits>
#include <numeric>
#include <optional>
#include <unordered_map>

#include "agres/errors.hpp"

namespace agres {

namespace {

constexpr int kDenseLimit = 1500;
constexpr double kPivotWarn = 1e12;
constexpr double kDust = 1e-13;

std::mutex& handler_mutex() {
  static std::mutex m;
  return m;
}

std::function<void(const std::string&)>& handler() {
  static std::function<void(const std::string&)> h = [](const std::string& msg) {
    std::cerr << "warning: " << msg << '\n';
  };
  return h;
}

std::vector<std::vector<std::pair<int, double>>> adjacency(const FiniteForm& form) {
  std::vector<std::vector<std::pair<int, double>>> adj(form.size());
  for (const auto& e : form.edges()) {
    adj[e.x].emplace_back(e.y, e.c);
    adj[e.y].emplace_back(e.x, e.c);
  }
  return adj;
}

void require_connected(const FiniteForm& form) {
  if (!form.connected()) throw Error(ErrorKind::Disconnected, "support graph of the form is disconnected");
}

// Factorization of a symmetric positive definite block, dense or sparse by size.
class SpdSolver {
 public:
  SpdSolver(const std::vector<Eigen::Triplet<double>>& entries, int n, const char* what) : n_(n) {
    Eigen::VectorXd pivots;
    if (n <= kDenseLimit) {
      Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
      for (const auto& t : entries) a(t.row(), t.col()) += t.value();
      dense_.emplace(a);
      if (dense_->info() != Eigen::Success) fail(what);
      pivots = dense_->vectorD();
    } else {
      Eigen::SparseMatrix<double> a(n, n);
      a.setFromTriplets(entries.begin(), entries.end());
      sparse_.emplace(a);
      if (sparse_->info() != Eigen::Success) fail(what);
      pivots = sparse_->vectorD();
    }
    if (n == 0) return;
    const double lo = pivots.minCoeff(), hi = pivots.maxCoeff();
    if (!(lo > 0)) fail(what);
    if (hi / lo > kPivotWarn)
      warn(std::string(what) + ": pivot ratio " + std::to_string(hi / lo) + " exceeds 1e12");
  }

  template <class Rhs>
  Eigen::MatrixXd solve(const Rhs& b) const {
    return dense_ ? Eigen::MatrixXd(dense_->solve(b)) : Eigen::MatrixXd(sparse_->solve(Eigen::MatrixXd(b)));
  }

  int size() const { return n_; }

 private:
  [[noreturn]] static void fail(const char* what) {
    throw Error(ErrorKind::SingularInterior, std::string(what) + ": factorization of the interior block failed");
  }
  int n_;
  std::optional<Eigen::LDLT<Eigen::MatrixXd>> dense_;
  std::optional<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> sparse_;
};

// Connected pieces of the vertices outside `keep`, each with the kept
// vertices it touches.
struct InteriorPiece {
  std::vector<int> interior;
  std::vector<int> boundary;  // positions in keep
};

std::vector<InteriorPiece> interior_pieces(const std::vector<std::vector<std::pair<int, double>>>& adj,
                                           const std::vector<int>& pos) {
  const int n = static_cast<int>(adj.size());
  std::vector<int> mark(n, -1);
  std::vector<InteriorPiece> pieces;
  for (int s = 0; s < n; ++s) {
    if (pos[s] >= 0 || mark[s] >= 0) continue;
    InteriorPiece piece;
    const int id = static_cast<int>(pieces.size());
    std::vector<int> stack{s};
    mark[s] = id;
    std::vector<int> seen_boundary;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      piece.interior.push_back(v);
      for (const auto& [u, c] : adj[v]) {
        if (pos[u] >= 0) {
          seen_boundary.push_back(pos[u]);
        } else if (mark[u] < 0) {
          mark[u] = id;
          stack.push_back(u);
        }
      }
    }
    std::sort(piece.interior.begin(), piece.interior.end());
    std::sort(seen_boundary.begin(), seen_boundary.end());
    seen_boundary.erase(std::unique(seen_boundary.begin(), seen_boundary.end()), seen_boundary.end());
    piece.boundary = std::move(seen_boundary);
    pieces.push_back(std::move(piece));
  }
  return pieces;
}

std::vector<int> positions(int n, const std::vector<int>& keep) {
  std::vector<int> pos(n, -1);
  for (std::size_t k = 0; k < keep.size(); ++k) {
    const int v = keep[k];
    if (v < 0 || v >= n) throw Error(ErrorKind::UnknownVertex, "vertex " + std::to_string(v) + " out of range");
    if (pos[v] >= 0) throw Error(ErrorKind::DomainError, "vertex " + std::to_string(v) + " listed twice");
    pos[v] = static_cast<int>(k);
  }
  return pos;
}

// Interior block L_CC and coupling G_CB (conductances to boundary) of a piece.
struct PieceSystem {
  std::vector<Eigen::Triplet<double>> lcc;
  Eigen::MatrixXd gcb;
};

PieceSystem piece_system(const InteriorPiece& piece, const std::vector<std::vector<std::pair<int, double>>>& adj,
                         const std::vector<int>& pos) {
  const int ni = static_cast<int>(piece.interior.size());
  std::unordered_map<int, int> local;
  for (int k = 0; k < ni; ++k) local.emplace(piece.interior[k], k);
  std::unordered_map<int, int> blocal;
  for (std::size_t k = 0; k < piece.boundary.size(); ++k) blocal.emplace(piece.boundary[k], static_cast<int>(k));
  PieceSystem sys;
  sys.gcb = Eigen::MatrixXd::Zero(ni, static_cast<int>(piece.boundary.size()));
  for (int k = 0; k < ni; ++k) {
    double diag = 0;
    for (const auto& [u, c] : adj[piece.interior[k]]) {
      diag += c;
      if (pos[u] >= 0)
        sys.gcb(k, blocal.at(pos[u])) += c;
      else
        sys.lcc.emplace_back(k, local.at(u), -c);
    }
    sys.lcc.emplace_back(k, k, diag);
  }
  return sys;
}

}  // namespace

void set_warning_handler(std::function<void(const std::string&)> h) {
  std::lock_guard<std::mutex> lock(handler_mutex());
  handler() = std::move(h);
}

void warn(const std::string& message) {
  std::lock_guard<std::mutex> lock(handler_mutex());
  if (handler()) handler()(message);
}

FiniteForm::FiniteForm(int n, std::vector<Conductance> edges) : n_(n) {
  for (auto& e : edges) {
    if (e.x > e.y) std::swap(e.x, e.y);
    if (e.x < 0 || e.y >= n) throw Error(ErrorKind::UnknownVertex, "conductance endpoint out of range");
    if (e.c < 0) throw Error(ErrorKind::NegativeConductance, "negative conductance " + std::to_string(e.c));
  }
  std::sort(edges.begin(), edges.end(),
            [](const Conductance& a, const Conductance& b) { return a.x != b.x ? a.x < b.x : a.y < b.y; });
  for (const auto& e : edges) {
    if (e.x == e.y || e.c == 0) continue;
    if (!edges_.empty() && edges_.back().x == e.x && edges_.back().y == e.y)
      edges_.back().c += e.c;
    else
      edges_.push_back(e);
  }
}

double FiniteForm::conductance(int x, int y) const {
  if (x > y) std::swap(x, y);
  auto it = std::lower_bound(edges_.begin(), edges_.end(), std::make_pair(x, y),
                             [](const Conductance& e, const std::pair<int, int>& k) {
                               return e.x != k.first ? e.x < k.first : e.y < k.second;
                             });
  return (it != edges_.end() && it->x == x && it->y == y) ? it->c : 0.0;
}

double FiniteForm::total_conductance() const {
  double t = 0;
  for (const auto& e : edges_) t += e.c;
  return t;
}

double FiniteForm::energy(const Eigen::VectorXd& f) const {
  double s = 0;
  for (const auto& e : edges_) {
    const double d = f[e.x] - f[e.y];
    s += e.c * d * d;
  }
  return s;
}

FiniteForm FiniteForm::scaled(double a) const {
  FiniteForm out(n_);
  out.edges_ = edges_;
  for (auto& e : out.edges_) e.c *= a;
  return out;
}

bool FiniteForm::connected() const {
  if (n_ <= 1) return true;
  std::vector<int> parent(n_);
  std::iota(parent.begin(), parent.end(), 0);
  const auto find = [&](int v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  int components = n_;
  for (const auto& e : edges_) {
    const int a = find(e.x), b = find(e.y);
    if (a != b) parent[a] = b, --components;
  }
  return components == 1;
}

Eigen::MatrixXd FiniteForm::dense_laplacian() const {
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n_, n_);
  for (const auto& e : edges_) {
    l(e.x, e.y) -= e.c;
    l(e.y, e.x) -= e.c;
    l(e.x, e.x) += e.c;
    l(e.y, e.y) += e.c;
  }
  return l;
}

Eigen::SparseMatrix<double> FiniteForm::sparse_laplacian() const {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(edges_.size() * 4);
  for (const auto& e : edges_) {
    t.emplace_back(e.x, e.y, -e.c);
    t.emplace_back(e.y, e.x, -e.c);
    t.emplace_back(e.x, e.x, e.c);
    t.emplace_back(e.y, e.y, e.c);
  }
  Eigen::SparseMatrix<double> l(n_, n_);
  l.setFromTriplets(t.begin(), t.end());
  return l;
}

void FormBuilder::add(int x, int y, double c) { raw_.push_back({x, y, c}); }

void FormBuilder::add_form(const FiniteForm& form, const std::vector<int>& ids, double multiplier) {
  for (const auto& e : form.edges()) raw_.push_back({ids[e.x], ids[e.y], multiplier * e.c});
}

FiniteForm FormBuilder::build() && { return FiniteForm(n_, std::move(raw_)); }

FiniteForm trace(const FiniteForm& form, const std::vector<int>& keep) {
  if (keep.empty()) throw Error(ErrorKind::DomainError, "trace onto an empty set");
  const int n = form.size();
  const std::vector<int> pos = positions(n, keep);
  const int k = static_cast<int>(keep.size());
  FormBuilder out(k);
  for (const auto& e : form.edges())
    if (pos[e.x] >= 0 && pos[e.y] >= 0) out.add(pos[e.x], pos[e.y], e.c);
  if (k == n) return std::move(out).build();

  const auto adj = adjacency(form);
  for (const InteriorPiece& piece : interior_pieces(adj, pos)) {
    if (piece.boundary.empty()) throw Error(ErrorKind::Disconnected, "interior component detached from the kept set");
    const PieceSystem sys = piece_system(piece, adj, pos);
    const SpdSolver solver(sys.lcc, static_cast<int>(piece.interior.size()), "trace");
    const Eigen::MatrixXd x = solver.solve(sys.gcb);
    const Eigen::MatrixXd added = sys.gcb.transpose() * x;
    const double scale = added.cwiseAbs().maxCoeff();
    const int nb = static_cast<int>(piece.boundary.size());
    for (int a = 0; a < nb; ++a) {
      for (int b = a + 1; b < nb; ++b) {
        double c = 0.5 * (added(a, b) + added(b, a));
        if (c < 0) {
          if (c < -kDust * std::max(scale, 1.0))
            throw Error(ErrorKind::NegativeConductance, "trace produced conductance " + std::to_string(c));
          continue;
        }
        out.add(piece.boundary[a], piece.boundary[b], c);
      }
    }
  }
  return std::move(out).build();
}

Eigen::VectorXd harmonic_extension(const FiniteForm& form, const std::vector<int>& boundary,
                                   const Eigen::VectorXd& values) {
  if (boundary.empty()) throw Error(ErrorKind::DomainError, "harmonic extension needs boundary vertices");
  if (values.size() != static_cast<Eigen::Index>(boundary.size()))
    throw Error(ErrorKind::DomainError, "boundary values do not match boundary size");
  require_connected(form);
  const std::vector<int> pos = positions(form.size(), boundary);
  Eigen::VectorXd f = Eigen::VectorXd::Zero(form.size());
  for (std::size_t k = 0; k < boundary.size(); ++k) f[boundary[k]] = values[k];
  const auto adj = adjacency(form);
  for (const InteriorPiece& piece : interior_pieces(adj, pos)) {
    const PieceSystem sys = piece_system(piece, adj, pos);
    const SpdSolver solver(sys.lcc, static_cast<int>(piece.interior.size()), "harmonic extension");
    Eigen::VectorXd fb(piece.boundary.size());
    for (std::size_t k = 0; k < piece.boundary.size(); ++k) fb[k] = values[piece.boundary[k]];
    const Eigen::VectorXd u = solver.solve(sys.gcb * fb);
    for (std::size_t k = 0; k < piece.interior.size(); ++k) f[piece.interior[k]] = u[k];
  }
  return f;
}

struct ResistanceSolver::Impl {
  int n;
  std::optional<SpdSolver> solver;
};

ResistanceSolver::ResistanceSolver(const FiniteForm& form) : impl_(std::make_unique<Impl>()) {
  require_connected(form);
  impl_->n = form.size();
  if (impl_->n <= 1) return;
  std::vector<Eigen::Triplet<double>> t;
  for (const auto& e : form.edges()) {
    if (e.x > 0 && e.y > 0) {
      t.emplace_back(e.x - 1, e.y - 1, -e.c);
      t.emplace_back(e.y - 1, e.x - 1, -e.c);
    }
    if (e.x > 0) t.emplace_back(e.x - 1, e.x - 1, e.c);
    t.emplace_back(e.y - 1, e.y - 1, e.c);
  }
  impl_->solver.emplace(t, impl_->n - 1, "grounded Laplacian");
}

ResistanceSolver::~ResistanceSolver() = default;
ResistanceSolver::ResistanceSolver(ResistanceSolver&&) noexcept = default;
ResistanceSolver& ResistanceSolver::operator=(ResistanceSolver&&) noexcept = default;

Eigen::VectorXd ResistanceSolver::potential(int x, int y) const {
  const int n = impl_->n;
  if (x < 0 || y < 0 || x >= n || y >= n) throw Error(ErrorKind::UnknownVertex, "vertex out of range");
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  if (x == y || n <= 1) return v;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n - 1);
  if (x > 0) rhs[x - 1] += 1;
  if (y > 0) rhs[y - 1] -= 1;
  v.tail(n - 1) = impl_->solver->solve(rhs);
  return v;
}

double ResistanceSolver::resistance(int x, int y) const {
  if (x == y) return 0.0;
  if (x > y) std::swap(x, y);  // exact symmetry
  const Eigen::VectorXd v = potential(x, y);
  return v[x] - v[y];
}

Eigen::MatrixXd ResistanceSolver::resistance_matrix() const {
  const int n = impl_->n;
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(n, n);
  if (n <= 1) return r;
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
  g.bottomRightCorner(n - 1, n - 1) = impl_->solver->solve(Eigen::MatrixXd::Identity(n - 1, n - 1));
  for (int x = 0; x < n; ++x)
    for (int y = x + 1; y < n; ++y) r(x, y) = r(y, x) = g(x, x) + g(y, y) - g(x, y) - g(y, x);
  return r;
}

double effective_resistance(const FiniteForm& form, int x, int y) {
  if (x == y) throw Error(ErrorKind::BadTarget, "source and target coincide");
  return ResistanceSolver(form).resistance(x, y);
}

double effective_resistance(const FiniteForm& form, int x, const std::vector<int>& target) {
  if (target.empty()) throw Error(ErrorKind::BadTarget, "empty target set");
  const int n = form.size();
  std::vector<int> map(n, -1);
  for (int t : target) {
    if (t < 0 || t >= n) throw Error(ErrorKind::UnknownVertex, "target vertex out of range");
    if (t == x) throw Error(ErrorKind::BadTarget, "source lies in the target set");
    map[t] = 0;
  }
  int next = 1;
  for (int v = 0; v < n; ++v)
    if (map[v] < 0) map[v] = next++;
  FormBuilder merged(next);
  for (const auto& e : form.edges())
    if (map[e.x] != map[e.y]) merged.add(map[e.x], map[e.y], e.c);
  return ResistanceSolver(std::move(merged).build()).resistance(map[x], 0);
}

FormComparison form_comparison(const FiniteForm& form1, const FiniteForm& form2) {
  if (form1.size() != form2.size()) throw Error(ErrorKind::MismatchedVertexSets, "forms live on different vertex sets");
  const int n = form1.size();
  if (n < 2) throw Error(ErrorKind::DomainError, "comparison needs at least two vertices");
  const Eigen::MatrixXd r1 = ResistanceSolver(form1).resistance_matrix();
  const Eigen::MatrixXd r2 = ResistanceSolver(form2).resistance_matrix();
  double lo = std::numeric_limits<double>::infinity(), hi = 0;
  for (int x = 0; x < n; ++x)
    for (int y = x + 1; y < n; ++y) {
      const double q = r1(x, y) / r2(x, y);
      lo = std::min(lo, q);
      hi = std::max(hi, q);
    }
  const double pairs = 0.5 * n * (n - 1);
  return {lo / pairs, hi * pairs, lo, hi};
}

namespace {

void check_resolvent_input(const FiniteForm& form, const Eigen::VectorXd& masses, double alpha) {
  if (!(alpha > 0)) throw Error(ErrorKind::DomainError, "alpha must be positive");
  if (masses.size() != form.size()) throw Error(ErrorKind::BadMeasure, "mass vector size mismatch");
  if ((masses.array() <= 0).any()) throw Error(ErrorKind::BadMeasure, "masses must be positive");
  if (std::abs(masses.sum() - 1.0) > 1e-12) throw Error(ErrorKind::BadMeasure, "masses must sum to 1");
  require_connected(form);
}

SpdSolver shifted_solver(const FiniteForm& form, const Eigen::VectorXd& masses, double alpha) {
  std::vector<Eigen::Triplet<double>> t;
  for (const auto& e : form.edges()) {
    t.emplace_back(e.x, e.y, -e.c);
    t.emplace_back(e.y, e.x, -e.c);
    t.emplace_back(e.x, e.x, e.c);
    t.emplace_back(e.y, e.y, e.c);
  }
  for (int v = 0; v < form.size(); ++v) t.emplace_back(v, v, alpha * masses[v]);
  return SpdSolver(t, form.size(), "resolvent");
}

}  // namespace

ResolventKernel resolvent(const FiniteForm& form, const Eigen::VectorXd& masses, double alpha) {
  check_resolvent_input(form, masses, alpha);
  const SpdSolver solver = shifted_solver(form, masses, alpha);
  return {alpha, masses, solver.solve(Eigen::MatrixXd::Identity(form.size(), form.size()))};
}

Eigen::MatrixXd resolvent_columns(const FiniteForm& form, const Eigen::VectorXd& masses, double alpha,
                                  const std::vector<int>& columns) {
  check_resolvent_input(form, masses, alpha);
  const SpdSolver solver = shifted_solver(form, masses, alpha);
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(form.size(), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t k = 0; k < columns.size(); ++k) {
    if (columns[k] < 0 || columns[k] >= form.size()) throw Error(ErrorKind::UnknownVertex, "column out of range");
    rhs(columns[k], static_cast<Eigen::Index>(k)) = 1.0;
  }
  return solver.solve(rhs);
}

}  // namespace agres
