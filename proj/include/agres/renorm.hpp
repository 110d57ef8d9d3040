#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "agres/geometry.hpp"
#include "agres/network.hpp"

namespace agres {

/// Weights (r1, r2, r3, r4). An infinite r4 drops the added cell entirely.
using Weights = std::array<double, 4>;

inline constexpr double kOpenCircuit = std::numeric_limits<double>::infinity();

/// Placement of the four copies of the boundary set inside the level-one
/// boundary set, with exact identification of shared points.
struct GlueLayout {
  int nodes = 0;
  std::array<std::vector<int>, 4> copy;  // copy[i][k] = node of F_{i+1}(boundary point k)
  std::vector<int> keep;                 // node of boundary point k
  int identifications = 0;
  std::vector<Point> points;             // exact node positions
};

/// Everything the renormalization map needs for one parameter value.
struct Instance {
  Ifs ifs;
  BoundarySet boundary;
  GlueLayout layout;           // all four copies
  GlueLayout layout_corners;   // corner copies only
  bool dyadic = true;

  static Instance make(const Rational& lambda);
  int p(int i) const { return i - 1; }  // boundary index of corner p_i
};

/// Builds the glued network (pre-trace) for weights w.
FiniteForm glue_level_one(const Instance& inst, const FiniteForm& d, const Weights& w);
/// The renormalization map: glue then trace back onto the boundary set.
FiniteForm renorm_map(const Instance& inst, const FiniteForm& d, const Weights& w);

/// Largest deviation of a conductance from its rotation orbit mean.
double asymmetry(const Instance& inst, const FiniteForm& d);
/// Replaces each conductance by the mean over its rotation orbit.
FiniteForm symmetrize(const Instance& inst, const FiniteForm& d);

/// Conductance 1/dt between consecutive perimeter points.
FiniteForm perimeter_form(const Instance& inst);
/// Random rotation-invariant conductances on every pair.
FiniteForm random_symmetric_form(const Instance& inst, std::uint64_t seed);

/// Scales d so that R(p1, p2) = 2/3.
FiniteForm normalize(const Instance& inst, const FiniteForm& d);

/// Max over pairs of |a - b| / max(|b|, 1e-15).
double relative_change(const FiniteForm& a, const FiniteForm& b);

struct EigenOptions {
  double tol = 1e-12;
  int max_iters = 10000;
  std::optional<FiniteForm> start;
};

struct EigenResult {
  double factor = 0;  // Lambda D = factor * D
  FiniteForm form;    // normalized
  int iterations = 0;
  double change = 0;
};

/// Normalized power iteration D <- normalize(Lambda_w D). Returns the limit and
/// its scale factor without range checks.
EigenResult power_iterate(const Instance& inst, const Weights& w, const EigenOptions& opts);

/// Eigenpair of Lambda_(1,1,1,rtilde4); kOpenCircuit drops the added cell.
EigenResult eigen_solve(const Instance& inst, double rtilde4, const EigenOptions& opts = {});

struct SolveOptions {
  EigenOptions eigen;
  double bisect_tol = 1e-10;
  int max_expansions = 60;
};

struct Solution {
  Rational lambda;
  double s = 0;
  double r = 0;
  double C = 0;
  double rtilde4 = 0;
  double theta = 0;
  double residual = 0;
  FiniteForm D;
  int eigen_iterations = 0;
  int bisection_steps = 0;
  bool experimental = false;
};

Solution solve_r(const Instance& inst, double s, const SolveOptions& opts = {});

struct ScanEntry {
  double r_prime;
  double factor;
};

/// Limiting scale factor of D <- Lambda_(r',r',r',s) D for each r'.
std::vector<ScanEntry> uniqueness_scan(const Instance& inst, const Solution& sol, const std::vector<double>& grid,
                                       const EigenOptions& opts = {});

struct Relation {
  std::vector<int> block;  // block id per boundary point (restricted growth)
  bool g_invariant = false;
  bool preserved = false;

  int blocks() const;
  bool is_trivial() const;
};

/// J^(k) restricted to the boundary set, as a block labelling.
std::vector<int> refine_relation(const Instance& inst, const std::vector<int>& block, int k);

/// All rotation-invariant equivalence relations on the boundary set that are
/// reproduced by one subdivision step (and by every step up to depth k).
std::vector<Relation> enumerate_preserved_relations(const Instance& inst, int k = 1, int guard = 12);

/// Every rotation-invariant equivalence relation on the boundary set.
std::vector<Relation> enumerate_invariant_relations(const Instance& inst, int guard = 12);

}  // namespace agres
