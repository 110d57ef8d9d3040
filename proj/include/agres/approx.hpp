#pragma once

#include <array>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "agres/geometry.hpp"
#include "agres/network.hpp"
#include "agres/renorm.hpp"

namespace agres {

/// The solved form traced onto the level-m vertex set.
struct LevelForm {
  int m = 0;
  GraphApprox graph;
  /// local[c][j]: boundary index whose image under the cell map is
  /// graph.cells[c].vertices[j].
  std::vector<std::vector<int>> local;
  FiniteForm form;
};

/// Sum over words of r_w^{-1} times the trace of D onto the boundary points
/// present in each cell.
LevelForm level_form(const Instance& inst, const Solution& sol, int m, int cap = 8);

enum class MeasureScheme { Hausdorff, Uniform, Custom };

struct MeasureSpec {
  MeasureScheme scheme = MeasureScheme::Hausdorff;
  std::array<double, 4> weights{};
  double dimension = 0;  // similarity dimension (Hausdorff scheme only)
};

/// Solves sum_i ratio_i^d = 1 by bisection.
double similarity_dimension(const std::vector<double>& ratios);
MeasureSpec measure_weights(const Ifs& ifs, MeasureScheme scheme, const std::array<double, 4>& custom = {});
MeasureScheme parse_measure_scheme(const std::string& name);
const char* to_string(MeasureScheme scheme);

/// Each cell spreads its measure equally over its three corner images.
Eigen::VectorXd vertex_masses(const LevelForm& lf, const MeasureSpec& mu);

struct PairResistance {
  int x;
  int y;
  double value;
};

std::vector<PairResistance> resistance_metric(const LevelForm& lf, const std::vector<std::pair<Point, Point>>& pairs);

struct BoundaryCheck {
  double value;      // R(p1, bottom edge vertices) at level m
  double bound;      // s r / (2 (s + r))
  double reference;  // R(p1, {p2, p3}) at level m, an upper reference
  bool pass;
};

BoundaryCheck boundary_resistance_check(const Instance& inst, const Solution& sol, int m);

/// Trace of the solved form onto an arbitrary finite subset of the vertex
/// union, computed by recursive subdivision without building V_m.
class BoundaryTrace {
 public:
  BoundaryTrace(const Instance& inst, const Solution& sol, int depth_cap = 64);
  ~BoundaryTrace();
  /// The returned form is indexed like `points`.
  FiniteForm onto(const std::vector<Point>& points);
  double resistance(const Point& x, const Point& y);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct ResistanceEnvelope {
  double theta = 0;
  double eta_star = 0;
  double eta_sub = 0;
  double c1 = 0;
  double c2 = 0;
};

struct ExponentFit {
  double theta_fit = 0;
  double theta = 0;
  double c1 = 0;  // min R / d^theta
  double c2 = 0;  // max R / d^theta
  double spread = 0;
  ResistanceEnvelope envelope;
  std::vector<std::pair<double, double>> samples;  // (d, R)
};

/// Pairs of consecutive dyadic points on the bottom edge at every scale 2^-k.
std::vector<std::pair<Point, Point>> dyadic_edge_pairs(int k_min, int k_max, int per_scale);

ExponentFit scaling_exponent(const Instance& inst, const Solution& sol, int level_min, int level_max,
                             int per_scale = 4);

struct DecimationCheck {
  double energy;     // E^(m)(h)
  double decimated;  // sum_i r_i^{-1} [E]_{U_i}(h o F_i)
  double rel_error;
  int nested_cells;  // cells whose U_i is not V_{m-1}, evaluated by nested trace
};

/// Self-similarity of the level forms: h is the E^(m)-harmonic extension of
/// the corner values, and U_i = F_i^{-1}(V_m within cell i). When U_i equals
/// V_{m-1} the cell energy is read from E^(m-1); otherwise from the nested
/// boundary trace onto U_i.
DecimationCheck decimation_check(const Instance& inst, const Solution& sol, int m, const std::array<double, 3>& corner_values);

ResolventKernel resolvent_kernel(const LevelForm& lf, double alpha, const MeasureSpec& mu);

}  // namespace agres
