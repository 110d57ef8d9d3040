#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "agres/approx.hpp"
#include "agres/geometry.hpp"
#include "agres/renorm.hpp"

namespace agres {

/// A parameter target: an exact rational, or 1/sqrt(N) for non-square N.
struct Target {
  std::string text;
  std::optional<Rational> exact;
  unsigned long sqrt_arg = 0;  // N when the target is 1/sqrt(N)
  double value = 0;

  /// Accepts "1/sqrtN", "1/sqrt(N)", "p/q" and decimal literals.
  static Target parse(const std::string& text);
  /// floor(2^n t + 1/2), computed exactly.
  mpz_class round_scaled(int n) const;
};

struct ScheduleEntry {
  int n;
  Rational lambda;
};

struct DyadicSchedule {
  Target target;
  std::vector<ScheduleEntry> entries;
};

/// lambda_n = floor(2^n t + 1/2) / 2^n for n in [n_lo, n_hi].
DyadicSchedule dyadic_schedule(const Target& target, int n_lo, int n_hi);

/// Inclusive range written "a..b" or a single integer.
std::pair<int, int> parse_range(const std::string& text);

/// A point given by address: corner i of the cell F_w.
struct Address {
  Word word;
  int corner = 1;
  std::string str() const;  // "(4,1)"; the empty word gives "(1)"
  Point at(const Ifs& ifs) const { return ifs.word_map(word).apply(Ifs::corner(corner)); }
};

struct AddressPair {
  Address x;
  Address y;
  std::string str() const { return x.str() + ":" + y.str(); }
};

/// "(4,1):(4,2);(1):(2)". Inside parentheses the last entry is the corner and
/// the rest spell the word.
std::vector<AddressPair> parse_tracked_pairs(const std::string& text);

struct ConvergenceOptions {
  double s = 0.5;
  int level = 2;
  std::vector<AddressPair> pairs;
  std::optional<double> alpha;
  MeasureScheme measure = MeasureScheme::Hausdorff;
  SolveOptions solve;
  double gap_threshold = 1e-2;
  /// Successive differences at or below this are treated as zero in trend
  /// checks, so solver noise on constant columns does not break monotonicity.
  double noise_floor = 1e-9;
  int threads = 1;
};

struct ConvergenceRow {
  int n;
  Rational lambda;
  double r;
  double residual;
  std::vector<double> resistance;  // per tracked pair
  std::vector<double> kernel;      // per tracked pair, when alpha is set
};

struct Verdict {
  std::string quantity;
  std::vector<double> diffs;  // |q_{k+1} - q_k| for adjacent rows
  bool trend = false;         // last three differences nonincreasing
  bool final_gap = false;     // last difference <= threshold
  bool pass() const { return trend && final_gap; }
};

struct ConvergenceReport {
  DyadicSchedule schedule;
  ConvergenceOptions options;
  std::vector<ConvergenceRow> rows;
  std::vector<Verdict> verdicts;  // r first, then R per pair, then u per pair
  bool all_pass() const;
};

/// Trend and final-gap check on one column.
Verdict judge(const std::string& quantity, const std::vector<double>& column, double threshold, double noise_floor);

ConvergenceReport convergence_report(const DyadicSchedule& schedule, const ConvergenceOptions& opts);

struct HausdorffCheck {
  double estimate;
  double bound;
  bool pass;  // estimate <= bound + 2 * 2^-depth
};

HausdorffCheck hausdorff_check(const Rational& lambda1, const Rational& lambda2, int depth);

struct TrackingSummary {
  long points = 0;
  double worst_ratio = 0;  // max distance / (2 |lambda1 - lambda2|)
};

/// Checks d(F_w p_i at lambda1, F_w p_i at lambda2) <= 2 |lambda1 - lambda2|
/// exactly for every word of length <= max_len. Throws TrackingError on the
/// first violation.
TrackingSummary tracking_check(const Rational& lambda1, const Rational& lambda2, int max_len);

struct GammaRow {
  int n;
  Rational lambda;
  double energy;             // energy of the harmonic extension at lambda_n
  double transplant_energy;  // energy of the lambda_N harmonic extension moved to lambda_n
  bool minimal;              // transplant_energy >= energy - tol
};

struct GammaReport {
  std::vector<GammaRow> rows;
  std::vector<double> diffs;
};

/// Finite-level proxy for the recovery and liminf directions: f gives the
/// values at p1, p2, p3.
GammaReport gamma_diagnostic(const DyadicSchedule& schedule, double s, const std::array<double, 3>& f, int level,
                             const SolveOptions& opts = {});

}  // namespace agres
