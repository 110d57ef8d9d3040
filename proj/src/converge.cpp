#include "agres/converge.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <regex>
#include <sstream>
#include <thread>

#include "agres/errors.hpp"

namespace agres {

Target Target::parse(const std::string& text) {
  static const std::regex inv_sqrt(R"(\s*1\s*/\s*sqrt\s*\(?\s*(\d+)\s*\)?\s*)");
  Target t;
  t.text = text;
  std::smatch m;
  if (std::regex_match(text, m, inv_sqrt)) {
    const mpz_class n(m[1].str(), 10);
    if (n == 0) throw Error(ErrorKind::ParseError, "1/sqrt(0) is undefined");
    if (!n.fits_ulong_p()) throw Error(ErrorKind::ParseError, "radicand too large in '" + text + "'");
    if (mpz_perfect_square_p(n.get_mpz_t())) {
      t.exact = Rational(mpz_class(1), mpz_class(sqrt(n)));
      t.value = t.exact->get_d();
    } else {
      t.sqrt_arg = n.get_ui();
      t.value = 1.0 / std::sqrt(static_cast<double>(t.sqrt_arg));
    }
    return t;
  }
  t.exact = parse_rational(text);
  t.value = t.exact->get_d();
  return t;
}

mpz_class Target::round_scaled(int n) const {
  mpz_class pow2;
  mpz_ui_pow_ui(pow2.get_mpz_t(), 2, static_cast<unsigned long>(n));
  if (exact) {
    // floor((2^(n+1) p + q) / (2 q))
    mpz_class num = 2 * pow2 * exact->get_num() + exact->get_den(), den = 2 * exact->get_den(), out;
    mpz_fdiv_q(out.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    return out;
  }
  // k = floor(2^n / sqrt(N) + 1/2) is the largest k with (2k - 1)^2 N <= 4^(n+1).
  mpz_class quarter = 4 * pow2 * pow2, q, root;
  mpz_fdiv_q_ui(q.get_mpz_t(), quarter.get_mpz_t(), sqrt_arg);
  mpz_sqrt(root.get_mpz_t(), q.get_mpz_t());
  mpz_class k = root + 1;
  mpz_fdiv_q_ui(k.get_mpz_t(), k.get_mpz_t(), 2);
  return k;
}

DyadicSchedule dyadic_schedule(const Target& target, int n_lo, int n_hi) {
  if (n_lo > n_hi) throw Error(ErrorKind::DomainError, "n range is empty");
  if (n_lo < 1 || n_hi > 60) throw Error(ErrorKind::DomainError, "n must lie in [1,60]");
  if (!(target.value > 0 && target.value < 0.5))
    throw Error(ErrorKind::DomainError, "target " + target.text + " outside (0,1/2)");
  DyadicSchedule sched{target, {}};
  for (int n = n_lo; n <= n_hi; ++n) {
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 2, static_cast<unsigned long>(n));
    Rational lambda(target.round_scaled(n), den);
    lambda.canonicalize();
    if (lambda <= 0 || lambda >= Rational(1, 2))
      throw Error(ErrorKind::DomainError, "lambda_" + std::to_string(n) + " = " + rational_string(lambda) +
                                              " leaves (0,1/2)");
    sched.entries.push_back({n, lambda});
  }
  return sched;
}

std::pair<int, int> parse_range(const std::string& text) {
  static const std::regex range(R"(\s*(-?\d+)\s*(?:\.\.\s*(-?\d+)\s*)?)");
  std::smatch m;
  if (!std::regex_match(text, m, range)) throw Error(ErrorKind::ParseError, "bad range '" + text + "', want a..b");
  const int lo = std::stoi(m[1].str());
  return {lo, m[2].matched ? std::stoi(m[2].str()) : lo};
}

std::string Address::str() const {
  std::string out = "(";
  for (int letter : word.letters) out += std::to_string(letter) + ",";
  return out + std::to_string(corner) + ")";
}

namespace {

Address parse_address(const std::string& text) {
  static const std::regex shape(R"(\s*\(([^()]*)\)\s*)");
  std::smatch m;
  if (!std::regex_match(text, m, shape)) throw Error(ErrorKind::ParseError, "bad address '" + text + "'");
  std::vector<std::string> tokens;
  std::stringstream in(m[1].str());
  for (std::string tok; std::getline(in, tok, ',');) {
    tok.erase(std::remove_if(tok.begin(), tok.end(), [](unsigned char c) { return std::isspace(c); }), tok.end());
    if (tok.empty() || tok == "e" || tok == "\xE2\x88\x85") continue;  // the empty word may be written as ∅
    tokens.push_back(tok);
  }
  if (tokens.empty()) throw Error(ErrorKind::ParseError, "address '" + text + "' has no corner");
  Address a;
  const std::string& last = tokens.back();
  if (last.size() != 1 || last[0] < '1' || last[0] > '3')
    throw Error(ErrorKind::ParseError, "corner must be 1..3 in '" + text + "'");
  a.corner = last[0] - '0';
  tokens.pop_back();
  std::string word;
  for (const auto& tok : tokens) word += (word.empty() ? "" : ",") + tok;
  a.word = Word::parse(word);
  return a;
}

}  // namespace

std::vector<AddressPair> parse_tracked_pairs(const std::string& text) {
  std::vector<AddressPair> out;
  std::stringstream in(text);
  for (std::string item; std::getline(in, item, ';');) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw Error(ErrorKind::ParseError, "pair '" + item + "' needs the form (w,i):(w,i)");
    out.push_back({parse_address(item.substr(0, colon)), parse_address(item.substr(colon + 1))});
  }
  if (out.empty()) throw Error(ErrorKind::ParseError, "no tracked pairs in '" + text + "'");
  return out;
}

Verdict judge(const std::string& quantity, const std::vector<double>& column, double threshold, double noise_floor) {
  Verdict v;
  v.quantity = quantity;
  for (std::size_t k = 1; k < column.size(); ++k) v.diffs.push_back(std::abs(column[k] - column[k - 1]));
  const auto clean = [&](double d) { return d <= noise_floor ? 0.0 : d; };
  v.trend = true;
  const std::size_t from = v.diffs.size() >= 3 ? v.diffs.size() - 3 : 0;
  for (std::size_t k = from + 1; k < v.diffs.size(); ++k)
    if (clean(v.diffs[k]) > clean(v.diffs[k - 1])) v.trend = false;
  v.final_gap = v.diffs.empty() || v.diffs.back() <= threshold;
  return v;
}

bool ConvergenceReport::all_pass() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass(); });
}

namespace {

// Runs job(k) for k in [0, count) on up to `threads` workers. The first
// exception (by index) is rethrown after all workers finish.
template <class Job>
void parallel_for(std::size_t count, int threads, Job job) {
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t k; (k = next++) < count;) {
      try {
        job(k);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const int n = std::max(1, std::min<int>(threads, static_cast<int>(count)));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

int tracked_vertex(const LevelForm& lf, const Ifs& ifs, const Address& a) {
  if (static_cast<int>(a.word.size()) > lf.m)
    throw Error(ErrorKind::TrackingError, "address " + a.str() + " is finer than level " + std::to_string(lf.m));
  auto id = lf.graph.find(a.at(ifs));
  if (!id) throw Error(ErrorKind::TrackingError, "address " + a.str() + " is not a level-" + std::to_string(lf.m) + " vertex");
  return *id;
}

}  // namespace

ConvergenceReport convergence_report(const DyadicSchedule& schedule, const ConvergenceOptions& opts) {
  if (opts.pairs.empty()) throw Error(ErrorKind::DomainError, "no tracked pairs");
  if (opts.alpha && !(*opts.alpha > 0)) throw Error(ErrorKind::DomainError, "alpha must be positive");
  ConvergenceReport rep{schedule, opts, {}, {}};
  rep.rows.resize(schedule.entries.size());

  parallel_for(schedule.entries.size(), opts.threads, [&](std::size_t k) {
    const auto& e = schedule.entries[k];
    const Instance inst = Instance::make(e.lambda);
    const Solution sol = solve_r(inst, opts.s, opts.solve);
    const LevelForm lf = level_form(inst, sol, opts.level);
    ConvergenceRow row{e.n, e.lambda, sol.r, sol.residual, {}, {}};
    std::vector<int> xs, ys;
    for (const auto& p : opts.pairs) {
      xs.push_back(tracked_vertex(lf, inst.ifs, p.x));
      ys.push_back(tracked_vertex(lf, inst.ifs, p.y));
    }
    const ResistanceSolver solver(lf.form);
    for (std::size_t j = 0; j < xs.size(); ++j) row.resistance.push_back(solver.resistance(xs[j], ys[j]));
    if (opts.alpha) {
      const Eigen::VectorXd masses = vertex_masses(lf, measure_weights(inst.ifs, opts.measure));
      const Eigen::MatrixXd cols = resolvent_columns(lf.form, masses, *opts.alpha, xs);
      for (std::size_t j = 0; j < xs.size(); ++j) row.kernel.push_back(cols(ys[j], static_cast<Eigen::Index>(j)));
    }
    rep.rows[k] = std::move(row);
  });

  // Tracked points move by at most 2 |lambda_n - lambda_n'| between rows.
  for (std::size_t k = 1; k < rep.rows.size(); ++k)
    for (const auto& p : opts.pairs)
      for (const Address* a : {&p.x, &p.y}) track_point(a->word, a->corner, rep.rows[k - 1].lambda, rep.rows[k].lambda);

  const auto column = [&](auto get) {
    std::vector<double> c;
    for (const auto& row : rep.rows) c.push_back(get(row));
    return c;
  };
  rep.verdicts.push_back(judge("r", column([](const ConvergenceRow& r) { return r.r; }), opts.gap_threshold,
                               opts.noise_floor));
  for (std::size_t j = 0; j < opts.pairs.size(); ++j)
    rep.verdicts.push_back(judge("R" + opts.pairs[j].str(), column([j](const ConvergenceRow& r) { return r.resistance[j]; }),
                                 opts.gap_threshold, opts.noise_floor));
  if (opts.alpha)
    for (std::size_t j = 0; j < opts.pairs.size(); ++j)
      rep.verdicts.push_back(judge("u" + opts.pairs[j].str(), column([j](const ConvergenceRow& r) { return r.kernel[j]; }),
                                   opts.gap_threshold, opts.noise_floor));
  return rep;
}

HausdorffCheck hausdorff_check(const Rational& lambda1, const Rational& lambda2, int depth) {
  const HausdorffEstimate h = hausdorff_distance(Ifs::make(lambda1), Ifs::make(lambda2), depth);
  return {h.estimate, h.bound, h.estimate <= h.bound + 2.0 * std::ldexp(1.0, -depth)};
}

TrackingSummary tracking_check(const Rational& lambda1, const Rational& lambda2, int max_len) {
  const Ifs a = Ifs::make(lambda1), b = Ifs::make(lambda2);
  const Rational diff = lambda1 - lambda2;
  const Scalar bound2(Rational(4 * diff * diff));
  const double bound = 2.0 * std::abs(diff.get_d());
  TrackingSummary out;
  Word w;
  const auto rec = [&](auto&& self, const Similarity& fa, const Similarity& fb) -> void {
    for (int i = 1; i <= 3; ++i) {
      const Point p = fa.apply(Ifs::corner(i)), q = fb.apply(Ifs::corner(i));
      const Scalar d2 = squared_distance(p, q);
      if (compare(d2, bound2) > 0)
        throw Error(ErrorKind::TrackingError, "corner " + std::to_string(i) + " of word " + w.str() +
                                                  " moved farther than 2|lambda1-lambda2|");
      ++out.points;
      if (bound > 0) out.worst_ratio = std::max(out.worst_ratio, std::sqrt(d2.to_double()) / bound);
    }
    if (static_cast<int>(w.size()) == max_len) return;
    for (int i = 1; i <= 4; ++i) {
      w.letters.push_back(i);
      self(self, fa.compose(a.map(i)), fb.compose(b.map(i)));
      w.letters.pop_back();
    }
  };
  rec(rec, Similarity{}, Similarity{});
  return out;
}

namespace {

struct GammaLevel {
  Instance inst;
  LevelForm lf;
  Eigen::VectorXd harmonic;
  double energy;
};

GammaLevel gamma_level(const Rational& lambda, double s, const std::array<double, 3>& f, int level,
                       const SolveOptions& opts) {
  Instance inst = Instance::make(lambda);
  const Solution sol = solve_r(inst, s, opts);
  LevelForm lf = level_form(inst, sol, level);
  const Eigen::VectorXd h = harmonic_extension(lf.form, {0, 1, 2}, Eigen::Vector3d(f[0], f[1], f[2]));
  const double e = lf.form.energy(h);
  return {std::move(inst), std::move(lf), h, e};
}

std::vector<Similarity> word_maps(const Ifs& ifs, int level) {
  std::vector<Similarity> out;
  for_each_word(ifs, level, [&](const Word&, const Similarity& f) { out.push_back(f); });
  return out;
}

}  // namespace

GammaReport gamma_diagnostic(const DyadicSchedule& schedule, double s, const std::array<double, 3>& f, int level,
                             const SolveOptions& opts) {
  if (schedule.entries.empty()) throw Error(ErrorKind::DomainError, "empty schedule");
  const GammaLevel last = gamma_level(schedule.entries.back().lambda, s, f, level, opts);
  const std::vector<Similarity> last_maps = word_maps(last.inst.ifs, level);

  GammaReport rep;
  for (const auto& e : schedule.entries) {
    const GammaLevel cur = gamma_level(e.lambda, s, f, level, opts);
    // Each vertex takes the value of the last harmonic extension at its first
    // address F_w p_i (words of length `level` in lexicographic order).
    const std::vector<Similarity> maps = word_maps(cur.inst.ifs, level);
    Eigen::VectorXd moved = Eigen::VectorXd::Constant(cur.harmonic.size(), NAN);
    for (std::size_t k = 0; k < maps.size(); ++k)
      for (int i = 1; i <= 3; ++i) {
        const int x = *cur.lf.graph.find(maps[k].apply(Ifs::corner(i)));
        if (!std::isnan(moved[x])) continue;
        auto y = last.lf.graph.find(last_maps[k].apply(Ifs::corner(i)));
        if (!y) throw Error(ErrorKind::TrackingError, "vertex address missing at the final parameter");
        moved[x] = last.harmonic[*y];
      }
    const double te = cur.lf.form.energy(moved);
    rep.rows.push_back({e.n, e.lambda, cur.energy, te, te >= cur.energy - 1e-9 * std::max(1.0, cur.energy)});
  }
  for (std::size_t k = 1; k < rep.rows.size(); ++k)
    rep.diffs.push_back(std::abs(rep.rows[k].energy - rep.rows[k - 1].energy));
  return rep;
}

}  // namespace agres
