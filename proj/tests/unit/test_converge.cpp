#include <cmath>
#include <random>

#include "agres/converge.hpp"
#include "agres/errors.hpp"
#include "doctest.h"

using namespace agres;

TEST_CASE("target parsing") {
  const Target t = Target::parse("1/sqrt8");
  CHECK_FALSE(t.exact.has_value());
  CHECK(t.sqrt_arg == 8);
  CHECK(t.value == doctest::Approx(1 / std::sqrt(8.0)).epsilon(1e-15));
  CHECK(Target::parse("1/sqrt(8)").sqrt_arg == 8);
  CHECK(*Target::parse("3/8").exact == Rational(3, 8));
  CHECK(*Target::parse("0.375").exact == Rational(3, 8));
  // Leading zeros are decimal, never octal.
  CHECK(parse_rational("010/32") == Rational(5, 16));
  CHECK(parse_rational("+3/08") == Rational(3, 8));
  CHECK(parse_rational("0.0625") == Rational(1, 16));
  CHECK(Target::parse("1/sqrt08").sqrt_arg == 8);
  CHECK_THROWS_AS(Target::parse("pi/9"), Error);
  CHECK(*Target::parse("1/sqrt4").exact == Rational(1, 2));
  CHECK_THROWS_AS(Target::parse("1/sqrt0"), Error);
}

TEST_CASE("exact rounding matches long double at moderate n") {
  for (const char* text : {"1/sqrt8", "1/sqrt7", "1/sqrt11", "2/7", "0.3"}) {
    const Target t = Target::parse(text);
    for (int n = 1; n <= 40; ++n) {
      const long double scaled = std::ldexp(static_cast<long double>(t.value), n);
      const long double frac = scaled - std::floor(scaled);
      if (std::abs(frac - 0.5L) < 1e-9L) continue;  // too close to a tie for the float check
      CHECK(t.round_scaled(n) == mpz_class(static_cast<long>(std::floor(scaled + 0.5L))));
    }
  }
}

TEST_CASE("dyadic schedule examples") {
  const DyadicSchedule s = dyadic_schedule(Target::parse("1/sqrt8"), 4, 10);
  REQUIRE(s.entries.size() == 7);
  CHECK(s.entries[0].lambda == Rational(3, 8));
  CHECK(s.entries[2].lambda == Rational(23, 64));
  for (std::size_t k = 0; k < s.entries.size(); ++k) {
    const auto& e = s.entries[k];
    CHECK(e.lambda > 0);
    CHECK(e.lambda < Rational(1, 2));
    CHECK(std::abs(e.lambda.get_d() - s.target.value) <= std::ldexp(1.0, -e.n - 1) * (1 + 1e-12));
    if (k) CHECK(e.n > s.entries[k - 1].n);
  }
  for (const auto& e : dyadic_schedule(Target::parse("1/4"), 2, 12).entries) CHECK(e.lambda == Rational(1, 4));
  CHECK_THROWS_AS(dyadic_schedule(Target::parse("1/sqrt8"), 5, 4), Error);
  CHECK_THROWS_AS(dyadic_schedule(Target::parse("1/sqrt8"), 1, 3), Error);  // lambda_1 = 1/2
  CHECK_THROWS_AS(dyadic_schedule(Target::parse("3/4"), 2, 3), Error);
}

TEST_CASE("range and pair parsing") {
  CHECK(parse_range("4..10") == std::pair{4, 10});
  CHECK(parse_range("7") == std::pair{7, 7});
  CHECK_THROWS_AS(parse_range("4-10"), Error);

  const auto pairs = parse_tracked_pairs("(4,1):(4,2);(1):(2)");
  REQUIRE(pairs.size() == 2);
  CHECK(pairs[0].x.word.letters == std::vector<int>{4});
  CHECK(pairs[0].x.corner == 1);
  CHECK(pairs[0].y.corner == 2);
  CHECK(pairs[1].x.word.empty());
  CHECK(pairs[0].str() == "(4,1):(4,2)");
  CHECK(pairs[1].str() == "(1):(2)");
  CHECK(parse_tracked_pairs("(∅,1):(e,3)")[0].y.corner == 3);
  CHECK_THROWS_AS(parse_tracked_pairs("(4,5):(1)"), Error);
  CHECK_THROWS_AS(parse_tracked_pairs("(0.5,0.2):(1)"), Error);
}

TEST_CASE("verdicts") {
  const Verdict ok = judge("q", {1.0, 0.5, 0.3, 0.25, 0.24}, 1e-1, 1e-9);
  CHECK(ok.diffs.size() == 4);
  CHECK(ok.trend);
  CHECK(ok.final_gap);
  CHECK(ok.pass());

  const Verdict bumpy = judge("q", {1.0, 0.5, 0.45, 0.2, 0.19}, 1e-1, 1e-9);
  CHECK_FALSE(bumpy.trend);

  const Verdict flat = judge("q", {0.5, 0.5 + 1e-12, 0.5, 0.5 - 1e-13}, 1e-2, 1e-9);
  CHECK(flat.pass());

  CHECK_FALSE(judge("q", {1.0, 0.5, 0.3, 0.2}, 1e-2, 1e-9).final_gap);
}

TEST_CASE("constant schedule gives zero differences") {
  ConvergenceOptions o;
  o.level = 1;
  o.pairs = parse_tracked_pairs("(4,1):(4,2);(1):(2)");
  o.alpha = 1.0;
  const ConvergenceReport rep = convergence_report(dyadic_schedule(Target::parse("1/4"), 2, 5), o);
  REQUIRE(rep.rows.size() == 4);
  for (const Verdict& v : rep.verdicts)
    for (double d : v.diffs) CHECK(d == 0.0);
  CHECK(rep.all_pass());
}

TEST_CASE("converging schedule rows") {
  ConvergenceOptions o;
  o.level = 1;
  o.pairs = parse_tracked_pairs("(1):(2);(4,1):(4,2)");
  o.threads = 3;
  const DyadicSchedule sched = dyadic_schedule(Target::parse("1/sqrt8"), 4, 7);
  const ConvergenceReport rep = convergence_report(sched, o);
  REQUIRE(rep.rows.size() == 4);
  for (const auto& row : rep.rows) {
    CHECK(row.resistance[0] == doctest::Approx(2.0 / 3).epsilon(1e-10));
    CHECK(row.r >= 0.6);
    CHECK(row.r < 1.0);
  }
  REQUIRE(rep.verdicts.size() == 3);
  CHECK(rep.verdicts[0].quantity == "r");

  // Parallel rows reproduce the sequential report exactly.
  o.threads = 1;
  const ConvergenceReport seq = convergence_report(sched, o);
  for (std::size_t k = 0; k < rep.rows.size(); ++k) {
    CHECK(seq.rows[k].r == rep.rows[k].r);
    CHECK(seq.rows[k].resistance == rep.rows[k].resistance);
  }
}

TEST_CASE("hausdorff checks") {
  const HausdorffCheck same = hausdorff_check(Rational(3, 16), Rational(3, 16), 6);
  CHECK(same.estimate == 0.0);
  CHECK(same.pass);
  const HausdorffCheck wide = hausdorff_check(Rational(1, 8), Rational(3, 8), 8);
  CHECK(wide.bound == doctest::Approx(0.5));
  CHECK(wide.estimate <= 0.5 + 1.0 / 128);
  CHECK(wide.pass);

  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> num(1, 63);
  for (int k = 0; k < 5; ++k) {
    const Rational a(num(rng), 128), b(num(rng), 128);
    CHECK(hausdorff_check(a, b, 6).pass);
  }
}

TEST_CASE("tracking bound over all short words") {
  const TrackingSummary s = tracking_check(Rational(1, 4), Rational(23, 64), 5);
  CHECK(s.points == 3 * (1 + 4 + 16 + 64 + 256 + 1024));
  CHECK(s.worst_ratio <= 1.0);
  CHECK(s.worst_ratio > 0.0);
}

TEST_CASE("energy diagnostic") {
  const DyadicSchedule constant = dyadic_schedule(Target::parse("1/4"), 3, 5);
  const GammaReport zero = gamma_diagnostic(constant, 0.5, {0.7, 0.7, 0.7}, 2);
  for (const auto& row : zero.rows) CHECK(row.energy == doctest::Approx(0.0).epsilon(1e-14));

  const GammaReport flat = gamma_diagnostic(constant, 0.5, {1, 0, 0}, 2);
  for (double d : flat.diffs) CHECK(d == 0.0);

  const GammaReport moving = gamma_diagnostic(dyadic_schedule(Target::parse("1/sqrt8"), 4, 7), 0.5, {1, 0, 0}, 2);
  REQUIRE(!moving.diffs.empty());
  CHECK(moving.diffs.back() <= 1e-2);
  for (const auto& row : moving.rows) CHECK(row.minimal);
}
