#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <itw/errors.hpp>
#include <itw/noise.hpp>
#include <itw/rng.hpp>
#include <itw/stats.hpp>

#include <cmath>
#include <sstream>

using namespace itw;

namespace {

MarkDistribution uniform_law(double intensity) {
  return MarkDistribution{intensity, UniformBoxMarks{Vec{-1.0}, Vec{1.0}}};
}

}  // namespace

TEST_CASE("wiener sampling is a pure function of (grid, seed)") {
  const TimeGrid grid{128, 1.0};
  const auto a = sample_wiener(grid, 3, 1234);
  const auto b = sample_wiener(grid, 3, 1234);
  CHECK(a.increments == b.increments);
  const auto c = sample_wiener(grid, 3, 1235);
  CHECK(a.increments != c.increments);
}

TEST_CASE("wiener increment mean within its 4-sigma band") {
  // 1e5 increments with dt = 0.01: mean ~ N(0, dt/1e5)
  const TimeGrid grid{100000, 1000.0};
  const auto path = sample_wiener(grid, 1, 20240811);
  const double m = mean(path.increments.data());
  const double band = 4.0 * 0.1 / std::sqrt(1e5);
  CHECK(std::abs(m) <= band);
}

TEST_CASE("wiener increment variance within its 4-sigma chi-square band") {
  const TimeGrid grid{100000, 1000.0};
  const auto path = sample_wiener(grid, 1, 777001);
  const double v = variance(path.increments.data());
  // var of the sample variance of N(0,s2) is ~ 2 s2^2 / n
  const double band = 4.0 * 0.01 * std::sqrt(2.0 / 1e5);
  CHECK(std::abs(v - 0.01) <= band);
}

TEST_CASE("coarsening by the full step count reproduces the endpoint displacement") {
  const TimeGrid grid{64, 2.0};
  const auto path = sample_wiener(grid, 2, 99);
  const auto total = coarsen_wiener(path, 64);
  REQUIRE(total.grid.steps == 1);
  for (std::size_t k = 0; k < 2; ++k) {
    double balanced = total.increments(0, k);
    double plain = 0.0;
    for (std::size_t i = 0; i < 64; ++i) plain += path.increments(i, k);
    CHECK(balanced == doctest::Approx(plain).epsilon(1e-14));
  }
}

TEST_CASE("power-of-two coarsening chains agree exactly") {
  const TimeGrid grid{256, 1.0};
  const auto path = sample_wiener(grid, 2, 4321);
  const auto two_then_two = coarsen_wiener(coarsen_wiener(path, 2), 2);
  const auto four = coarsen_wiener(path, 4);
  CHECK(two_then_two.increments == four.increments);  // bitwise

  const auto chain8 = coarsen_wiener(coarsen_wiener(coarsen_wiener(path, 2), 2), 2);
  const auto eight = coarsen_wiener(path, 8);
  CHECK(chain8.increments == eight.increments);
}

TEST_CASE("coarsening telescopes: total sum preserved to 1e-15 relative") {
  const TimeGrid grid{1024, 1.0};
  const auto path = sample_wiener(grid, 1, 5150);
  double abs_scale = 0.0;
  double fine_sum = 0.0;
  for (std::size_t i = 0; i < 1024; ++i) {
    fine_sum += path.increments(i, 0);
    abs_scale += std::abs(path.increments(i, 0));
  }
  for (std::size_t factor : {2, 4, 8, 16, 64, 256, 1024}) {
    const auto coarse = coarsen_wiener(path, factor);
    double coarse_sum = 0.0;
    for (std::size_t i = 0; i < coarse.grid.steps; ++i) coarse_sum += coarse.increments(i, 0);
    CHECK(std::abs(coarse_sum - fine_sum) <= 1e-15 * abs_scale);
  }
}

TEST_CASE("coarsening factor must divide the step count") {
  const TimeGrid grid{64, 1.0};
  const auto path = sample_wiener(grid, 1, 1);
  CHECK_THROWS_AS(coarsen_wiener(path, 3), FactorMismatchError);
  CHECK_THROWS_AS(coarsen_wiener(path, 0), FactorMismatchError);
}

TEST_CASE("zero intensity gives an empty stream") {
  const auto stream = sample_jumps(3.0, uniform_law(0.0), 1, 2);
  CHECK(stream.count() == 0);
}

TEST_CASE("jump sampling is deterministic in its seeds") {
  const auto law = uniform_law(2.0);
  const auto a = sample_jumps(3.0, law, 10, 20);
  const auto b = sample_jumps(3.0, law, 10, 20);
  CHECK(a.times == b.times);
  CHECK(a.marks == b.marks);
  const auto c = sample_jumps(3.0, law, 11, 20);
  CHECK(a.times != c.times);
}

TEST_CASE("jump times lie in (0, T] and increase strictly") {
  const auto stream = sample_jumps(3.0, uniform_law(5.0), 123, 456);
  REQUIRE(stream.count() > 0);
  double prev = 0.0;
  for (double t : stream.times) {
    CHECK(t > prev);
    CHECK(t <= 3.0);
    prev = t;
  }
}

TEST_CASE("poisson count mean matches its rate over 1e5 streams") {
  // rate 2, T = 3: mean count 6, band 4*sqrt(6/1e5)
  const auto law = uniform_law(2.0);
  const std::size_t n = 100000;
  double total = 0.0;
  for (std::size_t s = 0; s < n; ++s)
    total += static_cast<double>(
        sample_jumps(3.0, law, derive_path_seed(314159, s, StreamTag::jumps),
                     derive_path_seed(314159, s, StreamTag::marks))
            .count());
  const double m = total / static_cast<double>(n);
  CHECK(std::abs(m - 6.0) <= 4.0 * std::sqrt(6.0 / static_cast<double>(n)));
}

TEST_CASE("counts on disjoint intervals are uncorrelated and pass chi-square") {
  const auto law = uniform_law(2.0);
  const std::size_t n = 100000;
  Vec n1(n);
  Vec n2(n);
  for (std::size_t s = 0; s < n; ++s) {
    const auto stream = sample_jumps(2.0, law, derive_path_seed(271828, s, StreamTag::jumps),
                                     derive_path_seed(271828, s, StreamTag::marks));
    double a = 0.0;
    double b = 0.0;
    for (double t : stream.times) (t <= 1.0 ? a : b) += 1.0;
    n1[s] = a;
    n2[s] = b;
  }

  // empirical correlation
  const double m1 = mean(n1);
  const double m2 = mean(n2);
  double cov = 0.0;
  for (std::size_t s = 0; s < n; ++s) cov += (n1[s] - m1) * (n2[s] - m2);
  cov /= static_cast<double>(n - 1);
  const double rho = cov / std::sqrt(variance(n1) * variance(n2));
  CHECK(std::abs(rho) < 0.02);

  // 4x4 contingency table on bins {0,1,2,>=3}; df = 9, 1% critical 21.666
  double table[4][4] = {};
  for (std::size_t s = 0; s < n; ++s) {
    const auto bin = [](double c) { return static_cast<std::size_t>(std::min(c, 3.0)); };
    table[bin(n1[s])][bin(n2[s])] += 1.0;
  }
  double rows[4] = {};
  double cols[4] = {};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      rows[i] += table[i][j];
      cols[j] += table[i][j];
    }
  double chi2 = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const double expected = rows[i] * cols[j] / static_cast<double>(n);
      const double d = table[i][j] - expected;
      chi2 += d * d / expected;
    }
  // df = 9, mean 9 under independence; this fixed seed measures 10.2559,
  // asserted against the 1% critical point
  CHECK(chi2 < 21.666);
}

TEST_CASE("ito isometry: quadratic mean of sum b dw matches sum b^2 dt") {
  // b = 1 on [0, 1/2), 2 on [1/2, 1); mu = 0.5 + 2.0 = 2.5
  const TimeGrid grid{8, 1.0};
  const Vec b = {1.0, 1.0, 1.0, 1.0, 2.0, 2.0, 2.0, 2.0};
  const std::size_t n = 10000;
  Vec y(n);
  for (std::size_t p = 0; p < n; ++p) {
    const auto path = sample_wiener(grid, 1, derive_path_seed(1618, p, StreamTag::wiener));
    double acc = 0.0;
    for (std::size_t i = 0; i < 8; ++i) acc += b[i] * path.increments(i, 0);
    y[p] = acc * acc;
  }
  const double mu = 2.5;
  const double band = kZ99 * std::sqrt(2.0 * mu * mu / static_cast<double>(n));
  CHECK(std::abs(mean(y) - mu) <= band);
}

TEST_CASE("discrete atoms and gaussian marks sample reproducibly") {
  DiscreteAtomMarks atoms;
  atoms.atoms = Mat(2, 2);
  atoms.atoms(0, 0) = -1.0;
  atoms.atoms(0, 1) = 0.0;
  atoms.atoms(1, 0) = 2.0;
  atoms.atoms(1, 1) = 0.5;
  atoms.weights = {0.25, 0.75};
  const MarkDistribution law{4.0, atoms};
  const auto a = sample_jumps(1.0, law, 5, 6);
  const auto b = sample_jumps(1.0, law, 5, 6);
  CHECK(a.marks == b.marks);
  for (std::size_t j = 0; j < a.count(); ++j) {
    const bool is_first = a.marks(j, 0) == -1.0 && a.marks(j, 1) == 0.0;
    const bool is_second = a.marks(j, 0) == 2.0 && a.marks(j, 1) == 0.5;
    CHECK((is_first || is_second));
  }

  const MarkDistribution glaw{4.0, IsotropicGaussianMarks{Vec{1.0}, 0.5}};
  const auto g1 = sample_jumps(1.0, glaw, 7, 8);
  const auto g2 = sample_jumps(1.0, glaw, 7, 8);
  CHECK(g1.marks == g2.marks);
}

TEST_CASE("noise path dump has the documented layout") {
  const TimeGrid grid{2, 1.0};
  NoisePath path;
  path.wiener = sample_wiener(grid, 2, 11);
  path.jumps = sample_jumps(1.0, uniform_law(3.0), 12, 13);
  std::ostringstream os;
  dump_noise_path(os, path);
  std::istringstream is(os.str());
  std::string word;
  is >> word;
  CHECK(word == "noisepath");
  is >> word;
  CHECK(word == "steps=2");
  is >> word;
  CHECK(word == "wiener_dim=2");
  is >> word;
  CHECK(word == "mark_dim=1");
  // header then 2 increment lines then one line per event
  std::string rest;
  std::getline(is, rest);
  std::size_t lines = 0;
  while (std::getline(is, rest))
    if (!rest.empty()) ++lines;
  CHECK(lines == 2 + path.jumps.count());
}
