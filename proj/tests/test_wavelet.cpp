#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "texfuse/errors.hpp"
#include "texfuse/fbm.hpp"
#include "texfuse/gaussian.hpp"
#include "texfuse/rng.hpp"
#include "texfuse/wavelet.hpp"

using namespace texfuse;

namespace {

GrayField quad(double a, double b, double c, double d) {
  GrayField f(2, 2);
  f.at(0, 0) = a;
  f.at(1, 0) = b;
  f.at(0, 1) = c;
  f.at(1, 1) = d;
  return f;
}

double total_energy(const WaveletPyramid& pyr) {
  double acc = 0.0;
  for (const auto& lv : pyr.levels) {
    for (double v : lv.horiz.data) acc += v * v;
    for (double v : lv.vert.data) acc += v * v;
    for (double v : lv.diag.data) acc += v * v;
  }
  const auto& approx = pyr.levels.back().approx;
  for (double v : approx.data) acc += v * v;
  return acc;
}

}  // namespace

TEST_CASE("single 2x2 step matches the hand-worked Haar coefficients") {
  const GrayField f = quad(1, 2, 3, 4);

  const WaveletPyramid ortho = haar_pyramid(f, 1, HaarNorm::orthonormal);
  CHECK(ortho.levels[0].approx.at(0, 0) == doctest::Approx(5.0));
  CHECK(ortho.levels[0].horiz.at(0, 0) == doctest::Approx(-1.0));  // (a-b+c-d)/2
  CHECK(ortho.levels[0].vert.at(0, 0) == doctest::Approx(-2.0));   // (a+b-c-d)/2
  CHECK(ortho.levels[0].diag.at(0, 0) == doctest::Approx(0.0));

  const WaveletPyramid an = haar_pyramid(f, 1, HaarNorm::analysis2j);
  CHECK(an.levels[0].approx.at(0, 0) == doctest::Approx(2.5));
  CHECK(an.levels[0].horiz.at(0, 0) == doctest::Approx(-0.5));
  CHECK(an.levels[0].vert.at(0, 0) == doctest::Approx(-1.0));
  CHECK(an.levels[0].diag.at(0, 0) == doctest::Approx(0.0));
}

TEST_CASE("constant fields have zero details at every level") {
  GrayField f(16, 16, 0.37);
  const WaveletPyramid pyr = haar_pyramid(f, 3, HaarNorm::orthonormal);
  for (const auto& lv : pyr.levels) {
    for (double v : lv.horiz.data) CHECK(v == 0.0);
    for (double v : lv.vert.data) CHECK(v == 0.0);
    for (double v : lv.diag.data) CHECK(v == 0.0);
  }
}

TEST_CASE("orthonormal Haar conserves energy") {
  const GrayField f = testutil::gaussian_field(64, 64, 41);
  double in_energy = 0.0;
  for (double v : f.data) in_energy += v * v;
  for (int levels : {1, 2, 3, 4}) {
    const WaveletPyramid pyr = haar_pyramid(f, levels, HaarNorm::orthonormal);
    CHECK(total_energy(pyr) == doctest::Approx(in_energy).epsilon(1e-9));
  }
}

TEST_CASE("plane dimensions halve per level, odd trailing data dropped") {
  const GrayField f = testutil::gaussian_field(17, 9, 43);
  const WaveletPyramid pyr = haar_pyramid(f, 2, HaarNorm::orthonormal);
  REQUIRE(pyr.levels.size() == 2);
  CHECK(pyr.levels[0].horiz.width == 8);
  CHECK(pyr.levels[0].horiz.height == 4);
  CHECK(pyr.levels[1].horiz.width == 4);
  CHECK(pyr.levels[1].horiz.height == 2);

  CHECK_THROWS_AS(haar_pyramid(f, 4, HaarNorm::orthonormal), input_error);
  CHECK_THROWS_AS(haar_pyramid(f, 0, HaarNorm::orthonormal), input_error);
}

TEST_CASE("level stats pool the three orientations") {
  const GrayField f = testutil::gaussian_field(64, 64, 44);
  const WaveletPyramid pyr = haar_pyramid(f, 3, HaarNorm::analysis2j);
  const auto stats = pyramid_level_stats(pyr);
  REQUIRE(stats.size() == 3);
  CHECK(stats[0].level == 1);
  CHECK(stats[0].count == 3 * 32 * 32);
  CHECK(stats[1].count == 3 * 16 * 16);
  CHECK(stats[2].count == 3 * 8 * 8);
  for (const auto& s : stats) CHECK(s.sigma_hat > 0.0);
}

TEST_CASE("1D Haar steps match hand values in both conventions") {
  const std::vector<double> sig = {1.0, 3.0};
  const Haar1D an = haar_1d(sig, 1, HaarNorm::analysis2j);
  CHECK(an.details[0][0] == doctest::Approx(-1.0));  // (a-b)/2
  CHECK(an.approx[0] == doctest::Approx(2.0));

  const Haar1D ortho = haar_1d(sig, 1, HaarNorm::orthonormal);
  CHECK(ortho.details[0][0] == doctest::Approx(-std::sqrt(2.0)));
  CHECK(ortho.approx[0] == doctest::Approx(2.0 * std::sqrt(2.0)));

  // Orthonormal energy conservation in 1D.
  Rng rng(45);
  std::vector<double> x(256);
  for (double& v : x) v = rng.gaussian();
  const Haar1D dec = haar_1d(x, 4, HaarNorm::orthonormal);
  double energy = 0.0;
  for (const auto& lvl : dec.details)
    for (double v : lvl) energy += v * v;
  for (double v : dec.approx) energy += v * v;
  double in_energy = 0.0;
  for (double v : x) in_energy += v * v;
  CHECK(energy == doctest::Approx(in_energy).epsilon(1e-9));
}

TEST_CASE("white noise has flat level variances under the orthonormal norm") {
  Rng rng(46);
  std::vector<double> x(1 << 14);
  for (double& v : x) v = rng.gaussian();
  const auto ratios = level_variance_ratios(x, 5, HaarNorm::orthonormal);
  REQUIRE(ratios.size() == 4);
  for (double r : ratios) CHECK(r == doctest::Approx(1.0).epsilon(0.15));
}

TEST_CASE("exact fBm level variances scale like 2^{2H} under analysis2j") {
  const FbmParams p = make_fbm_params(0.8, 1.0);
  const FbmExactSampler1D sampler(p, 4096);
  std::vector<double> mean_ratio(6, 0.0);
  const int reps = 40;
  for (int r = 0; r < reps; ++r) {
    const auto sig = sampler.sample(seed_for(904, seed_tag::synth, r));
    const auto ratios = level_variance_ratios(sig, 7, HaarNorm::analysis2j);
    for (std::size_t j = 0; j < ratios.size(); ++j) mean_ratio[j] += ratios[j] / reps;
  }
  const double want = std::pow(2.0, 1.6);
  for (int j : {2, 3, 4}) CHECK(mean_ratio[j] == doctest::Approx(want).epsilon(0.15));

  CHECK_THROWS_AS(level_variance_ratios({1.0, 2.0, 3.0}, 1, HaarNorm::analysis2j),
                  input_error);
  CHECK_THROWS_AS(level_variance_ratios({1.0, 2.0, 3.0, 4.0}, 4, HaarNorm::analysis2j),
                  input_error);
}

TEST_CASE("self-similarity report on an exact fBm field") {
  const GrayField f = synth_fbm_exact(make_fbm_params(0.5, 1.0), 64, 4242);
  const SelfSimReport rep = self_similarity_report(f);
  REQUIRE(rep.level_stats.size() == 3);
  REQUIRE(rep.variance_ratios.size() == 2);
  CHECK(rep.kl_12 >= 0.0);
  CHECK(rep.kl_12 < 0.2);  // single field; the 100-seed mean bound is 0.05
  CHECK(rep.l1_13 >= 0.0);
  CHECK(rep.l2_13 >= 0.0);
  CHECK(rep.linf_13 >= 0.0);
  // Detail scale grows with level for a persistent field.
  CHECK(rep.level_stats[0].sigma_hat < rep.level_stats[1].sigma_hat);
  CHECK(rep.level_stats[1].sigma_hat < rep.level_stats[2].sigma_hat);
  // Both KL figures are consistent with the level stats they came from; the
  // rescaled one divides the coarser scale by 2^{h_hat}.
  CHECK(rep.kl_12 == doctest::Approx(kl_gaussian_zero_mean(
                         rep.level_stats[0].sigma_hat,
                         rep.level_stats[1].sigma_hat)).epsilon(1e-12));
  const double h_hat = estimate_hurst(f).h_hat;
  CHECK(rep.kl_12_rescaled ==
        doctest::Approx(kl_gaussian_zero_mean(
                            rep.level_stats[0].sigma_hat,
                            rep.level_stats[1].sigma_hat * std::pow(2.0, -h_hat)))
            .epsilon(1e-12));
}

TEST_CASE("anti-self-similar and degenerate fields") {
  // A near-checkerboard concentrates all energy at level 1.
  GrayField cb(32, 32);
  Rng rng(47);
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x < 32; ++x)
      cb.at(x, y) = ((x + y) % 2 == 0 ? 1.0 : 0.0) + 1e-4 * rng.gaussian();
  const SelfSimReport rep = self_similarity_report(cb);
  CHECK(rep.kl_12 > 1.0);

  GrayField flat(32, 32, 0.5);
  CHECK_THROWS_AS(self_similarity_report(flat), input_error);

  GrayField tiny(4, 4, 0.0);
  CHECK_THROWS_AS(self_similarity_report(tiny), input_error);
}
