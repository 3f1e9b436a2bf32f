#include "texfuse/wavelet.hpp"

#include <cmath>

#include "texfuse/fbm.hpp"
#include "texfuse/gaussian.hpp"

namespace texfuse {

namespace {

WaveletLevel haar_step_2d(const GrayField& in, HaarNorm norm) {
  const int w = in.width / 2;
  const int h = in.height / 2;
  const double u = norm == HaarNorm::analysis2j ? 0.25 : 0.5;
  WaveletLevel lv{GrayField(w, h), GrayField(w, h), GrayField(w, h), GrayField(w, h)};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double p00 = in.at(2 * x, 2 * y);
      const double p01 = in.at(2 * x + 1, 2 * y);
      const double p10 = in.at(2 * x, 2 * y + 1);
      const double p11 = in.at(2 * x + 1, 2 * y + 1);
      lv.approx.at(x, y) = u * (p00 + p01 + p10 + p11);
      lv.horiz.at(x, y) = u * (p00 - p01 + p10 - p11);
      lv.vert.at(x, y) = u * (p00 + p01 - p10 - p11);
      lv.diag.at(x, y) = u * (p00 - p01 - p10 + p11);
    }
  }
  return lv;
}

std::vector<double> pooled_details(const WaveletLevel& lv) {
  std::vector<double> pool;
  pool.reserve(3 * lv.horiz.size());
  pool.insert(pool.end(), lv.horiz.data.begin(), lv.horiz.data.end());
  pool.insert(pool.end(), lv.vert.data.begin(), lv.vert.data.end());
  pool.insert(pool.end(), lv.diag.data.begin(), lv.diag.data.end());
  return pool;
}

double variance(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return acc / static_cast<double>(v.size());
}

}  // namespace

WaveletPyramid haar_pyramid(const GrayField& field, int levels, HaarNorm norm) {
  if (levels < 1) throw input_error("haar_pyramid: levels must be >= 1");
  const int min_dim = std::min(field.width, field.height);
  if (min_dim < (1 << levels))
    throw input_error("haar_pyramid: field too small for requested levels");
  WaveletPyramid pyr;
  pyr.norm = norm;
  GrayField current = field;
  for (int j = 0; j < levels; ++j) {
    WaveletLevel lv = haar_step_2d(current, norm);
    current = lv.approx;
    pyr.levels.push_back(std::move(lv));
  }
  return pyr;
}

std::vector<LevelStats> pyramid_level_stats(const WaveletPyramid& pyramid) {
  std::vector<LevelStats> stats;
  stats.reserve(pyramid.levels.size());
  for (std::size_t j = 0; j < pyramid.levels.size(); ++j) {
    const auto pool = pooled_details(pyramid.levels[j]);
    LevelStats s;
    s.level = static_cast<int>(j) + 1;
    s.count = pool.size();
    s.sigma_hat = ml_sigma(pool);
    s.excess_kurtosis = excess_kurtosis(pool);
    stats.push_back(s);
  }
  return stats;
}

SelfSimReport self_similarity_report(const GrayField& field) {
  const WaveletPyramid pyr = haar_pyramid(field, 3, HaarNorm::analysis2j);
  SelfSimReport rep;
  rep.level_stats = pyramid_level_stats(pyr);  // throws on constant field

  const double s1 = rep.level_stats[0].sigma_hat;
  const double s2 = rep.level_stats[1].sigma_hat;
  const double s3 = rep.level_stats[2].sigma_hat;
  if (s1 <= 0.0 || s2 <= 0.0 || s3 <= 0.0)
    throw input_error("self_similarity_report: degenerate detail variance");

  rep.kl_12 = kl_gaussian_zero_mean(s1, s2);
  const double h_hat = estimate_hurst(field).h_hat;
  rep.kl_12_rescaled = kl_gaussian_zero_mean(s1, s2 * std::pow(2.0, -h_hat));
  rep.l1_13 = pdf_distance_zero_mean(s1, s3, PdfMetric::L1);
  rep.l2_13 = pdf_distance_zero_mean(s1, s3, PdfMetric::L2);
  rep.linf_13 = pdf_distance_zero_mean(s1, s3, PdfMetric::Linf);

  for (std::size_t j = 0; j + 1 < pyr.levels.size(); ++j) {
    const double vf = variance(pooled_details(pyr.levels[j]));
    const double vc = variance(pooled_details(pyr.levels[j + 1]));
    rep.variance_ratios.push_back(vc / vf);
  }
  return rep;
}

Haar1D haar_1d(const std::vector<double>& signal, int levels, HaarNorm norm) {
  if (levels < 1) throw input_error("haar_1d: levels must be >= 1");
  if (signal.size() >> levels < 1)
    throw input_error("haar_1d: signal too short for requested levels");
  const double u = norm == HaarNorm::analysis2j ? 0.5 : 1.0 / std::sqrt(2.0);
  Haar1D out;
  out.norm = norm;
  std::vector<double> current = signal;
  for (int j = 0; j < levels; ++j) {
    const std::size_t n = current.size() / 2;
    std::vector<double> approx(n), detail(n);
    for (std::size_t i = 0; i < n; ++i) {
      approx[i] = u * (current[2 * i] + current[2 * i + 1]);
      detail[i] = u * (current[2 * i] - current[2 * i + 1]);
    }
    out.details.push_back(std::move(detail));
    current = std::move(approx);
  }
  out.approx = std::move(current);
  return out;
}

std::vector<double> level_variance_ratios(const std::vector<double>& signal,
                                          int levels, HaarNorm norm) {
  if (levels < 2) throw input_error("level_variance_ratios: need >= 2 levels");
  if (signal.size() >> levels < 2)
    throw input_error("level_variance_ratios: signal too short");
  const Haar1D dec = haar_1d(signal, levels, norm);
  std::vector<double> ratios;
  ratios.reserve(dec.details.size() - 1);
  for (std::size_t j = 0; j + 1 < dec.details.size(); ++j) {
    const double vf = variance(dec.details[j]);
    const double vc = variance(dec.details[j + 1]);
    if (vf <= 0.0) throw input_error("level_variance_ratios: degenerate level variance");
    ratios.push_back(vc / vf);
  }
  return ratios;
}

}  // namespace texfuse
