#include "texfuse/pc.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

#include "fft_utils.hpp"
#include "texfuse/rng.hpp"

namespace texfuse {

namespace {

void validate(const GrayField& field, const PcConfig& cfg) {
  if (field.width < 16 || field.height < 16)
    throw input_error("phase_congruency: field must be at least 16x16");
  if (cfg.scales < 2) throw input_error("phase_congruency: scales must be >= 2");
  if (cfg.orientations < 4)
    throw input_error("phase_congruency: orientations must be >= 4");
  if (!(cfg.eps > 0.0)) throw input_error("phase_congruency: eps must be positive");
  if (cfg.gamma < 0.0) throw input_error("phase_congruency: gamma must be >= 0");
  if (!(cfg.min_wavelength >= 2.0))
    throw input_error("phase_congruency: min_wavelength must be >= 2");
  if (!(cfg.mult > 1.0)) throw input_error("phase_congruency: mult must be > 1");
  if (!(cfg.sigma_onf > 0.0 && cfg.sigma_onf < 1.0))
    throw input_error("phase_congruency: sigma_onf must lie in (0,1)");
}

double fft_freq(int i, int n) {
  return (i <= (n - 1) / 2 ? i : i - n) / static_cast<double>(n);
}

// Optional statistics sink for the gamma calibration pass.
struct AnzStats {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::size_t count = 0;
};

GrayField pc_impl(const GrayField& img, const PcConfig& cfg, AnzStats* stats) {
  validate(img, cfg);
  const int w = img.width, h = img.height;
  const std::size_t n = img.size();

  std::vector<std::complex<double>> im(img.data.begin(), img.data.end());
  detail::fft_2d(im, w, h, -1);

  std::vector<double> radius(n), sin_t(n), cos_t(n), lp(n);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      const double u = fft_freq(x, w);
      const double v = fft_freq(y, h);
      double r = std::hypot(u, v);
      if (i == 0) r = 1.0;
      radius[i] = r;
      const double t = std::atan2(-v, u);
      sin_t[i] = std::sin(t);
      cos_t[i] = std::cos(t);
      lp[i] = 1.0 / (1.0 + std::pow(r / 0.45, 30.0));
    }

  // Radial filters are orientation-independent; build once per scale.
  const double log_sonf_sq = 2.0 * std::log(cfg.sigma_onf) * std::log(cfg.sigma_onf);
  std::vector<std::vector<double>> loggabor(cfg.scales, std::vector<double>(n));
  for (int s = 0; s < cfg.scales; ++s) {
    const double fo = 1.0 / (cfg.min_wavelength * std::pow(cfg.mult, s));
    for (std::size_t i = 0; i < n; ++i)
      loggabor[s][i] =
          std::exp(-std::pow(std::log(radius[i] / fo), 2.0) / log_sonf_sq) * lp[i];
    loggabor[s][0] = 0.0;
  }

  const double sig_theta = M_PI / cfg.orientations / 1.2;
  const double inv_n = 1.0 / static_cast<double>(n);

  std::vector<double> tot_energy(n, 0.0), tot_sum_a(n, 0.0);
  std::vector<std::vector<std::complex<double>>> eo(
      cfg.scales, std::vector<std::complex<double>>(n));
  std::vector<double> sum_e(n), sum_o(n), sum_a(n), max_a(n);

  for (int o = 0; o < cfg.orientations; ++o) {
    const double angl = o * M_PI / cfg.orientations;
    const double ca = std::cos(angl), sa = std::sin(angl);

    std::fill(sum_e.begin(), sum_e.end(), 0.0);
    std::fill(sum_o.begin(), sum_o.end(), 0.0);
    std::fill(sum_a.begin(), sum_a.end(), 0.0);
    std::fill(max_a.begin(), max_a.end(), 0.0);

    for (int s = 0; s < cfg.scales; ++s) {
      auto& plane = eo[s];
      for (std::size_t i = 0; i < n; ++i) {
        const double ds = sin_t[i] * ca - cos_t[i] * sa;
        const double dc = cos_t[i] * ca + sin_t[i] * sa;
        const double dtheta = std::abs(std::atan2(ds, dc));
        const double spread = std::exp(-dtheta * dtheta / (2.0 * sig_theta * sig_theta));
        plane[i] = im[i] * (loggabor[s][i] * spread);
      }
      detail::fft_2d(plane, w, h, +1);
      for (std::size_t i = 0; i < n; ++i) {
        plane[i] *= inv_n;
        const double a = std::abs(plane[i]);
        sum_e[i] += plane[i].real();
        sum_o[i] += plane[i].imag();
        sum_a[i] += a;
        max_a[i] = std::max(max_a[i], a);
      }
    }

    for (std::size_t i = 0; i < n; ++i) {
      const double denom = std::hypot(sum_e[i], sum_o[i]) + 1e-12;
      const double me = sum_e[i] / denom;
      const double mo = sum_o[i] / denom;
      double energy = 0.0;
      for (int s = 0; s < cfg.scales; ++s) {
        const double e = eo[s][i].real();
        const double od = eo[s][i].imag();
        const double anz = (e * me + od * mo) - std::abs(e * mo - od * me);
        if (stats) {
          stats->sum += anz;
          stats->sum_sq += anz * anz;
          ++stats->count;
        }
        energy += std::max(anz - cfg.gamma, 0.0);
      }
      // Frequency-spread weight: penalize pixels whose response lives at a
      // single scale (narrowband congruency is not a feature).
      const double width = (sum_a[i] / (max_a[i] + 1e-12) - 1.0) / (cfg.scales - 1);
      const double weight = 1.0 / (1.0 + std::exp(10.0 * (0.4 - width)));
      tot_energy[i] += weight * energy;
      tot_sum_a[i] += sum_a[i];
    }
  }

  GrayField pc(w, h);
  for (std::size_t i = 0; i < n; ++i)
    pc.data[i] = std::clamp(tot_energy[i] / (tot_sum_a[i] + cfg.eps), 0.0, 1.0);
  return pc;
}

}  // namespace

GrayField phase_congruency(const GrayField& structure, const PcConfig& config) {
  return pc_impl(structure, config, nullptr);
}

std::vector<double> structural_feature_pc(const GrayField& structure,
                                          const PcConfig& config) {
  const GrayField pc = pc_impl(structure, config, nullptr);
  const double mean =
      std::accumulate(pc.data.begin(), pc.data.end(), 0.0) / pc.data.size();
  return {mean};
}

double pc_gamma_calibration(int size, double noise_sigma, std::uint64_t seed,
                            const PcConfig& config) {
  if (size < 16) throw input_error("pc_gamma_calibration: size must be >= 16");
  if (!(noise_sigma > 0.0))
    throw input_error("pc_gamma_calibration: noise_sigma must be positive");
  Rng rng(seed);
  GrayField noise(size, size);
  for (double& v : noise.data) v = 0.5 + noise_sigma * rng.gaussian();
  AnzStats stats;
  pc_impl(noise, config, &stats);
  const double mean = stats.sum / static_cast<double>(stats.count);
  const double var =
      std::max(0.0, stats.sum_sq / static_cast<double>(stats.count) - mean * mean);
  return mean + 2.0 * std::sqrt(var);
}

}  // namespace texfuse
