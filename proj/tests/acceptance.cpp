// End-to-end acceptance gate. Each criterion prints exactly one PASS/FAIL
// line; the process exits 0 only if every criterion passes. Tolerances are
// pinned here, not shared with the unit tests.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "helpers.hpp"
#include "oracles.hpp"
#include "texfuse/fbm.hpp"
#include "texfuse/fusion.hpp"
#include "texfuse/gaussian.hpp"
#include "texfuse/io.hpp"
#include "texfuse/rng.hpp"
#include "texfuse/rtv.hpp"
#include "texfuse/sth.hpp"
#include "texfuse/svm.hpp"
#include "texfuse/twoview.hpp"
#include "texfuse/wavelet.hpp"

namespace {

using namespace texfuse;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

double mean_of(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v) {
  const double m = mean_of(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(v.size()));
}

// --------------------------------------------------------------------------
// 1. Hurst estimator bias and spread over exactly synthesized fields.

Outcome criterion_hurst() {
  double worst_bias = 0.0, worst_std = 0.0;
  for (int hi = 1; hi <= 9; ++hi) {
    const double hurst = hi / 10.0;
    const FbmExactSampler2D sampler(make_fbm_params(hurst, 1.0), 64);
    std::vector<double> estimates;
    estimates.reserve(100);
    for (int rep = 0; rep < 100; ++rep) {
      const GrayField f = sampler.sample(seed_for(101, seed_tag::synth, hi * 1000 + rep));
      estimates.push_back(estimate_hurst(f, 4).h_hat);
    }
    worst_bias = std::max(worst_bias, std::abs(mean_of(estimates) - hurst));
    worst_std = std::max(worst_std, std_of(estimates));
  }
  return {worst_bias <= 0.03 && worst_std <= 0.05,
          "max |bias| " + num(worst_bias) + " <= 0.03, max std " + num(worst_std) +
              " <= 0.05, 9 H values x 100 seeds"};
}

// --------------------------------------------------------------------------
// 2. Closed-form Gaussian KL against adaptive quadrature.

Outcome criterion_kl() {
  Rng rng(202);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double s1 = rng.uniform(0.1, 10.0);
    const double s2 = rng.uniform(0.1, 10.0);
    worst = std::max(worst, std::abs(kl_gaussian_zero_mean(s1, s2) -
                                     oracle::kl_numeric(s1, s2)));
  }
  return {worst <= 1e-6, "max |closed - quadrature| " + num(worst) +
                             " <= 1e-6 over 50 sigma pairs in [0.1,10]^2"};
}

// --------------------------------------------------------------------------
// 3. Adjacent-level wavelet variance ratios of 1D exact fBm.

Outcome criterion_ratios() {
  double worst_rel = 0.0;
  std::string at;
  for (const double hurst : {0.2, 0.5, 0.8}) {
    const FbmExactSampler1D sampler(make_fbm_params(hurst, 1.0), 4096);
    double sums[3] = {0.0, 0.0, 0.0};
    for (int rep = 0; rep < 200; ++rep) {
      const std::vector<double> sig =
          sampler.sample(seed_for(303, seed_tag::synth,
                                  static_cast<std::uint64_t>(hurst * 10) * 1000 + rep));
      const std::vector<double> ratios =
          level_variance_ratios(sig, 7, HaarNorm::analysis2j);
      for (int j = 0; j < 3; ++j) sums[j] += ratios[2 + j];
    }
    const double target = std::pow(2.0, 2.0 * hurst);
    for (int j = 0; j < 3; ++j) {
      const double rel = std::abs(sums[j] / 200.0 / target - 1.0);
      if (rel > worst_rel) {
        worst_rel = rel;
        at = "H=" + num(hurst) + " ratio[" + std::to_string(2 + j) + "]";
      }
    }
  }
  return {worst_rel <= 0.15, "max relative deviation from 2^{2H} " + num(worst_rel) +
                                 " <= 0.15 (worst at " + at + ")"};
}

// --------------------------------------------------------------------------
// 4. Cross-scale KL boundedness; density distances are report-only.

Outcome criterion_selfsim() {
  const FbmExactSampler2D sampler(make_fbm_params(0.3, 1.0), 64);
  double kl = 0.0, l1 = 0.0, l2 = 0.0, linf = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const GrayField f = sampler.sample(seed_for(404, seed_tag::synth, rep));
    const SelfSimReport r = self_similarity_report(f);
    kl += r.kl_12 / 100.0;
    l1 += r.l1_13 / 100.0;
    l2 += r.l2_13 / 100.0;
    linf += r.linf_13 / 100.0;
  }
  return {kl <= 0.05, "mean kl_12 " + num(kl) + " <= 0.05; report-only mean L1 " +
                          num(l1) + ", L2 " + num(l2) + ", Linf " + num(linf)};
}

// --------------------------------------------------------------------------
// 5. RTV reconstruction identity and structure/texture kurtosis contrast.

double level1_kurtosis(const GrayField& layer) {
  const WaveletPyramid p = haar_pyramid(layer, 1, HaarNorm::analysis2j);
  std::vector<double> pool;
  for (const GrayField* plane :
       {&p.levels[0].horiz, &p.levels[0].vert, &p.levels[0].diag})
    pool.insert(pool.end(), plane->data.begin(), plane->data.end());
  return excess_kurtosis(pool);
}

Outcome criterion_rtv() {
  const FbmExactSampler2D sampler(make_fbm_params(0.3, 1.0), 64);
  double worst_recon = 0.0;
  int kurt_wins = 0;
  for (int rep = 0; rep < 20; ++rep) {
    GrayField f = sampler.sample(seed_for(505, seed_tag::synth, rep));
    double peak = 0.0;
    for (double v : f.data) peak = std::max(peak, std::abs(v));
    if (peak <= 0.0) peak = 1.0;
    GrayField img(64, 64);
    for (int y = 0; y < 64; ++y)
      for (int x = 0; x < 64; ++x)
        img.at(x, y) = (x >= 32 ? 1.0 : 0.0) + 0.1 * f.at(x, y) / peak;

    const auto [structure, texture] = rtv_decompose(img, RtvConfig{});
    for (std::size_t i = 0; i < img.size(); ++i)
      worst_recon = std::max(
          worst_recon,
          std::abs(img.data[i] - structure.data[i] - texture.data[i]));
    if (level1_kurtosis(structure) > level1_kurtosis(texture)) ++kurt_wins;
  }
  return {worst_recon <= 1e-12 && kurt_wins >= 18,
          "max |I-(S+T)| " + num(worst_recon) + " <= 1e-12, kurtosis(S) > kurtosis(T) in " +
              std::to_string(kurt_wins) + "/20 (need >= 18)"};
}

// --------------------------------------------------------------------------
// 6. SMO dual objective against a projected-gradient solver, plus KKT.

double kernel_value(const SvmModel& m, const std::vector<double>& a,
                    const std::vector<double>& b) {
  if (m.kernel == SvmKernel::linear) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  }
  double d2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d2 += (a[i] - b[i]) * (a[i] - b[i]);
  return std::exp(-m.rbf_gamma * d2);
}

bool kkt_ok(const SvmModel& m, double tol, double* worst_margin) {
  for (const BinarySvm& pair : m.pairs) {
    double sum_ay = 0.0;
    for (std::size_t i = 0; i < pair.alpha_y.size(); ++i) {
      const double alpha = std::abs(pair.alpha_y[i]);
      if (alpha <= 0.0 || alpha > m.c + 1e-9) return false;
      sum_ay += pair.alpha_y[i];
      if (alpha > 1e-8 && alpha < m.c - 1e-8) {
        double f = pair.bias;
        for (std::size_t j = 0; j < pair.support_vectors.size(); ++j)
          f += pair.alpha_y[j] *
               kernel_value(m, pair.support_vectors[j], pair.support_vectors[i]);
        const double y = pair.alpha_y[i] > 0.0 ? 1.0 : -1.0;
        const double viol = std::abs(y * f - 1.0);
        *worst_margin = std::max(*worst_margin, viol);
        if (viol > 10.0 * tol) return false;
      }
    }
    if (std::abs(sum_ay) > 1e-8) return false;
  }
  return true;
}

Outcome criterion_svm() {
  double worst_gap = 0.0, worst_margin = 0.0;
  bool kkt_all = true;
  SvmConfig cfg;
  cfg.tol = 1e-6;
  for (int set = 0; set < 10; ++set) {
    Rng rng(seed_for(606, seed_tag::dataset, set));
    std::vector<std::vector<double>> x;
    std::vector<int> labels;
    for (int i = 0; i < 20; ++i) {
      const int cls = i % 2;
      x.push_back({(cls ? 1.0 : -1.0) + rng.gaussian(), rng.gaussian()});
      labels.push_back(cls);
    }
    const SvmModel model = svm_train(x, labels, cfg);
    kkt_all = kkt_ok(model, cfg.tol, &worst_margin) && kkt_all;

    // Brute-force dual on the full z-scored problem.
    std::vector<std::vector<double>> z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      z[i].resize(x[i].size());
      for (std::size_t d = 0; d < x[i].size(); ++d)
        z[i][d] = (x[i][d] - model.norm_mean[d]) / model.norm_std[d];
    }
    std::vector<std::vector<double>> kmat(z.size(), std::vector<double>(z.size()));
    std::vector<double> y(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
      y[i] = labels[i] == model.pairs[0].class_lo ? 1.0 : -1.0;
      for (std::size_t j = 0; j < z.size(); ++j)
        kmat[i][j] = kernel_value(model, z[i], z[j]);
    }
    const oracle::PgDual pg = oracle::pg_dual_solve(kmat, y, model.c, 150000);
    worst_gap = std::max(
        worst_gap, std::abs(svm_dual_objective(model, model.pairs[0]) - pg.objective));
  }

  // A multiclass model exercises the KKT invariants on every pair.
  Rng rng(seed_for(607, seed_tag::dataset));
  std::vector<std::vector<double>> x;
  std::vector<int> labels;
  for (int c = 0; c < 3; ++c)
    for (int i = 0; i < 12; ++i) {
      x.push_back({2.0 * c + 0.7 * rng.gaussian(), -c + 0.7 * rng.gaussian()});
      labels.push_back(c);
    }
  const SvmConfig multi_cfg;
  kkt_all =
      kkt_ok(svm_train(x, labels, multi_cfg), multi_cfg.tol, &worst_margin) && kkt_all;

  return {worst_gap <= 1e-4 && kkt_all,
          "max |SMO - PG| dual gap " + num(worst_gap) + " <= 1e-4 over 10 sets; KKT " +
              (kkt_all ? "holds" : "violated") + ", worst free-SV margin error " +
              num(worst_margin)};
}

// --------------------------------------------------------------------------
// 7. Analytic fusion gradient vs central differences.

std::vector<double*> net_params(FusionNet& net) {
  std::vector<double*> p;
  for (auto* v : {&net.w1, &net.b1, &net.w2, &net.b2, &net.w3, &net.b3})
    for (double& x : *v) p.push_back(&x);
  return p;
}

Outcome criterion_gradient() {
  double worst = 0.0;
  for (const int k : {2, 6}) {
    for (int draw = 0; draw < 10; ++draw) {
      FusionNet net = fusion_init(k, seed_for(708, seed_tag::nn_init, k * 100 + draw));
      Rng rng(seed_for(709, seed_tag::dataset, k * 100 + draw));
      const int dim = k * (k - 1);
      std::vector<std::vector<double>> inputs(8, std::vector<double>(dim));
      std::vector<int> labels(8);
      for (auto& row : inputs)
        for (double& v : row) v = rng.gaussian();
      for (int& l : labels) l = static_cast<int>(rng.below(k));

      const FusionGradient g = fusion_loss_gradient(net, inputs, labels);
      FusionNet gn = g.grad;
      const std::vector<double*> params = net_params(net);
      const std::vector<double*> grads = net_params(gn);
      const double h = 1e-5;
      for (std::size_t i = 0; i < params.size(); ++i) {
        const double saved = *params[i];
        *params[i] = saved + h;
        const double up = fusion_loss_gradient(net, inputs, labels).loss;
        *params[i] = saved - h;
        const double down = fusion_loss_gradient(net, inputs, labels).loss;
        *params[i] = saved;
        const double numeric = (up - down) / (2.0 * h);
        const double denom =
            std::max(std::abs(numeric) + std::abs(*grads[i]), 1e-3);
        worst = std::max(worst, std::abs(numeric - *grads[i]) / denom);
      }
    }
  }
  return {worst <= 1e-4, "max relative gradient error " + num(worst) +
                             " <= 1e-4 over 10 draws x k in {2,6}"};
}

// --------------------------------------------------------------------------
// 8. Two-view dominance on the complementary-views synthetic dataset.

Outcome criterion_fusion_gain() {
  TwoViewDataset data;
  data.k = 6;
  Rng rng(seed_for(1000, seed_tag::dataset));
  for (int c = 0; c < 6; ++c) {
    const double a = c / 3;
    const double b = c % 3;
    for (int i = 0; i < 40; ++i) {
      const double u1 = rng.uniform(-0.8, 0.8);
      const double u2 = rng.uniform(-1.0, 1.0);
      data.phi_t.push_back({a, b + u1});
      data.phi_s.push_back({b, a + u2});
      data.labels.push_back(c);
    }
  }
  const RepeatResult r = repeat_eval(data, TwoViewConfig{}, 10, 1000);
  const double fused = r.fused.mean.accuracy;
  const double t = r.t_only.mean.accuracy;
  const double s = r.s_only.mean.accuracy;
  const double concat = r.concat.mean.accuracy;
  const bool pass = fused >= t + 0.05 && fused >= s + 0.05 && fused >= concat - 0.02;
  return {pass, "10-rep mean accuracy: fused " + num(fused) + ", t " + num(t) +
                    ", s " + num(s) + ", concat " + num(concat) +
                    "; need fused >= views+0.05 and >= concat-0.02"};
}

// --------------------------------------------------------------------------
// 9. STH area on rasterized ellipses with an off-center distractor.

Outcome criterion_sth() {
  int correct = 0;
  double worst_rel = 0.0;
  for (int ai = 0; ai < 10; ++ai) {
    const double a = 10.0 + 2.0 * ai;
    for (const double q : {0.6, 1.0, 1.5}) {
      const double b = q * a;
      GrayField f(128, 128, 0.8);
      int truth = 0;
      for (int y = 0; y < 128; ++y)
        for (int x = 0; x < 128; ++x) {
          const double ex = (x - 63.5) / a;
          const double ey = (y - 63.5) / b;
          if (ex * ex + ey * ey <= 1.0) {
            f.at(x, y) = 0.2;
            ++truth;
          } else if ((x - 20.0) * (x - 20.0) + (y - 20.0) * (y - 20.0) <= 25.0) {
            f.at(x, y) = 0.2;
          }
        }
      const double got = sth_area(f);
      const double rel = std::abs(got - truth) / truth;
      worst_rel = std::max(worst_rel, rel);
      if (rel <= 0.05) ++correct;
    }
  }
  return {correct == 30, std::to_string(correct) +
                             "/30 ellipses within 5% area error (worst " +
                             num(worst_rel) + "), distractor never selected"};
}

// --------------------------------------------------------------------------
// 10. Byte-identical pipeline runs under a fixed seed.

int quiet_cli(const std::vector<std::string>& args) {
  std::ostringstream sink;
  std::streambuf* old_out = std::cout.rdbuf(sink.rdbuf());
  std::streambuf* old_err = std::cerr.rdbuf(sink.rdbuf());
  int rc = -1;
  try {
    rc = texfuse::cli::run_cli(args);
  } catch (...) {
    std::cout.rdbuf(old_out);
    std::cerr.rdbuf(old_err);
    throw;
  }
  std::cout.rdbuf(old_out);
  std::cerr.rdbuf(old_err);
  return rc;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome criterion_determinism() {
  testutil::TempDir dir("accept10");

  std::ostringstream man;
  man << "path,label\n";
  for (int i = 0; i < 12; ++i) {
    const double hurst = i % 2 == 0 ? 0.25 : 0.75;
    const std::string name = "img_" + std::to_string(i) + ".pgm";
    if (quiet_cli({"synth", "--hurst", num(hurst), "--size", "32", "--seed",
                   std::to_string(900 + i), "--out", dir.file(name)}) != 0)
      return {false, "synth failed for " + name};
    man << name << "," << i % 2 << "\n";
  }
  const std::string manifest = dir.file("manifest.csv");
  write_text_atomic(manifest, man.str());
  const std::string cfg = dir.file("run.cfg");
  write_text_atomic(cfg, "nn.epochs = 200\nfeatures.patch_size = 16\n");

  for (const char* out : {"p1", "p2"}) {
    if (quiet_cli({"pipeline", "--manifest", manifest, "--reps", "2", "--seed",
                   "9", "--config", cfg, "--out-dir", dir.file(out)}) != 0)
      return {false, std::string("pipeline run into ") + out + " failed"};
  }

  std::map<std::string, std::string> first, second;
  for (const auto& [root, store] :
       {std::pair<std::string, std::map<std::string, std::string>*>{dir.file("p1"), &first},
        {dir.file("p2"), &second}}) {
    for (const auto& e : std::filesystem::recursive_directory_iterator(root))
      if (e.is_regular_file())
        (*store)[std::filesystem::relative(e.path(), root).string()] =
            slurp(e.path());
  }
  if (first.empty()) return {false, "pipeline produced no files"};
  if (first.size() != second.size())
    return {false, "runs produced different file sets"};
  for (const auto& [rel, bytes] : first) {
    const auto it = second.find(rel);
    if (it == second.end()) return {false, "missing in second run: " + rel};
    if (it->second != bytes) return {false, "byte mismatch in " + rel};
  }
  return {true, std::to_string(first.size()) +
                    " output files byte-identical across two seeded runs"};
}

}  // namespace

int main() {
  struct Entry {
    int id;
    const char* label;
    Outcome (*fn)();
  };
  const Entry entries[] = {
      {1, "hurst estimator bias/std", criterion_hurst},
      {2, "gaussian KL closed form", criterion_kl},
      {3, "fBm wavelet variance ratios", criterion_ratios},
      {4, "self-similarity KL bound", criterion_selfsim},
      {5, "RTV identity and kurtosis contrast", criterion_rtv},
      {6, "SMO dual vs brute force", criterion_svm},
      {7, "fusion gradient check", criterion_gradient},
      {8, "two-view dominance", criterion_fusion_gain},
      {9, "STH ellipse geometry", criterion_sth},
      {10, "pipeline determinism", criterion_determinism},
  };

  bool all = true;
  for (const Entry& e : entries) {
    Outcome o;
    try {
      o = e.fn();
    } catch (const std::exception& ex) {
      o = {false, std::string("exception: ") + ex.what()};
    }
    std::printf("criterion %d (%s): %s (%s)\n", e.id, e.label,
                o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
