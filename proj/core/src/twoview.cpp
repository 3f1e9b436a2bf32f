#include "texfuse/twoview.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "texfuse/errors.hpp"
#include "texfuse/rng.hpp"

namespace texfuse {

namespace {

int infer_k(const std::vector<int>& labels) {
  int k = 0;
  for (int l : labels) {
    if (l < 0) throw input_error("labels must be non-negative");
    k = std::max(k, l + 1);
  }
  return k;
}

void validate_dataset(const TwoViewDataset& data) {
  const std::size_t n = data.labels.size();
  if (n == 0) throw input_error("empty dataset");
  if (data.phi_t.size() != n || data.phi_s.size() != n)
    throw input_error("dataset views and labels are misaligned");
  if (data.k < 2 || infer_k(data.labels) > data.k)
    throw input_error("dataset k inconsistent with labels");
}

}  // namespace

SplitPlan make_split(const std::vector<int>& labels, std::size_t test_count,
                     std::uint64_t seed) {
  const std::size_t n = labels.size();
  const int k = infer_k(labels);
  if (test_count < 1) throw input_error("make_split: test_count must be >= 1");
  if (n < test_count + 4) throw input_error("make_split: dataset too small");
  const std::size_t half = n / 2;
  if (half + test_count >= n)
    throw input_error("make_split: no examples left for the fusion net");

  Rng rng(seed);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);

  for (int attempt = 0; attempt < 100; ++attempt) {
    rng.shuffle(perm);
    std::vector<char> covered(k, 0);
    int classes = 0;
    for (std::size_t i = 0; i < half; ++i) {
      char& c = covered[labels[perm[i]]];
      if (!c) {
        c = 1;
        ++classes;
      }
    }
    if (classes == k) {
      SplitPlan plan;
      plan.seed = seed;
      plan.svm_train.assign(perm.begin(), perm.begin() + half);
      plan.nn_train.assign(perm.begin() + half, perm.end() - test_count);
      plan.test.assign(perm.end() - test_count, perm.end());
      return plan;
    }
  }
  throw input_error("make_split: could not cover every class in svm_train");
}

Metrics compute_metrics(const std::vector<int>& truth,
                        const std::vector<int>& predicted, int k) {
  if (truth.empty() || truth.size() != predicted.size())
    throw input_error("compute_metrics: empty or misaligned inputs");
  if (k < 2) throw input_error("compute_metrics: k must be >= 2");

  Metrics m;
  m.confusion.assign(k, std::vector<std::size_t>(k, 0));
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] < 0 || truth[i] >= k || predicted[i] < 0 || predicted[i] >= k)
      throw input_error("compute_metrics: label out of range");
    ++m.confusion[truth[i]][predicted[i]];
    if (truth[i] == predicted[i]) ++correct;
  }
  m.accuracy = static_cast<double>(correct) / static_cast<double>(truth.size());

  const auto rate = [](double num, double den) { return den > 0.0 ? num / den : 0.0; };
  const auto one_vs_rest = [&](int c, double& prec, double& rec, double& spec,
                               double& f) {
    double tp = 0, fp = 0, fn = 0, tn = 0;
    for (int r = 0; r < k; ++r)
      for (int p = 0; p < k; ++p) {
        const double v = static_cast<double>(m.confusion[r][p]);
        if (r == c && p == c) tp += v;
        else if (r == c) fn += v;
        else if (p == c) fp += v;
        else tn += v;
      }
    prec = rate(tp, tp + fp);
    rec = rate(tp, tp + fn);
    spec = rate(tn, tn + fp);
    f = rate(2.0 * prec * rec, prec + rec);
  };

  if (k == 2) {
    one_vs_rest(1, m.precision, m.recall, m.specificity, m.f_measure);
  } else {
    for (int c = 0; c < k; ++c) {
      double prec, rec, spec, f;
      one_vs_rest(c, prec, rec, spec, f);
      m.precision += prec / k;
      m.recall += rec / k;
      m.specificity += spec / k;
      m.f_measure += f / k;
    }
  }
  return m;
}

namespace {

template <typename Getter>
std::vector<std::vector<double>> gather(const std::vector<std::size_t>& idx,
                                        Getter&& get) {
  std::vector<std::vector<double>> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(get(i));
  return out;
}

std::vector<int> gather_labels(const std::vector<int>& labels,
                               const std::vector<std::size_t>& idx) {
  std::vector<int> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(labels[i]);
  return out;
}

std::vector<double> raw_fusion_input(const SvmModel& svm_t, const SvmModel& svm_s,
                                     const std::vector<double>& phi_t,
                                     const std::vector<double>& phi_s) {
  std::vector<double> d = svm_decision_distances(svm_t, phi_t);
  const std::vector<double> ds = svm_decision_distances(svm_s, phi_s);
  d.insert(d.end(), ds.begin(), ds.end());
  return d;
}

}  // namespace

std::vector<double> fusion_input(const TwoViewModel& model,
                                 const std::vector<double>& phi_t,
                                 const std::vector<double>& phi_s) {
  std::vector<double> d = raw_fusion_input(model.svm_t, model.svm_s, phi_t, phi_s);
  for (std::size_t i = 0; i < d.size(); ++i)
    d[i] = (d[i] - model.d_mean[i]) / model.d_std[i];
  return d;
}

int two_view_predict(const TwoViewModel& model, const std::vector<double>& phi_t,
                     const std::vector<double>& phi_s) {
  return fusion_predict(model.net, fusion_input(model, phi_t, phi_s));
}

TwoViewTrainOutcome train_two_view(const TwoViewDataset& data,
                                   const TwoViewConfig& config,
                                   std::uint64_t seed) {
  validate_dataset(data);
  const std::size_t n = data.labels.size();
  const std::size_t test_count =
      config.test_count > 0 ? config.test_count : (n + 5) / 6;

  TwoViewTrainOutcome out;
  out.split = make_split(data.labels, test_count,
                         seed_for(seed, seed_tag::split));

  TwoViewModel& model = out.model;
  model.k = data.k;
  const auto svm_labels = gather_labels(data.labels, out.split.svm_train);
  model.svm_t = svm_train(
      gather(out.split.svm_train, [&](std::size_t i) { return data.phi_t[i]; }),
      svm_labels, config.svm, "T");
  model.svm_s = svm_train(
      gather(out.split.svm_train, [&](std::size_t i) { return data.phi_s[i]; }),
      svm_labels, config.svm, "S");

  // Decision-distance vectors on the held-out nn_train split, z-scored with
  // that split's own statistics.
  std::vector<std::vector<double>> d_nn;
  d_nn.reserve(out.split.nn_train.size());
  for (std::size_t i : out.split.nn_train)
    d_nn.push_back(raw_fusion_input(model.svm_t, model.svm_s, data.phi_t[i],
                                    data.phi_s[i]));
  const std::size_t dim = d_nn.front().size();
  model.d_mean.assign(dim, 0.0);
  model.d_std.assign(dim, 0.0);
  for (const auto& d : d_nn)
    for (std::size_t j = 0; j < dim; ++j) model.d_mean[j] += d[j];
  for (double& v : model.d_mean) v /= static_cast<double>(d_nn.size());
  for (const auto& d : d_nn)
    for (std::size_t j = 0; j < dim; ++j) {
      const double dv = d[j] - model.d_mean[j];
      model.d_std[j] += dv * dv;
    }
  for (double& v : model.d_std) {
    v = std::sqrt(v / static_cast<double>(d_nn.size()));
    if (v < 1e-12) v = 1.0;
  }
  for (auto& d : d_nn)
    for (std::size_t j = 0; j < dim; ++j)
      d[j] = (d[j] - model.d_mean[j]) / model.d_std[j];

  const auto nn_labels = gather_labels(data.labels, out.split.nn_train);
  FusionTrainResult best;
  bool have_best = false;
  for (int attempt = 0; attempt <= config.nn_max_restarts; ++attempt) {
    const FusionNet init =
        fusion_init(data.k, seed_for(seed, seed_tag::nn_init, attempt));
    FusionTrainResult trained =
        fusion_train(init, d_nn, nn_labels, config.nn_epochs, config.nn_lr);
    const bool no_curve = trained.loss_curve.empty();
    const double loss = no_curve ? 0.0 : trained.loss_curve.back();
    if (!have_best || best.loss_curve.empty() || loss < best.loss_curve.back()) {
      best = std::move(trained);
      have_best = true;
    }
    model.nn_restarts = attempt;
    if (loss <= config.nn_restart_loss || no_curve) break;
  }
  model.net = std::move(best.net);
  model.nn_loss_curve = std::move(best.loss_curve);
  return out;
}

Metrics evaluate_two_view(const TwoViewModel& model, const TwoViewDataset& data,
                          const std::vector<std::size_t>& indices) {
  validate_dataset(data);
  if (indices.empty()) throw input_error("evaluate_two_view: empty test set");
  std::vector<int> truth, predicted;
  truth.reserve(indices.size());
  predicted.reserve(indices.size());
  for (std::size_t i : indices) {
    truth.push_back(data.labels[i]);
    predicted.push_back(two_view_predict(model, data.phi_t[i], data.phi_s[i]));
  }
  return compute_metrics(truth, predicted, model.k);
}

MetricsAggregate aggregate_metrics(const std::vector<Metrics>& metrics) {
  if (metrics.empty()) throw input_error("aggregate_metrics: empty input");
  MetricsAggregate agg;
  const double n = static_cast<double>(metrics.size());
  const auto scalars = [](const Metrics& m) {
    return std::array<double, 5>{m.accuracy, m.precision, m.recall,
                                 m.specificity, m.f_measure};
  };
  std::array<double, 5> mean{}, var{};
  for (const auto& m : metrics) {
    const auto s = scalars(m);
    for (int i = 0; i < 5; ++i) mean[i] += s[i] / n;
  }
  for (const auto& m : metrics) {
    const auto s = scalars(m);
    for (int i = 0; i < 5; ++i) var[i] += (s[i] - mean[i]) * (s[i] - mean[i]) / n;
  }
  const auto assign = [](Metrics& m, const std::array<double, 5>& v) {
    m.accuracy = v[0];
    m.precision = v[1];
    m.recall = v[2];
    m.specificity = v[3];
    m.f_measure = v[4];
  };
  assign(agg.mean, mean);
  std::array<double, 5> sd{};
  for (int i = 0; i < 5; ++i) sd[i] = std::sqrt(var[i]);
  assign(agg.stddev, sd);

  agg.mean.confusion = metrics.front().confusion;
  for (std::size_t r = 1; r < metrics.size(); ++r)
    for (std::size_t i = 0; i < agg.mean.confusion.size(); ++i)
      for (std::size_t j = 0; j < agg.mean.confusion[i].size(); ++j)
        agg.mean.confusion[i][j] += metrics[r].confusion[i][j];
  return agg;
}

RepeatResult repeat_eval(const TwoViewDataset& data, const TwoViewConfig& config,
                         int repetitions, std::uint64_t base_seed) {
  validate_dataset(data);
  if (repetitions < 1) throw input_error("repeat_eval: repetitions must be >= 1");

  RepeatResult result;
  std::vector<Metrics> t_all, s_all, c_all, f_all;
  for (int rep = 0; rep < repetitions; ++rep) {
    const std::uint64_t seed = base_seed + static_cast<std::uint64_t>(rep);
    TwoViewTrainOutcome outcome = train_two_view(data, config, seed);
    const auto& test = outcome.split.test;

    RepeatRep rr;
    rr.rep = rep;
    rr.seed = seed;
    rr.nn_restarts = outcome.model.nn_restarts;
    rr.fused = evaluate_two_view(outcome.model, data, test);

    // Table-1 baselines: single-view SVMs and the concatenated-feature SVM,
    // trained on the same svm_train slice.
    const auto svm_labels = gather_labels(data.labels, outcome.split.svm_train);
    const SvmModel concat_model = svm_train(
        gather(outcome.split.svm_train,
               [&](std::size_t i) {
                 std::vector<double> f = data.phi_t[i];
                 f.insert(f.end(), data.phi_s[i].begin(), data.phi_s[i].end());
                 return f;
               }),
        svm_labels, config.svm, "TS");

    std::vector<int> truth, pt, ps, pc;
    for (std::size_t i : test) {
      truth.push_back(data.labels[i]);
      pt.push_back(svm_predict(outcome.model.svm_t, data.phi_t[i]));
      ps.push_back(svm_predict(outcome.model.svm_s, data.phi_s[i]));
      std::vector<double> f = data.phi_t[i];
      f.insert(f.end(), data.phi_s[i].begin(), data.phi_s[i].end());
      pc.push_back(svm_predict(concat_model, f));
    }
    rr.t_only = compute_metrics(truth, pt, data.k);
    rr.s_only = compute_metrics(truth, ps, data.k);
    rr.concat = compute_metrics(truth, pc, data.k);

    t_all.push_back(rr.t_only);
    s_all.push_back(rr.s_only);
    c_all.push_back(rr.concat);
    f_all.push_back(rr.fused);
    result.reps.push_back(std::move(rr));
  }
  result.t_only = aggregate_metrics(t_all);
  result.s_only = aggregate_metrics(s_all);
  result.concat = aggregate_metrics(c_all);
  result.fused = aggregate_metrics(f_all);
  return result;
}

}  // namespace texfuse
