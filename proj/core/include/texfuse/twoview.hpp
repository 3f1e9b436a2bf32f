#pragma once

#include <cstdint>
#include <vector>

#include "texfuse/fusion.hpp"
#include "texfuse/svm.hpp"

namespace texfuse {

struct TwoViewDataset {
  std::vector<std::vector<double>> phi_t;
  std::vector<std::vector<double>> phi_s;
  std::vector<int> labels;  // dense 0..k-1
  int k = 0;
};

// Three-way split: svm_train = floor(n/2) examples, test = test_count, the
// remainder trains the fusion net; the sets are disjoint by construction.
struct SplitPlan {
  std::vector<std::size_t> svm_train;
  std::vector<std::size_t> nn_train;
  std::vector<std::size_t> test;
  std::uint64_t seed = 0;
};

// Deterministic Fisher-Yates permutation. The permutation is resampled (up
// to 100 times) until svm_train contains every class, then sliced in order:
// first half to the SVMs, tail test_count to test, the middle to the net.
SplitPlan make_split(const std::vector<int>& labels, std::size_t test_count,
                     std::uint64_t seed);

struct Metrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double specificity = 0.0;
  double f_measure = 0.0;
  std::vector<std::vector<std::size_t>> confusion;  // [true][predicted]
};

// k = 2 uses class 1 as the positive class; k > 2 macro-averages one-vs-rest.
// Degenerate 0/0 rates evaluate to 0.
Metrics compute_metrics(const std::vector<int>& truth,
                        const std::vector<int>& predicted, int k);

struct TwoViewConfig {
  SvmConfig svm;
  int nn_epochs = 1000;
  double nn_lr = 0.05;
  // Deterministic multi-start: if the final training loss exceeds
  // nn_restart_loss, reinitialize from a remixed seed, at most
  // nn_max_restarts extra attempts; the lowest-loss net wins.
  double nn_restart_loss = 0.15;
  int nn_max_restarts = 2;
  std::size_t test_count = 0;  // 0 selects ceil(n/6)
};

struct TwoViewModel {
  int k = 0;
  SvmModel svm_t;
  SvmModel svm_s;
  FusionNet net;
  std::vector<double> d_mean;  // z-score constants for d_T (+) d_S,
  std::vector<double> d_std;   // computed on the nn_train split
  int nn_restarts = 0;
  std::vector<double> nn_loss_curve;
};

// The standardized fusion input d_T (+) d_S for one example.
std::vector<double> fusion_input(const TwoViewModel& model,
                                 const std::vector<double>& phi_t,
                                 const std::vector<double>& phi_s);

int two_view_predict(const TwoViewModel& model, const std::vector<double>& phi_t,
                     const std::vector<double>& phi_s);

struct TwoViewTrainOutcome {
  TwoViewModel model;
  SplitPlan split;
};

// Splits, trains both per-view SVMs on svm_train, builds decision-distance
// vectors on nn_train, standardizes them, and trains the fusion net.
TwoViewTrainOutcome train_two_view(const TwoViewDataset& data,
                                   const TwoViewConfig& config,
                                   std::uint64_t seed);

Metrics evaluate_two_view(const TwoViewModel& model, const TwoViewDataset& data,
                          const std::vector<std::size_t>& indices);

struct RepeatRep {
  int rep = 0;
  std::uint64_t seed = 0;
  Metrics t_only;
  Metrics s_only;
  Metrics concat;
  Metrics fused;
  int nn_restarts = 0;
};

struct MetricsAggregate {
  Metrics mean;    // confusion holds the elementwise sum across repetitions
  Metrics stddev;  // population std of the scalar metrics; confusion empty
};

MetricsAggregate aggregate_metrics(const std::vector<Metrics>& metrics);

struct RepeatResult {
  std::vector<RepeatRep> reps;
  MetricsAggregate t_only;
  MetricsAggregate s_only;
  MetricsAggregate concat;
  MetricsAggregate fused;
};

// Repetition r uses seed base_seed + r. Each repetition also trains the
// single-view and concatenated-feature SVM baselines on the same svm_train
// slice and evaluates everything on the shared test slice.
RepeatResult repeat_eval(const TwoViewDataset& data, const TwoViewConfig& config,
                         int repetitions, std::uint64_t base_seed);

}  // namespace texfuse
