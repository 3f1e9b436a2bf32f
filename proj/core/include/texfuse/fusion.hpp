#pragma once

#include <cstdint>
#include <vector>

namespace texfuse {

// Three fully connected layers: k(k-1) -> 8 -> 4 -> k, ReLU on the hidden
// layers, softmax at the output. Weight matrices are row-major [out][in].
struct FusionNet {
  int k = 0;
  int input_dim = 0;  // k(k-1)
  std::vector<double> w1, b1;  // 8 x input_dim, 8
  std::vector<double> w2, b2;  // 4 x 8, 4
  std::vector<double> w3, b3;  // k x 4, k
};

inline constexpr int kFusionHidden1 = 8;
inline constexpr int kFusionHidden2 = 4;

// He-scaled Gaussian weights from the seed; hidden biases start at 0.1 so no
// ReLU unit is born dead, output biases at 0.
FusionNet fusion_init(int k, std::uint64_t seed);

// Softmax probabilities; throws on length mismatch or non-finite activations.
std::vector<double> fusion_forward(const FusionNet& net,
                                   const std::vector<double>& d);

int fusion_predict(const FusionNet& net, const std::vector<double>& d);

// Mean cross-entropy over the batch and its analytic gradient, packaged in a
// net-shaped container (for training and for finite-difference checks).
struct FusionGradient {
  FusionNet grad;
  double loss = 0.0;
};

FusionGradient fusion_loss_gradient(const FusionNet& net,
                                    const std::vector<std::vector<double>>& inputs,
                                    const std::vector<int>& labels);

struct FusionTrainResult {
  FusionNet net;
  std::vector<double> loss_curve;  // one entry per epoch (pre-update loss)
};

// Full-batch gradient descent on mean cross-entropy. Zero epochs returns the
// initial net unchanged. Throws numeric_error if the loss goes non-finite.
FusionTrainResult fusion_train(const FusionNet& init,
                               const std::vector<std::vector<double>>& inputs,
                               const std::vector<int>& labels, int epochs,
                               double lr);

}  // namespace texfuse
