#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "milplab/encoding.hpp"
#include "milplab/rng.hpp"

namespace milplab {

// Row-major dense matrix. Plain storage so weight tensors serialize and
// gradient-check trivially; Eigen maps are used internally for the math.
struct Dense2 {
  int rows = 0, cols = 0;
  std::vector<double> data;

  static Dense2 zeros(int r, int c) {
    return Dense2{r, c, std::vector<double>(static_cast<std::size_t>(r) * c, 0.0)};
  }
  double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
};

// Two-layer perceptron with relu on the hidden layer.
struct Mlp2 {
  Dense2 w1;               // in x hidden
  std::vector<double> b1;  // hidden
  Dense2 w2;               // hidden x out
  std::vector<double> b2;  // out

  int in() const { return w1.rows; }
  int hidden() const { return w1.cols; }
  int out() const { return w2.cols; }
};

// Frozen affine x <- (x - beta) / sigma applied to the aggregated messages;
// beta/sigma are dataset statistics fixed before training.
struct Prenorm {
  std::vector<double> beta;
  std::vector<double> sigma;  // > 0 elementwise
  bool frozen = false;
};

enum class ConvMode : std::uint8_t { kSum, kSumPrenorm, kMean };

const char* to_string(ConvMode m);
ConvMode conv_mode_from_string(const std::string& s);

struct GcnnParams {
  int width = 64;  // embedding width and MLP hidden size
  ConvMode conv_mode = ConvMode::kSumPrenorm;
  Mlp2 embed_c;  // kConsFeats -> width
  Mlp2 embed_v;  // kVarFeats  -> width
  Mlp2 g_c;      // (width + width + 1) -> width   message, constraint side
  Mlp2 f_c;      // (width + width) -> width       update,  constraint side
  Mlp2 g_v;      // message, variable side
  Mlp2 f_v;      // update,  variable side
  Prenorm pre_c;
  Prenorm pre_v;
  Mlp2 head;  // width -> 1

  // Applies fn to every learnable tensor (prenorm excluded) in a fixed
  // order shared by init, Adam, serialization and the gradient check.
  template <typename Fn>
  void for_each_tensor(Fn&& fn) {
    for (Mlp2* mlp : {&embed_c, &embed_v, &g_c, &f_c, &g_v, &f_v, &head}) {
      fn(mlp->w1.data);
      fn(mlp->b1);
      fn(mlp->w2.data);
      fn(mlp->b2);
    }
  }
  template <typename Fn>
  void for_each_tensor(Fn&& fn) const {
    const_cast<GcnnParams*>(this)->for_each_tensor(
        [&](auto& v) { fn(const_cast<const std::vector<double>&>(v)); });
  }
};

// Glorot-uniform weights, zero biases, identity prenorm. The draw sequence
// does not depend on conv_mode, so different modes share initial weights
// under the same seed.
GcnnParams init_params(int width, ConvMode mode, RngSeed seed);

struct ForwardResult {
  std::vector<double> probs;   // exactly 0 off-mask; sums to 1 over the mask
  std::vector<double> logits;  // one per variable
};

ForwardResult forward(const BipartiteState& state, const GcnnParams& params);

// One expert state-action pair as seen by the trainer.
struct Sample {
  const BipartiteState* state;
  int action;
};

// Mean cross-entropy of the expert actions and the full reverse-mode
// gradient. `grads` is GcnnParams-shaped; prenorm is treated as a constant
// affine map.
double loss_and_grad(std::span<const Sample> batch, const GcnnParams& params,
                     GcnnParams& grads, int workers = 0);

// Forward-only dataset loss (mean negative log-likelihood).
double dataset_loss(std::span<const Sample> samples, const GcnnParams& params,
                    int workers = 0);

// Two-pass prenorm pretraining: constraint-side statistics first (they do
// not depend on any prenorm), then variable-side statistics with the fitted
// constraint prenorm in place. Freezes both layers.
void prenorm_pretrain(std::span<const BipartiteState* const> dataset, GcnnParams& params);

struct AdamState {
  GcnnParams m, v;
  std::int64_t t = 0;
};

AdamState make_adam_state(const GcnnParams& params);

struct TrainConfig {
  int batch_size = 32;
  double lr0 = 1e-3;
  double lr_decay = 5.0;
  int patience_decay = 10;  // epochs without validation improvement -> lr /= lr_decay
  int patience_stop = 20;   // epochs without validation improvement -> stop
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  RngSeed seed;
  int max_epochs = 1000;
  int workers = 0;  // 0 = hardware concurrency
  std::function<void(int, double, double, double)> progress;  // epoch, tl, vl, lr
};

// Bias-corrected Adam update; prenorm parameters are never touched.
void adam_step(GcnnParams& params, const GcnnParams& grads, AdamState& state, double lr,
               const TrainConfig& cfg);

struct EpochStats {
  int epoch;
  double train_loss;
  double valid_loss;
  double lr;
};

struct TrainResult {
  GcnnParams params;  // best-validation parameters
  std::vector<EpochStats> history;
};

// Behavioral-cloning loop: shuffled minibatches, Adam, validation-driven
// learning-rate decay and early stopping. Initializes parameters from
// cfg.seed and pretrains the prenorm layers in sum_prenorm mode.
TrainResult train(std::span<const Sample> train_set, std::span<const Sample> valid_set,
                  const TrainConfig& cfg, ConvMode mode, int width = 64);

// Versioned binary model format; round trips bit-exactly.
void save_model(const GcnnParams& params, const std::string& path);
GcnnParams load_model(const std::string& path);

}  // namespace milplab
