#pragma once

// Trainable seq2seq model: linear encoder, polar-parametrized diagonal
// recurrence, real/imaginary state view and a linear or one-hidden-layer MLP
// head, with hand-written backpropagation through time and Adam.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lrnn/dataset.hpp"
#include "lrnn/numerics.hpp"
#include "lrnn/rng.hpp"

namespace lrnn {

struct Encoder {
    RMatrix w;     // H x M
    RVector bias;  // H
};

/// |lambda| = exp(-exp(nu)) keeps every eigenvalue strictly inside the unit disk.
struct PolarRecurrence {
    RVector nu;
    RVector theta;
    RMatrix b_real;  // N x H
    RMatrix b_imag;  // N x H
    RVector gamma;   // per-channel input scale
    bool trainable = true;

    Index state_dim() const { return nu.size(); }
    CVector lambda() const;
};

enum class Activation { relu, sigmoid };

struct LinearHead {
    RMatrix w;     // S x I
    RVector bias;  // S
};

struct MlpHead {
    RMatrix w1;  // D x I
    RVector b1;
    RMatrix w2;  // S x D
    RVector b2;
    Activation activation = Activation::relu;
};

using Head = std::variant<LinearHead, MlpHead>;

enum class StateView { real_imag, real_imag_time, real_only };
enum class Readout { per_timestep, last_state };

struct Seq2SeqModel {
    Encoder encoder;
    PolarRecurrence recurrence;
    StateView view = StateView::real_imag;
    Readout readout = Readout::per_timestep;
    bool encoder_trainable = true;
    Head head;

    Index input_dim() const { return encoder.w.cols(); }
    Index hidden_dim() const { return encoder.w.rows(); }
    Index state_dim() const { return recurrence.state_dim(); }
    Index feature_dim() const;
    Index output_dim() const;
    bool has_mlp() const { return std::holds_alternative<MlpHead>(head); }
};

/// Gradients share the layout of the model they belong to.
using ModelGradients = Seq2SeqModel;

enum class HeadKind { linear, mlp };

struct ModelConfig {
    Index input_dim = 1;   // M
    Index hidden_dim = 16; // H
    Index state_dim = 64;  // N
    Index output_dim = 1;  // S
    Index mlp_width = 128; // D
    HeadKind head = HeadKind::mlp;
    Activation activation = Activation::relu;
    StateView view = StateView::real_imag;
    Readout readout = Readout::per_timestep;
    double r_min = 0.9;
    double r_max = 0.999;
    double max_phase = 6.283185307179586;
    bool train_encoder = true;
    bool train_recurrence = true;

    void validate() const;
};

Seq2SeqModel init_model(const ModelConfig& config, Rng& rng);
ModelGradients zeros_like(const Seq2SeqModel& model);

/// View of one parameter array. Values are column-major.
struct ParamBlock {
    std::string name;
    double* data = nullptr;
    Index rows = 0;
    Index cols = 0;
    bool trainable = true;

    Index size() const { return rows * cols; }
    Eigen::Map<RMatrix> map() const { return {data, rows, cols}; }
};

/// Blocks in declaration order: encoder, recurrence, head.
std::vector<ParamBlock> parameter_blocks(Seq2SeqModel& model);
Index parameter_count(const Seq2SeqModel& model);

struct ForwardCache {
    RMatrix input;     // M x L
    RMatrix encoded;   // H x L
    CMatrix drive;     // N x L, B u before gamma
    CMatrix states;    // N x L
    RMatrix features;  // I x cols
    RMatrix pre;       // D x cols (MLP only)
    RMatrix hidden;    // D x cols (MLP only)
    RMatrix output;    // S x cols

    // backward workspace, reused across samples
    struct Scratch {
        RMatrix d_feat, d_pre, d_u;
        CMatrix adj, scaled;
    };
    mutable Scratch scratch;
};

/// Output is S x L for per-timestep readout, S x 1 for last-state readout.
RMatrix forward(const Seq2SeqModel& model, const RMatrix& input, ForwardCache* cache = nullptr);

/// Backpropagates d loss / d output through a filled cache and adds the
/// result into grads.
void backward(const Seq2SeqModel& model, const ForwardCache& cache, const RMatrix& d_output, ModelGradients& grads);

/// Mean squared error over all output entries.
double mse(const RMatrix& prediction, const RMatrix& target);

/// MSE of one sample; accumulates scale * gradient into grads when given.
/// Passing a cache lets repeated calls reuse its buffers.
double loss_and_gradients(const Seq2SeqModel& model, const RMatrix& input, const RMatrix& target,
                          ModelGradients* grads = nullptr, double scale = 1.0, ForwardCache* cache = nullptr);

double evaluate(const Seq2SeqModel& model, const SequenceDataset& data, int jobs = 1);

struct AdamHyper {
    double lr = 3e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    std::vector<RMatrix> m;
    std::vector<RMatrix> v;
    long step = 0;
};

/// One bias-corrected Adam update on every trainable block. A non-finite
/// gradient throws NumericalError naming the block and leaves params untouched.
void adam_step(std::vector<ParamBlock>& params, const std::vector<ParamBlock>& grads, AdamState& state,
               const AdamHyper& hyper);

enum class LrSchedule { constant, cosine };

struct TrainConfig {
    int epochs = 20;
    Index batch = 32;
    AdamHyper adam;
    LrSchedule schedule = LrSchedule::constant;  // cosine decays lr to 0 over all steps
    double clip_norm = 0.0;                      // global gradient-norm clip, 0 disables
    std::uint64_t seed = 1;
    int seeds = 1;  // best-of-k over model seeds 1..k
    int jobs = 1;
};

struct SeedRun {
    std::uint64_t seed = 0;
    bool failed = false;
    std::string failure;
    std::vector<double> train_loss;  // per epoch
    std::vector<double> test_loss;   // per epoch, empty without a test set
    double final_test = 0.0;
};

struct TrainResult {
    Seq2SeqModel model;
    std::vector<SeedRun> runs;
    std::size_t best = 0;
};

/// Trains `model` in place with minibatch Adam. Shuffling is drawn from
/// (config.seed, run_seed); per-sample gradients are summed in sample order.
SeedRun fit(Seq2SeqModel& model, const SequenceDataset& train_set, const SequenceDataset& test_set,
            const TrainConfig& config, std::uint64_t run_seed);

/// Runs seeds 1..config.seeds from fresh initializations and keeps the model
/// with the lowest final test loss (train loss without a test set). Seeds
/// whose loss diverges are marked failed; if all fail, NumericalError.
TrainResult train(const ModelConfig& model_config, const SequenceDataset& train_set,
                  const SequenceDataset& test_set, const TrainConfig& config);

/// ceil(2 r^2 c_f^2 s^3 / eps^2), or ceil(4 r^2 c_f^2 |omega|^2 s^3 / eps^2)
/// when the reconstruction-map norm is given.
std::uint64_t mlp_width_bound(double r, double c_f, std::uint64_t s, double eps,
                              std::optional<double> omega_norm = std::nullopt);

/// Worst |analytic - numeric| / max(|analytic|, |numeric|, floor) over every
/// parameter, using central differences of the sample loss.
double grad_check(const Seq2SeqModel& model, const RMatrix& input, const RMatrix& target, double fd_step = 1e-5,
                  double floor = 1e-6);

/// Shifts MLP first-layer biases so no pre-activation on this input lies
/// within `margin` of the ReLU kink.
void avoid_relu_kinks(Seq2SeqModel& model, const RMatrix& input, double margin = 1e-3);

void save_checkpoint(const std::filesystem::path& path, const Seq2SeqModel& model);
Seq2SeqModel load_checkpoint(const std::filesystem::path& path);

} // namespace lrnn
