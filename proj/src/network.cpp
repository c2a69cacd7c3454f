#include "lrnn/network.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "lrnn/container.hpp"
#include "lrnn/parallel.hpp"

namespace lrnn {

CVector PolarRecurrence::lambda() const {
    CVector l(nu.size());
    for (Index i = 0; i < nu.size(); ++i) l(i) = std::polar(std::exp(-std::exp(nu(i))), theta(i));
    return l;
}

Index Seq2SeqModel::feature_dim() const {
    switch (view) {
    case StateView::real_imag: return 2 * state_dim();
    case StateView::real_imag_time: return 2 * state_dim() + 1;
    case StateView::real_only: return state_dim();
    }
    return 0;
}

Index Seq2SeqModel::output_dim() const {
    return std::visit([](const auto& h) -> Index {
        if constexpr (std::is_same_v<std::decay_t<decltype(h)>, LinearHead>)
            return h.w.rows();
        else
            return h.w2.rows();
    }, head);
}

void ModelConfig::validate() const {
    if (input_dim < 1 || hidden_dim < 1 || state_dim < 1 || output_dim < 1 || mlp_width < 1)
        throw DomainError("model dimensions must be at least 1");
    if (!(r_min >= 0.0 && r_min <= r_max && r_max < 1.0 && r_max > 0.0))
        throw DomainError("eigenvalue ring needs 0 <= r_min <= r_max < 1, got [" + std::to_string(r_min) + ", " +
                          std::to_string(r_max) + "]");
}

namespace {

Index features_for(StateView view, Index n) {
    switch (view) {
    case StateView::real_imag: return 2 * n;
    case StateView::real_imag_time: return 2 * n + 1;
    case StateView::real_only: return n;
    }
    return 0;
}

void fill_normal(RMatrix& m, Rng& rng, double stddev) {
    for (Index j = 0; j < m.cols(); ++j)
        for (Index i = 0; i < m.rows(); ++i) m(i, j) = stddev * rng.normal();
}

RMatrix normal_matrix(Index rows, Index cols, Rng& rng, double stddev) {
    RMatrix m(rows, cols);
    fill_normal(m, rng, stddev);
    return m;
}

double activate(Activation a, double z) {
    if (a == Activation::relu) return z > 0.0 ? z : 0.0;
    return 1.0 / (1.0 + std::exp(-z));
}

double activate_grad(Activation a, double z, double out) {
    if (a == Activation::relu) return z > 0.0 ? 1.0 : 0.0;
    return out * (1.0 - out);
}

} // namespace

Seq2SeqModel init_model(const ModelConfig& c, Rng& rng) {
    c.validate();
    Seq2SeqModel m;
    m.view = c.view;
    m.readout = c.readout;
    m.encoder_trainable = c.train_encoder;
    m.encoder.w = normal_matrix(c.hidden_dim, c.input_dim, rng, 1.0 / std::sqrt(double(c.input_dim)));
    m.encoder.bias = RVector::Zero(c.hidden_dim);

    auto& r = m.recurrence;
    r.trainable = c.train_recurrence;
    r.nu.resize(c.state_dim);
    r.theta.resize(c.state_dim);
    r.gamma.resize(c.state_dim);
    for (Index i = 0; i < c.state_dim; ++i) {
        // area-uniform on the annulus
        const double radius = std::sqrt(rng.uniform(c.r_min * c.r_min, c.r_max * c.r_max));
        r.theta(i) = rng.uniform(0.0, c.max_phase);
        r.nu(i) = std::log(-std::log(radius));
        r.gamma(i) = std::sqrt(1.0 - radius * radius);
    }
    const double b_std = 1.0 / std::sqrt(2.0 * double(c.hidden_dim));
    r.b_real = normal_matrix(c.state_dim, c.hidden_dim, rng, b_std);
    r.b_imag = normal_matrix(c.state_dim, c.hidden_dim, rng, b_std);

    const Index in = features_for(c.view, c.state_dim);
    if (c.head == HeadKind::linear) {
        m.head = LinearHead{normal_matrix(c.output_dim, in, rng, 1.0 / std::sqrt(double(in))),
                            RVector::Zero(c.output_dim)};
    } else {
        const double w1_std = c.activation == Activation::relu ? std::sqrt(2.0 / double(in)) : 1.0 / std::sqrt(double(in));
        m.head = MlpHead{normal_matrix(c.mlp_width, in, rng, w1_std), RVector::Zero(c.mlp_width),
                         normal_matrix(c.output_dim, c.mlp_width, rng, 1.0 / std::sqrt(double(c.mlp_width))),
                         RVector::Zero(c.output_dim), c.activation};
    }
    return m;
}

ModelGradients zeros_like(const Seq2SeqModel& model) {
    ModelGradients g = model;
    for (auto& b : parameter_blocks(g)) b.map().setZero();
    return g;
}

std::vector<ParamBlock> parameter_blocks(Seq2SeqModel& m) {
    auto block = [](std::string name, auto& x, bool trainable) {
        return ParamBlock{std::move(name), x.data(), x.rows(), x.cols(), trainable};
    };
    std::vector<ParamBlock> out;
    out.push_back(block("encoder.w", m.encoder.w, m.encoder_trainable));
    out.push_back(block("encoder.bias", m.encoder.bias, m.encoder_trainable));
    auto& r = m.recurrence;
    out.push_back(block("recurrence.nu", r.nu, r.trainable));
    out.push_back(block("recurrence.theta", r.theta, r.trainable));
    out.push_back(block("recurrence.b_real", r.b_real, r.trainable));
    out.push_back(block("recurrence.b_imag", r.b_imag, r.trainable));
    out.push_back(block("recurrence.gamma", r.gamma, r.trainable));
    if (auto* h = std::get_if<LinearHead>(&m.head)) {
        out.push_back(block("head.w", h->w, true));
        out.push_back(block("head.bias", h->bias, true));
    } else {
        auto& mh = std::get<MlpHead>(m.head);
        out.push_back(block("head.w1", mh.w1, true));
        out.push_back(block("head.b1", mh.b1, true));
        out.push_back(block("head.w2", mh.w2, true));
        out.push_back(block("head.b2", mh.b2, true));
    }
    return out;
}

Index parameter_count(const Seq2SeqModel& model) {
    Index n = 0;
    for (const auto& b : parameter_blocks(const_cast<Seq2SeqModel&>(model))) n += b.size();
    return n;
}

RMatrix forward(const Seq2SeqModel& model, const RMatrix& input, ForwardCache* cache) {
    if (input.rows() != model.input_dim() || input.cols() < 1)
        throw ShapeError("model expects input with " + std::to_string(model.input_dim()) + " rows, got " +
                         shape_string(input));
    ForwardCache local;
    ForwardCache& c = cache ? *cache : local;
    const Index n = model.state_dim();
    const Index len = input.cols();
    const auto& rec = model.recurrence;

    c.input = input;
    c.encoded = model.encoder.w * input;
    c.encoded.colwise() += model.encoder.bias;
    const RMatrix dr = rec.b_real * c.encoded;
    const RMatrix di = rec.b_imag * c.encoded;
    c.drive.resize(n, len);
    c.drive.real() = dr;
    c.drive.imag() = di;

    const CVector lambda = rec.lambda();
    const Eigen::ArrayXcd gamma = rec.gamma.cast<Complex>().array();
    c.states.resize(n, len);
    c.states.col(0) = gamma * c.drive.col(0).array();
    for (Index k = 1; k < len; ++k)
        c.states.col(k) = lambda.array() * c.states.col(k - 1).array() + gamma * c.drive.col(k).array();

    const Index first = model.readout == Readout::last_state ? len - 1 : 0;
    const Index cols = len - first;
    c.features.resize(model.feature_dim(), cols);
    c.features.topRows(n) = c.states.rightCols(cols).real();
    if (model.view != StateView::real_only) c.features.middleRows(n, n) = c.states.rightCols(cols).imag();
    if (model.view == StateView::real_imag_time)
        for (Index j = 0; j < cols; ++j) c.features(2 * n, j) = double(first + j + 1);

    if (const auto* h = std::get_if<LinearHead>(&model.head)) {
        c.output = h->w * c.features;
        c.output.colwise() += h->bias;
    } else {
        const auto& mh = std::get<MlpHead>(model.head);
        c.pre = mh.w1 * c.features;
        c.pre.colwise() += mh.b1;
        c.hidden = c.pre.unaryExpr([&](double z) { return activate(mh.activation, z); });
        c.output = mh.w2 * c.hidden;
        c.output.colwise() += mh.b2;
    }
    return c.output;
}

void backward(const Seq2SeqModel& model, const ForwardCache& c, const RMatrix& d_out, ModelGradients& g) {
    if (c.input.size() == 0 || c.features.size() == 0) throw std::logic_error("backward called without a forward cache");
    if (d_out.rows() != c.output.rows() || d_out.cols() != c.output.cols())
        throw ShapeError("output gradient " + shape_string(d_out) + " does not match output " + shape_string(c.output));

    auto& w = c.scratch;
    RMatrix& d_feat = w.d_feat;
    if (const auto* h = std::get_if<LinearHead>(&model.head)) {
        auto& gh = std::get<LinearHead>(g.head);
        gh.w.noalias() += d_out * c.features.transpose();
        gh.bias += d_out.rowwise().sum();
        d_feat.noalias() = h->w.transpose() * d_out;
    } else {
        const auto& mh = std::get<MlpHead>(model.head);
        auto& gh = std::get<MlpHead>(g.head);
        gh.w2.noalias() += d_out * c.hidden.transpose();
        gh.b2 += d_out.rowwise().sum();
        RMatrix& d_pre = w.d_pre;
        d_pre.noalias() = mh.w2.transpose() * d_out;
        for (Index j = 0; j < d_pre.cols(); ++j)
            for (Index i = 0; i < d_pre.rows(); ++i)
                d_pre(i, j) *= activate_grad(mh.activation, c.pre(i, j), c.hidden(i, j));
        gh.w1.noalias() += d_pre * c.features.transpose();
        gh.b1 += d_pre.rowwise().sum();
        d_feat.noalias() = mh.w1.transpose() * d_pre;
    }

    const auto& rec = model.recurrence;
    if (!rec.trainable && !model.encoder_trainable) return;

    const Index n = model.state_dim();
    const Index len = c.states.cols();
    const CVector lambda = rec.lambda();

    // adjoint a_k = g_k + conj(lambda) a_{k+1}, with g = dl/dRe x + i dl/dIm x
    CMatrix& adj = w.adj;
    adj.setZero(n, len);
    adj.real().rightCols(d_feat.cols()) = d_feat.topRows(n);
    if (model.view != StateView::real_only) adj.imag().rightCols(d_feat.cols()) = d_feat.middleRows(n, n);
    const Eigen::ArrayXcd lambda_conj = lambda.conjugate().array();
    for (Index k = len - 2; k >= 0; --k) adj.col(k).array() += lambda_conj * adj.col(k + 1).array();

    CMatrix& scaled = w.scaled;
    scaled.noalias() = rec.gamma.cast<Complex>().asDiagonal() * adj;

    if (rec.trainable) {
        auto& gr = g.recurrence;
        // s_i = sum_k conj(a_ik) x_i(k-1)
        const CVector s = (adj.rightCols(len - 1).conjugate().cwiseProduct(c.states.leftCols(len - 1))).rowwise().sum();
        const RVector gg = (adj.conjugate().cwiseProduct(c.drive)).real().rowwise().sum();
        for (Index i = 0; i < n; ++i) {
            const Complex sl = s(i) * lambda(i);
            gr.nu(i) += -std::exp(rec.nu(i)) * sl.real();
            gr.theta(i) += -sl.imag();
            gr.gamma(i) += gg(i);
        }
        gr.b_real.noalias() += scaled.real() * c.encoded.transpose();
        gr.b_imag.noalias() += scaled.imag() * c.encoded.transpose();
    }
    if (model.encoder_trainable) {
        RMatrix& d_u = w.d_u;
        d_u.noalias() = rec.b_real.transpose() * scaled.real();
        d_u.noalias() += rec.b_imag.transpose() * scaled.imag();
        g.encoder.w.noalias() += d_u * c.input.transpose();
        g.encoder.bias += d_u.rowwise().sum();
    }
}

double mse(const RMatrix& prediction, const RMatrix& target) {
    if (prediction.rows() != target.rows() || prediction.cols() != target.cols())
        throw ShapeError("prediction " + shape_string(prediction) + " vs target " + shape_string(target));
    return (prediction - target).squaredNorm() / double(prediction.size());
}

double loss_and_gradients(const Seq2SeqModel& model, const RMatrix& input, const RMatrix& target,
                          ModelGradients* grads, double scale, ForwardCache* cache) {
    ForwardCache local;
    ForwardCache& c = cache ? *cache : local;
    forward(model, input, &c);
    const double loss = mse(c.output, target);
    if (grads) {
        const RMatrix d_out = (2.0 * scale / double(c.output.size())) * (c.output - target);
        backward(model, c, d_out, *grads);
    }
    return loss;
}

double evaluate(const Seq2SeqModel& model, const SequenceDataset& data, int jobs) {
    if (data.empty()) throw DomainError("evaluate on an empty dataset");
    std::vector<double> losses(data.size());
    const auto workers = std::size_t(std::clamp<std::ptrdiff_t>(jobs, 1, std::ptrdiff_t(data.size())));
    std::vector<ForwardCache> caches(workers);
    parallel_for(std::ptrdiff_t(data.size()), int(workers), [&](std::ptrdiff_t i) {
        auto& c = caches[std::size_t(i) % workers];
        losses[std::size_t(i)] = loss_and_gradients(model, data.inputs[std::size_t(i)], data.targets[std::size_t(i)],
                                                    nullptr, 1.0, &c);
    });
    return std::accumulate(losses.begin(), losses.end(), 0.0) / double(losses.size());
}

void adam_step(std::vector<ParamBlock>& params, const std::vector<ParamBlock>& grads, AdamState& state,
               const AdamHyper& hyper) {
    if (params.size() != grads.size()) throw ShapeError("parameter and gradient block counts differ");
    for (std::size_t b = 0; b < params.size(); ++b) {
        if (params[b].rows != grads[b].rows || params[b].cols != grads[b].cols)
            throw ShapeError("gradient for " + params[b].name + " has shape " +
                             shape_string(grads[b].rows, grads[b].cols));
        if (params[b].trainable && !all_finite(grads[b].map()))
            throw NumericalError("non-finite gradient in " + params[b].name);
    }
    if (state.m.empty()) {
        for (const auto& p : params) {
            state.m.push_back(RMatrix::Zero(p.rows, p.cols));
            state.v.push_back(RMatrix::Zero(p.rows, p.cols));
        }
    }
    ++state.step;
    const double c1 = 1.0 - std::pow(hyper.beta1, double(state.step));
    const double c2 = 1.0 - std::pow(hyper.beta2, double(state.step));
    for (std::size_t b = 0; b < params.size(); ++b) {
        if (!params[b].trainable) continue;
        auto p = params[b].map();
        const auto g = grads[b].map();
        auto& m = state.m[b];
        auto& v = state.v[b];
        m = hyper.beta1 * m + (1.0 - hyper.beta1) * g;
        v = hyper.beta2 * v + (1.0 - hyper.beta2) * g.cwiseProduct(g);
        p.array() -= hyper.lr * (m.array() / c1) / ((v.array() / c2).sqrt() + hyper.eps);
    }
}

SeedRun fit(Seq2SeqModel& model, const SequenceDataset& train_set, const SequenceDataset& test_set,
            const TrainConfig& config, std::uint64_t run_seed) {
    if (train_set.empty()) throw DomainError("training set is empty");
    if (config.batch < 1 || config.epochs < 0) throw DomainError("batch must be >= 1 and epochs >= 0");
    SeedRun run;
    run.seed = run_seed;

    auto params = parameter_blocks(model);
    ModelGradients batch_grad = zeros_like(model);
    auto batch_blocks = parameter_blocks(batch_grad);
    AdamState adam;

    const auto n = train_set.size();
    const auto batch = std::size_t(config.batch);
    const std::size_t workers = std::size_t(std::max(1, config.jobs));
    std::vector<ModelGradients> sample_grads(std::min(batch, n), zeros_like(model));
    std::vector<double> sample_loss(sample_grads.size());
    std::vector<ForwardCache> caches(sample_grads.size());
    const std::size_t steps_per_epoch = (n + batch - 1) / batch;
    const double total_steps = double(steps_per_epoch) * double(config.epochs);
    AdamHyper hyper = config.adam;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        Rng shuffle(derive_seed(config.seed, "train/shuffle", run_seed), "epoch", std::uint64_t(epoch));
        for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[std::size_t(shuffle.below(i))]);

        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < n; start += batch) {
            const std::size_t count = std::min(batch, n - start);
            const double scale = 1.0 / double(count);
            parallel_for(std::ptrdiff_t(count), int(std::min(workers, count)), [&](std::ptrdiff_t j) {
                auto& g = sample_grads[std::size_t(j)];
                for (auto& b : parameter_blocks(g)) b.map().setZero();
                const auto idx = order[start + std::size_t(j)];
                sample_loss[std::size_t(j)] =
                    loss_and_gradients(model, train_set.inputs[idx], train_set.targets[idx], &g, scale,
                                       &caches[std::size_t(j)]);
            });
            for (auto& b : batch_blocks) b.map().setZero();
            for (std::size_t j = 0; j < count; ++j) {
                epoch_loss += sample_loss[j];
                const auto blocks = parameter_blocks(sample_grads[j]);
                for (std::size_t b = 0; b < blocks.size(); ++b) batch_blocks[b].map() += blocks[b].map();
            }
            if (!std::isfinite(epoch_loss)) {
                run.failed = true;
                run.failure = "loss diverged in epoch " + std::to_string(epoch + 1);
                return run;
            }
            if (config.clip_norm > 0.0) {
                double norm2 = 0.0;
                for (const auto& b : batch_blocks)
                    if (b.trainable) norm2 += b.map().squaredNorm();
                const double norm = std::sqrt(norm2);
                if (norm > config.clip_norm)
                    for (auto& b : batch_blocks) b.map() *= config.clip_norm / norm;
            }
            if (config.schedule == LrSchedule::cosine)
                hyper.lr = config.adam.lr * 0.5 * (1.0 + std::cos(std::numbers::pi * double(adam.step) / total_steps));
            try {
                adam_step(params, batch_blocks, adam, hyper);
            } catch (const NumericalError& e) {
                run.failed = true;
                run.failure = std::string(e.what()) + " in epoch " + std::to_string(epoch + 1);
                return run;
            }
        }
        run.train_loss.push_back(epoch_loss / double(n));
        if (!test_set.empty()) run.test_loss.push_back(evaluate(model, test_set, config.jobs));
    }
    run.final_test = test_set.empty() ? evaluate(model, train_set, config.jobs)
                                      : (run.test_loss.empty() ? evaluate(model, test_set, config.jobs)
                                                               : run.test_loss.back());
    if (!std::isfinite(run.final_test)) {
        run.failed = true;
        run.failure = "non-finite final loss";
    }
    return run;
}

TrainResult train(const ModelConfig& model_config, const SequenceDataset& train_set, const SequenceDataset& test_set,
                  const TrainConfig& config) {
    if (config.seeds < 1) throw DomainError("best-of-k needs k >= 1");
    TrainResult result;
    bool have_best = false;
    for (int s = 1; s <= config.seeds; ++s) {
        Rng rng(config.seed, "model/init", std::uint64_t(s));
        Seq2SeqModel model = init_model(model_config, rng);
        SeedRun run = fit(model, train_set, test_set, config, std::uint64_t(s));
        if (!run.failed && (!have_best || run.final_test < result.runs[result.best].final_test)) {
            result.best = result.runs.size();
            result.model = std::move(model);
            have_best = true;
        }
        result.runs.push_back(std::move(run));
    }
    if (!have_best) throw NumericalError("all " + std::to_string(config.seeds) + " training seeds diverged");
    return result;
}

std::uint64_t mlp_width_bound(double r, double c_f, std::uint64_t s, double eps, std::optional<double> omega_norm) {
    if (eps == 0.0) throw DomainError("width bound needs eps != 0");
    if (!(r > 0.0 && c_f > 0.0 && s > 0 && eps > 0.0) || (omega_norm && !(*omega_norm > 0.0)))
        throw DomainError("width bound arguments must be positive");
    const double s3 = double(s) * double(s) * double(s);
    double d = 2.0 * r * r * c_f * c_f * s3 / (eps * eps);
    if (omega_norm) d *= 2.0 * (*omega_norm) * (*omega_norm);
    return std::uint64_t(std::ceil(d));
}

double grad_check(const Seq2SeqModel& model, const RMatrix& input, const RMatrix& target, double fd_step,
                  double floor) {
    ModelGradients analytic = zeros_like(model);
    loss_and_gradients(model, input, target, &analytic);
    Seq2SeqModel probe = model;
    auto probe_blocks = parameter_blocks(probe);
    const auto grad_blocks = parameter_blocks(analytic);
    double worst = 0.0;
    for (std::size_t b = 0; b < probe_blocks.size(); ++b) {
        if (!probe_blocks[b].trainable) continue;
        for (Index i = 0; i < probe_blocks[b].size(); ++i) {
            double& x = probe_blocks[b].data[i];
            const double saved = x;
            x = saved + fd_step;
            const double up = loss_and_gradients(probe, input, target);
            x = saved - fd_step;
            const double down = loss_and_gradients(probe, input, target);
            x = saved;
            const double numeric = (up - down) / (2.0 * fd_step);
            const double a = grad_blocks[b].data[i];
            const double err = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), floor});
            worst = std::max(worst, err);
        }
    }
    return worst;
}

void avoid_relu_kinks(Seq2SeqModel& model, const RMatrix& input, double margin) {
    auto* mh = std::get_if<MlpHead>(&model.head);
    if (!mh || mh->activation != Activation::relu) return;
    ForwardCache cache;
    forward(model, input, &cache);
    for (Index d = 0; d < cache.pre.rows(); ++d) {
        const RVector z = cache.pre.row(d).transpose();
        auto clear = [&](double shift) { return (z.array() + shift).abs().minCoeff() >= margin; };
        double best = clear(0.0) ? 0.0 : std::numeric_limits<double>::infinity();
        for (Index k = 0; k < z.size() && best != 0.0; ++k)
            for (double side : {-2.0, 2.0}) {
                const double shift = -z(k) + side * margin;
                if (std::abs(shift) < std::abs(best) && clear(shift)) best = shift;
            }
        mh->b1(d) += best;
    }
}

namespace {

constexpr std::uint32_t kCheckpointVersion = 1;

struct Dims {
    std::uint64_t m, h, n, s, d, head, activation, view, readout, enc_train, rec_train;
};

Seq2SeqModel shaped_model(const Dims& d) {
    Seq2SeqModel m;
    m.view = StateView(d.view);
    m.readout = Readout(d.readout);
    m.encoder_trainable = d.enc_train != 0;
    m.encoder.w = RMatrix::Zero(Index(d.h), Index(d.m));
    m.encoder.bias = RVector::Zero(Index(d.h));
    auto& r = m.recurrence;
    r.trainable = d.rec_train != 0;
    r.nu = RVector::Zero(Index(d.n));
    r.theta = RVector::Zero(Index(d.n));
    r.b_real = RMatrix::Zero(Index(d.n), Index(d.h));
    r.b_imag = RMatrix::Zero(Index(d.n), Index(d.h));
    r.gamma = RVector::Zero(Index(d.n));
    const Index in = features_for(m.view, Index(d.n));
    if (d.head == 0)
        m.head = LinearHead{RMatrix::Zero(Index(d.s), in), RVector::Zero(Index(d.s))};
    else
        m.head = MlpHead{RMatrix::Zero(Index(d.d), in), RVector::Zero(Index(d.d)), RMatrix::Zero(Index(d.s), Index(d.d)),
                         RVector::Zero(Index(d.s)), Activation(d.activation)};
    return m;
}

} // namespace

void save_checkpoint(const std::filesystem::path& path, const Seq2SeqModel& model) {
    const auto* mh = std::get_if<MlpHead>(&model.head);
    const std::vector<std::pair<std::string, std::uint64_t>> dims = {
        {"M", std::uint64_t(model.input_dim())},
        {"H", std::uint64_t(model.hidden_dim())},
        {"N", std::uint64_t(model.state_dim())},
        {"S", std::uint64_t(model.output_dim())},
        {"D", mh ? std::uint64_t(mh->w1.rows()) : 0},
        {"head", mh ? 1u : 0u},
        {"activation", mh ? std::uint64_t(mh->activation) : 0},
        {"view", std::uint64_t(model.view)},
        {"readout", std::uint64_t(model.readout)},
        {"train_encoder", model.encoder_trainable ? 1u : 0u},
        {"train_recurrence", model.recurrence.trainable ? 1u : 0u},
    };
    BinaryWriter w;
    w.bytes("LRNN");
    w.u32(kCheckpointVersion);
    w.u32(std::uint32_t(dims.size()));
    for (const auto& [name, value] : dims) {
        w.str(name);
        w.u64(value);
    }
    Seq2SeqModel copy = model;
    for (const auto& b : parameter_blocks(copy))
        for (Index i = 0; i < b.size(); ++i) w.f64(b.data[i]);
    w.save(path);
}

Seq2SeqModel load_checkpoint(const std::filesystem::path& path) {
    auto r = BinaryReader::open(path);
    if (r.bytes(4) != "LRNN") throw FormatError("not a model checkpoint (missing LRNN magic)", 0);
    if (const auto v = r.u32(); v != kCheckpointVersion)
        throw FormatError("unsupported checkpoint version " + std::to_string(v), 4);
    const auto count = r.u32();
    const std::vector<std::string> expected = {"M",    "H",          "N",    "S",       "D",            "head",
                                               "activation", "view", "readout", "train_encoder", "train_recurrence"};
    if (count != expected.size()) throw FormatError("unexpected dimension table size " + std::to_string(count), r.offset());
    std::vector<std::uint64_t> values;
    for (const auto& key : expected) {
        const auto at = r.offset();
        if (r.str() != key) throw FormatError("dimension table entry '" + key + "' missing", at);
        values.push_back(r.u64());
    }
    const Dims d{values[0], values[1], values[2], values[3], values[4], values[5],
                 values[6], values[7], values[8], values[9], values[10]};
    if (d.m == 0 || d.h == 0 || d.n == 0 || d.s == 0 || (d.head == 1 && d.d == 0) || d.head > 1 || d.activation > 1 ||
        d.view > 2 || d.readout > 1)
        throw FormatError("invalid dimension table", r.offset());
    Seq2SeqModel m = shaped_model(d);
    for (auto& b : parameter_blocks(m))
        for (Index i = 0; i < b.size(); ++i) b.data[i] = r.f64();
    if (!r.at_end()) throw FormatError("trailing bytes after parameter blocks", r.offset());
    return m;
}

} // namespace lrnn
