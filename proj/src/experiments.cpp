#include "lrnn/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ostream>
#include <utility>

#include "lrnn/errors.hpp"
#include "lrnn/parallel.hpp"
#include "lrnn/recurrence.hpp"
#include "lrnn/report.hpp"

namespace lrnn {
namespace {

template <typename E>
E choose(const Config& config, const std::string& key, const std::string& fallback,
         const std::vector<std::pair<std::string, E>>& options) {
    const auto value = config.get_string(key, fallback);
    for (const auto& [name, e] : options)
        if (name == value) return e;
    std::string names;
    for (const auto& [name, e] : options) names += (names.empty() ? "" : "|") + name;
    throw UsageError(key + " must be one of " + names + ", got '" + value + "'");
}

Index positive(const Config& config, const std::string& key, std::int64_t fallback) {
    const auto v = config.get_int(key, fallback);
    if (v < 1) throw UsageError(key + " must be >= 1");
    return Index(v);
}

std::vector<Index> positive_list(const Config& config, const std::string& key, std::vector<std::int64_t> fallback) {
    std::vector<Index> out;
    for (auto v : config.get_ints(key, fallback)) {
        if (v < 1) throw UsageError(key + " entries must be >= 1");
        out.push_back(Index(v));
    }
    if (out.empty()) throw UsageError("empty grid: " + key);
    return out;
}

std::vector<double> radius_grid(const Config& config, std::vector<double> fallback, double r_max) {
    auto grid = config.get_doubles("init.r_min", fallback);
    if (grid.empty()) throw UsageError("empty grid: init.r_min");
    for (double r : grid)
        if (!(r >= 0.0 && r <= r_max)) throw UsageError("init.r_min entries must satisfy 0 <= r_min <= r_max");
    return grid;
}

double radius_max(const Config& config) {
    const double r_max = config.get_double("init.r_max", 1.0);
    if (!(r_max > 0.0 && r_max <= 1.0)) throw UsageError("init.r_max must lie in (0, 1]");
    return r_max;
}

std::vector<HeadKind> heads_from(const Config& config) {
    const auto value = config.get_string("train.head", "both");
    if (value == "both") return {HeadKind::linear, HeadKind::mlp};
    if (value == "linear") return {HeadKind::linear};
    if (value == "mlp") return {HeadKind::mlp};
    throw UsageError("train.head must be one of linear|mlp|both, got '" + value + "'");
}

TrainConfig train_config_from(const Config& config, int jobs) {
    TrainConfig t;
    t.epochs = int(positive(config, "train.epochs", t.epochs));
    t.batch = positive(config, "train.batch", t.batch);
    t.adam.lr = config.get_double("train.lr", t.adam.lr);
    if (!(t.adam.lr > 0.0)) throw UsageError("train.lr must be positive");
    t.seeds = int(positive(config, "train.seeds", 3));
    t.clip_norm = config.get_double("train.clip_norm", t.clip_norm);
    if (t.clip_norm < 0.0) throw UsageError("train.clip_norm must be >= 0");
    t.schedule = choose<LrSchedule>(config, "train.schedule", "constant",
                                    {{"constant", LrSchedule::constant}, {"cosine", LrSchedule::cosine}});
    t.seed = config.get_u64("seed", 1);
    t.jobs = jobs;
    return t;
}

ModelConfig model_config_from(const Config& config) {
    ModelConfig m;
    m.hidden_dim = positive(config, "dims.H", m.hidden_dim);
    m.mlp_width = positive(config, "dims.D", m.mlp_width);
    m.r_min = config.get_double("init.r_min", m.r_min);
    m.r_max = config.get_double("init.r_max", m.r_max);
    m.max_phase = config.get_double("init.max_phase", m.max_phase);
    m.activation = choose<Activation>(config, "model.activation", "relu",
                                      {{"relu", Activation::relu}, {"sigmoid", Activation::sigmoid}});
    m.view = choose<StateView>(config, "model.view", "real_imag",
                               {{"real_imag", StateView::real_imag},
                                {"real_imag_time", StateView::real_imag_time},
                                {"real_only", StateView::real_only}});
    m.train_encoder = config.get_bool("model.train_encoder", true);
    m.train_recurrence = config.get_bool("model.train_recurrence", true);
    return m;
}

std::vector<std::uint64_t> seed_list(std::uint64_t first, int count) {
    std::vector<std::uint64_t> out;
    for (int i = 0; i < count; ++i) out.push_back(first + std::uint64_t(i));
    return out;
}

void say(std::ostream* log, const std::string& line) {
    if (log) *log << line << std::endl;
}

std::string fd(double x) { return format_double(x); }

double max_abs_lambda(const Seq2SeqModel& model) { return model.recurrence.lambda().cwiseAbs().maxCoeff(); }

// Rows of `images` cropped to the middle `length` pixels.
RMatrix image_sequences(const RMatrix& images, Index length) {
    if (length > images.cols())
        throw UsageError("dims.L = " + std::to_string(length) + " exceeds the image size " +
                         std::to_string(images.cols()));
    return center_crop(images, length);
}

RMatrix sequence_source(const std::string& source, const std::filesystem::path& idx_path, Index n, Index length,
                        Index basis_size, std::uint64_t seed, const std::string& label) {
    Rng rng(seed, label + "/" + source);
    if (source == "synthetic") return image_sequences(synthetic_digits(n, rng), length);
    if (source == "idx") {
        if (idx_path.empty()) throw UsageError("data.source = idx needs data.path");
        const RMatrix all = load_idx_images(idx_path);
        if (all.rows() < n)
            throw UsageError("data.path holds " + std::to_string(all.rows()) + " images, need " + std::to_string(n));
        return image_sequences(all.topRows(n), length);
    }
    if (source == "uniform") {
        RMatrix out(n, length);
        for (Index i = 0; i < n; ++i)
            for (Index k = 0; k < length; ++k) out(i, k) = rng.uniform();
        return out;
    }
    if (source == "sparse") return sparse_signal_sampler(haar_basis(length, basis_size), rng, n);
    throw UsageError("data.source must be one of synthetic|idx|uniform|sparse, got '" + source + "'");
}

struct Output {
    OutputSet files;
    RunManifest manifest;
    bool svg;
};

// cond-sweep ---------------------------------------------------------------

void cmd_cond_sweep(const Config& config, const RunContext& ctx, Output& out) {
    const auto sweep = sweep_config_from(config, ctx.jobs);
    say(ctx.log, "cond-sweep: " + std::to_string(sweep.r_grid.size() * sweep.seeds.size() *
                                                 std::max<std::size_t>(1, sweep.p_grid.size())) + " cells");
    const auto rows = conditioning_sweep(sweep);

    CsvTable csv("cond-sweep", {"mode", "r_min", "P", "seed", "log10_cond"});
    for (const auto& r : rows)
        csv.add_row({to_string(r.mode), fd(r.r_min), std::to_string(r.p), std::to_string(r.seed), fd(r.log10_cond)});
    out.files.write("cond_sweep.csv", csv.str());

    if (out.svg) {
        std::vector<Index> ps = sweep.mode == SweepMode::omega ? sweep.p_grid : std::vector<Index>{0};
        std::vector<PlotSeries> series;
        for (Index p : ps) {
            PlotSeries s{sweep.mode == SweepMode::omega ? "P=" + std::to_string(p) : "median", {}, {}};
            for (double r : sweep.r_grid) {
                s.x.push_back(r);
                s.y.push_back(median_log10_cond(rows, r, p));
            }
            series.push_back(std::move(s));
        }
        out.files.write("cond_sweep.svg", svg_line_plot("Conditioning vs r_min", "r_min", "median log10 cond", series));
    }
}

// reconstruct --------------------------------------------------------------

void cmd_reconstruct(const Config& config, const RunContext& ctx, Output& out) {
    const auto s = reconstruct_settings_from(config, ctx.jobs);
    const RMatrix inputs = reconstruction_inputs(s);
    say(ctx.log, "reconstruct: " + std::to_string(inputs.rows()) + " sequences of length " +
                     std::to_string(inputs.cols()));
    const auto profiles = reconstruction_profiles(s, inputs);

    CsvTable csv("reconstruct", {"N", "r_min", "timestep", "mse"});
    std::vector<PlotSeries> series;
    for (const auto& p : profiles) {
        PlotSeries line{"N=" + std::to_string(p.state_dim) + " r_min=" + fd(p.r_min), {}, {}};
        for (Index k = 0; k < p.mse.size(); ++k) {
            csv.add_row({std::to_string(p.state_dim), fd(p.r_min), std::to_string(k + 1), fd(p.mse(k))});
            line.x.push_back(double(k + 1));
            line.y.push_back(p.mse(k));
        }
        series.push_back(std::move(line));
    }
    out.files.write("reconstruct.csv", csv.str());
    if (out.svg)
        out.files.write("reconstruct.svg",
                        svg_line_plot("Reconstruction error from the last state", "timestep", "MSE", series, true));
}

// training helpers ---------------------------------------------------------

void add_loss_rows(CsvTable& csv, const std::vector<std::string>& prefix, const TrainResult& result) {
    for (const auto& run : result.runs)
        for (std::size_t e = 0; e < run.train_loss.size(); ++e) {
            auto row = prefix;
            row.push_back(std::to_string(run.seed));
            row.push_back(std::to_string(e + 1));
            row.push_back(fd(run.train_loss[e]));
            row.push_back(e < run.test_loss.size() ? fd(run.test_loss[e]) : "nan");
            csv.add_row(std::move(row));
        }
}

void save_model(Output& out, const std::string& name, const Seq2SeqModel& model) {
    std::filesystem::create_directories(out.files.dir());
    save_checkpoint(out.files.dir() / name, model);
    out.files.record(name);
}

// train-reconstruct --------------------------------------------------------

void cmd_train_reconstruct(const Config& config, const RunContext& ctx, Output& out) {
    const auto s = train_reconstruct_settings_from(config, ctx.jobs);
    const Index total = s.n_train + s.n_test;
    const RMatrix seqs = sequence_source(s.source, config.get_string("data.path", ""), total, s.length,
                                         positive(config, "dims.P", 32), s.seed, "train-reconstruct");
    SequenceDataset train_set, test_set;
    for (Index i = 0; i < total; ++i) {
        auto& dst = i < s.n_train ? train_set : test_set;
        dst.inputs.push_back(seqs.row(i));
        dst.targets.push_back(seqs.row(i).transpose());
    }

    CsvTable summary("train-reconstruct", {"N", "head", "seed", "status", "test_mse", "best"});
    CsvTable losses("train-reconstruct", {"N", "head", "seed", "epoch", "train_loss", "test_loss"});
    std::vector<PlotSeries> series;
    for (HeadKind head : s.heads) series.push_back({to_string(head), {}, {}});

    for (Index n : s.state_dims) {
        for (std::size_t h = 0; h < s.heads.size(); ++h) {
            ModelConfig mc = s.model;
            mc.state_dim = n;
            mc.output_dim = s.length;
            mc.readout = Readout::last_state;
            mc.head = s.heads[h];
            say(ctx.log, "train-reconstruct: N=" + std::to_string(n) + " head=" + to_string(mc.head));
            const auto result = train(mc, train_set, test_set, s.train);
            const std::vector<std::string> key{std::to_string(n), to_string(mc.head)};
            for (std::size_t r = 0; r < result.runs.size(); ++r) {
                const auto& run = result.runs[r];
                summary.add_row({key[0], key[1], std::to_string(run.seed), run.failed ? "failed" : "ok",
                                 run.failed ? "nan" : fd(run.final_test), r == result.best ? "1" : "0"});
            }
            add_loss_rows(losses, key, result);
            series[h].x.push_back(double(n));
            series[h].y.push_back(result.runs[result.best].final_test);
            save_model(out, "model_N" + std::to_string(n) + "_" + to_string(mc.head) + ".lrnn", result.model);
        }
    }
    out.files.write("train_reconstruct.csv", summary.str());
    out.files.write("train_reconstruct_loss.csv", losses.str());
    if (out.svg)
        out.files.write("train_reconstruct.svg",
                        svg_line_plot("Learned reconstruction", "N", "test MSE (best seed)", series, true));
}

// ode ----------------------------------------------------------------------

void cmd_ode(const Config& config, const RunContext& ctx, Output& out) {
    const auto s = ode_settings_from(config, ctx.jobs);
    const auto outcome = run_ode(s, ctx.log);
    out.manifest.rejected["train"] = outcome.train_set.meta.rejected;
    out.manifest.rejected["test"] = outcome.test_set.meta.rejected;

    CsvTable summary("ode", {"system", "head", "seed", "status", "test_mse", "best", "max_abs_lambda"});
    CsvTable losses("ode", {"head", "seed", "epoch", "train_loss", "test_loss"});
    CsvTable eigen("ode", {"head", "index", "abs", "theta"});
    CsvTable samples("ode", {"head", "sample", "timestep", "input", "target", "prediction"});
    std::vector<PlotSeries> series;

    for (const auto& th : outcome.heads) {
        const auto name = to_string(th.head);
        const auto& result = th.result;
        for (std::size_t r = 0; r < result.runs.size(); ++r) {
            const auto& run = result.runs[r];
            summary.add_row({s.system, name, std::to_string(run.seed), run.failed ? "failed" : "ok",
                             run.failed ? "nan" : fd(run.final_test), r == result.best ? "1" : "0",
                             r == result.best ? fd(max_abs_lambda(result.model)) : ""});
        }
        add_loss_rows(losses, {name}, result);

        const CVector lambda = result.model.recurrence.lambda();
        for (Index i = 0; i < lambda.size(); ++i)
            eigen.add_row({name, std::to_string(i), fd(std::abs(lambda(i))), fd(std::arg(lambda(i)))});

        const Index shown = std::min<Index>(2, Index(outcome.test_set.size()));
        for (Index i = 0; i < shown; ++i) {
            const auto& u = outcome.test_set.inputs[std::size_t(i)];
            const auto& y = outcome.test_set.targets[std::size_t(i)];
            const RMatrix pred = forward(result.model, u);
            for (Index k = 0; k < u.cols(); ++k)
                samples.add_row({name, std::to_string(i), std::to_string(k + 1), fd(u(0, k)), fd(y(0, k)),
                                 fd(pred(0, k))});
        }

        const auto& best = result.runs[result.best];
        PlotSeries line{name, {}, {}};
        for (std::size_t e = 0; e < best.test_loss.size(); ++e) {
            line.x.push_back(double(e + 1));
            line.y.push_back(best.test_loss[e]);
        }
        series.push_back(std::move(line));
        save_model(out, "ode_" + name + ".lrnn", result.model);
    }

    out.files.write("ode_summary.csv", summary.str());
    out.files.write("ode_loss.csv", losses.str());
    out.files.write("ode_eigenvalues.csv", eigen.str());
    out.files.write("ode_samples.csv", samples.str());
    if (out.svg)
        out.files.write("ode_loss.svg", svg_line_plot(s.system + " test loss (best seed)", "epoch", "MSE", series, true));
}

} // namespace

std::string to_string(HeadKind head) { return head == HeadKind::linear ? "linear" : "mlp"; }

const std::set<std::string>& known_keys(const std::string& command) {
    static const std::set<std::string> common{"seed", "output.svg"};
    static const std::map<std::string, std::set<std::string>> keys{
        {"cond-sweep",
         {"dims.L", "dims.N", "dims.P", "init.kind", "init.r_min", "init.r_max", "init.density", "sweep.mode",
          "sweep.seeds"}},
        {"reconstruct",
         {"dims.L", "dims.N", "dims.P", "init.kind", "init.r_min", "init.r_max", "reconstruct.mode", "data.source",
          "data.path", "data.n", "sweep.seeds"}},
        {"train-reconstruct",
         {"dims.L", "dims.N", "dims.H", "dims.D", "dims.P", "init.r_min", "init.r_max", "init.max_phase",
          "data.source", "data.path", "data.n_train", "data.n_test", "train.head", "train.epochs", "train.lr",
          "train.batch", "train.seeds", "train.clip_norm", "train.schedule", "model.activation", "model.view",
          "model.train_encoder", "model.train_recurrence"}},
        {"ode",
         {"data.system", "dims.L", "dims.N", "dims.H", "dims.D", "init.r_min", "init.r_max", "init.max_phase",
          "data.n_train", "data.n_test", "data.n_basis", "data.family", "train.head", "train.epochs",
          "train.lr", "train.batch", "train.seeds", "train.clip_norm", "train.schedule", "model.activation",
          "model.view", "model.train_encoder", "model.train_recurrence"}},
    };
    static std::map<std::string, std::set<std::string>> merged;
    auto it = keys.find(command);
    if (it == keys.end()) throw UsageError("unknown command '" + command + "'");
    auto& m = merged[command];
    if (m.empty()) {
        m = it->second;
        m.insert(common.begin(), common.end());
    }
    return m;
}

void apply_seed_env(Config& config) {
    if (const char* env = std::getenv("LRNN_SEED"); env && *env) {
        config.set("seed", env);
        (void)config.get_u64("seed", 0);  // reject garbage early
    }
}

SweepConfig sweep_config_from(const Config& config, int jobs) {
    SweepConfig s;
    s.mode = choose<SweepMode>(config, "sweep.mode", "vandermonde",
                               {{"vandermonde", SweepMode::vandermonde}, {"omega", SweepMode::omega}});
    s.init = choose<SweepInit>(config, "init.kind", "ring",
                               {{"ring", SweepInit::ring}, {"roots_of_unity", SweepInit::roots_of_unity}});
    s.length = positive(config, "dims.L", 128);
    s.state_dim = positive(config, "dims.N", 256);
    s.r_max = radius_max(config);
    s.r_grid = radius_grid(config, {0.0, 0.2, 0.4, 0.6, 0.8, 0.9, 0.99}, s.r_max);
    s.density = choose<RingDensity>(config, "init.density", "area",
                                    {{"area", RingDensity::area}, {"radius", RingDensity::radius}});
    if (s.mode == SweepMode::omega) s.p_grid = positive_list(config, "dims.P", {8, 16, 32});
    s.seeds = seed_list(config.get_u64("seed", 1), int(positive(config, "sweep.seeds", 10)));
    s.jobs = jobs;
    return s;
}

ReconstructSettings reconstruct_settings_from(const Config& config, int jobs) {
    ReconstructSettings s;
    s.length = positive(config, "dims.L", s.length);
    s.state_dims = positive_list(config, "dims.N", {512});
    s.r_max = radius_max(config);
    s.r_grid = radius_grid(config, {0.0}, s.r_max);
    s.init = choose<SweepInit>(config, "init.kind", "ring",
                               {{"ring", SweepInit::ring}, {"roots_of_unity", SweepInit::roots_of_unity}});
    s.mode = choose<ReconstructionMode>(config, "reconstruct.mode", "full",
                                        {{"full", ReconstructionMode::full}, {"sparse", ReconstructionMode::sparse}});
    s.basis_size = positive(config, "dims.P", s.basis_size);
    s.source = config.get_string("data.source", s.mode == ReconstructionMode::sparse ? "sparse" : "synthetic");
    s.idx_path = config.get_string("data.path", "");
    s.samples = positive(config, "data.n", s.samples);
    s.seed = config.get_u64("seed", 1);
    s.seeds = int(positive(config, "sweep.seeds", s.seeds));
    s.jobs = jobs;
    if (s.mode == ReconstructionMode::sparse && s.basis_size > s.length)
        throw UsageError("dims.P must not exceed dims.L");
    return s;
}

RMatrix reconstruction_inputs(const ReconstructSettings& s) {
    return sequence_source(s.source, s.idx_path, s.samples, s.length, s.basis_size, s.seed, "reconstruct");
}

std::vector<ProfileRow> reconstruction_profiles(const ReconstructSettings& s, const RMatrix& inputs) {
    const auto seeds = seed_list(s.seed, s.seeds);
    const std::size_t n_r = s.r_grid.size(), n_s = seeds.size();
    const std::size_t cells = s.state_dims.size() * n_r * n_s;
    std::optional<SparseBasis> basis;
    if (s.mode == ReconstructionMode::sparse) basis = haar_basis(inputs.cols(), s.basis_size);

    std::vector<RVector> profiles(cells);
    parallel_for(std::ptrdiff_t(cells), s.jobs, [&](std::ptrdiff_t c) {
        const std::size_t cell = std::size_t(c);
        const Index n = s.state_dims[cell / (n_r * n_s)];
        const double r = s.r_grid[(cell / n_s) % n_r];
        Rng rng(seeds[cell % n_s], "reconstruct/eigenvalues", std::uint64_t(n));
        EigenInit init;
        init.n = n;
        if (s.init == SweepInit::ring) init.kind = Ring{r, s.r_max, RingDensity::area};
        else init.kind = RootsOfUnity{};
        const CVector lambda = init_eigenvalues(init, rng);
        profiles[cell] = reconstruction_error_profile(lambda, inputs, s.mode, basis ? &*basis : nullptr);
    });

    std::vector<ProfileRow> rows;
    for (std::size_t g = 0; g < s.state_dims.size() * n_r; ++g) {
        ProfileRow row{s.state_dims[g / n_r], s.r_grid[g % n_r], RVector(inputs.cols())};
        for (Index k = 0; k < inputs.cols(); ++k) {
            std::vector<double> v;
            for (std::size_t j = 0; j < n_s; ++j) v.push_back(profiles[g * n_s + j](k));
            row.mse(k) = median(std::move(v));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

OdeSettings ode_settings_from(const Config& config, int jobs) {
    OdeSettings s;
    s.system = config.get_string("data.system", "lv");
    if (s.system != "pt" && s.system != "lv" && s.system != "lorenz")
        throw UsageError("data.system must be one of pt|lv|lorenz, got '" + s.system + "'");
    s.length = positive(config, "dims.L", s.system == "lorenz" ? 512 : 256);
    s.model = model_config_from(config);
    s.model.state_dim = positive(config, "dims.N", 64);
    s.model.input_dim = 1;
    s.model.output_dim = 1;
    s.model.readout = Readout::per_timestep;
    s.train = train_config_from(config, jobs);
    s.heads = heads_from(config);
    s.n_train = positive(config, "data.n_train", s.n_train);
    s.n_test = positive(config, "data.n_test", s.n_test);
    s.n_basis = positive(config, "data.n_basis", s.n_basis);
    s.family = choose<LowFrequencyFamily>(config, "data.family", "haar",
                                          {{"haar", LowFrequencyFamily::haar}, {"cosine", LowFrequencyFamily::cosine}});
    s.seed = config.get_u64("seed", 1);
    try {
        s.model.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return s;
}

OdeOutcome run_ode(const OdeSettings& s, std::ostream* log) {
    OdeSystem system = ode_system(s.system);
    system.horizon = s.length;
    OdeOutcome out;
    OdeDatasetConfig dc;
    dc.n_basis = s.n_basis;
    dc.family = s.family;
    dc.jobs = s.train.jobs;
    dc.samples = s.n_train;
    dc.seed = derive_seed(s.seed, "ode/train");
    out.train_set = make_ode_dataset(system, dc);
    dc.samples = s.n_test;
    dc.seed = derive_seed(s.seed, "ode/test");
    out.test_set = make_ode_dataset(system, dc);
    say(log, "ode " + s.system + ": " + std::to_string(out.train_set.size()) + " train / " +
                 std::to_string(out.test_set.size()) + " test, rejected " +
                 std::to_string(out.train_set.meta.rejected + out.test_set.meta.rejected));

    for (HeadKind head : s.heads) {
        ModelConfig mc = s.model;
        mc.head = head;
        const auto t0 = std::chrono::steady_clock::now();
        auto result = train(mc, out.train_set, out.test_set, s.train);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        say(log, "  " + to_string(head) + ": best test MSE " + fd(result.runs[result.best].final_test) + " (" +
                     fd(std::round(secs * 10) / 10) + " s)");
        out.heads.push_back({head, std::move(result)});
    }
    return out;
}

TrainReconstructSettings train_reconstruct_settings_from(const Config& config, int jobs) {
    TrainReconstructSettings s;
    s.length = positive(config, "dims.L", s.length);
    s.state_dims = positive_list(config, "dims.N", {128});
    s.model = model_config_from(config);
    s.model.input_dim = 1;
    s.train = train_config_from(config, jobs);
    s.heads = heads_from(config);
    s.source = config.get_string("data.source", s.source);
    s.n_train = positive(config, "data.n_train", s.n_train);
    s.n_test = positive(config, "data.n_test", s.n_test);
    s.seed = config.get_u64("seed", 1);
    ModelConfig probe = s.model;
    probe.state_dim = s.state_dims.front();
    probe.output_dim = s.length;
    try {
        probe.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return s;
}

void run_command(const std::string& command, const Config& config, const RunContext& ctx) {
    config.require_known(known_keys(command));
    Output out{OutputSet(ctx.out_dir), {}, config.get_bool("output.svg", true)};
    out.manifest.command = command;
    out.manifest.config = config.entries();
    out.manifest.start = std::chrono::system_clock::now();

    if (command == "cond-sweep") cmd_cond_sweep(config, ctx, out);
    else if (command == "reconstruct") cmd_reconstruct(config, ctx, out);
    else if (command == "train-reconstruct") cmd_train_reconstruct(config, ctx, out);
    else if (command == "ode") cmd_ode(config, ctx, out);

    out.manifest.end = std::chrono::system_clock::now();
    out.manifest.files = out.files.records();
    write_manifest(ctx.out_dir, out.manifest);
}

} // namespace lrnn
