#include "lrnn/acceptance.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include "lrnn/config.hpp"
#include "lrnn/datagen.hpp"
#include "lrnn/experiments.hpp"
#include "lrnn/network.hpp"
#include "lrnn/parallel.hpp"
#include "lrnn/reconstruction.hpp"
#include "lrnn/recurrence.hpp"
#include "lrnn/report.hpp"

namespace lrnn {
namespace {

struct Outcome {
    bool passed = false;
    std::string detail;
};

std::string sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

CVector roots_of_unity(Index n) {
    Rng unused(0);
    return init_eigenvalues({RootsOfUnity{}, n}, unused);
}

Outcome roots_conditioning() {
    double worst = 0.0;
    for (Index n : {16, 64, 128}) {
        const auto v = build_vandermonde(roots_of_unity(n), n);
        worst = std::max(worst, std::abs(condition_number(v.matrix) - 1.0));
    }
    return {worst <= 1e-6, "max |cond - 1| = " + sci(worst)};
}

Outcome lossless_reconstruction() {
    const Index n = 64;
    const CVector lambda = roots_of_unity(n);
    const auto map = full_reconstruction_map(lambda, n);
    const auto rnn = ones_input_rnn(lambda);
    Rng rng(1, "accept/lossless");
    double worst = 0.0;
    for (int s = 0; s < 100; ++s) {
        RMatrix u(1, n);
        for (Index k = 0; k < n; ++k) u(0, k) = rng.normal();
        const CVector rec = map.omega * scan_sequential(rnn, u).last();
        const double err = (rec - u.transpose().cast<Complex>()).norm() / u.norm();
        worst = std::max(worst, err);
    }
    return {worst <= 1e-8, "max relative error = " + sci(worst)};
}

Outcome conditioning_trend(int jobs) {
    SweepConfig c;
    c.length = 128;
    c.state_dim = 256;
    c.r_grid = {0.0, 0.2, 0.4, 0.6, 0.8, 0.9, 0.99};
    for (std::uint64_t s = 1; s <= 10; ++s) c.seeds.push_back(s);
    c.jobs = jobs;
    const auto rows = conditioning_sweep(c);
    std::vector<double> med;
    for (double r : c.r_grid) med.push_back(median_log10_cond(rows, r));
    bool decreasing = true;
    for (std::size_t i = 1; i < med.size(); ++i) decreasing = decreasing && med[i] < med[i - 1];
    const double drop = med.front() - med.back();
    std::string detail = "medians";
    for (double m : med) detail += " " + sci(m);
    detail += ", drop " + sci(drop) + " decades";
    return {decreasing && drop >= 6.0, detail};
}

Outcome recent_past(int jobs) {
    ReconstructSettings s;
    s.length = 256;
    s.state_dims = {512};
    s.r_grid = {0.0};
    s.r_max = 1.0;
    s.source = "synthetic";
    s.samples = 50;
    s.seeds = 10;
    s.jobs = jobs;
    const auto profile = reconstruction_profiles(s, reconstruction_inputs(s)).front().mse;
    // Every recent timestep must be recovered. The oldest window is judged by its
    // mean: single pixels near the image border carry almost no energy.
    const double recent = profile.tail(16).maxCoeff();
    const double old = profile.head(16).mean();
    return {recent <= 1e-4 && old >= 1e-1, "max MSE last 16 = " + sci(recent) + ", mean MSE first 16 = " +
                                               sci(old) + " (min " + sci(profile.head(16).minCoeff()) + ")"};
}

// Median over seeds of the whole-sequence MSE of sparse recovery from x_L.
double sparse_error(Index n, double r_min, const SparseBasis& basis, const RMatrix& inputs, int jobs) {
    std::vector<double> errors(10);
    parallel_for(10, jobs, [&](std::ptrdiff_t s) {
        Rng rng(std::uint64_t(s + 1), "accept/sparse", std::uint64_t(n));
        const CVector lambda = init_eigenvalues({Ring{r_min, 1.0}, n}, rng);
        errors[std::size_t(s)] = reconstruction_error_profile(lambda, inputs, ReconstructionMode::sparse, &basis).mean();
    });
    return median(errors);
}

Outcome sparse_recovery(int jobs) {
    const Index length = 1024;
    const auto basis = haar_basis(length, 32);
    Rng rng(1, "accept/sparse-signals");
    const RMatrix inputs = sparse_signal_sampler(basis, rng, 20);
    const double near = sparse_error(64, 0.99, basis, inputs, jobs);
    const double far_small = sparse_error(64, 0.95, basis, inputs, jobs);
    const double far_wide = sparse_error(256, 0.95, basis, inputs, jobs);
    const bool ok = near <= 1e-6 && far_small >= 1e-2 && far_wide <= 1e-6;
    return {ok, "ring(0.99) N=64: " + sci(near) + " (<=1e-6), ring(0.95) N=64: " + sci(far_small) +
                    " (>=1e-2), ring(0.95) N=256: " + sci(far_wide) + " (<=1e-6)"};
}

Outcome scan_equivalence(int jobs) {
    double worst = 0.0;
    for (auto [n, l] : {std::pair<Index, Index>{16, 1024}, {256, 4096}}) {
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            Rng rng(seed, "accept/scan", std::uint64_t(n));
            const CVector lambda = init_eigenvalues({Ring{0.0, 1.0}, n}, rng);
            CMatrix b(n, 1), u(1, l);
            for (Index i = 0; i < n; ++i) b(i, 0) = {rng.normal(), rng.normal()};
            for (Index k = 0; k < l; ++k) u(0, k) = {rng.normal(), rng.normal()};
            const auto rnn = make_rnn(lambda, b);
            const CMatrix seq = scan_sequential(rnn, u).states;
            const CMatrix par = scan_parallel(rnn, u, jobs).states;
            worst = std::max(worst, (par - seq).cwiseAbs().maxCoeff() / seq.cwiseAbs().maxCoeff());
        }
    }
    return {worst <= 1e-12, "max relative deviation = " + sci(worst)};
}

Outcome gradient_check() {
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 20; ++i) {
        Rng rng(1, "accept/gradcheck", i);
        ModelConfig c;
        c.input_dim = Index(1 + rng.below(3));
        c.hidden_dim = Index(1 + rng.below(4));
        c.state_dim = Index(1 + rng.below(8));
        c.output_dim = Index(1 + rng.below(3));
        c.mlp_width = Index(1 + rng.below(16));
        c.head = rng.below(2) ? HeadKind::mlp : HeadKind::linear;
        c.activation = rng.below(2) ? Activation::relu : Activation::sigmoid;
        c.view = std::array{StateView::real_imag, StateView::real_imag_time, StateView::real_only}[rng.below(3)];
        c.readout = rng.below(4) == 0 ? Readout::last_state : Readout::per_timestep;
        c.r_min = 0.5;
        c.r_max = 0.99;
        const Index length = Index(1 + rng.below(8));
        auto model = init_model(c, rng);
        RMatrix input(c.input_dim, length);
        for (auto& x : input.reshaped()) x = rng.normal();
        RMatrix target(c.output_dim, c.readout == Readout::last_state ? 1 : length);
        for (auto& x : target.reshaped()) x = rng.normal();
        avoid_relu_kinks(model, input);
        worst = std::max(worst, grad_check(model, input, target));
    }
    return {worst <= 1e-5, "worst relative gradient error = " + sci(worst)};
}

Outcome width_bounds() {
    const auto a = mlp_width_bound(1, 1, 1, 1);
    const auto b = mlp_width_bound(1, 1, 2, 1);
    const auto c = mlp_width_bound(1, 1, 1, 1, 2.0);
    return {a == 2 && b == 16 && c == 16,
            std::to_string(a) + ", " + std::to_string(b) + ", " + std::to_string(c) + " (expected 2, 16, 16)"};
}

Outcome rk4_and_parameters() {
    auto error = [](double h) {
        const Index steps = Index(std::lround(1.0 / h));
        OdeSystem s;
        s.name = "exp";
        s.state_dim = 1;
        s.rhs = [](const RVector& z, double, std::span<const double>, RVector& dz) { dz = z; };
        s.z0 = RVector::Ones(1);
        s.delta = h;
        s.horizon = steps;
        const auto t = rk4_integrate(s, RVector::Zero(steps));
        return std::abs(t.outputs(steps - 1) - std::exp(1.0));
    };
    const double factor = error(0.1) / error(0.05);
    const std::vector<std::pair<std::string, std::string>> pinned{
        {"pt", "k1=0.07,k2=0.6,k3=0.05,k4=0.3,V=0.017,Km=0.3"},
        {"lv", "a=1,b=0.6,c=1,d=0.7"},
        {"lorenz", "sigma=10,r=26,b=2.666666667"},
    };
    bool params_ok = true;
    std::string mismatch;
    for (const auto& [name, expected] : pinned) {
        const auto got = ode_system(name).params_string();
        if (got != expected) {
            params_ok = false;
            mismatch += " " + name + "='" + got + "'";
        }
    }
    return {factor >= 12 && factor <= 20 && params_ok,
            "halving factor " + sci(factor) + (params_ok ? ", parameters match" : ", mismatch:" + mismatch)};
}

} // namespace

OdeSettings lv_acceptance_settings(int jobs) {
    OdeSettings s;
    s.system = "lv";
    s.length = 256;
    s.model.state_dim = 64;
    s.model.hidden_dim = 16;
    s.model.mlp_width = 128;
    s.n_train = 1000;
    s.n_test = 200;
    s.train.seeds = 3;
    s.train.epochs = 60;
    s.train.batch = 32;
    s.train.adam.lr = 1e-2;
    s.train.clip_norm = 1.0;
    s.train.schedule = LrSchedule::cosine;
    s.train.jobs = jobs;
    return s;
}

namespace {

Outcome ode_comparison(int jobs, std::ostream* log) {
    const auto outcome = run_ode(lv_acceptance_settings(jobs), log);
    double linear = 0.0, mlp = 0.0, max_abs = 0.0;
    for (const auto& h : outcome.heads) {
        const double best = h.result.runs[h.result.best].final_test;
        (h.head == HeadKind::linear ? linear : mlp) = best;
        max_abs = std::max(max_abs, h.result.model.recurrence.lambda().cwiseAbs().maxCoeff());
    }
    const double ratio = mlp / linear;
    return {ratio <= 0.5 && max_abs < 1.0, "linear " + sci(linear) + ", mlp " + sci(mlp) + ", ratio " + sci(ratio) +
                                              " (<=0.5), max |lambda| " + sci(max_abs)};
}

std::map<std::string, std::uint64_t> csv_digests(const std::string& command, const Config& config,
                                                 const std::filesystem::path& dir, int jobs) {
    std::filesystem::remove_all(dir);
    run_command(command, config, {dir, jobs, nullptr});
    std::map<std::string, std::uint64_t> out;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() != ".csv") continue;
        std::ifstream in(entry.path(), std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        out[entry.path().filename().string()] = fnv1a64(ss.str());
    }
    return out;
}

Outcome determinism(int jobs) {
    const auto root = std::filesystem::temp_directory_path() /
                      ("lrnn-determinism-" + std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()));
    const std::vector<std::pair<std::string, std::string>> runs{
        {"cond-sweep", "dims.L = 32\ndims.N = 64\ninit.r_min = 0, 0.5, 0.9\nsweep.seeds = 3\n"},
        {"reconstruct", "dims.L = 64\ndims.N = 32, 128\ninit.r_min = 0, 0.9\nsweep.seeds = 3\ndata.n = 10\n"},
        {"ode", "dims.L = 32\ndims.N = 8\ndims.H = 4\ndims.D = 16\ndata.n_train = 24\ndata.n_test = 8\n"
                "train.epochs = 2\ntrain.seeds = 2\ntrain.batch = 8\n"},
    };
    std::size_t compared = 0;
    std::string diff;
    for (const auto& [command, text] : runs) {
        const auto config = Config::parse(text, command);
        const auto a = csv_digests(command, config, root / (command + "-a"), jobs);
        const auto b = csv_digests(command, config, root / (command + "-b"), std::max(2, jobs));
        if (a != b || a.empty()) diff += " " + command;
        compared += a.size();
    }
    std::filesystem::remove_all(root);
    return {diff.empty(), std::to_string(compared) + " CSVs compared" + (diff.empty() ? ", all identical" : ", differ:" + diff)};
}

struct Criterion {
    int id;
    const char* title;
    double limit;
    std::function<Outcome(const AcceptanceOptions&)> run;
};

} // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options) {
    const int jobs = std::max(1, options.jobs);
    const std::vector<Criterion> criteria{
        {1, "roots-of-unity conditioning", 5, [](auto&) { return roots_conditioning(); }},
        {2, "lossless reconstruction N=L=64", 5, [](auto&) { return lossless_reconstruction(); }},
        {3, "conditioning decreases with r_min", 120, [jobs](auto&) { return conditioning_trend(jobs); }},
        {4, "recent past is recovered", 60, [jobs](auto&) { return recent_past(jobs); }},
        {5, "sparse recovery near the unit circle", 120, [jobs](auto&) { return sparse_recovery(jobs); }},
        {6, "parallel scan equals sequential scan", 10, [jobs](auto&) { return scan_equivalence(jobs); }},
        {7, "gradient check on random models", 30, [](auto&) { return gradient_check(); }},
        {8, "width bound closed forms", 1, [](auto&) { return width_bounds(); }},
        {9, "rk4 order and pinned ODE parameters", 10, [](auto&) { return rk4_and_parameters(); }},
        {10, "LV: MLP head beats linear head", 900, [jobs](auto& o) { return ode_comparison(jobs, o.log); }},
        {11, "byte-identical CSVs on re-run", 60, [jobs](auto&) { return determinism(jobs); }},
    };

    std::vector<CriterionResult> results;
    for (const auto& c : criteria) {
        if (!options.only.empty() && !options.only.count(c.id)) continue;
        CriterionResult r{c.id, c.title, false, "", 0.0, c.limit};
        const auto t0 = std::chrono::steady_clock::now();
        try {
            const auto o = c.run(options);
            r.passed = o.passed;
            r.detail = o.detail;
        } catch (const std::exception& e) {
            r.detail = std::string("error: ") + e.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (r.seconds > r.limit) {
            r.passed = false;
            r.detail += "; over the " + sci(r.limit) + " s budget";
        }
        if (options.log) *options.log << format_line(r) << std::endl;
        results.push_back(std::move(r));
    }
    return results;
}

std::string format_line(const CriterionResult& r) {
    char head[160];
    std::snprintf(head, sizeof head, "%s %2d  %-40s %8.2f s / %g s  ", r.passed ? "PASS" : "FAIL", r.id,
                  r.title.c_str(), r.seconds, r.limit);
    return head + r.detail;
}

std::string format_table(const std::vector<CriterionResult>& results) {
    std::string out = "result id  criterion                                 runtime / budget  detail\n";
    int passed = 0;
    for (const auto& r : results) {
        out += format_line(r) + "\n";
        passed += r.passed;
    }
    out += std::to_string(passed) + "/" + std::to_string(results.size()) + " criteria passed\n";
    return out;
}

} // namespace lrnn
