#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <sys/wait.h>

#include <json.hpp>

#include "lrnn/config.hpp"
#include "lrnn/errors.hpp"
#include "lrnn/experiments.hpp"
#include "lrnn/report.hpp"

using namespace lrnn;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("lrnn-test-" + name);
    fs::remove_all(dir);
    return dir;
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(LRNN_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST_CASE("config parses comments, whitespace and lists") {
    const auto c = Config::parse("# header\nseed = 7\n\n dims.N = 16, 32 ,64  # trailing\nflag=yes\n");
    CHECK(c.get_u64("seed", 0) == 7);
    CHECK(c.get_ints("dims.N", {}) == std::vector<std::int64_t>{16, 32, 64});
    CHECK(c.get_bool("flag", false));
    CHECK(c.get_double("missing", 2.5) == 2.5);
    CHECK_THROWS_AS(c.get_double("missing"), UsageError);
    CHECK(c.snapshot() == "dims.N=16, 32 ,64\nflag=yes\nseed=7\n");
}

TEST_CASE("config errors name the line or key") {
    try {
        Config::parse("seed = 1\nnot a pair\n", "x.cfg");
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        CHECK(std::string(e.what()).find("x.cfg:2") != std::string::npos);
    }
    auto c = Config::parse("dims.N = abc\n");
    CHECK_THROWS_AS(c.get_int("dims.N"), UsageError);
    CHECK_THROWS_AS(c.apply_override("novalue"), UsageError);
    c.apply_override("dims.N=8");
    CHECK(c.get_int("dims.N") == 8);
    CHECK_THROWS_AS(c.require_known({"seed"}), UsageError);
}

TEST_CASE("format_double round-trips") {
    for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23}) CHECK(std::stod(format_double(x)) == x);
    CHECK(format_double(std::nan("")) == "nan");
}

TEST_CASE("csv tables start with the versioned header") {
    CsvTable t("cond-sweep", {"a", "b"});
    t.add_row({"1", "2"});
    CHECK_THROWS_AS(t.add_row({"1"}), ShapeError);
    const auto l = lines(t.str());
    REQUIRE(l.size() == 3);
    CHECK(l[0] == "# lrnn-memory v" + std::string(kVersion) + " cond-sweep");
    CHECK(l[1] == "a,b");
    CHECK(l[2] == "1,2");
}

TEST_CASE("output set digests match the files and the manifest lists them") {
    const auto dir = scratch("outputs");
    OutputSet out(dir);
    out.write("a.csv", "hello\n");
    REQUIRE(out.records().size() == 1);
    CHECK(out.records()[0].digest == fnv1a64(slurp(dir / "a.csv")));
    CHECK(out.records()[0].bytes == 6);

    RunManifest m;
    m.command = "cond-sweep";
    m.config = {{"seed", "3"}};
    m.start = m.end = std::chrono::system_clock::now();
    m.files = out.records();
    m.rejected["train"] = 2;
    write_manifest(dir, m);
    const auto j = nlohmann::json::parse(slurp(dir / "manifest.json"));
    CHECK(j["code_version"] == std::string(kVersion));
    CHECK(j["config"]["seed"] == "3");
    CHECK(j["files"][0]["fnv1a64"] == hex64(fnv1a64("hello\n")));
    CHECK(j["rejected"]["train"] == 2);
    fs::remove_all(dir);
}

TEST_CASE("cond-sweep writes one row per cell") {
    const auto dir = scratch("sweep");
    const auto c = Config::parse("dims.L = 16\ndims.N = 32\ninit.r_min = 0, 0.9\nsweep.seeds = 3\nseed = 5\n");
    run_command("cond-sweep", c, {dir, 1, nullptr});
    const auto l = lines(slurp(dir / "cond_sweep.csv"));
    REQUIRE(l.size() == 2 + 6);
    CHECK(l[0] == "# lrnn-memory v" + std::string(kVersion) + " cond-sweep");
    CHECK(l[1] == "mode,r_min,P,seed,log10_cond");
    CHECK(l[2].rfind("vandermonde,0,0,5,", 0) == 0);
    CHECK(fs::exists(dir / "manifest.json"));
    CHECK(fs::exists(dir / "cond_sweep.svg"));
    fs::remove_all(dir);
}

TEST_CASE("roots-of-unity single point gives log10 cond 0") {
    const auto dir = scratch("roots");
    const auto c = Config::parse("dims.L = 16\ndims.N = 16\ninit.kind = roots_of_unity\ninit.r_min = 1\n"
                                 "sweep.seeds = 1\noutput.svg = no\n");
    run_command("cond-sweep", c, {dir, 1, nullptr});
    const auto l = lines(slurp(dir / "cond_sweep.csv"));
    REQUIRE(l.size() == 3);
    const double v = std::stod(l[2].substr(l[2].rfind(',') + 1));
    CHECK(std::abs(v) < 1e-9);
    CHECK_FALSE(fs::exists(dir / "cond_sweep.svg"));
    fs::remove_all(dir);
}

TEST_CASE("bad grids and keys are usage errors") {
    const auto dir = scratch("usage");
    CHECK_THROWS_AS(run_command("cond-sweep", Config::parse("init.r_min =\n"), {dir, 1, nullptr}), UsageError);
    CHECK_THROWS_AS(run_command("cond-sweep", Config::parse("init.r_min = 0.5, 1.5\n"), {dir, 1, nullptr}), UsageError);
    CHECK_THROWS_AS(run_command("cond-sweep", Config::parse("dims.Q = 1\n"), {dir, 1, nullptr}), UsageError);
    CHECK_THROWS_AS(run_command("reconstruct", Config::parse("dims.N =\n"), {dir, 1, nullptr}), UsageError);
    CHECK_THROWS_AS(run_command("ode", Config::parse("data.system = rossler\n"), {dir, 1, nullptr}), UsageError);
    CHECK_THROWS_AS(run_command("nope", Config{}, {dir, 1, nullptr}), UsageError);
    CHECK_FALSE(fs::exists(dir / "manifest.json"));
    fs::remove_all(dir);
}

TEST_CASE("LRNN_SEED overrides the config seed") {
    auto c = Config::parse("seed = 1\n");
    ::setenv("LRNN_SEED", "42", 1);
    apply_seed_env(c);
    ::unsetenv("LRNN_SEED");
    CHECK(c.get_u64("seed", 0) == 42);
    ::setenv("LRNN_SEED", "x", 1);
    CHECK_THROWS_AS(apply_seed_env(c), UsageError);
    ::unsetenv("LRNN_SEED");
}

TEST_CASE("reconstruct emits a per-timestep profile for every cell") {
    const auto dir = scratch("reconstruct");
    const auto c = Config::parse("dims.L = 32\ndims.N = 16, 64\ninit.r_min = 0, 0.9\nsweep.seeds = 2\ndata.n = 4\n");
    run_command("reconstruct", c, {dir, 2, nullptr});
    const auto l = lines(slurp(dir / "reconstruct.csv"));
    REQUIRE(l.size() == 2 + 2 * 2 * 32);
    CHECK(l[1] == "N,r_min,timestep,mse");
    CHECK(l[2].rfind("16,0,1,", 0) == 0);
    // N = 64 >= L recovers everything at r_min = 0.9
    const auto last = l.back();
    CHECK(last.rfind("64,0.9,32,", 0) == 0);
    CHECK(std::stod(last.substr(last.rfind(',') + 1)) < 1e-12);
    fs::remove_all(dir);
}

TEST_CASE("sparse reconstruct recovers Haar-sparse signals with few states") {
    ReconstructSettings s;
    s.length = 64;
    s.state_dims = {16};
    s.r_grid = {0.9};
    s.mode = ReconstructionMode::sparse;
    s.basis_size = 8;
    s.source = "sparse";
    s.samples = 5;
    s.seeds = 3;
    const auto rows = reconstruction_profiles(s, reconstruction_inputs(s));
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].mse.maxCoeff() < 1e-12);
}

TEST_CASE("ode command writes summary, samples, eigenvalues, checkpoints and rejected counts") {
    const auto dir = scratch("ode");
    const auto c = Config::parse("dims.L = 16\ndims.N = 4\ndims.H = 2\ndims.D = 8\ndata.n_train = 8\n"
                                 "data.n_test = 4\ntrain.epochs = 2\ntrain.seeds = 2\ntrain.batch = 4\n");
    run_command("ode", c, {dir, 1, nullptr});
    const auto summary = lines(slurp(dir / "ode_summary.csv"));
    CHECK(summary.size() == 2 + 2 * 2);
    CHECK(lines(slurp(dir / "ode_samples.csv")).size() == 2 + 2 * 2 * 16);
    CHECK(lines(slurp(dir / "ode_eigenvalues.csv")).size() == 2 + 2 * 4);
    const auto model = load_checkpoint(dir / "ode_mlp.lrnn");
    CHECK(model.state_dim() == 4);
    CHECK(model.recurrence.lambda().cwiseAbs().maxCoeff() < 1.0);
    const auto j = nlohmann::json::parse(slurp(dir / "manifest.json"));
    CHECK(j["rejected"].contains("train"));
    bool listed = false;
    for (const auto& f : j["files"]) listed = listed || f["name"] == "ode_mlp.lrnn";
    CHECK(listed);
    fs::remove_all(dir);
}

TEST_CASE("train-reconstruct learns the identity from the last state when N >= L") {
    const auto dir = scratch("train-reconstruct");
    const auto c = Config::parse("dims.L = 8\ndims.N = 16\ndims.H = 1\ndata.source = uniform\ndata.n_train = 64\n"
                                 "data.n_test = 16\ntrain.head = linear\ntrain.epochs = 150\ntrain.seeds = 1\n"
                                 "train.batch = 16\ntrain.lr = 1e-2\n");
    run_command("train-reconstruct", c, {dir, 1, nullptr});
    const auto l = lines(slurp(dir / "train_reconstruct.csv"));
    REQUIRE(l.size() == 3);
    CHECK(l[1] == "N,head,seed,status,test_mse,best");
    const double mse = std::stod(l[2].substr(l[2].find("ok,") + 3));
    CHECK(mse < 1e-2);
    CHECK(fs::exists(dir / "model_N16_linear.lrnn"));
    fs::remove_all(dir);
}

TEST_CASE("re-running a command reproduces identical CSV bytes") {
    const auto a = scratch("det-a"), b = scratch("det-b");
    const auto c = Config::parse("dims.L = 16\ndims.N = 4\ndims.H = 2\ndims.D = 8\ndata.n_train = 8\n"
                                 "data.n_test = 4\ntrain.epochs = 2\ntrain.seeds = 2\ntrain.batch = 4\n");
    run_command("ode", c, {a, 1, nullptr});
    run_command("ode", c, {b, 3, nullptr});
    for (const auto* name : {"ode_summary.csv", "ode_loss.csv", "ode_eigenvalues.csv", "ode_samples.csv"})
        CHECK(slurp(a / name) == slurp(b / name));
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("cli exit codes") {
    const auto dir = scratch("cli");
    fs::create_directories(dir);
    std::ofstream(dir / "empty.cfg") << "init.r_min =\n";
    std::ofstream(dir / "ok.cfg") << "dims.L = 8\ndims.N = 8\ninit.r_min = 0.5\nsweep.seeds = 1\n";
    std::ofstream(dir / "broken.cfg") << "this is not a pair\n";
    CHECK(run_cli("cond-sweep --config " + (dir / "empty.cfg").string() + " --out " + (dir / "o1").string()) == 2);
    CHECK(run_cli("cond-sweep --config " + (dir / "broken.cfg").string() + " --out " + (dir / "o2").string()) == 2);
    CHECK(run_cli("cond-sweep --config " + (dir / "ok.cfg").string() + " --set dims.N=0 --out " +
                  (dir / "o3").string()) == 2);
    CHECK(run_cli("cond-sweep") == 2);
    CHECK(run_cli("cond-sweep --config " + (dir / "ok.cfg").string() + " --out " + (dir / "o4").string()) == 0);
    CHECK(fs::exists(dir / "o4" / "cond_sweep.csv"));
    CHECK(run_cli("verify --only 8") == 0);
    fs::remove_all(dir);
}

TEST_CASE("shipped configs parse and validate") {
    const std::map<std::string, std::string> command{
        {"cond_sweep", "cond-sweep"}, {"reconstruct", "reconstruct"}, {"train_reconstruct", "train-reconstruct"},
        {"ode", "ode"}};
    int checked = 0;
    for (const auto& entry : fs::directory_iterator(LRNN_CONFIG_DIR)) {
        const auto stem = entry.path().stem().string();
        std::string cmd;
        for (const auto& [prefix, name] : command)
            if (stem.rfind(prefix, 0) == 0 && prefix.size() > cmd.size()) cmd = name;
        INFO(stem);
        REQUIRE_FALSE(cmd.empty());
        const auto c = Config::load(entry.path());
        CHECK_NOTHROW(c.require_known(known_keys(cmd)));
        if (cmd == "cond-sweep") CHECK_NOTHROW(sweep_config_from(c, 1));
        if (cmd == "reconstruct") CHECK_NOTHROW(reconstruct_settings_from(c, 1));
        if (cmd == "train-reconstruct") CHECK_NOTHROW(train_reconstruct_settings_from(c, 1));
        if (cmd == "ode") CHECK_NOTHROW(ode_settings_from(c, 1));
        ++checked;
    }
    CHECK(checked >= 8);
}
