// lrnn: command-line harness for the memory experiments.
//
//   lrnn <cond-sweep|reconstruct|train-reconstruct|ode|verify> --config FILE
//        [--set k=v]... [--jobs N] [--out DIR]
//
// Exit status: 0 on success, 2 on usage errors, 1 on runtime failures. verify
// exits 0 only if every acceptance criterion passes.

#include <CLI11.hpp>

#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "lrnn/acceptance.hpp"
#include "lrnn/config.hpp"
#include "lrnn/errors.hpp"
#include "lrnn/experiments.hpp"

namespace {

struct Options {
    std::string config_path;
    std::vector<std::string> overrides;
    int jobs = 1;
    std::string out = "out";
    std::vector<int> only;
};

lrnn::Config load_config(const Options& o) {
    lrnn::Config config;
    try {
        if (!o.config_path.empty()) config = lrnn::Config::load(o.config_path);
    } catch (const lrnn::FormatError& e) {
        throw lrnn::UsageError(e.what());
    }
    lrnn::apply_seed_env(config);
    for (const auto& s : o.overrides) config.apply_override(s);
    return config;
}

int verify(const Options& o) {
    lrnn::AcceptanceOptions opt;
    opt.jobs = o.jobs;
    opt.only = std::set<int>(o.only.begin(), o.only.end());
    opt.log = &std::cerr;
    const auto results = lrnn::run_acceptance(opt);
    std::cout << lrnn::format_table(results);
    for (const auto& r : results)
        if (!r.passed) return 1;
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Memory experiments for diagonal complex linear RNNs"};
    app.require_subcommand(1);
    Options o;

    const std::vector<std::pair<std::string, std::string>> commands{
        {"cond-sweep", "Conditioning of the reconstruction problem over an r_min grid"},
        {"reconstruct", "Per-timestep reconstruction error from the last hidden state"},
        {"train-reconstruct", "Train RNN + decoder to reconstruct the input from the last state"},
        {"ode", "Train seq2seq models on controlled ODE trajectories"},
        {"verify", "Run the acceptance suite"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        auto* cfg = sub->add_option("--config", o.config_path, "Experiment config file (key = value lines)");
        if (name != "verify") cfg->required()->check(CLI::ExistingFile);
        sub->add_option("--set", o.overrides, "Override a config entry, key=value")->take_all();
        sub->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--out", o.out, "Output directory");
        if (name == "verify") sub->add_option("--only", o.only, "Run only these criterion ids");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        if (command == "verify") return verify(o);
        const auto config = load_config(o);
        lrnn::run_command(command, config, {o.out, o.jobs, &std::cerr});
        std::cerr << "wrote " << o.out << "/manifest.json\n";
        return 0;
    } catch (const lrnn::UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
