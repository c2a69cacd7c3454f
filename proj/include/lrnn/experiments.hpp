#pragma once

// Config-driven experiments behind the CLI subcommands. Each run_* function
// computes in memory; run_command wraps one into a run directory with CSVs,
// optional SVGs, checkpoints and a manifest written last.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "lrnn/config.hpp"
#include "lrnn/datagen.hpp"
#include "lrnn/network.hpp"
#include "lrnn/reconstruction.hpp"

namespace lrnn {

struct RunContext {
    std::filesystem::path out_dir = "out";
    int jobs = 1;
    std::ostream* log = nullptr;  // progress lines, may be null
};

/// Config keys accepted by each command.
const std::set<std::string>& known_keys(const std::string& command);

/// Applies LRNN_SEED from the environment, if set, over the config seed.
void apply_seed_env(Config& config);

/// cond-sweep: reconstruction conditioning over an r_min (and P) grid.
SweepConfig sweep_config_from(const Config& config, int jobs);

struct ReconstructSettings {
    Index length = 256;
    std::vector<Index> state_dims{512};
    std::vector<double> r_grid{0.0};
    double r_max = 1.0;
    SweepInit init = SweepInit::ring;
    ReconstructionMode mode = ReconstructionMode::full;
    Index basis_size = 32;
    std::string source = "synthetic";  // synthetic | idx | uniform | sparse
    std::filesystem::path idx_path;
    Index samples = 50;
    std::uint64_t seed = 1;
    int seeds = 10;
    int jobs = 1;
};

ReconstructSettings reconstruct_settings_from(const Config& config, int jobs);

/// n x L input sequences for a reconstruction run.
RMatrix reconstruction_inputs(const ReconstructSettings& s);

struct ProfileRow {
    Index state_dim = 0;
    double r_min = 0.0;
    RVector mse;  // per timestep, median over seeds
};

/// Per (N, r_min) cell: reconstruct every input from x_L for each seed, then
/// take the per-timestep median over seeds.
std::vector<ProfileRow> reconstruction_profiles(const ReconstructSettings& s, const RMatrix& inputs);

struct TrainedHead {
    HeadKind head = HeadKind::linear;
    TrainResult result;
};

struct OdeSettings {
    std::string system = "lv";
    Index length = 256;
    ModelConfig model;
    TrainConfig train;
    std::vector<HeadKind> heads{HeadKind::linear, HeadKind::mlp};
    Index n_train = 1000;
    Index n_test = 200;
    Index n_basis = 16;
    LowFrequencyFamily family = LowFrequencyFamily::haar;
    std::uint64_t seed = 1;
};

OdeSettings ode_settings_from(const Config& config, int jobs);

struct OdeOutcome {
    TrajectoryDataset train_set;
    TrajectoryDataset test_set;
    std::vector<TrainedHead> heads;
};

OdeOutcome run_ode(const OdeSettings& s, std::ostream* log = nullptr);

struct TrainReconstructSettings {
    Index length = 64;
    std::vector<Index> state_dims{128};
    ModelConfig model;
    TrainConfig train;
    std::vector<HeadKind> heads{HeadKind::linear, HeadKind::mlp};
    std::string source = "synthetic";
    Index n_train = 512;
    Index n_test = 128;
    std::uint64_t seed = 1;
};

TrainReconstructSettings train_reconstruct_settings_from(const Config& config, int jobs);

/// Runs one subcommand into ctx.out_dir. Throws UsageError on bad config.
void run_command(const std::string& command, const Config& config, const RunContext& ctx);

std::string to_string(HeadKind head);

} // namespace lrnn
