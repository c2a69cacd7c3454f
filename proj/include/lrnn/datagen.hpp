#pragma once

// Data sources: controlled ODE trajectories, smooth and sparse input signals,
// IDX image files and a synthetic image fallback.

#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lrnn/dataset.hpp"
#include "lrnn/numerics.hpp"
#include "lrnn/reconstruction.hpp"
#include "lrnn/rng.hpp"

namespace lrnn {

struct NamedParam {
    std::string name;
    double value = 0.0;
};

/// dz = f(z, v; params). The input v enters one state equation additively.
using OdeRhs = std::function<void(const RVector& z, double input, std::span<const double> params, RVector& dz)>;

struct OdeSystem {
    std::string name;
    Index state_dim = 0;
    std::vector<NamedParam> params;
    OdeRhs rhs;
    Index readout = 0;
    RVector z0;
    double delta = 0.01;
    Index horizon = 1;

    double param(std::string_view key) const;
    /// "k1=0.07,k2=0.6,..." in declaration order, values printed with %.10g.
    std::string params_string() const;
};

struct Trajectory {
    RMatrix states;   // state_dim x L, column k-1 holds z(k delta)
    RVector outputs;  // y_k = z_readout(k delta)
};

/// Above this magnitude a trajectory is rejected.
inline constexpr double kBlowUpBound = 1e6;

/// Classical fixed-step RK4 with the input held constant over each step
/// (input[k-1] drives the step ending at k delta).
Trajectory rk4_integrate(const OdeSystem& system, const RVector& input);

/// Protein transduction: 5 states, input on the first equation, readout z1.
OdeSystem pt_system();
/// Lotka-Volterra: input on the second equation, readout z1.
OdeSystem lv_system();
/// Lorenz: input on the second equation, readout z1.
OdeSystem lorenz_system();

/// Looks up "pt", "lv" or "lorenz".
OdeSystem ode_system(std::string_view name);

enum class LowFrequencyFamily { haar, cosine };

/// Sum of the first n_basis low-frequency basis functions with N(0, 1)
/// coefficients, rescaled to max |v| = 1.
RVector smooth_input_sampler(Index length, Rng& rng, Index n_basis = 16,
                             LowFrequencyFamily family = LowFrequencyFamily::haar);

/// Orthonormal low-frequency columns used by smooth_input_sampler.
RMatrix low_frequency_basis(Index length, Index n_basis, LowFrequencyFamily family);

struct OdeDatasetConfig {
    Index samples = 100;
    std::uint64_t seed = 1;
    Index n_basis = 16;
    LowFrequencyFamily family = LowFrequencyFamily::haar;
    int jobs = 1;
};

/// Inputs 1 x L, targets 1 x L. Sample i draws from its own stream
/// derive_seed(seed, "ode/<name>", i); rejected draws are retried and counted.
TrajectoryDataset make_ode_dataset(const OdeSystem& system, const OdeDatasetConfig& config);

/// n x L matrix of signals v = Psi alpha with alpha ~ N(0, I_P).
RMatrix sparse_signal_sampler(const SparseBasis& basis, Rng& rng, Index n);

/// IDX image file (magic 0x00000803, dims n x rows x cols, unsigned bytes),
/// returned as n x (rows*cols), row-major flattened, scaled to [0, 1].
RMatrix load_idx_images(const std::filesystem::path& path);
RMatrix parse_idx_images(std::string_view bytes);

/// n x 784 images of 1-3 anisotropic Gaussian blobs in [0, 1].
RMatrix synthetic_digits(Index n, Rng& rng);

/// Centered window of `length` entries from every row.
RMatrix center_crop(const RMatrix& sequences, Index length);

void save_dataset(const std::filesystem::path& path, const TrajectoryDataset& data);
TrajectoryDataset load_dataset(const std::filesystem::path& path);

} // namespace lrnn
