#pragma once

// Recovering inputs from a hidden state through the Vandermonde structure of
// the unrolled recurrence, with and without a sparsifying basis.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lrnn/numerics.hpp"
#include "lrnn/recurrence.hpp"

namespace lrnn {

/// N x k matrix with entry (i, j) = lambda_i^(k-1-j). Column 0 multiplies the
/// oldest token, the last column is all ones, and x_k = V u_{1:k} when B = 1.
struct VandermondeMatrix {
    CMatrix matrix;
    CVector eigenvalues;
    Index horizon = 0;
};

VandermondeMatrix build_vandermonde(const CVector& lambda, Index k);

enum class BasisFamily { haar, user };

struct SparseBasis {
    RMatrix psi;  // L x P
    BasisFamily family = BasisFamily::user;

    Index length() const { return psi.rows(); }
    Index size() const { return psi.cols(); }
};

/// First P columns of the orthonormal Haar system on L = 2^j samples, ordered
/// by increasing frequency with the scaling function first.
SparseBasis haar_basis(Index length, Index count);

enum class ReconstructionMode { full, sparse };

/// Linear map from a hidden state to the input prefix (full) or to the basis
/// coefficients (sparse).
struct ReconstructionMap {
    CMatrix omega;  // k x N (full) or P x N (sparse)
    Index horizon = 0;
    ReconstructionMode mode = ReconstructionMode::full;
};

ReconstructionMap full_reconstruction_map(const CVector& lambda, Index k, double rcond = -1.0);
ReconstructionMap sparse_reconstruction_map(const CVector& lambda, const SparseBasis& basis, Index k,
                                            double rcond = -1.0);

/// Emitted when the Vandermonde system is too ill-conditioned to trust.
struct ConditioningWarning {
    double condition = 0.0;
    std::string message;
};

/// Emitted when Gamma_k = V_k Psi_k has numerical rank below P.
struct RankWarning {
    double sigma_min = 0.0;
    double sigma_max = 0.0;
    Index rank = 0;
    Index expected = 0;
    std::string message;
};

inline constexpr double kConditionWarningThreshold = 1e8;

struct FullReconstruction {
    CVector inputs;  // u_1 .. u_k, oldest first
    double condition = 0.0;
    std::optional<ConditioningWarning> warning;
};

/// V_k^+ x_k. Assumes the state was produced with B = (1, ..., 1)^T.
FullReconstruction reconstruct_full(const CVector& state, const CVector& lambda, Index k, double rcond = -1.0);

struct SparseReconstruction {
    CVector alpha;   // P coefficients
    CVector inputs;  // Psi_k alpha
    std::optional<RankWarning> warning;
};

/// alpha = (V_k Psi_k)^+ x_k and inputs = Psi_k alpha, Psi_k the first k rows of Psi.
SparseReconstruction reconstruct_sparse(const CVector& state, const CVector& lambda, const SparseBasis& basis,
                                        Index k, double rcond = -1.0);

enum class SweepMode { vandermonde, omega };

std::string to_string(SweepMode mode);

enum class SweepInit { ring, roots_of_unity };

struct SweepConfig {
    SweepMode mode = SweepMode::vandermonde;
    SweepInit init = SweepInit::ring;
    Index length = 128;
    Index state_dim = 256;
    std::vector<double> r_grid;
    double r_max = 1.0;
    RingDensity density = RingDensity::area;
    std::vector<Index> p_grid;  // omega mode only
    std::vector<std::uint64_t> seeds;
    int jobs = 1;
};

struct SweepRow {
    SweepMode mode = SweepMode::vandermonde;
    double r_min = 0.0;
    Index p = 0;
    std::uint64_t seed = 0;
    double log10_cond = 0.0;
};

/// Infinite condition numbers are recorded as this value.
inline constexpr double kLog10CondSentinel = 308.0;

/// One row per (P, r_min, seed) cell in grid order. Vandermonde mode records
/// log10 cond(V_L); omega mode records log10 cond(Gamma^H Gamma) for
/// Gamma = V_L Psi_L with a Haar basis of P columns.
std::vector<SweepRow> conditioning_sweep(const SweepConfig& config);

/// Median of log10_cond over the rows matching (r_min, p).
double median_log10_cond(const std::vector<SweepRow>& rows, double r_min, Index p = 0);

/// Scans every row of `inputs` (n x L) with B = 1, reconstructs the whole
/// sequence from x_L and returns the mean squared error per timestep.
RVector reconstruction_error_profile(const CVector& lambda, const RMatrix& inputs, ReconstructionMode mode,
                                     const SparseBasis* basis = nullptr, double rcond = -1.0);

double median(std::vector<double> values);

} // namespace lrnn
