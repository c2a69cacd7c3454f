#pragma once

// Diagonal complex linear recurrence x_k = Lambda x_{k-1} + B u_k with x_0 = 0.

#include <variant>
#include <vector>

#include "lrnn/numerics.hpp"
#include "lrnn/rng.hpp"

namespace lrnn {

struct DiagonalLinearRnn {
    CVector lambda;  // diagonal of Lambda, length N
    CMatrix b;       // N x H

    Index state_dim() const { return lambda.size(); }
    Index input_dim() const { return b.cols(); }
};

/// Validates shapes and finiteness.
DiagonalLinearRnn make_rnn(CVector lambda, CMatrix b);

/// Single-input recurrence with B = (1, ..., 1)^T.
DiagonalLinearRnn ones_input_rnn(CVector lambda);

enum class RingDensity { area, radius };

/// Eigenvalues sampled on the annulus r_min <= |lambda| <= r_max.
struct Ring {
    double r_min = 0.0;
    double r_max = 1.0;
    RingDensity density = RingDensity::area;
};

/// lambda_j = exp(2 pi i j / N).
struct RootsOfUnity {};

/// Real eigenvalues on [lo, hi), pairwise distinct.
struct RealUniform {
    double lo = -1.0;
    double hi = 1.0;
};

struct EigenInit {
    std::variant<Ring, RootsOfUnity, RealUniform> kind;
    Index n = 1;

    void validate() const;
};

CVector init_eigenvalues(const EigenInit& spec, Rng& rng);

struct HiddenTrajectory {
    CMatrix states;  // N x L, column k-1 holds x_k

    Index length() const { return states.cols(); }
    auto last() const { return states.col(states.cols() - 1); }
};

HiddenTrajectory scan_sequential(const DiagonalLinearRnn& rnn, const CMatrix& u);

template <typename Derived>
HiddenTrajectory scan_sequential(const DiagonalLinearRnn& rnn, const Eigen::MatrixBase<Derived>& u) {
    return scan_sequential(rnn, CMatrix(u.template cast<Complex>()));
}

/// Work-efficient (Blelloch) prefix scan over (Lambda, B u_k) pairs with the
/// combine (a1, w1) o (a2, w2) = (a1 a2, a2 w1 + w2). The reduction tree is
/// fixed by the padded power-of-two length, independent of `jobs`.
HiddenTrajectory scan_parallel(const DiagonalLinearRnn& rnn, const CMatrix& u, int jobs = 1);

template <typename Derived>
HiddenTrajectory scan_parallel(const DiagonalLinearRnn& rnn, const Eigen::MatrixBase<Derived>& u, int jobs = 1) {
    return scan_parallel(rnn, CMatrix(u.template cast<Complex>()), jobs);
}

/// Prepends a unit eigenvalue fed by a constant input channel, so the first
/// state coordinate counts time. Inputs must carry a leading row of ones.
DiagonalLinearRnn with_time_channel(const DiagonalLinearRnn& rnn);

/// Stacks M single-input recurrences into one block-diagonal recurrence that
/// routes input dimension m to block m only.
DiagonalLinearRnn block_diag_lift(const std::vector<DiagonalLinearRnn>& per_dim);

/// Entry (i, j) = |lambda_i|^j: how strongly a token j steps old survives in channel i.
RMatrix memory_profile(const CVector& lambda, Index length);

} // namespace lrnn
