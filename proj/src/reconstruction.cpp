#include "lrnn/reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lrnn/parallel.hpp"

namespace lrnn {

VandermondeMatrix build_vandermonde(const CVector& lambda, Index k) {
    if (k < 1) throw DomainError("Vandermonde horizon must be at least 1");
    CMatrix v(lambda.size(), k);
    for (Index i = 0; i < lambda.size(); ++i) {
        Complex power{1.0, 0.0};
        for (Index j = k - 1; j >= 0; --j) {
            v(i, j) = power;
            power *= lambda(i);
        }
    }
    return {std::move(v), lambda, k};
}

SparseBasis haar_basis(Index length, Index count) {
    if (length < 1 || (length & (length - 1)) != 0)
        throw DomainError("Haar basis length must be a power of two, got " + std::to_string(length));
    if (count < 1 || count > length)
        throw DomainError("Haar basis size must lie in [1, " + std::to_string(length) + "], got " +
                          std::to_string(count));
    RMatrix psi = RMatrix::Zero(length, count);
    psi.col(0).setConstant(1.0 / std::sqrt(double(length)));
    Index col = 1;
    for (Index blocks = 1; col < count; blocks *= 2) {
        const Index support = length / blocks;
        const double amp = 1.0 / std::sqrt(double(support));
        for (Index b = 0; b < blocks && col < count; ++b, ++col) {
            psi.col(col).segment(b * support, support / 2).setConstant(amp);
            psi.col(col).segment(b * support + support / 2, support / 2).setConstant(-amp);
        }
    }
    return {std::move(psi), BasisFamily::haar};
}

namespace {

double condition_from(const Eigen::VectorXd& sigma) {
    const double smax = sigma(0);
    const double smin = sigma(sigma.size() - 1);
    if (smax == 0.0 || smin < smax * 1e-300) return std::numeric_limits<double>::infinity();
    return smax / smin;
}

CMatrix gamma_matrix(const CVector& lambda, const SparseBasis& basis, Index k) {
    if (basis.length() < k)
        throw ShapeError("basis has " + std::to_string(basis.length()) + " rows, horizon is " + std::to_string(k));
    const auto v = build_vandermonde(lambda, k);
    return v.matrix * basis.psi.topRows(k).cast<Complex>();
}

void check_state(const CVector& state, const CVector& lambda) {
    if (state.size() != lambda.size())
        throw ShapeError("state of length " + std::to_string(state.size()) + " for " +
                         std::to_string(lambda.size()) + " eigenvalues");
}

} // namespace

ReconstructionMap full_reconstruction_map(const CVector& lambda, Index k, double rcond) {
    const auto v = build_vandermonde(lambda, k);
    return {pseudoinverse(v.matrix, rcond), k, ReconstructionMode::full};
}

ReconstructionMap sparse_reconstruction_map(const CVector& lambda, const SparseBasis& basis, Index k,
                                            double rcond) {
    return {pseudoinverse(gamma_matrix(lambda, basis, k), rcond), k, ReconstructionMode::sparse};
}

FullReconstruction reconstruct_full(const CVector& state, const CVector& lambda, Index k, double rcond) {
    check_state(state, lambda);
    const auto v = build_vandermonde(lambda, k);
    if (rcond < 0.0) rcond = default_rcond(v.matrix.rows(), v.matrix.cols());
    const auto s = svd(v.matrix);
    FullReconstruction out;
    out.condition = condition_from(s.sigma);
    out.inputs = pseudoinverse(s, rcond) * state;
    if (out.condition > kConditionWarningThreshold) {
        out.warning = ConditioningWarning{
            out.condition, "Vandermonde condition number " + std::to_string(out.condition) +
                               " exceeds 1e8; older tokens may not be recoverable"};
    }
    return out;
}

SparseReconstruction reconstruct_sparse(const CVector& state, const CVector& lambda, const SparseBasis& basis,
                                        Index k, double rcond) {
    check_state(state, lambda);
    const CMatrix gamma = gamma_matrix(lambda, basis, k);
    if (rcond < 0.0) rcond = default_rcond(gamma.rows(), gamma.cols());
    const auto s = svd(gamma);
    SparseReconstruction out;
    out.alpha = pseudoinverse(s, rcond) * state;
    out.inputs = basis.psi.topRows(k).cast<Complex>() * out.alpha;
    const Index rank = numerical_rank(s, rcond);
    if (rank < basis.size()) {
        const double smin = basis.size() <= s.sigma.size() ? s.sigma(basis.size() - 1) : 0.0;
        out.warning = RankWarning{smin, s.sigma(0), rank, basis.size(),
                                  "Gamma_k has numerical rank " + std::to_string(rank) + " < P = " +
                                      std::to_string(basis.size()) + "; returning the minimal-norm coefficients"};
    }
    return out;
}

std::string to_string(SweepMode mode) { return mode == SweepMode::vandermonde ? "vandermonde" : "omega"; }

std::vector<SweepRow> conditioning_sweep(const SweepConfig& config) {
    if (config.r_grid.empty()) throw std::invalid_argument("conditioning sweep: r_min grid is empty");
    if (config.seeds.empty()) throw std::invalid_argument("conditioning sweep: seed list is empty");
    if (config.mode == SweepMode::omega && config.p_grid.empty())
        throw std::invalid_argument("conditioning sweep: omega mode needs a P grid");
    if (config.length < 1 || config.state_dim < 1) throw std::invalid_argument("conditioning sweep: empty dimensions");

    const std::vector<Index> p_values = config.mode == SweepMode::omega ? config.p_grid : std::vector<Index>{0};
    std::vector<SweepRow> rows;
    for (Index p : p_values)
        for (double r : config.r_grid)
            for (auto seed : config.seeds) rows.push_back({config.mode, r, p, seed, 0.0});

    std::vector<SparseBasis> bases;
    if (config.mode == SweepMode::omega)
        for (Index p : p_values) bases.push_back(haar_basis(config.length, p));

    const std::size_t per_p = config.r_grid.size() * config.seeds.size();
    parallel_for(std::ptrdiff_t(rows.size()), config.jobs, [&](std::ptrdiff_t idx) {
        SweepRow& row = rows[std::size_t(idx)];
        EigenInit init;
        init.n = config.state_dim;
        if (config.init == SweepInit::roots_of_unity)
            init.kind = RootsOfUnity{};
        else
            init.kind = Ring{row.r_min, config.r_max, config.density};
        // The same stream for every r_min couples the grid cells of one seed.
        Rng rng(row.seed, "cond-sweep/eigenvalues");
        const CVector lambda = init_eigenvalues(init, rng);

        double log_cond;
        if (config.mode == SweepMode::vandermonde) {
            const double c = condition_number(build_vandermonde(lambda, config.length).matrix);
            log_cond = std::isfinite(c) ? std::log10(c) : kLog10CondSentinel;
        } else {
            const auto& basis = bases[std::size_t(idx) / per_p];
            const CMatrix gamma = gamma_matrix(lambda, basis, config.length);
            const double c = condition_number(gamma);
            // cond(Gamma^H Gamma) = cond(Gamma)^2, taken from the SVD of Gamma itself.
            log_cond = std::isfinite(c) ? std::min(2.0 * std::log10(c), kLog10CondSentinel) : kLog10CondSentinel;
        }
        row.log10_cond = log_cond;
    });
    return rows;
}

double median(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("median of empty set");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double median_log10_cond(const std::vector<SweepRow>& rows, double r_min, Index p) {
    std::vector<double> vals;
    for (const auto& r : rows)
        if (r.r_min == r_min && r.p == p) vals.push_back(r.log10_cond);
    return median(std::move(vals));
}

RVector reconstruction_error_profile(const CVector& lambda, const RMatrix& inputs, ReconstructionMode mode,
                                     const SparseBasis* basis, double rcond) {
    const Index length = inputs.cols();
    if (inputs.rows() < 1 || length < 1) throw ShapeError("error profile needs a nonempty dataset");
    if (mode == ReconstructionMode::sparse && basis == nullptr)
        throw std::invalid_argument("sparse error profile needs a basis");

    const auto map = mode == ReconstructionMode::full ? full_reconstruction_map(lambda, length, rcond)
                                                      : sparse_reconstruction_map(lambda, *basis, length, rcond);
    const auto rnn = ones_input_rnn(lambda);
    RVector mse = RVector::Zero(length);
    for (Index s = 0; s < inputs.rows(); ++s) {
        const RMatrix u = inputs.row(s);
        const CVector last = scan_sequential(rnn, u).last();
        CVector recovered = map.omega * last;
        if (mode == ReconstructionMode::sparse) recovered = basis->psi.topRows(length).cast<Complex>() * recovered;
        mse += (recovered - u.transpose().cast<Complex>()).cwiseAbs2();
    }
    return mse / double(inputs.rows());
}

} // namespace lrnn
