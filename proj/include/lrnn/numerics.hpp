#pragma once

// Dense complex linear algebra on top of Eigen storage: deterministic products,
// a one-sided Jacobi SVD, condition numbers, truncated-SVD pseudoinverse and
// least squares.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>

#include "lrnn/errors.hpp"

namespace lrnn {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using RealOf = typename Eigen::NumTraits<Scalar>::Real;

std::string shape_string(Index rows, Index cols);

template <typename Derived>
std::string shape_string(const Eigen::EigenBase<Derived>& m) {
    return shape_string(m.rows(), m.cols());
}

/// Builds a CMatrix from row-major entries, rejecting non-finite values.
CMatrix cmatrix_from_rows(Index rows, Index cols, std::span<const Complex> entries);

template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& m) {
    for (Index j = 0; j < m.cols(); ++j)
        for (Index i = 0; i < m.rows(); ++i) {
            const auto v = m(i, j);
            if constexpr (Eigen::NumTraits<typename Derived::Scalar>::IsComplex) {
                if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
            } else {
                if (!std::isfinite(v)) return false;
            }
        }
    return true;
}

enum class ProductKind { product, adjoint_product };

/// A*B or A^H*B evaluated with a fixed inner-index accumulation order.
CMatrix matmul(const CMatrix& a, const CMatrix& b, ProductKind kind = ProductKind::product);

template <typename Scalar>
struct SvdResult {
    Matrix<Scalar> u;       // m x r
    Eigen::VectorXd sigma;  // r, descending
    Matrix<Scalar> v;       // n x r
    int sweeps = 0;
};

struct SvdOptions {
    double tolerance = 1e-12;
    int max_sweeps = 60;
};

namespace detail {

template <typename Scalar>
Scalar unit_phase_conj(const Scalar& g, RealOf<Scalar> abs_g) {
    if constexpr (Eigen::NumTraits<Scalar>::IsComplex)
        return std::conj(g) / abs_g;
    else
        return g < 0 ? Scalar(-1) : Scalar(1);
}

// Columns (p, q) <- (c x_p - s e x_q, s x_p + c e x_q) with e the phase of q.
template <typename Scalar, typename Real>
void rotate(Matrix<Scalar>& x, Index p, Index q, const Scalar& phase, Real c, Real s,
            Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& buf) {
    auto xp = x.col(p);
    auto xq = x.col(q);
    xq *= phase;
    buf = xp;
    xp = c * buf - s * xq;
    xq = s * buf + c * xq;
}

// Hestenes one-sided Jacobi on the columns of w (m x n, m >= n). On return the
// columns of w are mutually orthogonal and w = A * v.
template <typename Scalar>
int hestenes(Matrix<Scalar>& w, Matrix<Scalar>& v, const SvdOptions& opt) {
    using Real = RealOf<Scalar>;
    const Index n = w.cols();
    v = Matrix<Scalar>::Identity(n, n);
    Eigen::Matrix<Real, Eigen::Dynamic, 1> norms2(n);
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> w_buf(w.rows()), v_buf(n);
    for (Index j = 0; j < n; ++j) norms2(j) = w.col(j).squaredNorm();

    double worst = 0.0;
    for (int sweep = 1; sweep <= opt.max_sweeps; ++sweep) {
        bool rotated = false;
        worst = 0.0;
        for (Index p = 0; p + 1 < n; ++p) {
            for (Index q = p + 1; q < n; ++q) {
                const Real alpha = norms2(p);
                const Real beta = norms2(q);
                if (alpha == Real(0) || beta == Real(0)) continue;
                const Scalar gamma = w.col(p).dot(w.col(q));  // conj(w_p)^T w_q
                const Real abs_g = std::abs(gamma);
                if (abs_g == Real(0)) continue;
                const Real corr = abs_g / std::sqrt(alpha) / std::sqrt(beta);
                worst = std::max(worst, double(corr));
                if (corr <= opt.tolerance) continue;
                rotated = true;

                // Rotate w_q by the phase of gamma so the 2x2 Gram block is real.
                const Scalar phase = unit_phase_conj(gamma, abs_g);
                const Real zeta = (beta - alpha) / (Real(2) * abs_g);
                const Real t = (zeta >= 0 ? Real(1) : Real(-1)) /
                               (std::abs(zeta) + std::sqrt(Real(1) + zeta * zeta));
                const Real c = Real(1) / std::sqrt(Real(1) + t * t);
                const Real s = c * t;

                rotate(w, p, q, phase, c, s, w_buf);
                rotate(v, p, q, phase, c, s, v_buf);
                norms2(p) = w.col(p).squaredNorm();
                norms2(q) = w.col(q).squaredNorm();
            }
        }
        if (!rotated) return sweep;
    }
    throw NumericalError("one-sided Jacobi SVD did not converge in " +
                             std::to_string(opt.max_sweeps) +
                             " sweeps; worst column correlation " + std::to_string(worst),
                         worst);
}

// Fills columns of u whose singular value is zero with an orthonormal completion.
template <typename Scalar>
void complete_orthonormal(Matrix<Scalar>& u, const std::vector<bool>& valid) {
    const Index m = u.rows();
    Index next_basis = 0;
    for (Index j = 0; j < u.cols(); ++j) {
        if (valid[std::size_t(j)]) continue;
        for (; next_basis < m; ++next_basis) {
            Eigen::Matrix<Scalar, Eigen::Dynamic, 1> e = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Unit(m, next_basis);
            for (int pass = 0; pass < 2; ++pass)
                for (Index k = 0; k < u.cols(); ++k)
                    if (k != j) e -= u.col(k).dot(e) * u.col(k);
            const auto nrm = e.norm();
            if (nrm > 0.5) {
                u.col(j) = e / nrm;
                ++next_basis;
                break;
            }
        }
    }
}

} // namespace detail

/// Thin SVD by one-sided Jacobi applied directly to the columns of A (or of A^H
/// when A is wide). Singular values come back in descending order.
template <typename Derived>
SvdResult<typename Derived::Scalar> svd(const Eigen::MatrixBase<Derived>& a, const SvdOptions& opt = {}) {
    using Scalar = typename Derived::Scalar;
    const Index m = a.rows();
    const Index n = a.cols();
    if (m < 1 || n < 1) throw ShapeError("svd of empty matrix " + shape_string(m, n));
    if (!all_finite(a)) throw DomainError("svd of matrix with non-finite entries");

    const bool wide = m < n;
    Matrix<Scalar> w = wide ? Matrix<Scalar>(a.adjoint()) : Matrix<Scalar>(a);
    Matrix<Scalar> right;
    const int sweeps = detail::hestenes(w, right, opt);

    const Index r = w.cols();
    Eigen::VectorXd sig(r);
    for (Index j = 0; j < r; ++j) sig(j) = w.col(j).norm();

    std::vector<Index> order(static_cast<std::size_t>(r));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index x, Index y) { return sig(x) > sig(y); });

    SvdResult<Scalar> out;
    out.sweeps = sweeps;
    out.sigma.resize(r);
    Matrix<Scalar> left(w.rows(), r);
    Matrix<Scalar> rv(right.rows(), r);
    std::vector<bool> valid(static_cast<std::size_t>(r));
    for (Index k = 0; k < r; ++k) {
        const Index j = order[std::size_t(k)];
        out.sigma(k) = sig(j);
        rv.col(k) = right.col(j);
        valid[std::size_t(k)] = sig(j) > 0.0 && std::isfinite(1.0 / sig(j));
        if (valid[std::size_t(k)]) {
            left.col(k) = w.col(j) / sig(j);
        } else {
            out.sigma(k) = 0.0;
            left.col(k).setZero();
        }
    }
    detail::complete_orthonormal(left, valid);

    if (wide) {
        out.u = std::move(rv);
        out.v = std::move(left);
    } else {
        out.u = std::move(left);
        out.v = std::move(rv);
    }
    return out;
}

/// sigma_max / sigma_min over the min(rows, cols) singular values; +inf when
/// sigma_min < 1e-300 * sigma_max.
template <typename Derived>
double condition_number(const Eigen::MatrixBase<Derived>& a) {
    const auto s = svd(a).sigma;
    const double smax = s(0);
    const double smin = s(s.size() - 1);
    if (smax == 0.0) throw DomainError("condition number of the zero matrix");
    if (smin < smax * 1e-300) return std::numeric_limits<double>::infinity();
    return smax / smin;
}

inline double default_rcond(Index rows, Index cols) {
    return double(std::max(rows, cols)) * std::numeric_limits<double>::epsilon();
}

/// Singular values below rcond * sigma_max are treated as zero.
template <typename Scalar>
Index numerical_rank(const SvdResult<Scalar>& s, double rcond) {
    if (s.sigma.size() == 0 || s.sigma(0) == 0.0) return 0;
    const double cut = rcond * s.sigma(0);
    Index r = 0;
    while (r < s.sigma.size() && s.sigma(r) > cut) ++r;
    return r;
}

template <typename Scalar>
Matrix<Scalar> pseudoinverse(const SvdResult<Scalar>& s, double rcond) {
    const Index r = numerical_rank(s, rcond);
    Matrix<Scalar> scaled_v = s.v.leftCols(r);
    for (Index k = 0; k < r; ++k) scaled_v.col(k) /= s.sigma(k);
    return scaled_v * s.u.leftCols(r).adjoint();
}

/// Truncated-SVD Moore-Penrose pseudoinverse (n x m).
template <typename Derived>
Matrix<typename Derived::Scalar> pseudoinverse(const Eigen::MatrixBase<Derived>& a, double rcond = -1.0) {
    if (rcond < 0.0) rcond = default_rcond(a.rows(), a.cols());
    return pseudoinverse(svd(a), rcond);
}

/// Minimal-norm least-squares solution x = A^+ b.
template <typename DerivedA, typename DerivedB>
Matrix<typename DerivedA::Scalar> lstsq(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b,
                                        double rcond = -1.0) {
    if (a.rows() != b.rows())
        throw ShapeError("lstsq: A " + shape_string(a) + " and b " + shape_string(b) + " differ in rows");
    if (rcond < 0.0) rcond = default_rcond(a.rows(), a.cols());
    const auto s = svd(a);
    const Index r = numerical_rank(s, rcond);
    Matrix<typename DerivedA::Scalar> coeff = s.u.leftCols(r).adjoint() * b;
    for (Index k = 0; k < r; ++k) coeff.row(k) /= s.sigma(k);
    return s.v.leftCols(r) * coeff;
}

} // namespace lrnn
