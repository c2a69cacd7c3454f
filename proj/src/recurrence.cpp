#include "lrnn/recurrence.hpp"

#include <cmath>
#include <numbers>
#include <set>

#include "lrnn/parallel.hpp"

namespace lrnn {

DiagonalLinearRnn make_rnn(CVector lambda, CMatrix b) {
    if (lambda.size() < 1) throw ShapeError("recurrence needs at least one state");
    if (b.rows() != lambda.size())
        throw ShapeError("input matrix " + shape_string(b) + " does not match " + std::to_string(lambda.size()) +
                         " states");
    if (!all_finite(lambda) || !all_finite(b)) throw DomainError("recurrence parameters must be finite");
    return {std::move(lambda), std::move(b)};
}

DiagonalLinearRnn ones_input_rnn(CVector lambda) {
    const Index n = lambda.size();
    return make_rnn(std::move(lambda), CMatrix::Ones(n, 1));
}

void EigenInit::validate() const {
    if (n < 1) throw DomainError("eigenvalue count must be positive");
    if (const auto* ring = std::get_if<Ring>(&kind)) {
        if (!(0.0 <= ring->r_min && ring->r_min <= ring->r_max && ring->r_max <= 1.0))
            throw DomainError("ring init needs 0 <= r_min <= r_max <= 1");
    } else if (const auto* real = std::get_if<RealUniform>(&kind)) {
        if (!(real->lo < real->hi)) throw DomainError("real init needs lo < hi");
    }
}

CVector init_eigenvalues(const EigenInit& spec, Rng& rng) {
    spec.validate();
    CVector out(spec.n);
    if (const auto* ring = std::get_if<Ring>(&spec.kind)) {
        const double lo2 = ring->r_min * ring->r_min;
        const double hi2 = ring->r_max * ring->r_max;
        for (Index i = 0; i < spec.n; ++i) {
            const double theta = 2.0 * std::numbers::pi * rng.uniform();
            const double u = rng.uniform();
            const double r = ring->density == RingDensity::area
                                 ? std::sqrt(u * (hi2 - lo2) + lo2)
                                 : ring->r_min + u * (ring->r_max - ring->r_min);
            out(i) = std::polar(r, theta);
        }
    } else if (std::holds_alternative<RootsOfUnity>(spec.kind)) {
        for (Index j = 0; j < spec.n; ++j) {
            // Quarter turns are exact so that N = 4 gives {1, i, -1, -i}.
            const Index quarter = 4 * j;
            if (quarter % spec.n == 0) {
                static constexpr Complex axes[] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
                out(j) = axes[(quarter / spec.n) % 4];
            } else {
                out(j) = std::polar(1.0, 2.0 * std::numbers::pi * double(j) / double(spec.n));
            }
        }
    } else {
        const auto& real = std::get<RealUniform>(spec.kind);
        std::set<double> seen;
        for (Index i = 0; i < spec.n; ++i) {
            double x = rng.uniform(real.lo, real.hi);
            while (!seen.insert(x).second) x = rng.uniform(real.lo, real.hi);
            out(i) = x;
        }
    }
    return out;
}

namespace {

void check_inputs(const DiagonalLinearRnn& rnn, const CMatrix& u) {
    if (u.rows() != rnn.input_dim())
        throw ShapeError("input " + shape_string(u) + " has " + std::to_string(u.rows()) + " rows, recurrence expects " +
                         std::to_string(rnn.input_dim()));
    if (u.cols() < 1) throw ShapeError("input sequence is empty");
}

} // namespace

HiddenTrajectory scan_sequential(const DiagonalLinearRnn& rnn, const CMatrix& u) {
    check_inputs(rnn, u);
    const CMatrix drive = rnn.b * u;
    HiddenTrajectory out{CMatrix(rnn.state_dim(), u.cols())};
    CVector x = CVector::Zero(rnn.state_dim());
    for (Index k = 0; k < u.cols(); ++k) {
        x = rnn.lambda.cwiseProduct(x) + drive.col(k);
        out.states.col(k) = x;
    }
    return out;
}

HiddenTrajectory scan_parallel(const DiagonalLinearRnn& rnn, const CMatrix& u, int jobs) {
    check_inputs(rnn, u);
    const Index n = rnn.state_dim();
    const Index len = u.cols();
    Index padded = 1;
    while (padded < len) padded *= 2;

    const CMatrix drive = rnn.b * u;
    CMatrix a(n, padded);
    CMatrix w(n, padded);
    for (Index k = 0; k < padded; ++k) {
        if (k < len) {
            a.col(k) = rnn.lambda;
            w.col(k) = drive.col(k);
        } else {
            a.col(k).setOnes();
            w.col(k).setZero();
        }
    }

    // Up-sweep: node i accumulates the span ending at i.
    for (Index d = 1; d < padded; d *= 2) {
        const Index stride = 2 * d;
        parallel_for(padded / stride, jobs, [&](std::ptrdiff_t t) {
            const Index i = t * stride + stride - 1;
            w.col(i) = a.col(i).cwiseProduct(w.col(i - d)) + w.col(i);
            a.col(i) = a.col(i - d).cwiseProduct(a.col(i));
        });
    }
    // Down-sweep to the exclusive prefix.
    a.col(padded - 1).setOnes();
    w.col(padded - 1).setZero();
    for (Index d = padded / 2; d >= 1; d /= 2) {
        const Index stride = 2 * d;
        parallel_for(padded / stride, jobs, [&](std::ptrdiff_t t) {
            const Index i = t * stride + stride - 1;
            const CVector left_a = a.col(i - d);
            const CVector left_w = w.col(i - d);
            a.col(i - d) = a.col(i);
            w.col(i - d) = w.col(i);
            // prefix o left-subtree
            w.col(i) = left_a.cwiseProduct(w.col(i)) + left_w;
            a.col(i) = a.col(i).cwiseProduct(left_a);
        });
    }

    HiddenTrajectory out{CMatrix(n, len)};
    for (Index k = 0; k < len; ++k) out.states.col(k) = rnn.lambda.cwiseProduct(w.col(k)) + drive.col(k);
    return out;
}

DiagonalLinearRnn with_time_channel(const DiagonalLinearRnn& rnn) {
    const Index n = rnn.state_dim();
    const Index h = rnn.input_dim();
    CVector lambda(n + 1);
    lambda(0) = 1.0;
    lambda.tail(n) = rnn.lambda;
    CMatrix b = CMatrix::Zero(n + 1, h + 1);
    b(0, 0) = 1.0;
    b.bottomRightCorner(n, h) = rnn.b;
    return {std::move(lambda), std::move(b)};
}

DiagonalLinearRnn block_diag_lift(const std::vector<DiagonalLinearRnn>& per_dim) {
    if (per_dim.empty()) throw ShapeError("block_diag_lift needs at least one recurrence");
    Index total = 0;
    for (const auto& r : per_dim) {
        if (r.input_dim() != 1)
            throw ShapeError("block_diag_lift expects single-input recurrences, got " + shape_string(r.b));
        total += r.state_dim();
    }
    const Index m = Index(per_dim.size());
    CVector lambda(total);
    CMatrix b = CMatrix::Zero(total, m);
    Index offset = 0;
    for (Index j = 0; j < m; ++j) {
        const auto& r = per_dim[std::size_t(j)];
        lambda.segment(offset, r.state_dim()) = r.lambda;
        b.block(offset, j, r.state_dim(), 1) = r.b;
        offset += r.state_dim();
    }
    return {std::move(lambda), std::move(b)};
}

RMatrix memory_profile(const CVector& lambda, Index length) {
    if (length < 1) throw DomainError("memory_profile needs length >= 1");
    RMatrix out(lambda.size(), length);
    for (Index i = 0; i < lambda.size(); ++i) {
        const double mag = std::abs(lambda(i));
        for (Index j = 0; j < length; ++j) out(i, j) = std::pow(mag, double(j));
    }
    return out;
}

} // namespace lrnn
