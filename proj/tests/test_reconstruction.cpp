#include "doctest.h"

#include "lrnn/reconstruction.hpp"
#include "test_util.hpp"

using namespace lrnn;

namespace {

Complex vandermonde_product(const CVector& l) {
    Complex p{1.0, 0.0};
    for (Index i = 0; i < l.size(); ++i)
        for (Index j = i + 1; j < l.size(); ++j) p *= l(i) - l(j);
    return p;
}

// Haar analysis matrix built by recursive averaging and differencing; its
// rows, in order, are the basis functions from coarse to fine.
RMatrix recursive_haar(Index n) {
    if (n == 1) return RMatrix::Ones(1, 1);
    const RMatrix coarse = recursive_haar(n / 2);
    RMatrix out(n, n);
    for (Index i = 0; i < n / 2; ++i)
        for (Index j = 0; j < n / 2; ++j) {
            out(i, 2 * j) = coarse(i, j) / std::sqrt(2.0);
            out(i, 2 * j + 1) = coarse(i, j) / std::sqrt(2.0);
        }
    out.bottomRows(n / 2).setZero();
    for (Index i = 0; i < n / 2; ++i) {
        out(n / 2 + i, 2 * i) = 1.0 / std::sqrt(2.0);
        out(n / 2 + i, 2 * i + 1) = -1.0 / std::sqrt(2.0);
    }
    return out;
}

CVector ring(Index n, double r_min, std::uint64_t seed) {
    Rng rng(seed);
    return init_eigenvalues({Ring{r_min, 1.0}, n}, rng);
}

} // namespace

TEST_CASE("build_vandermonde") {
    CVector l(2);
    l << 2.0, 3.0;
    const auto v = build_vandermonde(l, 2);
    CHECK(v.matrix == (CMatrix(2, 2) << 2, 1, 3, 1).finished());
    CHECK(v.horizon == 2);

    Rng rng(2);
    const CVector any = test::random_cmatrix(5, 1, rng);
    CHECK(build_vandermonde(any, 1).matrix == CMatrix::Ones(5, 1));
    CHECK_THROWS_AS(build_vandermonde(any, 0), DomainError);

    SUBCASE("entries are the stated powers") {
        const auto w = build_vandermonde(any, 6);
        for (Index i = 0; i < 5; ++i)
            for (Index j = 0; j < 6; ++j)
                CHECK(std::abs(w.matrix(i, j) - std::pow(any(i), double(5 - j))) <= 1e-13 * std::abs(w.matrix(i, j)));
    }
    SUBCASE("determinant matches the product formula up to sign") {
        for (Index n = 2; n <= 8; ++n) {
            const CVector nodes = ring(n, 0.3, 100 + std::uint64_t(n));
            const Complex det = build_vandermonde(nodes, n).matrix.determinant();
            const Complex prod = vandermonde_product(nodes);
            const double err = std::min(std::abs(det - prod), std::abs(det + prod)) / std::abs(prod);
            CHECK(err <= (n == 3 ? 1e-10 : 1e-9));
        }
    }
    SUBCASE("full column rank for distinct nodes with N >= k") {
        const CVector nodes = ring(12, 0.5, 3);
        CHECK(svd(build_vandermonde(nodes, 9).matrix).sigma(8) > 0.0);
    }
}

TEST_CASE("haar_basis") {
    const auto small = haar_basis(2, 2);
    const double h = 1.0 / std::sqrt(2.0);
    CHECK(small.psi.isApprox((RMatrix(2, 2) << h, h, h, -h).finished(), 1e-15));
    CHECK(small.family == BasisFamily::haar);

    for (Index len : {1, 4, 16, 64, 1024})
        for (Index p : {Index(1), len / 2 + 1, len}) {
            if (p > len || p < 1) continue;
            const auto b = haar_basis(len, p);
            CHECK((b.psi.transpose() * b.psi - RMatrix::Identity(p, p)).cwiseAbs().maxCoeff() <= 1e-12);
        }

    const RMatrix oracle = recursive_haar(8).topRows(4).transpose();
    CHECK((haar_basis(8, 4).psi - oracle).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK((haar_basis(8, 8).psi - recursive_haar(8).transpose()).cwiseAbs().maxCoeff() <= 1e-15);

    CHECK_THROWS_AS(haar_basis(12, 2), DomainError);
    CHECK_THROWS_AS(haar_basis(8, 9), DomainError);
}

TEST_CASE("reconstruct_full") {
    Rng rng(17);
    SUBCASE("roots of unity recover exactly") {
        const CVector l = init_eigenvalues({RootsOfUnity{}, 8}, rng);
        const RMatrix u = test::random_rmatrix(1, 8, rng);
        const CVector x = scan_sequential(ones_input_rnn(l), u).last();
        const auto rec = reconstruct_full(x, l, 8);
        CHECK(test::max_rel_diff(rec.inputs, CVector(u.transpose().cast<Complex>())) <= 1e-10);
        CHECK(rec.condition == doctest::Approx(1.0).epsilon(1e-8));
        CHECK_FALSE(rec.warning.has_value());
    }
    SUBCASE("zero input gives zero") {
        const CVector l = ring(10, 0.5, 5);
        const auto rec = reconstruct_full(CVector::Zero(10), l, 6);
        CHECK(rec.inputs.isZero(0.0));
    }
    SUBCASE("near-circle ring recovers the whole sequence, full disk only the recent past") {
        const Index len = 128;
        const RMatrix u = test::random_rmatrix(1, len, rng);
        const CVector target = u.transpose().cast<Complex>();

        const CVector near = ring(2 * len, 0.99, 23);
        const auto good = reconstruct_full(scan_sequential(ones_input_rnn(near), u).last(), near, len);
        CHECK((good.inputs - target).norm() / target.norm() <= 1e-6);

        const CVector disk = ring(2 * len, 0.0, 23);
        const auto bad = reconstruct_full(scan_sequential(ones_input_rnn(disk), u).last(), disk, len);
        CHECK(bad.warning.has_value());
        CHECK((bad.inputs.tail(8) - target.tail(8)).norm() / target.tail(8).norm() <= 1e-6);
        CHECK((bad.inputs.head(16) - target.head(16)).norm() / target.head(16).norm() >= 1e-2);
    }
    SUBCASE("round trip with roots of unity for N >= L") {
        for (Index len : {3, 16, 40}) {
            const CVector l = init_eigenvalues({RootsOfUnity{}, len + 5}, rng);
            const CMatrix u = test::random_cmatrix(1, len, rng);
            const auto rec = reconstruct_full(scan_sequential(ones_input_rnn(l), u).last(), l, len);
            CHECK(test::max_rel_diff(rec.inputs, CVector(u.transpose())) <= 1e-8);
        }
    }
    SUBCASE("state length mismatch") { CHECK_THROWS_AS(reconstruct_full(CVector::Zero(3), ring(4, 0.5, 1), 2), ShapeError); }
}

TEST_CASE("reconstruct_sparse") {
    Rng rng(19);
    SUBCASE("constant input on a one-dimensional basis") {
        const Index len = 16;
        SparseBasis basis{RMatrix::Constant(len, 1, 1.0 / std::sqrt(double(len))), BasisFamily::user};
        const CVector l = ring(4, 0.5, 2);
        const double c = 0.75;
        const RMatrix u = RMatrix::Constant(1, len, c);
        const auto rec = reconstruct_sparse(scan_sequential(ones_input_rnn(l), u).last(), l, basis, len);
        CHECK(std::abs(rec.alpha(0) - c * std::sqrt(double(len))) <= 1e-12);
        CHECK((rec.inputs.array() - c).abs().maxCoeff() <= 1e-12);
        CHECK_FALSE(rec.warning.has_value());
    }
    SUBCASE("exactly sparse signals are recovered coefficient-wise") {
        // The state is formed as Gamma alpha so only the solver's error is measured.
        int checked = 0;
        for (int trial = 0; trial < 20; ++trial) {
            const Index len = Index(64) << rng.below(3);
            const Index p = 4 + Index(rng.below(13));
            const auto basis = haar_basis(len, p);
            const CVector l = ring(2 * p + Index(rng.below(8)), 0.6 + 0.39 * rng.uniform(), 40 + std::uint64_t(trial));
            const RVector alpha = test::random_rmatrix(p, 1, rng);
            const CMatrix gamma = build_vandermonde(l, len).matrix * basis.psi.cast<Complex>();
            const auto s = svd(gamma);
            if (s.sigma(p - 1) <= 1e-6 * s.sigma(0)) continue;
            ++checked;
            const CVector x = gamma * alpha.cast<Complex>();
            const auto rec = reconstruct_sparse(x, l, basis, len);
            CHECK((rec.alpha - alpha.cast<Complex>()).cwiseAbs().maxCoeff() <= 1e-8);
        }
        CHECK(checked >= 5);
    }
    SUBCASE("rank deficiency is reported") {
        const auto basis = haar_basis(64, 16);
        const CVector l = ring(4, 0.9, 3);
        const auto rec = reconstruct_sparse(CVector::Ones(4), l, basis, 64);
        REQUIRE(rec.warning.has_value());
        CHECK(rec.warning->rank <= 4);
        CHECK(rec.warning->expected == 16);
    }
    SUBCASE("32 Haar functions over 4096 samples") {
        const Index len = 4096;
        const auto basis = haar_basis(len, 32);
        const RVector alpha = test::random_rmatrix(32, 1, rng);
        const RMatrix v = (basis.psi * alpha).transpose();
        const CVector target = v.transpose().cast<Complex>();
        auto terminal_error = [&](double r_min, Index n) {
            const CVector l = ring(n, r_min, 77);
            const auto rec = reconstruct_sparse(scan_sequential(ones_input_rnn(l), v).last(), l, basis, len);
            return (rec.inputs - target).norm() / target.norm();
        };
        CHECK(terminal_error(0.99, 64) <= 1e-6);
        // Further from the circle, 64 states lose the oldest coefficients and about 256 are needed.
        CHECK(terminal_error(0.95, 64) >= 1e-2);
        CHECK(terminal_error(0.95, 256) <= 1e-3);

        // Intermediate horizons from the same recurrence.
        const CVector l = ring(64, 0.99, 78);
        const CMatrix x = scan_sequential(ones_input_rnn(l), v).states;
        for (Index k : {512, 1024, 2048, 3000}) {
            const auto rec = reconstruct_sparse(x.col(k - 1), l, basis, k);
            CHECK((rec.inputs - target.head(k)).norm() / target.head(k).norm() <= 1e-6);
        }
    }
}

TEST_CASE("conditioning_sweep") {
    SUBCASE("median log10 cond falls as r_min grows") {
        SweepConfig cfg;
        cfg.length = 64;
        cfg.state_dim = 128;
        cfg.r_grid = {0.0, 0.4, 0.8, 0.99};
        cfg.seeds = {1, 2, 3};
        const auto rows = conditioning_sweep(cfg);
        CHECK(rows.size() == 12);
        double prev = 1e9;
        for (double r : cfg.r_grid) {
            const double m = median_log10_cond(rows, r);
            CHECK(m < prev);
            prev = m;
        }
    }
    SUBCASE("roots of unity have unit condition number") {
        SweepConfig cfg;
        cfg.init = SweepInit::roots_of_unity;
        cfg.length = 64;
        cfg.state_dim = 64;
        cfg.r_grid = {1.0};
        cfg.seeds = {1};
        const auto rows = conditioning_sweep(cfg);
        REQUIRE(rows.size() == 1);
        CHECK(std::abs(rows[0].log10_cond) <= 1e-6);
    }
    SUBCASE("omega mode improves with r_min and with fewer basis functions") {
        SweepConfig cfg;
        cfg.mode = SweepMode::omega;
        cfg.length = 512;
        cfg.state_dim = 256;
        cfg.r_grid = {0.5, 0.9, 0.99};
        cfg.p_grid = {8, 32, 128};
        cfg.seeds = {1, 2, 3, 4, 5};
        const auto rows = conditioning_sweep(cfg);
        CHECK(rows.size() == 45);
        for (Index p : cfg.p_grid) {
            CHECK(median_log10_cond(rows, 0.5, p) > median_log10_cond(rows, 0.9, p));
            CHECK(median_log10_cond(rows, 0.9, p) > median_log10_cond(rows, 0.99, p));
        }
        for (double r : cfg.r_grid) {
            CHECK(median_log10_cond(rows, r, 8) < median_log10_cond(rows, r, 32));
            CHECK(median_log10_cond(rows, r, 32) < median_log10_cond(rows, r, 128));
        }
    }
    SUBCASE("job count does not change rows") {
        SweepConfig cfg;
        cfg.length = 16;
        cfg.state_dim = 32;
        cfg.r_grid = {0.0, 0.5};
        cfg.seeds = {4, 5};
        const auto a = conditioning_sweep(cfg);
        cfg.jobs = 3;
        const auto b = conditioning_sweep(cfg);
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].log10_cond == b[i].log10_cond);
    }
    SUBCASE("empty grids are rejected") {
        SweepConfig cfg;
        cfg.seeds = {1};
        CHECK_THROWS_AS(conditioning_sweep(cfg), std::invalid_argument);
    }
}

TEST_CASE("reconstruction_error_profile") {
    Rng rng(29);
    const Index len = 32;
    const RMatrix inputs = test::random_rmatrix(20, len, rng);
    SUBCASE("exact regime") {
        const CVector l = init_eigenvalues({RootsOfUnity{}, len}, rng);
        const RVector mse = reconstruction_error_profile(l, inputs, ReconstructionMode::full);
        CHECK(mse.maxCoeff() <= 1e-8);
    }
    SUBCASE("sparse mode on sparse data") {
        const auto basis = haar_basis(len, 4);
        const RMatrix sparse = test::random_rmatrix(10, 4, rng) * basis.psi.transpose();
        const CVector l = ring(8, 0.9, 8);
        const RVector mse = reconstruction_error_profile(l, sparse, ReconstructionMode::sparse, &basis);
        CHECK(mse.maxCoeff() <= 1e-12);
        CHECK_THROWS_AS(reconstruction_error_profile(l, sparse, ReconstructionMode::sparse), std::invalid_argument);
    }
}
