#include "doctest.h"

#include "lrnn/numerics.hpp"
#include "test_util.hpp"

using namespace lrnn;
using lrnn::test::random_cmatrix;

namespace {

CMatrix naive_product(const CMatrix& a, const CMatrix& b) {
    CMatrix c = CMatrix::Zero(a.rows(), b.cols());
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < b.cols(); ++j)
            for (Index k = 0; k < a.cols(); ++k) c(i, j) += a(i, k) * b(k, j);
    return c;
}

template <typename S>
double reconstruction_residual(const CMatrix& a, const SvdResult<S>& s) {
    return (a - s.u * s.sigma.asDiagonal() * s.v.adjoint()).norm() / a.norm();
}

} // namespace

TEST_CASE("matmul") {
    Rng rng(7);
    SUBCASE("identity times A") {
        const CMatrix a = random_cmatrix(2, 3, rng);
        CHECK(matmul(CMatrix::Identity(2, 2), a) == a);
    }
    SUBCASE("adjoint product of [[i]] with itself") {
        CMatrix a(1, 1);
        a(0, 0) = Complex(0, 1);
        const CMatrix p = matmul(a, a, ProductKind::adjoint_product);
        CHECK(p(0, 0) == Complex(1, 0));
    }
    SUBCASE("random 3x4 times 4x2 matches the triple loop") {
        const CMatrix a = random_cmatrix(3, 4, rng);
        const CMatrix b = random_cmatrix(4, 2, rng);
        CHECK(test::max_rel_diff(matmul(a, b), naive_product(a, b)) <= 1e-15);
        CHECK(test::max_rel_diff(matmul(a.adjoint(), b, ProductKind::adjoint_product), naive_product(a, b)) <= 1e-15);
    }
    SUBCASE("shape mismatch names both shapes") {
        const CMatrix a = random_cmatrix(3, 4, rng);
        try {
            (void)matmul(a, a);
            FAIL("expected ShapeError");
        } catch (const ShapeError& e) {
            const std::string msg = e.what();
            CHECK(msg.find("(3x4)") != std::string::npos);
        }
    }
}

TEST_CASE("cmatrix_from_rows validates") {
    const std::vector<Complex> entries{{1, 0}, {2, 0}, {3, 0}, {4, 0}};
    const CMatrix m = cmatrix_from_rows(2, 2, entries);
    CHECK(m(0, 1) == Complex(2, 0));
    CHECK(m(1, 0) == Complex(3, 0));
    CHECK_THROWS_AS(cmatrix_from_rows(3, 2, entries), ShapeError);
    std::vector<Complex> bad = entries;
    bad[2] = Complex(std::nan(""), 0);
    CHECK_THROWS_AS(cmatrix_from_rows(2, 2, bad), DomainError);
}

TEST_CASE("svd") {
    SUBCASE("identity") {
        const auto s = svd(CMatrix(CMatrix::Identity(2, 2)));
        CHECK(s.sigma(0) == doctest::Approx(1.0));
        CHECK(s.sigma(1) == doctest::Approx(1.0));
    }
    SUBCASE("diag(3i, 4)") {
        CMatrix a = CMatrix::Zero(2, 2);
        a(0, 0) = Complex(0, 3);
        a(1, 1) = 4.0;
        const auto s = svd(a);
        CHECK(s.sigma(0) == doctest::Approx(4.0).epsilon(1e-15));
        CHECK(s.sigma(1) == doctest::Approx(3.0).epsilon(1e-15));
    }
    SUBCASE("random 6x4 against the Gram eigenvalue oracle") {
        Rng rng(11);
        const CMatrix a = random_cmatrix(6, 4, rng);
        const auto s = svd(a);
        CHECK(reconstruction_residual(a, s) <= 1e-10);
        CHECK((s.u.adjoint() * s.u - CMatrix::Identity(4, 4)).cwiseAbs().maxCoeff() <= 1e-10);
        CHECK((s.v.adjoint() * s.v - CMatrix::Identity(4, 4)).cwiseAbs().maxCoeff() <= 1e-10);

        Eigen::SelfAdjointEigenSolver<CMatrix> eig(a.adjoint() * a);
        REQUIRE(condition_number(a) < 1e3);
        for (Index k = 0; k < 4; ++k)
            CHECK(s.sigma(k) == doctest::Approx(std::sqrt(eig.eigenvalues()(3 - k))).epsilon(1e-8));
    }
    SUBCASE("wide, real and rank-deficient inputs keep the invariants") {
        Rng rng(3);
        const CMatrix wide = random_cmatrix(3, 7, rng);
        const auto sw = svd(wide);
        CHECK(sw.u.rows() == 3);
        CHECK(sw.v.rows() == 7);
        CHECK(reconstruction_residual(wide, sw) <= 1e-10);

        const RMatrix real = test::random_rmatrix(5, 3, rng);
        const auto sr = svd(real);
        CHECK((real - sr.u * sr.sigma.asDiagonal() * sr.v.transpose()).norm() <= 1e-10 * real.norm());

        CMatrix deficient = random_cmatrix(5, 4, rng);
        deficient.col(3) = deficient.col(0) * Complex(2, -1);
        deficient.col(2).setZero();
        const auto sd = svd(deficient);
        CHECK(reconstruction_residual(deficient, sd) <= 1e-10);
        CHECK((sd.u.adjoint() * sd.u - CMatrix::Identity(4, 4)).cwiseAbs().maxCoeff() <= 1e-10);
        CHECK(sd.sigma(3) == 0.0);
    }
    SUBCASE("sigma descending and non-negative on random shapes") {
        Rng rng(5);
        for (int trial = 0; trial < 20; ++trial) {
            const Index m = 1 + Index(rng.below(9));
            const Index n = 1 + Index(rng.below(9));
            const CMatrix a = random_cmatrix(m, n, rng);
            const auto s = svd(a);
            for (Index k = 0; k < s.sigma.size(); ++k) {
                CHECK(s.sigma(k) >= 0.0);
                if (k > 0) CHECK(s.sigma(k) <= s.sigma(k - 1));
            }
            CHECK(reconstruction_residual(a, s) <= 1e-10);
        }
    }
    SUBCASE("empty matrix is rejected") { CHECK_THROWS_AS(svd(CMatrix(0, 3)), ShapeError); }
    SUBCASE("sweep limit raises a numerical error carrying the residual") {
        Rng rng(9);
        const CMatrix a = random_cmatrix(8, 8, rng);
        try {
            (void)svd(a, SvdOptions{1e-12, 1});
            FAIL("expected NumericalError");
        } catch (const NumericalError& e) {
            CHECK(e.residual() > 1e-12);
        }
    }
}

TEST_CASE("condition_number") {
    CHECK(condition_number(CMatrix(CMatrix::Identity(5, 5))) == doctest::Approx(1.0));
    CMatrix d = CMatrix::Zero(2, 2);
    d(0, 0) = 2.0;
    d(1, 1) = 1.0;
    CHECK(condition_number(d) == doctest::Approx(2.0));
    CHECK_THROWS_AS(condition_number(CMatrix(CMatrix::Zero(3, 3))), DomainError);

    CMatrix singular = CMatrix::Ones(3, 3);
    CHECK(std::isinf(condition_number(singular)));

    // scale invariance
    Rng rng(21);
    for (int trial = 0; trial < 5; ++trial) {
        const CMatrix a = random_cmatrix(6, 5, rng);
        const Complex c(rng.normal() * 10.0, rng.normal());
        const double base = condition_number(a);
        CHECK(std::abs(condition_number(CMatrix(c * a)) - base) <= 1e-10 * base);
    }
}

TEST_CASE("pseudoinverse") {
    Rng rng(31);
    SUBCASE("invertible square") {
        const CMatrix a = random_cmatrix(5, 5, rng);
        const CMatrix p = pseudoinverse(a);
        CHECK((p * a - CMatrix::Identity(5, 5)).cwiseAbs().maxCoeff() <= 1e-9);
    }
    SUBCASE("zero matrix") {
        const CMatrix p = pseudoinverse(CMatrix(CMatrix::Zero(2, 3)));
        CHECK(p.rows() == 3);
        CHECK(p.cols() == 2);
        CHECK(p.isZero(0.0));
    }
    SUBCASE("rank-1 2x2") {
        CMatrix a(2, 2);
        a << Complex(1, 0), Complex(2, 0), Complex(2, 0), Complex(4, 0);
        const CMatrix p = pseudoinverse(a);
        CHECK((a * p * a - a).cwiseAbs().maxCoeff() <= 1e-10);
        // For a = x y^H the pseudoinverse is y x^H / (|x|^2 |y|^2).
        const CMatrix expected = a.adjoint() / 25.0;
        CHECK((p - expected).cwiseAbs().maxCoeff() <= 1e-12);
    }
    SUBCASE("Moore-Penrose identities on random full-rank instances") {
        for (Index size : {2, 7, 16, 64}) {
            const Index m = size;
            const Index n = std::max<Index>(1, size - 1 - Index(rng.below(2)));
            const CMatrix a = random_cmatrix(m, n, rng);
            const CMatrix p = pseudoinverse(a);
            CHECK((a * p * a - a).cwiseAbs().maxCoeff() <= 1e-9);
            CHECK((p * a * p - p).cwiseAbs().maxCoeff() <= 1e-9);
            const CMatrix ap = a * p;
            const CMatrix pa = p * a;
            CHECK((ap - ap.adjoint()).cwiseAbs().maxCoeff() <= 1e-9);
            CHECK((pa - pa.adjoint()).cwiseAbs().maxCoeff() <= 1e-9);
        }
    }
}

TEST_CASE("lstsq") {
    Rng rng(41);
    SUBCASE("identity") {
        const CMatrix b = random_cmatrix(4, 2, rng);
        CHECK((lstsq(CMatrix(CMatrix::Identity(4, 4)), b) - b).cwiseAbs().maxCoeff() <= 1e-14);
    }
    SUBCASE("overdetermined consistent") {
        const CMatrix a = random_cmatrix(9, 4, rng);
        const CMatrix x = random_cmatrix(4, 1, rng);
        const CMatrix b = a * x;
        CHECK((lstsq(a, b) - x).cwiseAbs().maxCoeff() <= 1e-10);
    }
    SUBCASE("inconsistent system satisfies the normal equations") {
        const CMatrix a = random_cmatrix(10, 3, rng);
        const CMatrix b = random_cmatrix(10, 1, rng);
        const CMatrix x = lstsq(a, b);
        CHECK((a.adjoint() * (a * x - b)).cwiseAbs().maxCoeff() <= 1e-9);
    }
    SUBCASE("row mismatch") { CHECK_THROWS_AS(lstsq(random_cmatrix(3, 2, rng), random_cmatrix(4, 1, rng)), ShapeError); }
}
