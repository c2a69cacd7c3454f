#include "lrnn/numerics.hpp"

namespace lrnn {

std::string shape_string(Index rows, Index cols) {
    return "(" + std::to_string(rows) + "x" + std::to_string(cols) + ")";
}

CMatrix cmatrix_from_rows(Index rows, Index cols, std::span<const Complex> entries) {
    if (rows < 0 || cols < 0 || static_cast<std::size_t>(rows * cols) != entries.size())
        throw ShapeError("cmatrix_from_rows: " + std::to_string(entries.size()) + " entries for shape " +
                         shape_string(rows, cols));
    CMatrix m(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) {
            const Complex z = entries[static_cast<std::size_t>(i * cols + j)];
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
                throw DomainError("cmatrix_from_rows: non-finite entry at (" + std::to_string(i) + ", " +
                                  std::to_string(j) + ")");
            m(i, j) = z;
        }
    return m;
}

CMatrix matmul(const CMatrix& a, const CMatrix& b, ProductKind kind) {
    const bool adj = kind == ProductKind::adjoint_product;
    const Index inner_a = adj ? a.rows() : a.cols();
    if (inner_a != b.rows())
        throw ShapeError(std::string(adj ? "adjoint-product" : "product") + ": shapes " + shape_string(a) + " and " +
                         shape_string(b) + " do not conform");
    const Index rows = adj ? a.cols() : a.rows();
    CMatrix out(rows, b.cols());
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < b.cols(); ++j) {
            Complex acc{0.0, 0.0};
            for (Index k = 0; k < inner_a; ++k) acc += (adj ? std::conj(a(k, i)) : a(i, k)) * b(k, j);
            out(i, j) = acc;
        }
    return out;
}

} // namespace lrnn
