#pragma once

// Finite-dimensional W*-algebras as direct sums of full matrix blocks
// M_{n1}(C) + ... + M_{nK}(C), and their elements.

#include <algorithm>
#include <cmath>
#include <tuple>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"

namespace ncp {

class AlgebraShape {
public:
    /// Throws InvalidShape on an empty list or a non-positive block size.
    explicit AlgebraShape(std::vector<Index> dims) : dims_(std::move(dims)) {
        if (dims_.empty()) throw InvalidShape("algebra shape must have at least one block");
        offsets_.reserve(dims_.size());
        row_offsets_.reserve(dims_.size());
        for (std::size_t k = 0; k < dims_.size(); ++k) {
            if (dims_[k] < 1) {
                throw InvalidShape("block " + std::to_string(k) + " has dimension " +
                                   std::to_string(dims_[k]) + " (must be >= 1)");
            }
            offsets_.push_back(element_dim_);
            row_offsets_.push_back(matrix_dim_);
            element_dim_ += dims_[k] * dims_[k];
            matrix_dim_ += dims_[k];
        }
    }

    /// Abelian shape [1, ..., 1] with n blocks (classical outcome space of size n).
    static AlgebraShape abelian(Index n) { return AlgebraShape(std::vector<Index>(static_cast<std::size_t>(n), 1)); }

    const std::vector<Index>& blocks() const noexcept { return dims_; }
    std::size_t num_blocks() const noexcept { return dims_.size(); }
    Index block_dim(std::size_t k) const { return dims_.at(k); }

    /// Complex dimension of the algebra, sum of n_k^2.
    Index element_dim() const noexcept { return element_dim_; }
    /// Size N = sum of n_k of the enveloping full matrix algebra M_N.
    Index matrix_dim() const noexcept { return matrix_dim_; }

    /// Offset of block k in the element coordinate vector.
    Index offset(std::size_t k) const { return offsets_.at(k); }
    /// Offset of block k along the diagonal of M_N.
    Index row_offset(std::size_t k) const { return row_offsets_.at(k); }

    /// Coordinate of the matrix unit e_ij of block k (row-major within block).
    Index coordinate(std::size_t k, Index i, Index j) const { return offsets_[k] + i * dims_[k] + j; }

    /// Inverse of coordinate(): (block, row, column).
    std::tuple<std::size_t, Index, Index> locate(Index c) const {
        if (c < 0 || c >= element_dim_) throw ShapeMismatch("coordinate out of range");
        const auto it = std::upper_bound(offsets_.begin(), offsets_.end(), c);
        const std::size_t k = static_cast<std::size_t>(it - offsets_.begin()) - 1;
        const Index local = c - offsets_[k];
        return {k, local / dims_[k], local % dims_[k]};
    }

    bool is_abelian() const noexcept {
        for (Index d : dims_)
            if (d != 1) return false;
        return true;
    }

    friend bool operator==(const AlgebraShape& a, const AlgebraShape& b) { return a.dims_ == b.dims_; }
    friend bool operator!=(const AlgebraShape& a, const AlgebraShape& b) { return !(a == b); }

    std::string to_string() const {
        std::ostringstream os;
        os << '[';
        for (std::size_t k = 0; k < dims_.size(); ++k) os << (k ? "," : "") << dims_[k];
        os << ']';
        return os.str();
    }

private:
    std::vector<Index> dims_;
    std::vector<Index> offsets_;
    std::vector<Index> row_offsets_;
    Index element_dim_ = 0;
    Index matrix_dim_ = 0;
};

inline AlgebraShape mk_shape(std::vector<Index> dims) { return AlgebraShape(std::move(dims)); }

inline void require_same_shape(const AlgebraShape& a, const AlgebraShape& b, const char* where) {
    if (a != b) {
        throw ShapeMismatch(std::string(where) + ": shape " + a.to_string() + " vs " + b.to_string());
    }
}

/// An element of a block algebra: one complex n_k x n_k matrix per block.
class AlgebraElement {
public:
    AlgebraElement(AlgebraShape shape, std::vector<CMatrix> blocks)
        : shape_(std::move(shape)), blocks_(std::move(blocks)) {
        if (blocks_.size() != shape_.num_blocks()) {
            throw ShapeMismatch("element has " + std::to_string(blocks_.size()) + " blocks, shape " +
                                shape_.to_string() + " expects " + std::to_string(shape_.num_blocks()));
        }
        for (std::size_t k = 0; k < blocks_.size(); ++k) {
            const Index n = shape_.block_dim(k);
            if (blocks_[k].rows() != n || blocks_[k].cols() != n) {
                throw ShapeMismatch("block " + std::to_string(k) + " is " + std::to_string(blocks_[k].rows()) +
                                    "x" + std::to_string(blocks_[k].cols()) + ", expected " +
                                    std::to_string(n) + "x" + std::to_string(n));
            }
        }
    }

    static AlgebraElement zero(const AlgebraShape& shape) {
        std::vector<CMatrix> b;
        b.reserve(shape.num_blocks());
        for (Index n : shape.blocks()) b.push_back(CMatrix::Zero(n, n));
        return {shape, std::move(b)};
    }

    static AlgebraElement identity(const AlgebraShape& shape) {
        std::vector<CMatrix> b;
        b.reserve(shape.num_blocks());
        for (Index n : shape.blocks()) b.push_back(CMatrix::Identity(n, n));
        return {shape, std::move(b)};
    }

    static AlgebraElement matrix_unit(const AlgebraShape& shape, std::size_t k, Index i, Index j) {
        AlgebraElement e = zero(shape);
        e.blocks_.at(k)(i, j) = 1.0;
        return e;
    }

    /// Inverse of coords(): block-major, row-major within each block.
    static AlgebraElement from_coords(const AlgebraShape& shape, const CVector& c) {
        if (c.size() != shape.element_dim()) {
            throw ShapeMismatch("coordinate vector of length " + std::to_string(c.size()) + " for shape " +
                                shape.to_string());
        }
        std::vector<CMatrix> b;
        b.reserve(shape.num_blocks());
        for (std::size_t k = 0; k < shape.num_blocks(); ++k) {
            const Index n = shape.block_dim(k);
            CMatrix m(n, n);
            for (Index i = 0; i < n; ++i)
                for (Index j = 0; j < n; ++j) m(i, j) = c(shape.coordinate(k, i, j));
            b.push_back(std::move(m));
        }
        return {shape, std::move(b)};
    }

    /// Block-diagonal element built from a full N x N matrix, discarding
    /// off-block entries (the conditional expectation onto the algebra).
    static AlgebraElement from_full_matrix(const AlgebraShape& shape, const CMatrix& m) {
        std::vector<CMatrix> b;
        b.reserve(shape.num_blocks());
        for (std::size_t k = 0; k < shape.num_blocks(); ++k) {
            const Index r = shape.row_offset(k), n = shape.block_dim(k);
            b.push_back(m.block(r, r, n, n));
        }
        return {shape, std::move(b)};
    }

    const AlgebraShape& shape() const noexcept { return shape_; }
    const CMatrix& block(std::size_t k) const { return blocks_.at(k); }
    CMatrix& block(std::size_t k) { return blocks_.at(k); }
    const std::vector<CMatrix>& blocks() const noexcept { return blocks_; }

    CVector coords() const {
        CVector c(shape_.element_dim());
        for (std::size_t k = 0; k < blocks_.size(); ++k) {
            const Index n = shape_.block_dim(k);
            for (Index i = 0; i < n; ++i)
                for (Index j = 0; j < n; ++j) c(shape_.coordinate(k, i, j)) = blocks_[k](i, j);
        }
        return c;
    }

    CMatrix full_matrix() const {
        const Index N = shape_.matrix_dim();
        CMatrix m = CMatrix::Zero(N, N);
        for (std::size_t k = 0; k < blocks_.size(); ++k) {
            const Index r = shape_.row_offset(k);
            m.block(r, r, blocks_[k].rows(), blocks_[k].cols()) = blocks_[k];
        }
        return m;
    }

    AlgebraElement adjoint() const {
        std::vector<CMatrix> b;
        b.reserve(blocks_.size());
        for (const auto& m : blocks_) b.push_back(m.adjoint());
        return {shape_, std::move(b)};
    }

    AlgebraElement transpose() const {
        std::vector<CMatrix> b;
        b.reserve(blocks_.size());
        for (const auto& m : blocks_) b.push_back(m.transpose());
        return {shape_, std::move(b)};
    }

    /// Sum over blocks of Tr(a_k).
    cplx trace() const {
        cplx t = 0.0;
        for (const auto& m : blocks_) t += m.trace();
        return t;
    }

    /// Hilbert-Schmidt norm (sum_k Tr(a_k^* a_k))^{1/2}.
    double hs_norm() const {
        double s = 0.0;
        for (const auto& m : blocks_) s += m.squaredNorm();
        return std::sqrt(s);
    }

    bool is_hermitian(double tol = 1e-10) const {
        for (const auto& m : blocks_)
            if ((m - m.adjoint()).norm() > tol) return false;
        return true;
    }

    /// Hermitian within tol and every block has min eigenvalue >= -tol.
    bool is_positive(double tol = 1e-10) const {
        if (!is_hermitian(tol)) return false;
        for (const auto& m : blocks_)
            if (min_hermitian_eigenvalue(m) < -tol) return false;
        return true;
    }

    AlgebraElement& operator+=(const AlgebraElement& o) {
        require_same_shape(shape_, o.shape_, "add");
        for (std::size_t k = 0; k < blocks_.size(); ++k) blocks_[k] += o.blocks_[k];
        return *this;
    }

    AlgebraElement& operator-=(const AlgebraElement& o) {
        require_same_shape(shape_, o.shape_, "subtract");
        for (std::size_t k = 0; k < blocks_.size(); ++k) blocks_[k] -= o.blocks_[k];
        return *this;
    }

    AlgebraElement& operator*=(cplx s) {
        for (auto& m : blocks_) m *= s;
        return *this;
    }

    friend AlgebraElement operator+(AlgebraElement a, const AlgebraElement& b) { return a += b; }
    friend AlgebraElement operator-(AlgebraElement a, const AlgebraElement& b) { return a -= b; }
    friend AlgebraElement operator*(cplx s, AlgebraElement a) { return a *= s; }
    friend AlgebraElement operator*(AlgebraElement a, cplx s) { return a *= s; }

    friend AlgebraElement operator*(const AlgebraElement& a, const AlgebraElement& b) {
        require_same_shape(a.shape_, b.shape_, "multiply");
        std::vector<CMatrix> out;
        out.reserve(a.blocks_.size());
        for (std::size_t k = 0; k < a.blocks_.size(); ++k) out.push_back(a.blocks_[k] * b.blocks_[k]);
        return {a.shape_, std::move(out)};
    }

private:
    AlgebraShape shape_;
    std::vector<CMatrix> blocks_;
};

inline AlgebraElement identity(const AlgebraShape& shape) { return AlgebraElement::identity(shape); }
inline AlgebraElement multiply(const AlgebraElement& a, const AlgebraElement& b) { return a * b; }
inline AlgebraElement adjoint(const AlgebraElement& a) { return a.adjoint(); }
inline cplx trace_functional(const AlgebraElement& a) { return a.trace(); }
inline bool is_positive(const AlgebraElement& a, double tol = 1e-10) { return a.is_positive(tol); }

inline AlgebraElement commutator(const AlgebraElement& a, const AlgebraElement& b) { return a * b - b * a; }

/// Matrix-unit basis, block-major then row-major; sum of n_k^2 elements.
inline std::vector<AlgebraElement> basis(const AlgebraShape& shape) {
    std::vector<AlgebraElement> out;
    out.reserve(static_cast<std::size_t>(shape.element_dim()));
    for (std::size_t k = 0; k < shape.num_blocks(); ++k) {
        const Index n = shape.block_dim(k);
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < n; ++j) out.push_back(AlgebraElement::matrix_unit(shape, k, i, j));
    }
    return out;
}

/// Real basis of the self-adjoint part: per block, e_ii, then for i < j the
/// pairs e_ij + e_ji and i(e_ij - e_ji). Columns are element coordinates.
inline SparseC self_adjoint_basis_coords(const AlgebraShape& shape) {
    std::vector<TripletC> trips;
    Index col = 0;
    for (std::size_t k = 0; k < shape.num_blocks(); ++k) {
        const Index n = shape.block_dim(k);
        for (Index i = 0; i < n; ++i) trips.emplace_back(shape.coordinate(k, i, i), col++, 1.0);
        for (Index i = 0; i < n; ++i) {
            for (Index j = i + 1; j < n; ++j) {
                trips.emplace_back(shape.coordinate(k, i, j), col, 1.0);
                trips.emplace_back(shape.coordinate(k, j, i), col, 1.0);
                ++col;
                trips.emplace_back(shape.coordinate(k, i, j), col, I_unit);
                trips.emplace_back(shape.coordinate(k, j, i), col, -I_unit);
                ++col;
            }
        }
    }
    SparseC h(shape.element_dim(), col);
    h.setFromTriplets(trips.begin(), trips.end());
    return h;
}

namespace pauli {

inline CMatrix x() {
    CMatrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}
inline CMatrix y() {
    CMatrix m(2, 2);
    m << 0, -I_unit, I_unit, 0;
    return m;
}
inline CMatrix z() {
    CMatrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

}  // namespace pauli

}  // namespace ncp
