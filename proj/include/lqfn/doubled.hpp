// doubled.hpp: doubled-up matrices Delta(E-, E+), the flat involution and
// the block bookkeeping (direct sums, channel selection) used everywhere else.
//
// A Doubled<Real> stores only the two top blocks. The 2r x 2k matrix
//     [[E-,  E+ ],
//      [E+#, E-#]]
// is materialized by embed() when a raw Eigen matrix is needed.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "lqfn/errors.hpp"

namespace lqfn {

using Index = Eigen::Index;

template <typename Real>
using CMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using CVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;
template <typename Real>
using RVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

using Complex = std::complex<double>;
using ComplexMatrix = CMatrix<double>;
using ComplexVector = CVector<double>;
using RealVector = RVector<double>;
using IndexList = std::vector<Index>;

inline constexpr double kDefaultTolerance = 1e-9;

// Max-norm over entries; zero for an empty matrix.
template <typename Derived>
typename Derived::RealScalar max_abs(const Eigen::MatrixBase<Derived>& m) {
    if (m.size() == 0) return typename Derived::RealScalar(0);
    return m.cwiseAbs().maxCoeff();
}

template <typename Real>
class Doubled {
public:
    using RealScalar = Real;
    using Scalar = std::complex<Real>;
    using Matrix = CMatrix<Real>;

    Doubled() = default;

    Doubled(Matrix minus, Matrix plus) : minus_(std::move(minus)), plus_(std::move(plus)) {
        if (minus_.rows() != plus_.rows() || minus_.cols() != plus_.cols()) {
            throw DimensionError("Doubled: minus and plus blocks differ in shape");
        }
    }

    static Doubled zero(Index rows, Index cols) {
        return Doubled(Matrix::Zero(rows, cols), Matrix::Zero(rows, cols));
    }
    static Doubled identity(Index n) {
        return Doubled(Matrix::Identity(n, n), Matrix::Zero(n, n));
    }
    static Doubled scalar(Scalar minus, Scalar plus) {
        return Doubled(Matrix::Constant(1, 1, minus), Matrix::Constant(1, 1, plus));
    }
    // Delta(E, 0): a passive (annihilation-only) block.
    static Doubled passive(Matrix e) {
        Matrix z = Matrix::Zero(e.rows(), e.cols());
        return Doubled(std::move(e), std::move(z));
    }

    const Matrix& minus() const noexcept { return minus_; }
    const Matrix& plus() const noexcept { return plus_; }

    Index rows() const noexcept { return minus_.rows(); }
    Index cols() const noexcept { return minus_.cols(); }
    bool is_square() const noexcept { return rows() == cols(); }
    bool empty() const noexcept { return minus_.size() == 0; }

    Doubled& operator+=(const Doubled& o) {
        require_same_shape(o, "operator+");
        minus_ += o.minus_;
        plus_ += o.plus_;
        return *this;
    }
    Doubled& operator-=(const Doubled& o) {
        require_same_shape(o, "operator-");
        minus_ -= o.minus_;
        plus_ -= o.plus_;
        return *this;
    }
    // Only real scalars preserve the doubled-up pattern.
    Doubled& operator*=(Real c) {
        minus_ *= c;
        plus_ *= c;
        return *this;
    }

    bool operator==(const Doubled& o) const {
        return rows() == o.rows() && cols() == o.cols() && minus_ == o.minus_ && plus_ == o.plus_;
    }

private:
    void require_same_shape(const Doubled& o, const char* op) const {
        if (rows() != o.rows() || cols() != o.cols()) {
            throw DimensionError(std::string("Doubled ") + op + ": shape mismatch");
        }
    }

    Matrix minus_;
    Matrix plus_;
};

using DoubledMatrix = Doubled<double>;

template <typename Real>
Doubled<Real> operator+(Doubled<Real> a, const Doubled<Real>& b) { return a += b; }
template <typename Real>
Doubled<Real> operator-(Doubled<Real> a, const Doubled<Real>& b) { return a -= b; }
template <typename Real>
Doubled<Real> operator-(const Doubled<Real>& a) {
    return Doubled<Real>(-a.minus(), -a.plus());
}
template <typename Real>
Doubled<Real> operator*(Doubled<Real> a, Real c) { return a *= c; }
template <typename Real>
Doubled<Real> operator*(Real c, Doubled<Real> a) { return a *= c; }

// Product rule: Delta(E-F- + E+F+#, E-F+ + E+F-#).
template <typename Real>
Doubled<Real> dmul(const Doubled<Real>& a, const Doubled<Real>& b) {
    if (a.cols() != b.rows()) {
        throw DimensionError("dmul: inner block dimensions differ (" + std::to_string(a.cols()) +
                             " vs " + std::to_string(b.rows()) + ")");
    }
    return Doubled<Real>(a.minus() * b.minus() + a.plus() * b.plus().conjugate(),
                         a.minus() * b.plus() + a.plus() * b.minus().conjugate());
}

template <typename Real>
Doubled<Real> operator*(const Doubled<Real>& a, const Doubled<Real>& b) { return dmul(a, b); }

// ---- embedding --------------------------------------------------------------

template <typename Real>
CMatrix<Real> embed(const Doubled<Real>& d) {
    const Index r = d.rows(), k = d.cols();
    CMatrix<Real> out(2 * r, 2 * k);
    out.topLeftCorner(r, k) = d.minus();
    out.topRightCorner(r, k) = d.plus();
    out.bottomLeftCorner(r, k) = d.plus().conjugate();
    out.bottomRightCorner(r, k) = d.minus().conjugate();
    return out;
}

// Max deviation of a raw 2r x 2k matrix from the doubled-up pattern.
template <typename Derived>
typename Derived::RealScalar doubled_deviation(const Eigen::MatrixBase<Derived>& m) {
    using R = typename Derived::RealScalar;
    if (m.rows() % 2 != 0 || m.cols() % 2 != 0) {
        throw DimensionError("doubled_deviation: raw matrix has odd dimension");
    }
    const Index r = m.rows() / 2, k = m.cols() / 2;
    if (r == 0 || k == 0) return R(0);
    const R dl = (m.bottomLeftCorner(r, k) - m.topRightCorner(r, k).conjugate()).cwiseAbs().maxCoeff();
    const R dr = (m.bottomRightCorner(r, k) - m.topLeftCorner(r, k).conjugate()).cwiseAbs().maxCoeff();
    return std::max(dl, dr);
}

// Reads the top blocks of a raw doubled-up matrix. Throws StructureError with
// the max deviation if the bottom blocks break the pattern by more than tol.
template <typename Derived>
Doubled<typename Derived::RealScalar> extract(const Eigen::MatrixBase<Derived>& m,
                                              typename Derived::RealScalar tol = kDefaultTolerance) {
    using R = typename Derived::RealScalar;
    const R dev = doubled_deviation(m);
    if (!(dev <= tol)) {
        throw StructureError("extract: matrix is not doubled-up (max deviation " +
                                 std::to_string(static_cast<double>(dev)) + ")",
                             static_cast<double>(dev));
    }
    const Index r = m.rows() / 2, k = m.cols() / 2;
    return Doubled<R>(m.topLeftCorner(r, k), m.topRightCorner(r, k));
}

// J = diag(I_n, -I_n)
template <typename Real = double>
CMatrix<Real> j_matrix(Index n) {
    CMatrix<Real> j = CMatrix<Real>::Identity(2 * n, 2 * n);
    j.bottomRightCorner(n, n) *= Real(-1);
    return j;
}

// ---- flat involution --------------------------------------------------------

template <typename Real>
Doubled<Real> flat(const Doubled<Real>& d) {
    return Doubled<Real>(d.minus().adjoint(), -d.plus().transpose());
}

// J X^dagger J on a raw 2r x 2k matrix; used for values that are not doubled-up
// (transfer functions off the real axis).
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> flat_raw(
    const Eigen::MatrixBase<Derived>& x) {
    if (x.rows() % 2 != 0 || x.cols() % 2 != 0) {
        throw DimensionError("flat_raw: raw matrix has odd dimension");
    }
    const Index r = x.rows() / 2, k = x.cols() / 2;
    Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> out(2 * k, 2 * r);
    out.topLeftCorner(k, r) = x.topLeftCorner(r, k).adjoint();
    out.topRightCorner(k, r) = -x.bottomLeftCorner(r, k).adjoint();
    out.bottomLeftCorner(k, r) = -x.topRightCorner(r, k).adjoint();
    out.bottomRightCorner(k, r) = x.bottomRightCorner(r, k).adjoint();
    return out;
}

// ---- block bookkeeping ------------------------------------------------------

template <typename Real>
Real max_abs(const Doubled<Real>& d) {
    return std::max(max_abs(d.minus()), max_abs(d.plus()));
}

// Blockwise direct sum; never interleaves raw rows.
template <typename Real>
Doubled<Real> direct_sum(const Doubled<Real>& a, const Doubled<Real>& b) {
    using M = CMatrix<Real>;
    auto sum = [](const M& x, const M& y) {
        M out = M::Zero(x.rows() + y.rows(), x.cols() + y.cols());
        out.topLeftCorner(x.rows(), x.cols()) = x;
        out.bottomRightCorner(y.rows(), y.cols()) = y;
        return out;
    };
    return Doubled<Real>(sum(a.minus(), b.minus()), sum(a.plus(), b.plus()));
}

// Sub-block Delta(E-[rows, cols], E+[rows, cols]) in channel (not raw) indices.
template <typename Real>
Doubled<Real> select(const Doubled<Real>& d, const IndexList& rows, const IndexList& cols) {
    for (Index i : rows) {
        if (i < 0 || i >= d.rows()) throw DimensionError("select: row index out of range");
    }
    for (Index j : cols) {
        if (j < 0 || j >= d.cols()) throw DimensionError("select: column index out of range");
    }
    return Doubled<Real>(d.minus()(rows, cols), d.plus()(rows, cols));
}

template <typename Real>
Doubled<Real> select_rows(const Doubled<Real>& d, const IndexList& rows) {
    IndexList all(static_cast<std::size_t>(d.cols()));
    for (Index j = 0; j < d.cols(); ++j) all[static_cast<std::size_t>(j)] = j;
    return select(d, rows, all);
}

// Raw indices {K, n + K} of channels K inside a 2n-embedded matrix.
inline IndexList raw_indices(Index n, const IndexList& channels) {
    IndexList out;
    out.reserve(2 * channels.size());
    for (Index k : channels) out.push_back(k);
    for (Index k : channels) out.push_back(n + k);
    return out;
}

inline IndexList iota(Index begin, Index end) {
    IndexList out;
    for (Index i = begin; i < end; ++i) out.push_back(i);
    return out;
}

}  // namespace lqfn
