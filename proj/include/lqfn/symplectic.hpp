// symplectic.hpp: the Bogoliubov group Sp(C^m) and the Shale decomposition.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lqfn/doubled.hpp"

namespace lqfn {

template <typename Real>
struct SymplecticCheck {
    bool ok = false;
    Real residual = 0;  // max of ||S^flat S - I|| and ||S S^flat - I||
};

template <typename Real>
SymplecticCheck<Real> is_symplectic(const Doubled<Real>& d, Real tol = Real(kDefaultTolerance)) {
    if (!d.is_square()) throw DimensionError("is_symplectic: matrix is not square");
    const Doubled<Real> eye = Doubled<Real>::identity(d.rows());
    const Real left = max_abs(dmul(flat(d), d) - eye);
    const Real right = max_abs(dmul(d, flat(d)) - eye);
    const Real residual = std::max(left, right);
    return {residual <= tol, residual};
}

// A doubled-up matrix verified to be flat-unitary at construction.
template <typename Real>
class Symplectic {
public:
    explicit Symplectic(Doubled<Real> delta, Real tol = Real(kDefaultTolerance))
        : delta_(std::move(delta)), tolerance_(tol) {
        const auto check = is_symplectic(delta_, tol);
        if (!check.ok) {
            throw NonSymplectic("matrix is not symplectic (residual " +
                                    std::to_string(static_cast<double>(check.residual)) + ")",
                                static_cast<double>(check.residual));
        }
        residual_ = check.residual;
    }

    static Symplectic identity(Index m) { return Symplectic(Doubled<Real>::identity(m)); }

    const Doubled<Real>& delta() const noexcept { return delta_; }
    Real tolerance() const noexcept { return tolerance_; }
    Real residual() const noexcept { return residual_; }
    Index modes() const noexcept { return delta_.rows(); }

    // The group inverse is the flat.
    Symplectic inverse() const { return Symplectic(flat(delta_), tolerance_ + residual_); }

private:
    Doubled<Real> delta_;
    Real tolerance_;
    Real residual_ = 0;
};

using SymplecticMatrix = Symplectic<double>;

template <typename Real>
Symplectic<Real> operator*(const Symplectic<Real>& a, const Symplectic<Real>& b) {
    const Real tol = std::max(a.tolerance(), b.tolerance()) * (1 + max_abs(a.delta()) * max_abs(b.delta()));
    return Symplectic<Real>(dmul(a.delta(), b.delta()), tol);
}

// ---- Shale decomposition ----------------------------------------------------

// S = Delta(s_out^dagger, 0) Delta(cosh R, sinh R) Delta(s_in, 0)
template <typename Real>
struct ShaleFactors {
    CMatrix<Real> s_in;
    CMatrix<Real> s_out;
    RVector<Real> r_diag;

    Doubled<Real> squeeze() const {
        const RVector<Real> c = r_diag.array().cosh().matrix();
        const RVector<Real> s = r_diag.array().sinh().matrix();
        return Doubled<Real>(c.template cast<std::complex<Real>>().asDiagonal(),
                             s.template cast<std::complex<Real>>().asDiagonal());
    }

    Doubled<Real> recompose() const {
        return dmul(dmul(Doubled<Real>::passive(s_out.adjoint()), squeeze()), Doubled<Real>::passive(s_in));
    }
};

// The coupling S+ S-^T is complex symmetric, and its Takagi vectors diagonalize
// S- S-^dagger at the same time. Takagi vectors with positive values are read
// off the real symmetric embedding [[Re Q, Im Q], [Im Q, -Re Q]], whose
// eigenvalues come in pairs +-d_i. Zero values get any orthonormal complement.
template <typename Real>
ShaleFactors<Real> shale_decompose(const Symplectic<Real>& s) {
    using C = std::complex<Real>;
    using M = CMatrix<Real>;
    using RM = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;

    const Index m = s.modes();
    const M& sm = s.delta().minus();
    const M& sp = s.delta().plus();

    M q = sp * sm.transpose();
    q = (q + q.transpose()).eval() * Real(0.5);

    RM h(2 * m, 2 * m);
    h.topLeftCorner(m, m) = q.real();
    h.topRightCorner(m, m) = q.imag();
    h.bottomLeftCorner(m, m) = q.imag();
    h.bottomRightCorner(m, m) = -q.real();

    Eigen::SelfAdjointEigenSolver<RM> eig(h);
    if (eig.info() != Eigen::Success) {
        throw NumericalFailure("shale_decompose: eigen-solver did not converge");
    }

    // Eigenvalues are ascending; walk from the top for the descending order.
    const Real cutoff = Real(64) * std::numeric_limits<Real>::epsilon() * (1 + max_abs(q)) * Real(2 * m);
    M u = M::Zero(m, m);
    RVector<Real> d = RVector<Real>::Zero(m);
    Index kept = 0;
    for (Index i = 2 * m - 1; i >= 0 && kept < m; --i) {
        const Real lambda = eig.eigenvalues()(i);
        if (lambda <= cutoff) break;
        const auto v = eig.eigenvectors().col(i);
        for (Index row = 0; row < m; ++row) u(row, kept) = C(v(row), v(m + row));
        d(kept) = lambda;
        ++kept;
    }
    if (kept < m) {
        // Orthonormal complement of the kept Takagi vectors.
        M basis = M::Identity(m, m);
        if (kept > 0) {
            Eigen::HouseholderQR<M> qr(u.leftCols(kept));
            basis = qr.householderQ() * M::Identity(m, m);
        }
        u.rightCols(m - kept) = basis.rightCols(m - kept);
    }

    ShaleFactors<Real> out;
    // d = sinh r cosh r = sinh(2r)/2
    out.r_diag = (Real(2) * d).array().asinh().matrix() * Real(0.5);
    out.s_out = u.adjoint();
    const RVector<Real> inv_cosh = out.r_diag.array().cosh().inverse().matrix();
    out.s_in = inv_cosh.template cast<C>().asDiagonal() * (u.adjoint() * sm);
    return out;
}

}  // namespace lqfn
