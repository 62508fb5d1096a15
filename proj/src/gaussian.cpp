// gaussian.cpp: Gaussian state validation and the Araki-Woods construction.

#include "lqfn/gaussian.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <string>

namespace lqfn {

namespace {

// Hermitian square root with clamping of slightly negative eigenvalues.
ComplexMatrix psd_sqrt(const ComplexMatrix& h, double tol, const char* what) {
    if (h.size() == 0) return h;  // the eigen-solver does not take 0x0
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(h);
    if (eig.info() != Eigen::Success) throw NumericalFailure(std::string(what) + ": eigen-solver failed");
    RealVector w = eig.eigenvalues();
    const double floor = -tol * (1 + max_abs(h));
    if (w.size() > 0 && w.minCoeff() < floor) {
        throw InvalidCovariance(std::string(what) + ": argument is not positive semidefinite (min eigenvalue " +
                                    std::to_string(w.minCoeff()) + ")",
                                w.minCoeff());
    }
    w = w.cwiseMax(0.0).cwiseSqrt();
    return eig.eigenvectors() * w.cast<Complex>().asDiagonal() * eig.eigenvectors().adjoint();
}

}  // namespace

// ---- construction -----------------------------------------------------------

GaussianState GaussianState::vacuum(Index m) {
    return GaussianState(ComplexMatrix::Zero(m, m), ComplexMatrix::Zero(m, m), ComplexVector::Zero(m));
}

GaussianState GaussianState::scalar(double n, Complex m) {
    return general(ComplexMatrix::Constant(1, 1, n), ComplexMatrix::Constant(1, 1, m));
}

GaussianState GaussianState::general(ComplexMatrix n, ComplexMatrix m, ComplexVector mean, double tol) {
    const Index k = n.rows();
    if (n.cols() != k || m.rows() != k || m.cols() != k) {
        throw DimensionError("GaussianState: N and M must be square of equal size");
    }
    if (mean.size() == 0) mean = ComplexVector::Zero(k);
    if (mean.size() != k) throw DimensionError("GaussianState: mean has wrong length");
    if (!n.allFinite() || !m.allFinite() || !mean.allFinite()) {
        throw InvalidCovariance("GaussianState: non-finite entries");
    }

    const double scale = 1 + std::max(max_abs(n), max_abs(m));
    const double herm = max_abs(ComplexMatrix(n - n.adjoint()));
    if (herm > tol * scale) throw InvalidCovariance("GaussianState: N is not Hermitian", herm);
    const double sym = max_abs(ComplexMatrix(m - m.transpose()));
    if (sym > tol * scale) throw InvalidCovariance("GaussianState: M is not symmetric", sym);

    GaussianState s(std::move(n), std::move(m), std::move(mean));
    if (k == 0) return s;

    const ComplexMatrix f = covariance_F(s);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(f, Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success) throw NumericalFailure("GaussianState: eigen-solver failed");
    const double lowest = eig.eigenvalues().minCoeff();
    if (lowest < -tol * (1 + max_abs(f))) {
        throw InvalidCovariance("GaussianState: F is not positive semidefinite (min eigenvalue " +
                                    std::to_string(lowest) + ")",
                                lowest);
    }
    return s;
}

ComplexMatrix covariance_F(const GaussianState& s) {
    const Index m = s.modes();
    ComplexMatrix f(2 * m, 2 * m);
    f.topLeftCorner(m, m) = ComplexMatrix::Identity(m, m) + s.n_mat().transpose();
    f.topRightCorner(m, m) = s.m_mat();
    f.bottomLeftCorner(m, m) = s.m_mat().adjoint();
    f.bottomRightCorner(m, m) = s.n_mat();
    return f;
}

ItoTable ito_table(const GaussianState& s) {
    const Index m = s.modes();
    return {ComplexMatrix::Identity(m, m) + s.n_mat().transpose(), s.m_mat(), s.m_mat().conjugate(), s.n_mat()};
}

// ---- Araki-Woods ------------------------------------------------------------

ArakiWoodsFactors araki_woods(const GaussianState& s, double tol) {
    if (max_abs(s.mean()) != 0) {
        throw InvalidCovariance("araki_woods: state must have zero mean");
    }
    const Index m = s.modes();
    ArakiWoodsFactors f;

    // Step 1: V^dagger N V diagonal, eigenvalues descending.
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(s.n_mat());
    if (eig.info() != Eigen::Success) throw NumericalFailure("araki_woods: eigen-solver failed");
    f.v_diag = eig.eigenvectors().rowwise().reverse();
    f.n_eigenvalues = eig.eigenvalues().reverse();

    // Step 2: drop zero modes; their rows and columns of M' must vanish.
    const double n_norm = max_abs(s.n_mat());
    const double zero_cut = 1e-10 * (1 + n_norm);
    const ComplexMatrix m_rot = f.v_diag.transpose() * s.m_mat() * f.v_diag;
    const double coupling_tol = std::max(tol * (1 + max_abs(s.m_mat())), std::sqrt(zero_cut * (1 + n_norm)));
    for (Index j = 0; j < m; ++j) {
        if (f.n_eigenvalues(j) >= zero_cut) {
            f.kept_modes.push_back(j);
            continue;
        }
        if (f.n_eigenvalues(j) < -tol * (1 + n_norm)) {
            throw InvalidCovariance("araki_woods: N has a negative eigenvalue", f.n_eigenvalues(j));
        }
        f.n_eigenvalues(j) = 0;
        const double coupling = std::max(m_rot.row(j).cwiseAbs().maxCoeff(), m_rot.col(j).cwiseAbs().maxCoeff());
        if (coupling > coupling_tol) {
            throw InconsistentZeroMode("araki_woods: dropped mode " + std::to_string(j) +
                                           " still couples through M (max entry " + std::to_string(coupling) + ")",
                                       coupling);
        }
    }

    // Step 3 over the kept block (leading indices, since eigenvalues descend).
    const Index k = static_cast<Index>(f.kept_modes.size());
    const RealVector nk = f.n_eigenvalues.head(k);
    const ComplexMatrix mk = m_rot.topLeftCorner(k, k);
    const RealVector y = nk.cwiseSqrt();
    f.y_mat = y.cast<Complex>().asDiagonal();
    f.z_mat = mk * y.cwiseInverse().cast<Complex>().asDiagonal();
    const ComplexMatrix x2 = ComplexMatrix::Identity(k, k) + ComplexMatrix(nk.cast<Complex>().asDiagonal()) -
                             mk * nk.cwiseInverse().cast<Complex>().asDiagonal() * mk.adjoint();
    f.x_mat = psd_sqrt(ComplexMatrix((x2 + x2.adjoint()) * 0.5), tol, "araki_woods");

    // Rotated-basis E0: [X' Z'] and [0 Y'], zero modes pass through.
    ComplexMatrix xp = ComplexMatrix::Identity(m, m);
    ComplexMatrix yp = ComplexMatrix::Zero(m, m);
    ComplexMatrix zp = ComplexMatrix::Zero(m, m);
    xp.topLeftCorner(k, k) = f.x_mat;
    yp.topLeftCorner(k, k) = f.y_mat;
    zp.topLeftCorner(k, k) = f.z_mat;

    const ComplexMatrix back = f.v_diag.conjugate();  // a = V# a'
    f.e0_minus.resize(m, 2 * m);
    f.e0_plus.resize(m, 2 * m);
    f.e0_minus << back * xp, back * zp;
    f.e0_plus << ComplexMatrix::Zero(m, m), back * yp;
    return f;
}

double aw3_residual(const ArakiWoodsFactors& f) {
    const Index k = f.x_mat.rows();
    if (k == 0) return 0.0;
    const ComplexMatrix a = f.x_mat * f.x_mat.adjoint() - f.y_mat * f.y_mat.adjoint() +
                            f.z_mat * f.z_mat.adjoint() - ComplexMatrix::Identity(k, k);
    const ComplexMatrix b = f.y_mat * f.z_mat.transpose() - f.z_mat * f.y_mat.transpose();
    return std::max(max_abs(a), max_abs(b));
}

double aw2_residual(const ArakiWoodsFactors& f) {
    const DoubledMatrix s0 = f.s0();
    return max_abs(dmul(s0, flat(s0)) - DoubledMatrix::identity(s0.rows()));
}

DoubledMatrix squeezed_field_component(const GaussianState& s, double tol) {
    return araki_woods(s, tol).s0();
}

StatePair vacuum_output_state(const DoubledMatrix& s0) {
    return {ComplexMatrix((s0.plus() * s0.plus().adjoint()).conjugate()), ComplexMatrix(s0.minus() * s0.plus().transpose())};
}

}  // namespace lqfn
