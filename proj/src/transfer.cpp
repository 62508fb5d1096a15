// transfer.cpp: transfer-function evaluation and related frequency-domain data.

#include "lqfn/transfer.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <set>

namespace lqfn {

namespace {

// Solve (sI - A) X = B, or report the pole that makes it singular.
ComplexMatrix resolvent_solve(const ComplexMatrix& a, double a_norm, Complex s, const ComplexMatrix& b,
                              bool zero_mode) {
    const Index k = a.rows();
    const ComplexMatrix shifted = s * ComplexMatrix::Identity(k, k) - a;
    Eigen::JacobiSVD<ComplexMatrix> svd(shifted);
    const double smin = svd.singularValues().size() ? svd.singularValues().minCoeff() : 1.0;
    const double threshold = 1e-12 * (1 + std::abs(s) + a_norm);
    if (!(smin > threshold)) {
        const std::string what = zero_mode ? "ZeroHit" : "PoleHit";
        const std::string msg = "s = (" + std::to_string(s.real()) + ", " + std::to_string(s.imag()) +
                                ") is within " + std::to_string(threshold) + " of an eigenvalue (sigma_min " +
                                std::to_string(smin) + ")";
        if (zero_mode) throw ZeroHit("inverse_tf: " + msg, smin);
        throw PoleHit("eval_tf: " + msg, smin);
    }
    return shifted.partialPivLu().solve(b);
}

double operator_norm(const ComplexMatrix& a) {
    if (a.size() == 0) return 0.0;
    return Eigen::JacobiSVD<ComplexMatrix>(a).singularValues()(0);
}

}  // namespace

// ---- TransferFunction -------------------------------------------------------

TransferFunction::TransferFunction(StateSpace ss)
    : ss_(std::move(ss)), a_(embed(ss_.a)), b_(embed(ss_.b)), c_(embed(ss_.c)), d_(embed(ss_.d)) {
    a_norm_ = operator_norm(a_);
}

ComplexMatrix TransferFunction::operator()(Complex s) const {
    if (a_.size() == 0) return d_;
    return c_ * resolvent_solve(a_, a_norm_, s, b_, false) + d_;
}

ComplexMatrix eval_tf(const StateSpace& ss, Complex s) { return TransferFunction(ss)(s); }

ComplexMatrix eval_tf(const LinearComponent& g, Complex s) { return TransferFunction(g)(s); }

double flat_unitarity_residual(const ComplexMatrix& x) {
    return max_abs(ComplexMatrix(flat_raw(x) * x - ComplexMatrix::Identity(x.cols(), x.cols())));
}

FrequencySweep sweep(const StateSpace& ss, std::span<const double> omegas) {
    const TransferFunction tf(ss);
    return sweep_response(tf, omegas);
}

// ---- quadratures ------------------------------------------------------------

QuadratureResponse quadrature_tf(const ComplexMatrix& value) {
    if (value.rows() != value.cols() || value.rows() % 2 != 0) {
        throw DimensionError("quadrature_tf: value must be square with even dimension");
    }
    const Index n = value.rows() / 2;
    const Complex half(0.5, 0), ihalf(0, 0.5), i(0, 1);
    const ComplexMatrix eye = ComplexMatrix::Identity(n, n);
    ComplexMatrix q(2 * n, 2 * n), qinv(2 * n, 2 * n);
    q << half * eye, half * eye, -ihalf * eye, ihalf * eye;
    qinv << eye, i * eye, eye, -i * eye;
    const ComplexMatrix t = q * value * qinv;
    return {t.topLeftCorner(n, n), t.bottomRightCorner(n, n), t.topRightCorner(n, n), t.bottomLeftCorner(n, n)};
}

// ---- poles and impulse response ---------------------------------------------

ComplexVector poles(const StateSpace& ss) {
    const ComplexMatrix a = embed(ss.a);
    if (a.size() == 0) return {};
    Eigen::ComplexEigenSolver<ComplexMatrix> ev(a, false);
    if (ev.info() != Eigen::Success) throw NumericalFailure("poles: eigen-solver failed");
    return sorted_descending<double>(ev.eigenvalues());
}

ImpulseResponse impulse(const StateSpace& ss, double t) {
    if (!(t >= 0)) throw ParameterError("impulse: t must be nonnegative", t);
    ImpulseResponse out;
    out.feedthrough = embed(ss.d);
    const Index n2 = 2 * ss.channels();
    if (ss.modes() == 0) {
        out.sigma = ComplexMatrix::Zero(n2, n2);
        return out;
    }
    const ComplexMatrix at = embed(ss.a) * Complex(t, 0);
    out.sigma = embed(ss.c) * at.exp() * embed(ss.b);  // B = -C^flat D
    return out;
}

// ---- inverses ---------------------------------------------------------------

StateSpace inverse_realization(const StateSpace& ss) {
    const DoubledMatrix dinv = flat(ss.d);  // symplectic D
    StateSpace out;
    out.a = ss.a - dmul(dmul(ss.b, dinv), ss.c);
    out.b = dmul(ss.b, dinv);
    out.c = -dmul(dinv, ss.c);
    out.d = dinv;
    return out;
}

ComplexMatrix inverse_tf(const StateSpace& ss, Complex s) {
    const StateSpace inv = inverse_realization(ss);
    const ComplexMatrix a = embed(inv.a);
    if (a.size() == 0) return embed(inv.d);
    return embed(inv.c) * resolvent_solve(a, operator_norm(a), s, embed(inv.b), true) + embed(inv.d);
}

double cascade_check(const LinearComponent& g2, const LinearComponent& g1, std::span<const Complex> samples) {
    const std::set<std::string> first(g1.mode_labels().begin(), g1.mode_labels().end());
    for (const auto& l : g2.mode_labels()) {
        if (first.count(l)) {
            throw SharedModes("cascade_check: components share mode '" + l +
                              "'; the transfer function does not factor");
        }
    }
    const TransferFunction joint(series(g2, g1));
    const TransferFunction t2(g2), t1(g1);
    double worst = 0;
    for (Complex s : samples) {
        worst = std::max(worst, max_abs(ComplexMatrix(joint(s) - t2(s) * t1(s))));
    }
    return worst;
}

}  // namespace lqfn
