// generator.hpp: Lie-algebra parameters (Omega-, Omega+), the exponential map
// into Sp(C^m), logarithms where they exist, and the zeta classification.
//
// Storage is (Omega-, Omega+). The doubled matrix -i*Omega~ = Delta(-i Omega-, -i Omega+)
// is flat-anti-Hermitian; Omega~ itself is only offered as a raw view because
// multiplying by i does not preserve the doubled-up pattern.

#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <variant>

#include "lqfn/doubled.hpp"
#include "lqfn/symplectic.hpp"

namespace lqfn {

template <typename Real>
class SpGenerator {
public:
    using Scalar = std::complex<Real>;
    using Matrix = CMatrix<Real>;

    SpGenerator() = default;

    SpGenerator(Matrix omega_minus, Matrix omega_plus, Real tol = Real(kDefaultTolerance))
        : omega_minus_(std::move(omega_minus)), omega_plus_(std::move(omega_plus)) {
        const Index m = omega_minus_.rows();
        if (omega_minus_.cols() != m || omega_plus_.rows() != m || omega_plus_.cols() != m) {
            throw DimensionError("SpGenerator: Omega- and Omega+ must be square of equal size");
        }
        const Real scale = 1 + std::max(max_abs(omega_minus_), max_abs(omega_plus_));
        const Real herm = max_abs(Matrix(omega_minus_ - omega_minus_.adjoint()));
        if (herm > tol * scale) {
            throw InvalidGenerator("SpGenerator: Omega- is not Hermitian (deviation " +
                                       std::to_string(static_cast<double>(herm)) + ")",
                                   static_cast<double>(herm));
        }
        const Real sym = max_abs(Matrix(omega_plus_ - omega_plus_.transpose()));
        if (sym > tol * scale) {
            throw InvalidGenerator("SpGenerator: Omega+ is not symmetric (deviation " +
                                       std::to_string(static_cast<double>(sym)) + ")",
                                   static_cast<double>(sym));
        }
    }

    static SpGenerator zero(Index m) { return SpGenerator(Matrix::Zero(m, m), Matrix::Zero(m, m)); }

    static SpGenerator scalar(Scalar omega_minus, Scalar omega_plus) {
        return SpGenerator(Matrix::Constant(1, 1, omega_minus), Matrix::Constant(1, 1, omega_plus));
    }

    // Inverse of minus_i_omega(): Omega- = i G-, Omega+ = i G+, projected onto
    // the Hermitian / symmetric parts after validation.
    static SpGenerator from_minus_i_omega(const Doubled<Real>& g, Real tol = Real(kDefaultTolerance)) {
        const Scalar i(0, 1);
        const Matrix om = i * g.minus();
        const Matrix op = i * g.plus();
        SpGenerator checked(om, op, tol);
        return SpGenerator(Matrix((om + om.adjoint()) * Real(0.5)), Matrix((op + op.transpose()) * Real(0.5)));
    }

    const Matrix& omega_minus() const noexcept { return omega_minus_; }
    const Matrix& omega_plus() const noexcept { return omega_plus_; }
    Index modes() const noexcept { return omega_minus_.rows(); }

    Doubled<Real> minus_i_omega() const {
        const Scalar mi(0, -1);
        return Doubled<Real>(mi * omega_minus_, mi * omega_plus_);
    }

    // Raw [[Omega-, Omega+], [-Omega+#, -Omega-#]]; flat-Hermitian.
    Matrix omega_tilde() const {
        const Index m = modes();
        Matrix out(2 * m, 2 * m);
        out.topLeftCorner(m, m) = omega_minus_;
        out.topRightCorner(m, m) = omega_plus_;
        out.bottomLeftCorner(m, m) = -omega_plus_.conjugate();
        out.bottomRightCorner(m, m) = -omega_minus_.conjugate();
        return out;
    }

    bool is_zero() const { return max_abs(omega_minus_) == 0 && max_abs(omega_plus_) == 0; }

    SpGenerator& operator+=(const SpGenerator& o) {
        if (modes() != o.modes()) throw DimensionError("SpGenerator: mode count mismatch");
        omega_minus_ += o.omega_minus_;
        omega_plus_ += o.omega_plus_;
        return *this;
    }

    bool operator==(const SpGenerator& o) const {
        return modes() == o.modes() && omega_minus_ == o.omega_minus_ && omega_plus_ == o.omega_plus_;
    }

private:
    Matrix omega_minus_;
    Matrix omega_plus_;
};

using Generator = SpGenerator<double>;

template <typename Real>
SpGenerator<Real> operator+(SpGenerator<Real> a, const SpGenerator<Real>& b) { return a += b; }

template <typename Real>
SpGenerator<Real> operator-(const SpGenerator<Real>& a) {
    return SpGenerator<Real>(-a.omega_minus(), -a.omega_plus());
}

template <typename Real>
SpGenerator<Real> operator-(const SpGenerator<Real>& a, const SpGenerator<Real>& b) { return a + (-b); }

// Im_flat X = (X - X^flat) / 2i, returned as Omega-type parameters.
template <typename Real>
SpGenerator<Real> im_flat(const Doubled<Real>& x) {
    if (!x.is_square()) throw DimensionError("im_flat: matrix is not square");
    const std::complex<Real> two_i(0, 2);
    CMatrix<Real> om = (x.minus() - x.minus().adjoint()) / two_i;
    CMatrix<Real> op = (x.plus() + x.plus().transpose()) / two_i;
    return SpGenerator<Real>(std::move(om), std::move(op));
}

// ---- exponential ------------------------------------------------------------

template <typename Real>
Symplectic<Real> exp_generator(const SpGenerator<Real>& g, Real tol = Real(kDefaultTolerance)) {
    const CMatrix<Real> e = embed(g.minus_i_omega()).exp();
    const Real scale = 1 + max_abs(e);
    Doubled<Real> d = extract(e, tol * scale);
    return Symplectic<Real>(std::move(d), tol * scale * scale);
}

// ---- logarithm --------------------------------------------------------------

// s = exp(first) * exp(second)
template <typename Real>
struct TwoFactor {
    SpGenerator<Real> first;
    SpGenerator<Real> second;
};

struct NoLog {
    std::string diagnostic;
};

template <typename Real>
using LogResult = std::variant<SpGenerator<Real>, TwoFactor<Real>, NoLog>;

// Principal logarithm with the -Delta(i Omega-, i Omega+) structure, if any.
template <typename Real>
std::optional<SpGenerator<Real>> principal_log(const Doubled<Real>& s, Real tol = Real(kDefaultTolerance)) {
    using M = CMatrix<Real>;
    const M raw = embed(s);
    Eigen::ComplexEigenSolver<M> ev(raw, false);
    if (ev.info() != Eigen::Success) return std::nullopt;
    for (Index i = 0; i < ev.eigenvalues().size(); ++i) {
        const auto lambda = ev.eigenvalues()(i);
        const Real band = Real(1e-8) * (1 + std::abs(lambda));
        if (lambda.real() <= band && std::abs(lambda.imag()) <= band) return std::nullopt;
    }
    const M l = raw.log();
    if (!l.allFinite()) return std::nullopt;
    const Real scale = 1 + max_abs(l);
    if (doubled_deviation(l) > tol * scale) return std::nullopt;
    const Doubled<Real> g = extract(l, tol * scale);
    if (max_abs(g + flat(g)) > tol * scale) return std::nullopt;

    std::optional<SpGenerator<Real>> out;
    try {
        out = SpGenerator<Real>::from_minus_i_omega(g, tol);
    } catch (const InvalidGenerator&) {
        return std::nullopt;
    }
    const M back = embed(out->minus_i_omega()).exp();
    if (max_abs(M(back - raw)) > tol * (1 + max_abs(raw))) return std::nullopt;
    return out;
}

template <typename Real>
LogResult<Real> try_log(const Symplectic<Real>& s, Real tol = Real(kDefaultTolerance)) {
    if (auto g = principal_log(s.delta(), tol)) return *g;
    if (s.modes() != 1) {
        return NoLog{"no structured principal logarithm; multi-factor logarithms for m > 1 are not attempted"};
    }
    // exp(-Delta(i pi, 0)) = -I, so s = (-I)(-s).
    if (auto g = principal_log(Doubled<Real>(-s.delta()), tol)) {
        return TwoFactor<Real>{SpGenerator<Real>::scalar(std::numbers::pi_v<Real>, 0), *g};
    }
    return NoLog{"neither s nor -s has a structured principal logarithm"};
}

// ---- classification ---------------------------------------------------------

template <typename Real>
struct GeneratorAnalysis {
    std::optional<Real> zeta;                        // m = 1 only
    CVector<Real> eigenvalues;                       // of -i Omega~, sorted by (re, im) descending
    bool passive = false;                            // Omega~ has only real eigenvalues
    std::optional<SpGenerator<Real>> normal_form;    // m = 1, zeta != 0
};

template <typename Real>
CVector<Real> sorted_descending(CVector<Real> v) {
    std::sort(v.data(), v.data() + v.size(), [](const auto& a, const auto& b) {
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() > b.imag();
    });
    return v;
}

template <typename Real>
GeneratorAnalysis<Real> analyze_generator(const SpGenerator<Real>& g, Real tol = Real(kDefaultTolerance)) {
    GeneratorAnalysis<Real> out;
    const CMatrix<Real> raw = embed(g.minus_i_omega());
    if (raw.size() > 0) {
        Eigen::ComplexEigenSolver<CMatrix<Real>> ev(raw, false);
        if (ev.info() != Eigen::Success) throw NumericalFailure("analyze_generator: eigen-solver failed");
        out.eigenvalues = sorted_descending<Real>(ev.eigenvalues());
    }

    if (g.modes() == 1) {
        const Real wm = g.omega_minus()(0, 0).real();
        const std::complex<Real> wp = g.omega_plus()(0, 0);
        const Real zeta = std::norm(wp) - wm * wm;
        out.zeta = zeta;
        out.passive = zeta <= tol;
        if (zeta < -tol) {
            const Real ratio = std::abs(wp) / std::abs(wm);
            out.normal_form = SpGenerator<Real>::scalar(wm * std::sqrt(1 - ratio * ratio), 0);
        } else if (zeta > tol) {
            const Real ratio = std::abs(wm) / std::abs(wp);
            out.normal_form = SpGenerator<Real>::scalar(0, std::abs(wp) * std::sqrt(1 - ratio * ratio));
        }
        return out;
    }

    const Real band = std::sqrt(tol) * (1 + max_abs(raw));
    out.passive = true;
    for (Index i = 0; i < out.eigenvalues.size(); ++i) {
        if (std::abs(out.eigenvalues(i).real()) > band) out.passive = false;
    }
    return out;
}

}  // namespace lqfn
