// transfer.hpp: transfer functions Xi(s) = C~(sI - A~)^{-1} B~ + D~ and the
// frequency-domain checks built on them.
//
// Values at complex s are raw 2n x 2n matrices: the lower blocks are
// Xi(s*)-conjugates, so only on the real axis is Xi(s) doubled-up.

#pragma once

#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "lqfn/component.hpp"

namespace lqfn {

class TransferFunction {
public:
    explicit TransferFunction(StateSpace ss);
    explicit TransferFunction(const LinearComponent& g) : TransferFunction(realize(g)) {}

    // Throws PoleHit within 1e-12 (1 + |s| + |A|) of a pole.
    ComplexMatrix operator()(Complex s) const;

    const StateSpace& source() const noexcept { return ss_; }
    Index channels() const noexcept { return ss_.channels(); }

private:
    StateSpace ss_;
    ComplexMatrix a_, b_, c_, d_;
    double a_norm_ = 0;
};

ComplexMatrix eval_tf(const StateSpace& ss, Complex s);
ComplexMatrix eval_tf(const LinearComponent& g, Complex s);

// |X^flat X - I| on a raw square 2n x 2n value.
double flat_unitarity_residual(const ComplexMatrix& x);

struct FrequencySweep {
    std::vector<double> omegas;
    std::vector<std::optional<ComplexMatrix>> values;  // empty at flagged points
    std::vector<double> symplectic_residuals;          // NaN at flagged points
    std::vector<bool> pole_flags;
};

template <typename Response>
FrequencySweep sweep_response(Response&& response, std::span<const double> omegas) {
    FrequencySweep out;
    for (double w : omegas) {
        out.omegas.push_back(w);
        try {
            ComplexMatrix v = response(Complex(0.0, w));
            out.symplectic_residuals.push_back(flat_unitarity_residual(v));
            out.values.emplace_back(std::move(v));
            out.pole_flags.push_back(false);
        } catch (const PoleHit&) {
            out.values.emplace_back(std::nullopt);
            out.symplectic_residuals.push_back(std::numeric_limits<double>::quiet_NaN());
            out.pole_flags.push_back(true);
        } catch (const IllPosed&) {
            out.values.emplace_back(std::nullopt);
            out.symplectic_residuals.push_back(std::numeric_limits<double>::quiet_NaN());
            out.pole_flags.push_back(true);
        }
    }
    return out;
}

FrequencySweep sweep(const StateSpace& ss, std::span<const double> omegas);

// Quadrature basis x = (b + b#)/2, y = (b - b#)/2i.
struct QuadratureResponse {
    ComplexMatrix xi_x;
    ComplexMatrix xi_y;
    ComplexMatrix xy;  // cross blocks, zero for phase-aligned responses
    ComplexMatrix yx;
};

QuadratureResponse quadrature_tf(const ComplexMatrix& value);

ComplexVector poles(const StateSpace& ss);

struct ImpulseResponse {
    ComplexMatrix sigma;        // -C e^{At} C^flat D, raw 2n x 2n
    ComplexMatrix feedthrough;  // D, weight of delta(t)
};

ImpulseResponse impulse(const StateSpace& ss, double t);

// (A - B D^-1 C, B D^-1, -D^-1 C, D^-1); not physically realizable in general.
StateSpace inverse_realization(const StateSpace& ss);

// Throws ZeroHit when s is a zero of Xi.
ComplexMatrix inverse_tf(const StateSpace& ss, Complex s);

// max over samples of |Xi_{g2 <| g1}(s) - Xi_g2(s) Xi_g1(s)|; g1, g2 must not share modes.
double cascade_check(const LinearComponent& g2, const LinearComponent& g1, std::span<const Complex> samples);

}  // namespace lqfn
