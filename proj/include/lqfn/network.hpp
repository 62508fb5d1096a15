// network.hpp: feedback interconnection of components. Channel partitioning,
// the Moebius map Psi, zero-delay reduction, finite-delay closure in the
// frequency domain, and compilation of a wired graph.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lqfn/component.hpp"
#include "lqfn/transfer.hpp"

namespace lqfn {

// Channels 0..n1-1 are external (port 1), n1..n-1 internal (port 2).
class PartitionedComponent {
public:
    PartitionedComponent(LinearComponent base, Index n1);

    const LinearComponent& base() const noexcept { return base_; }
    Index n1() const noexcept { return n1_; }
    Index n2() const noexcept { return base_.channels() - n1_; }

    // Scattering blocks S_jk, j, k in {1, 2}.
    const DoubledMatrix& s11() const noexcept { return s11_; }
    const DoubledMatrix& s12() const noexcept { return s12_; }
    const DoubledMatrix& s21() const noexcept { return s21_; }
    const DoubledMatrix& s22() const noexcept { return s22_; }
    const DoubledMatrix& c1() const noexcept { return c1_; }
    const DoubledMatrix& c2() const noexcept { return c2_; }

    // max over the block orthogonality relations of the partitioned matrix
    double lemma_residual() const;

private:
    LinearComponent base_;
    Index n1_;
    DoubledMatrix s11_, s12_, s21_, s22_, c1_, c2_;
};

// Internal channels are moved to the end in the given order; external ones keep
// their relative order.
PartitionedComponent partition(const LinearComponent& g, const IndexList& internal);

struct DelayVector {
    std::vector<double> tau;

    explicit DelayVector(std::vector<double> t);
    Index size() const noexcept { return static_cast<Index>(tau.size()); }
};

inline constexpr double kWellPosedFactor = 1e-10;

// Psi(X) = S11 + S12 X (I - S22 X)^{-1} S21 on raw embedded blocks. The
// raw form covers complex-s values that are not doubled-up.
ComplexMatrix mobius_raw(const ComplexMatrix& s11, const ComplexMatrix& s12, const ComplexMatrix& s21,
                         const ComplexMatrix& s22, const ComplexMatrix& x, double factor = kWellPosedFactor);

DoubledMatrix mobius(const DoubledMatrix& s, Index n1, const DoubledMatrix& x, double factor = kWellPosedFactor);
DoubledMatrix mobius(const PartitionedComponent& p, const DoubledMatrix& x, double factor = kWellPosedFactor);

struct SiegelResiduals {
    double left = 0;   // Psi(X)^flat Psi(Y) identity
    double right = 0;  // Psi(X) Psi(Y)^flat identity
};

SiegelResiduals siegel_residuals(const DoubledMatrix& s, Index n1, const DoubledMatrix& x, const DoubledMatrix& y);

LinearComponent zero_delay_reduce(const PartitionedComponent& p);

ComplexMatrix finite_delay_response(const PartitionedComponent& p, const DelayVector& d, Complex s);

// ---- graphs -----------------------------------------------------------------

struct PortRef {
    std::string node;
    Index port = 0;  // 0-based channel index

    bool operator==(const PortRef&) const = default;
};

struct Edge {
    PortRef from;  // output port
    PortRef to;    // input port
    std::optional<double> delay;
};

struct NetworkNode {
    std::string name;
    LinearComponent component;
};

struct NetworkGraph {
    std::vector<NetworkNode> nodes;
    std::vector<Edge> edges;
    std::vector<PortRef> inputs;   // external inputs, declaration order
    std::vector<PortRef> outputs;  // external outputs, declaration order
};

struct CompiledNetwork {
    PartitionedComponent partition;
    std::optional<DelayVector> delays;  // absent: zero-delay path only
    std::vector<Edge> loop_edges;       // edge behind each port-2 channel
};

// Validates the graph and lumps it. Undelayed internal edges are eliminated
// first when any edge carries a delay, so the delay vector is strictly positive.
CompiledNetwork compile(const NetworkGraph& g);

// Lumped component with outputs/inputs ordered [external..., edges...].
LinearComponent lump(const NetworkGraph& g, const std::vector<Edge>& edges);

}  // namespace lqfn
