// network.cpp: partitions, the Moebius map, zero-delay and finite-delay
// closures, and graph compilation.

#include "lqfn/network.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace lqfn {

namespace {

double operator_norm(const ComplexMatrix& a) {
    if (a.size() == 0) return 0.0;
    return Eigen::JacobiSVD<ComplexMatrix>(a).singularValues()(0);
}

// (I - S22 X) with the well-posedness check.
Eigen::PartialPivLU<ComplexMatrix> loop_factor(const ComplexMatrix& s22, const ComplexMatrix& x, double factor,
                                               const char* where) {
    const Index k = s22.rows();
    const ComplexMatrix loop = ComplexMatrix::Identity(k, k) - s22 * x;
    Eigen::JacobiSVD<ComplexMatrix> svd(loop);
    const double smin = k ? svd.singularValues().minCoeff() : 1.0;
    const double threshold = factor * (1 + operator_norm(s22) * operator_norm(x));
    if (!(smin >= threshold)) {
        throw IllPosed(std::string(where) + ": algebraic loop is ill-posed (smallest singular value of I - S22 X is " +
                           std::to_string(smin) + ", threshold " + std::to_string(threshold) + ")",
                       smin);
    }
    return loop.partialPivLu();
}

std::string port_name(const PortRef& p, const char* dir) {
    return p.node + "." + dir + std::to_string(p.port + 1);
}

bool is_wire(const LinearComponent& g) {
    if (!g.is_static()) return false;
    const Index n = g.channels();
    return g.s_tilde().minus() == ComplexMatrix::Identity(n, n) && g.s_tilde().plus() == ComplexMatrix::Zero(n, n);
}

}  // namespace

// ---- partitions -------------------------------------------------------------

PartitionedComponent::PartitionedComponent(LinearComponent base, Index n1) : base_(std::move(base)), n1_(n1) {
    const Index n = base_.channels();
    if (n1 < 1 || n1 > n) {
        throw BadPartition("partition: external port must be a nonempty subset of " + std::to_string(n) +
                           " channels");
    }
    const IndexList ext = iota(0, n1), in = iota(n1, n), modes = iota(0, base_.modes());
    const DoubledMatrix& s = base_.s_tilde();
    s11_ = select(s, ext, ext);
    s12_ = select(s, ext, in);
    s21_ = select(s, in, ext);
    s22_ = select(s, in, in);
    c1_ = select(base_.c_tilde(), ext, modes);
    c2_ = select(base_.c_tilde(), in, modes);
}

double PartitionedComponent::lemma_residual() const {
    const DoubledMatrix* blocks[2][2] = {{&s11_, &s12_}, {&s21_, &s22_}};
    const Index dims[2] = {n1(), n2()};
    double worst = 0;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            if (dims[i] == 0 || dims[j] == 0) continue;
            DoubledMatrix left = DoubledMatrix::zero(dims[i], dims[j]);
            DoubledMatrix right = DoubledMatrix::zero(dims[i], dims[j]);
            for (int k = 0; k < 2; ++k) {
                if (dims[k] == 0) continue;
                left += dmul(flat(*blocks[k][i]), *blocks[k][j]);
                right += dmul(*blocks[i][k], flat(*blocks[j][k]));
            }
            if (i == j) {
                left -= DoubledMatrix::identity(dims[i]);
                right -= DoubledMatrix::identity(dims[i]);
            }
            worst = std::max({worst, max_abs(left), max_abs(right)});
        }
    }
    return worst;
}

PartitionedComponent partition(const LinearComponent& g, const IndexList& internal) {
    const Index n = g.channels();
    std::set<Index> seen;
    for (Index k : internal) {
        if (k < 0 || k >= n) throw BadPartition("partition: channel index " + std::to_string(k) + " out of range");
        if (!seen.insert(k).second) throw BadPartition("partition: channel " + std::to_string(k) + " listed twice");
    }
    IndexList order;
    for (Index k = 0; k < n; ++k) {
        if (!seen.count(k)) order.push_back(k);
    }
    const Index n1 = static_cast<Index>(order.size());
    if (n1 == 0) throw BadPartition("partition: no external channels left");
    order.insert(order.end(), internal.begin(), internal.end());

    const DoubledMatrix s = select(g.s_tilde(), order, order);
    const DoubledMatrix c = select_rows(g.c_tilde(), order);
    return PartitionedComponent(
        LinearComponent(SymplecticMatrix(s, g.scattering().tolerance()), c, g.omega(), g.mode_labels()), n1);
}

DelayVector::DelayVector(std::vector<double> t) : tau(std::move(t)) {
    for (double v : tau) {
        if (!(v > 0) || !std::isfinite(v)) throw ParameterError("DelayVector: delays must be finite and positive", v);
    }
}

// ---- Moebius map ------------------------------------------------------------

ComplexMatrix mobius_raw(const ComplexMatrix& s11, const ComplexMatrix& s12, const ComplexMatrix& s21,
                         const ComplexMatrix& s22, const ComplexMatrix& x, double factor) {
    if (x.rows() != s22.cols() || x.cols() != s22.rows()) throw DimensionError("mobius: X has the wrong shape");
    if (s22.rows() == 0) return s11;
    const auto lu = loop_factor(s22, x, factor, "mobius");
    return s11 + s12 * x * lu.solve(s21);
}

DoubledMatrix mobius(const DoubledMatrix& s, Index n1, const DoubledMatrix& x, double factor) {
    const Index n = s.rows();
    if (!s.is_square() || n1 < 1 || n1 > n) throw BadPartition("mobius: invalid split");
    const ComplexMatrix raw = embed(s);
    const IndexList e = raw_indices(n, iota(0, n1)), i = raw_indices(n, iota(n1, n));
    const ComplexMatrix out = mobius_raw(raw(e, e), raw(e, i), raw(i, e), raw(i, i), embed(x), factor);
    return extract(out, kDefaultTolerance * (1 + max_abs(out)));
}

DoubledMatrix mobius(const PartitionedComponent& p, const DoubledMatrix& x, double factor) {
    return mobius(p.base().s_tilde(), p.n1(), x, factor);
}

SiegelResiduals siegel_residuals(const DoubledMatrix& s, Index n1, const DoubledMatrix& x, const DoubledMatrix& y) {
    const Index n = s.rows();
    if (!s.is_square() || n1 < 1 || n1 > n) throw BadPartition("siegel_residuals: invalid split");
    const ComplexMatrix raw = embed(s);
    const IndexList e = raw_indices(n, iota(0, n1)), i = raw_indices(n, iota(n1, n));
    const ComplexMatrix s11 = raw(e, e), s12 = raw(e, i), s21 = raw(i, e), s22 = raw(i, i);
    const ComplexMatrix xr = embed(x), yr = embed(y);
    const Index k1 = s11.rows(), k2 = s22.rows();
    const ComplexMatrix i1 = ComplexMatrix::Identity(k1, k1), i2 = ComplexMatrix::Identity(k2, k2);

    const ComplexMatrix px = mobius_raw(s11, s12, s21, s22, xr);
    const ComplexMatrix py = mobius_raw(s11, s12, s21, s22, yr);
    const ComplexMatrix xf = flat_raw(xr), yf = flat_raw(yr), s22f = flat_raw(s22);

    // Psi(X)^flat Psi(Y) = I - S21^flat (I - X^flat S22^flat)^-1 (I - X^flat Y) (I - S22 Y)^-1 S21
    const ComplexMatrix left_rhs =
        i1 - flat_raw(s21) * (i2 - xf * s22f).partialPivLu().solve((i2 - xf * yr) * (i2 - s22 * yr).partialPivLu().solve(s21));
    // Psi(X) Psi(Y)^flat = I - S12 (I - X S22)^-1 (I - X Y^flat) (I - S22^flat Y^flat)^-1 S12^flat
    const ComplexMatrix right_rhs =
        i1 - s12 * (i2 - xr * s22).partialPivLu().solve((i2 - xr * yf) * (i2 - s22f * yf).partialPivLu().solve(flat_raw(s12)));

    return {max_abs(ComplexMatrix(flat_raw(px) * py - left_rhs)), max_abs(ComplexMatrix(px * flat_raw(py) - right_rhs))};
}

// ---- reductions -------------------------------------------------------------

LinearComponent zero_delay_reduce(const PartitionedComponent& p) {
    if (p.n2() == 0) return p.base();
    const ComplexMatrix s22 = embed(p.s22());
    const ComplexMatrix eye = ComplexMatrix::Identity(s22.rows(), s22.cols());
    const auto lu = loop_factor(s22, eye, kWellPosedFactor, "zero_delay_reduce");
    const ComplexMatrix w_raw = lu.solve(eye);
    const DoubledMatrix w = extract(w_raw, kDefaultTolerance * (1 + max_abs(w_raw)));

    const DoubledMatrix s12w = dmul(p.s12(), w);
    const DoubledMatrix s0 = p.s11() + dmul(s12w, p.s21());
    const DoubledMatrix c0 = p.c1() + dmul(s12w, p.c2());
    const DoubledMatrix loop = dmul(dmul(flat(p.c1()), p.s12()) + dmul(flat(p.c2()), p.s22()), dmul(w, p.c2()));
    const Generator omega0 = p.base().omega() + im_flat(loop);

    const double scale = 1 + max_abs(s0);
    const double tol = p.base().scattering().tolerance() * scale * scale * (1 + max_abs(w));
    return LinearComponent(SymplecticMatrix(s0, tol), c0, omega0, p.base().mode_labels());
}

ComplexMatrix finite_delay_response(const PartitionedComponent& p, const DelayVector& d, Complex s) {
    if (d.size() != p.n2()) {
        throw DimensionError("finite_delay_response: " + std::to_string(d.size()) + " delays for " +
                             std::to_string(p.n2()) + " internal channels");
    }
    const Index n = p.base().channels();
    const ComplexMatrix xi = TransferFunction(p.base())(s);
    const IndexList e = raw_indices(n, iota(0, p.n1())), i = raw_indices(n, iota(p.n1(), n));
    // e^{-s tau} on the channel and on its conjugate copy.
    ComplexVector theta(2 * p.n2());
    for (Index j = 0; j < p.n2(); ++j) {
        theta(j) = theta(p.n2() + j) = std::exp(-s * d.tau[static_cast<std::size_t>(j)]);
    }
    return mobius_raw(xi(e, e), xi(e, i), xi(i, e), xi(i, i), ComplexMatrix(theta.asDiagonal()));
}

// ---- graphs -----------------------------------------------------------------

LinearComponent lump(const NetworkGraph& g, const std::vector<Edge>& edges) {
    std::map<std::string, std::size_t> index;
    for (std::size_t k = 0; k < g.nodes.size(); ++k) index[g.nodes[k].name] = k;

    // Doubled direct sum of every node, in node order.
    std::vector<Index> offset;
    DoubledMatrix s = DoubledMatrix::zero(0, 0);
    ModeRegister reg;
    std::vector<IndexList> columns;
    for (const auto& node : g.nodes) {
        offset.push_back(s.rows());
        s = direct_sum(s, node.component.s_tilde());
        ModeRegister next = merge_modes(reg.labels, node.component.mode_labels());
        reg.labels = next.labels;
        columns.push_back(next.second);
    }
    const Index total = s.rows(), m = static_cast<Index>(reg.labels.size());

    ComplexMatrix cm = ComplexMatrix::Zero(total, m), cp = ComplexMatrix::Zero(total, m);
    Generator omega = Generator::zero(m);
    for (std::size_t k = 0; k < g.nodes.size(); ++k) {
        const LinearComponent& c = g.nodes[k].component;
        const DoubledMatrix ck = expand_coupling(c.c_tilde(), columns[k], m);
        cm.middleRows(offset[k], c.channels()) = ck.minus();
        cp.middleRows(offset[k], c.channels()) = ck.plus();
        omega += expand_generator(c.omega(), columns[k], m);
    }

    auto global = [&](const PortRef& p) { return offset[index.at(p.node)] + p.port; };
    IndexList out_idx, in_idx;
    for (const auto& p : g.outputs) out_idx.push_back(global(p));
    for (const auto& e : edges) out_idx.push_back(global(e.from));
    for (const auto& p : g.inputs) in_idx.push_back(global(p));
    for (const auto& e : edges) in_idx.push_back(global(e.to));
    if (static_cast<Index>(out_idx.size()) != total || static_cast<Index>(in_idx.size()) != total) {
        throw BadPartition("lump: port count does not match the channel count of the nodes");
    }

    const DoubledMatrix permuted = select(s, out_idx, in_idx);
    const DoubledMatrix c = select_rows(DoubledMatrix(cm, cp), out_idx);
    return LinearComponent(SymplecticMatrix(permuted), c, omega, reg.labels);
}

CompiledNetwork compile(const NetworkGraph& g) {
    std::map<std::string, std::size_t> index;
    for (std::size_t k = 0; k < g.nodes.size(); ++k) {
        if (!index.emplace(g.nodes[k].name, k).second) {
            throw ValidationError("duplicate node name '" + g.nodes[k].name + "'");
        }
    }
    auto check = [&](const PortRef& p, const char* dir) {
        auto it = index.find(p.node);
        if (it == index.end()) throw ValidationError("unknown node in port '" + port_name(p, dir) + "'");
        const Index n = g.nodes[it->second].component.channels();
        if (p.port < 0 || p.port >= n) {
            throw ValidationError("port '" + port_name(p, dir) + "' does not exist (node has " + std::to_string(n) +
                                  " channels)");
        }
    };

    // Each port is used exactly once.
    std::set<std::pair<std::string, Index>> used_in, used_out;
    auto use = [&](std::set<std::pair<std::string, Index>>& used, const PortRef& p, const char* dir) {
        check(p, dir);
        if (!used.insert({p.node, p.port}).second) throw PortReuse("port '" + port_name(p, dir) + "' is used twice");
    };
    for (const auto& p : g.inputs) use(used_in, p, "in");
    for (const auto& p : g.outputs) use(used_out, p, "out");
    for (const auto& e : g.edges) {
        use(used_out, e.from, "out");
        use(used_in, e.to, "in");
        if (e.delay && (!(*e.delay >= 0) || !std::isfinite(*e.delay))) {
            throw ValidationError("connection into '" + port_name(e.to, "in") + "' has a negative delay");
        }
    }
    for (const auto& node : g.nodes) {
        for (Index k = 0; k < node.component.channels(); ++k) {
            const PortRef p{node.name, k};
            if (!used_in.count({node.name, k})) throw DanglingPort("port '" + port_name(p, "in") + "' is not connected");
            if (!used_out.count({node.name, k})) {
                throw DanglingPort("port '" + port_name(p, "out") + "' is not connected");
            }
        }
    }
    if (g.inputs.empty()) throw BadPartition("network has no external ports");

    // A loop made only of identity nodes has no component to close it.
    std::map<std::pair<std::string, Index>, std::size_t> edge_from;
    for (std::size_t k = 0; k < g.edges.size(); ++k) edge_from[{g.edges[k].from.node, g.edges[k].from.port}] = k;
    for (std::size_t start = 0; start < g.edges.size(); ++start) {
        std::size_t cur = start;
        for (std::size_t step = 0; step <= g.edges.size(); ++step) {
            const PortRef& sink = g.edges[cur].to;
            if (!is_wire(g.nodes[index.at(sink.node)].component)) break;
            auto next = edge_from.find({sink.node, sink.port});
            if (next == edge_from.end()) break;
            if (next->second == start) {
                throw CycleWithoutComponent("connection '" + port_name(g.edges[start].from, "out") + " -> " +
                                            port_name(g.edges[start].to, "in") +
                                            "' closes a loop through wires only");
            }
            cur = next->second;
        }
    }

    std::vector<Edge> edges = g.edges;
    std::stable_sort(edges.begin(), edges.end(), [&](const Edge& a, const Edge& b) {
        const auto ia = index.at(a.from.node), ib = index.at(b.from.node);
        if (ia != ib) return ia < ib;
        return a.from.port < b.from.port;
    });

    const Index n1 = static_cast<Index>(g.inputs.size());
    std::vector<Edge> instant, delayed;
    for (const auto& e : edges) (e.delay && *e.delay > 0 ? delayed : instant).push_back(e);

    if (delayed.empty()) {
        return {PartitionedComponent(lump(g, edges), n1), std::nullopt, edges};
    }

    std::vector<Edge> ordered = instant;
    ordered.insert(ordered.end(), delayed.begin(), delayed.end());
    LinearComponent lumped = lump(g, ordered);
    if (!instant.empty()) {
        const Index ni = static_cast<Index>(instant.size());
        lumped = zero_delay_reduce(partition(lumped, iota(n1, n1 + ni)));
    }
    std::vector<double> tau;
    for (const auto& e : delayed) tau.push_back(*e.delay);
    return {PartitionedComponent(std::move(lumped), n1), DelayVector(std::move(tau)), delayed};
}

}  // namespace lqfn
