#include <doctest.h>

#include "lqfn/network.hpp"
#include "support/networks.hpp"
#include "support/oracles.hpp"
#include "support/random.hpp"

using namespace lqfn;
using lqfn::testing::Rng;

namespace {

// Psi(X) by brute force on raw blocks.
ComplexMatrix lft(const ComplexMatrix& s, Index k1, const ComplexMatrix& x) {
    const Index k2 = s.rows() - k1;
    const ComplexMatrix s11 = s.topLeftCorner(k1, k1), s12 = s.topRightCorner(k1, k2);
    const ComplexMatrix s21 = s.bottomLeftCorner(k2, k1), s22 = s.bottomRightCorner(k2, k2);
    const ComplexMatrix inner = (ComplexMatrix::Identity(k2, k2) - s22 * x).inverse();
    return s11 + s12 * x * inner * s21;
}

// raw embedding with channel order [port1 (minus, plus)..., port2 ...] regrouped
// as [port1 minus, port1 plus | port2 minus, port2 plus]
ComplexMatrix grouped(const DoubledMatrix& d, Index n1) {
    const Index n = d.rows();
    const IndexList order = [&] {
        IndexList o;
        for (Index k = 0; k < n1; ++k) o.push_back(k);
        for (Index k = 0; k < n1; ++k) o.push_back(n + k);
        for (Index k = n1; k < n; ++k) o.push_back(k);
        for (Index k = n1; k < n; ++k) o.push_back(n + k);
        return o;
    }();
    return embed(d)(order, order);
}

}  // namespace

TEST_CASE("partition bounds") {
    CHECK_THROWS_AS(PartitionedComponent(identity_component(2), 0), BadPartition);
    CHECK_THROWS_AS(PartitionedComponent(identity_component(2), 3), BadPartition);
    const PartitionedComponent p(identity_component(2), 1);
    CHECK(p.s11() == DoubledMatrix::identity(1));
    CHECK(max_abs(p.s12()) == 0.0);
    CHECK(p.s22() == DoubledMatrix::identity(1));
    CHECK_THROWS_AS(zero_delay_reduce(p), IllPosed);
}

TEST_CASE("block relations of partitioned symplectic matrices (property)") {
    Rng rng(61);
    for (int t = 0; t < 100; ++t) {
        const Index n = rng.index(2, 5);
        const LinearComponent g = static_component(SymplecticMatrix(testing::random_symplectic(rng, n, 1.0)));
        CHECK(PartitionedComponent(g, rng.index(1, n - 1)).lemma_residual() < 1e-10);
    }
}

TEST_CASE("mobius agrees with brute-force block algebra (property)") {
    Rng rng(62);
    for (int t = 0; t < 100; ++t) {
        const Index n1 = rng.index(1, 3), n2 = rng.index(1, 3);
        const DoubledMatrix s = testing::random_symplectic(rng, n1 + n2, 0.6);
        const DoubledMatrix x = testing::random_symplectic(rng, n2, 0.6);
        DoubledMatrix psi;
        try {
            psi = mobius(s, n1, x);
        } catch (const IllPosed&) {
            continue;
        }
        const ComplexMatrix expect = lft(grouped(s, n1), 2 * n1, embed(x));
        CHECK(oracle::max_abs(embed(psi) - expect) < 1e-9 * (1 + oracle::max_abs(expect)));
        CHECK(oracle::symplectic_residual(embed(psi)) < 1e-9 * (1 + oracle::max_abs(expect)));
    }
}

TEST_CASE("mobius of the identity") {
    Rng rng(63);
    const DoubledMatrix x = testing::random_symplectic(rng, 2, 0.5);
    CHECK(max_abs(mobius(DoubledMatrix::identity(3), 1, x) - DoubledMatrix::identity(1)) == 0.0);
}

TEST_CASE("siegel identities (property)") {
    Rng rng(64);
    // X = -I keeps I - S22 X = 2I well away from singular
    const DoubledMatrix minus_id = DoubledMatrix::scalar(-1.0, 0.0);
    const SiegelResiduals trivial = siegel_residuals(DoubledMatrix::identity(2), 1, minus_id, minus_id);
    CHECK(trivial.left == 0.0);
    CHECK(trivial.right == 0.0);
    for (int t = 0; t < 200; ++t) {
        const Index n1 = rng.index(1, 3), n2 = rng.index(1, 3);
        const DoubledMatrix s = testing::random_symplectic(rng, n1 + n2, 0.5);
        const DoubledMatrix x = testing::random_symplectic(rng, n2, 0.5);
        const DoubledMatrix y = rng.coin() ? x : testing::random_symplectic(rng, n2, 0.5);
        const SiegelResiduals r = siegel_residuals(s, n1, x, y);
        CHECK(r.left < 1e-10);
        CHECK(r.right < 1e-10);
    }
}

TEST_CASE("in-loop partition blocks") {
    const double eps = 0.25, c = 2.0, s = std::sqrt(3.0), a = 0.5, b = std::sqrt(0.75);
    const CompiledNetwork net = compile(testing::in_loop_graph(eps, c, 1.0, 0.0, 0.1));
    const PartitionedComponent& p = net.partition;
    REQUIRE(p.n2() == 1);
    CHECK(max_abs(p.s11() - DoubledMatrix::scalar(a, 0.0)) < 1e-15);
    CHECK(max_abs(p.s12() - DoubledMatrix::scalar(-b, 0.0)) < 1e-15);
    CHECK(max_abs(p.s21() - DoubledMatrix::scalar(b * c, b * s)) < 1e-15);
    CHECK(max_abs(p.s22() - DoubledMatrix::scalar(a * c, a * s)) < 1e-15);
    CHECK(max_abs(mobius(p, DoubledMatrix::identity(1)) - DoubledMatrix::scalar(2.0, s)) < 1e-14);
}

TEST_CASE("in-loop zero-delay reduction over a parameter grid") {
    Rng rng(65);
    int used = 0;
    while (used < 200) {
        const double eps = rng.uniform(0.02, 0.98), cosh_r = rng.uniform(1.0, 3.0);
        const double gamma = rng.uniform(0.2, 3.0), omega = rng.uniform(-2.0, 2.0);
        const oracle::InLoop o = oracle::in_loop(eps, cosh_r, gamma, omega);
        if (std::abs(o.mu) < 1e-6) continue;
        ++used;
        const LinearComponent red = zero_delay_reduce(compile(testing::in_loop_graph(eps, cosh_r, gamma, omega)).partition);
        const double scale = 1.0;
        CHECK(std::abs(red.s_tilde().minus()(0, 0) - o.s0_minus) < 1e-10 * scale);
        CHECK(std::abs(red.s_tilde().plus()(0, 0) - o.s0_plus) < 1e-10 * scale);
        CHECK(std::abs(red.c_tilde().minus()(0, 0) - o.c0_minus) < 1e-10 * scale);
        CHECK(std::abs(red.c_tilde().plus()(0, 0) - o.c0_plus) < 1e-10 * scale);
        const StateSpace ss = realize(red);
        CHECK(std::abs(ss.a.minus()(0, 0) - o.a0_minus) < 1e-10 * scale);
        // the generic reduction puts the opposite sign on the squeezing term
        CHECK(std::abs(ss.a.plus()(0, 0) + o.a0_plus) < 1e-10 * scale);
        CHECK(std::abs(red.omega().omega_minus()(0, 0) - o.omega0_minus) < 1e-10 * scale);
        CHECK(std::abs(red.omega().omega_plus()(0, 0) + o.omega0_plus) < 1e-10 * scale);
        CHECK(red.scattering().residual() < 1e-10 * scale);
        const RealizabilityResiduals rr = realizability_residuals(ss);
        CHECK(rr.q < 1e-10 * scale);
    }
}

TEST_CASE("in-loop reduction matches the loop closed on transfer functions") {
    // independent route: LFT of the lumped response with a vanishing delay
    const double eps = 0.25, cosh_r = 2.0, gamma = 1.0, omega = 0.3;
    const LinearComponent red = zero_delay_reduce(compile(testing::in_loop_graph(eps, cosh_r, gamma, omega)).partition);
    const CompiledNetwork delayed = compile(testing::in_loop_graph(eps, cosh_r, gamma, omega, 1e-12));
    for (Complex s : {Complex(0.3, 0.7), Complex(2.0, -1.0), Complex(0.0, 3.0)}) {
        const ComplexMatrix direct = eval_tf(red, s);
        const ComplexMatrix loop = finite_delay_response(delayed.partition, *delayed.delays, s);
        CHECK(oracle::max_abs(direct - loop) < 1e-9);
    }
}

TEST_CASE("in-loop spot values") {
    const LinearComponent red = zero_delay_reduce(compile(testing::in_loop_graph(0.25, 2.0, 1.0, 0.0)).partition);
    CHECK(max_abs(red.s_tilde() - DoubledMatrix::scalar(2.0, std::sqrt(3.0))) < 1e-12);
    CHECK(max_abs(red.c_tilde() - DoubledMatrix::scalar(0.0, 1.0)) < 1e-12);
    const StateSpace ss = realize(red);
    CHECK(std::abs(ss.a.minus()(0, 0) - 0.5) < 1e-12);
    CHECK(std::abs(std::abs(ss.a.plus()(0, 0)) - 2.0 * std::sqrt(3.0) / 3.0) < 1e-12);
}

TEST_CASE("mu = 0 surfaces as an ill-posed loop") {
    // eps = 1/4, cosh r = 5/4
    CHECK_THROWS_AS(zero_delay_reduce(compile(testing::in_loop_graph(0.25, 1.25, 1.0, 0.0)).partition), IllPosed);
}

TEST_CASE("beamsplitter loop with delay") {
    Rng rng(66);
    const double gamma = 2.0;
    for (int t = 0; t < 50; ++t) {
        const double eps = rng.uniform(0.01, 0.99);
        const Complex s = rng.cuniform(0.0, 3.0, -5.0, 5.0);
        const CompiledNetwork net = compile(testing::bs_loop_graph(eps, eps / gamma));
        REQUIRE(net.delays.has_value());
        const ComplexMatrix v = finite_delay_response(net.partition, *net.delays, s);
        CHECK(std::abs(v(0, 0) - oracle::bs_delay(eps, gamma, s)) < 1e-12);
        CHECK(std::abs(v(0, 1)) < 1e-15);
    }
    const double eps = 1e-6;
    const CompiledNetwork net = compile(testing::bs_loop_graph(eps, eps / gamma));
    for (Complex s : {Complex(0), Complex(1), Complex(0, 1), Complex(1, 1)}) {
        CHECK(std::abs(finite_delay_response(net.partition, *net.delays, s)(0, 0) - oracle::bs_limit(gamma, s)) < 1e-4);
    }
}

TEST_CASE("beamsplitter loop without delay is a sign flip") {
    Rng rng(67);
    for (int t = 0; t < 20; ++t) {
        const LinearComponent red =
            zero_delay_reduce(compile(testing::bs_loop_graph(rng.uniform(0.01, 0.99), std::nullopt)).partition);
        CHECK(red.is_static());
        CHECK(max_abs(red.s_tilde() - DoubledMatrix::scalar(-1.0, 0.0)) < 1e-12);
    }
}

TEST_CASE("finite delay converges to the zero-delay response") {
    const NetworkGraph base = testing::in_loop_graph(0.3, 1.5, 1.0, 0.2);
    const LinearComponent red = zero_delay_reduce(compile(base).partition);
    const Complex s(1.0, 1.0);
    const ComplexMatrix target = eval_tf(red, s);
    double last = std::numeric_limits<double>::infinity();
    for (double tau : {1e-3, 1e-6, 1e-9}) {
        const CompiledNetwork net = compile(testing::in_loop_graph(0.3, 1.5, 1.0, 0.2, tau));
        const double err = oracle::max_abs(finite_delay_response(net.partition, *net.delays, s) - target);
        CHECK(err < last);
        last = err;
    }
    CHECK(last < 1e-8);
}

TEST_CASE("a chain reduces to the series product") {
    Rng rng(68);
    for (int t = 0; t < 20; ++t) {
        const Index n = rng.index(1, 2);
        const LinearComponent g1 = testing::random_component(rng, n, rng.index(0, 2), "a");
        const LinearComponent g2 = testing::random_component(rng, n, rng.index(0, 2), "b");
        NetworkGraph g;
        g.nodes.push_back({"g1", g1});
        g.nodes.push_back({"g2", g2});
        for (Index k = 0; k < n; ++k) {
            g.inputs.push_back({"g1", k});
            g.edges.push_back({{"g1", k}, {"g2", k}, std::nullopt});
            g.outputs.push_back({"g2", k});
        }
        const LinearComponent red = zero_delay_reduce(compile(g).partition);
        CHECK(parameter_distance(red, series(g2, g1)) < 1e-12);
    }
}

TEST_CASE("graph validation") {
    SUBCASE("port used twice") {
        NetworkGraph g = testing::in_loop_graph(0.25, 2.0, 1.0, 0.0);
        g.edges.push_back({{"bs", 0}, {"sq", 0}, std::nullopt});
        CHECK_THROWS_AS(compile(g), PortReuse);
    }
    SUBCASE("dangling port") {
        NetworkGraph g = testing::in_loop_graph(0.25, 2.0, 1.0, 0.0);
        g.edges.pop_back();
        CHECK_THROWS_AS(compile(g), DanglingPort);
    }
    SUBCASE("wire-only loop") {
        NetworkGraph g;
        g.nodes.push_back({"cav", cavity(1.0, 0.0)});
        g.nodes.push_back({"w", identity_component(1)});
        g.edges.push_back({{"w", 0}, {"w", 0}, std::nullopt});
        g.inputs.push_back({"cav", 0});
        g.outputs.push_back({"cav", 0});
        CHECK_THROWS_AS(compile(g), CycleWithoutComponent);
    }
    SUBCASE("unknown port") {
        NetworkGraph g = testing::in_loop_graph(0.25, 2.0, 1.0, 0.0);
        g.inputs[0] = {"bs", 5};
        CHECK_THROWS_AS(compile(g), ValidationError);
    }
    SUBCASE("negative delay") {
        CHECK_THROWS_AS(compile(testing::bs_loop_graph(0.5, -1.0)), ValidationError);
    }
}

TEST_CASE("single node without edges passes through") {
    NetworkGraph g;
    g.nodes.push_back({"cav", cavity(2.0, 1.0, "cav")});
    g.inputs.push_back({"cav", 0});
    g.outputs.push_back({"cav", 0});
    const CompiledNetwork net = compile(g);
    CHECK(net.partition.n2() == 0);
    CHECK(parameter_distance(zero_delay_reduce(net.partition), cavity(2.0, 1.0, "cav")) == 0.0);
}

TEST_CASE("delay vectors must be positive") {
    CHECK_THROWS_AS(DelayVector({0.0}), ParameterError);
    CHECK_NOTHROW(DelayVector({0.5, 1.0}));
}
