// component.cpp: component constructors, realization, series product, stability.

#include "lqfn/component.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

namespace lqfn {

namespace {

constexpr Complex kI(0.0, 1.0);

double combined_tolerance(const SymplecticMatrix& a, const SymplecticMatrix& b) {
    return std::max(a.tolerance(), b.tolerance()) * (1 + max_abs(a.delta()) * max_abs(b.delta()));
}

void require_nonnegative(double v, const char* name) {
    if (!(v >= 0) || !std::isfinite(v)) {
        throw ParameterError(std::string(name) + " must be finite and nonnegative", v);
    }
}

}  // namespace

// ---- LinearComponent --------------------------------------------------------

LinearComponent::LinearComponent(SymplecticMatrix s, DoubledMatrix c, Generator omega, ModeLabels labels)
    : s_(std::move(s)), c_(std::move(c)), omega_(std::move(omega)), labels_(std::move(labels)) {
    if (c_.rows() != channels()) {
        throw DimensionError("LinearComponent: coupling has " + std::to_string(c_.rows()) + " rows for " +
                             std::to_string(channels()) + " channels");
    }
    if (c_.cols() != modes()) {
        throw DimensionError("LinearComponent: coupling has " + std::to_string(c_.cols()) + " columns for " +
                             std::to_string(modes()) + " modes");
    }
    if (static_cast<Index>(labels_.size()) != modes()) {
        throw DimensionError("LinearComponent: mode label count differs from mode count");
    }
    std::set<std::string> seen;
    for (const auto& l : labels_) {
        if (l.empty()) throw ParameterError("LinearComponent: empty mode label");
        if (!seen.insert(l).second) throw ParameterError("LinearComponent: duplicate mode label '" + l + "'");
    }
    if (!c_.minus().allFinite() || !c_.plus().allFinite()) {
        throw ParameterError("LinearComponent: coupling has non-finite entries");
    }
}

LinearComponent LinearComponent::relabeled(ModeLabels labels) const {
    return LinearComponent(s_, c_, omega_, std::move(labels));
}

ModeLabels default_labels(const std::string& prefix, Index m) {
    ModeLabels out;
    if (m == 1) return {prefix};
    for (Index k = 0; k < m; ++k) out.push_back(prefix + "." + std::to_string(k + 1));
    return out;
}

// ---- constructors -----------------------------------------------------------

LinearComponent static_component(const SymplecticMatrix& s) {
    return LinearComponent(s, DoubledMatrix::zero(s.modes(), 0), Generator::zero(0), {});
}

LinearComponent identity_component(Index n) {
    if (n < 1) throw ParameterError("identity: channel count must be positive", static_cast<double>(n));
    return static_component(SymplecticMatrix::identity(n));
}

LinearComponent cavity(double gamma, double omega, const std::string& label) {
    require_nonnegative(gamma, "cavity: gamma");
    if (!std::isfinite(omega)) throw ParameterError("cavity: omega must be finite");
    return LinearComponent(SymplecticMatrix::identity(1), DoubledMatrix::scalar(std::sqrt(gamma), 0),
                           Generator::scalar(omega, 0), {label});
}

LinearComponent dpa(double kappa, double epsilon, const std::string& label) {
    require_nonnegative(kappa, "dpa: kappa");
    if (!std::isfinite(epsilon)) throw ParameterError("dpa: epsilon must be finite");
    return LinearComponent(SymplecticMatrix::identity(1), DoubledMatrix::scalar(std::sqrt(kappa), 0),
                           Generator::scalar(0, kI * (epsilon / 2)), {label});
}

LinearComponent squeezer(double r) {
    if (!std::isfinite(r)) throw ParameterError("squeezer: r must be finite");
    return static_component(SymplecticMatrix(DoubledMatrix::scalar(std::cosh(r), std::sinh(r))));
}

LinearComponent squeezer_cosh(double cosh_r) {
    if (!(cosh_r >= 1) || !std::isfinite(cosh_r)) throw ParameterError("squeezer: cosh r must be >= 1", cosh_r);
    // sinh from cosh directly keeps (2, sqrt 3) exact.
    const double sinh_r = std::sqrt(cosh_r * cosh_r - 1);
    return static_component(SymplecticMatrix(DoubledMatrix::scalar(cosh_r, sinh_r)));
}

LinearComponent beamsplitter(double epsilon) {
    if (!(epsilon >= 0 && epsilon <= 1)) throw ParameterError("beamsplitter: epsilon must lie in [0, 1]", epsilon);
    return beamsplitter(Complex(std::sqrt(epsilon), 0), Complex(std::sqrt(1 - epsilon), 0));
}

LinearComponent beamsplitter(Complex alpha, Complex beta) {
    const double norm = std::norm(alpha) + std::norm(beta);
    if (std::abs(norm - 1) > kDefaultTolerance) {
        throw ParameterError("beamsplitter: |alpha|^2 + |beta|^2 must equal 1", norm);
    }
    const double skew = std::abs(std::conj(alpha) * beta - std::conj(beta) * alpha);
    if (skew > kDefaultTolerance) {
        throw ParameterError("beamsplitter: conj(alpha) beta must equal conj(beta) alpha", skew);
    }
    ComplexMatrix sb(2, 2);
    sb << alpha, -beta, beta, alpha;
    return static_component(SymplecticMatrix(DoubledMatrix::passive(sb)));
}

LinearComponent phase_shift(double theta) {
    if (!std::isfinite(theta)) throw ParameterError("phase_shift: theta must be finite");
    return static_component(SymplecticMatrix(DoubledMatrix::scalar(std::polar(1.0, theta), 0)));
}

LinearComponent custom(const SymplecticMatrix& s, const ComplexMatrix& c_minus, const ComplexMatrix& c_plus,
                       const ComplexMatrix& omega_minus, const ComplexMatrix& omega_plus, ModeLabels labels) {
    try {
        return LinearComponent(s, DoubledMatrix(c_minus, c_plus), Generator(omega_minus, omega_plus),
                               std::move(labels));
    } catch (const InvalidGenerator& e) {
        throw ParameterError(std::string("custom: ") + e.what(), e.diagnostic());
    }
}

double dpa_static_r0(double kappa0, double epsilon0) {
    if (!(epsilon0 >= 0 && epsilon0 < kappa0)) {
        throw ParameterError("dpa static limit requires 0 <= epsilon0 < kappa0", epsilon0);
    }
    return std::log((kappa0 + epsilon0) / (kappa0 - epsilon0));
}

LinearComponent dpa_static_limit(double kappa0, double epsilon0) {
    const double r0 = dpa_static_r0(kappa0, epsilon0);
    return static_component(SymplecticMatrix(DoubledMatrix::scalar(-std::cosh(r0), -std::sinh(r0))));
}

// ---- realization ------------------------------------------------------------

StateSpace realize(const LinearComponent& g) {
    const DoubledMatrix& c = g.c_tilde();
    const DoubledMatrix cflat = flat(c);
    StateSpace ss;
    ss.a = dmul(cflat, c) * -0.5 + g.omega().minus_i_omega();
    ss.b = -dmul(cflat, g.s_tilde());
    ss.c = c;
    ss.d = g.s_tilde();
    return ss;
}

RealizabilityResiduals realizability_residuals(const StateSpace& ss) {
    RealizabilityResiduals r;
    r.symplectic = is_symplectic(ss.d, 0.0).residual;
    r.ab = max_abs(ss.b + dmul(flat(ss.c), ss.d));
    r.q = max_abs(ss.a + flat(ss.a) + dmul(flat(ss.c), ss.c));
    return r;
}

LinearComponent check_physical(const StateSpace& ss, double tol, std::optional<ModeLabels> labels) {
    const Index m = ss.a.rows(), n = ss.d.rows();
    if (!ss.a.is_square() || !ss.d.is_square() || ss.b.rows() != m || ss.b.cols() != n || ss.c.rows() != n ||
        ss.c.cols() != m) {
        throw DimensionError("check_physical: inconsistent state-space shapes");
    }
    const RealizabilityResiduals r = realizability_residuals(ss);
    const double sd = max_abs(ss.d);
    if (r.symplectic > tol * (1 + sd * sd)) {
        throw NotRealizable("check_physical: D is not symplectic (residual " + std::to_string(r.symplectic) + ")",
                            r.symplectic);
    }
    const double scale_b = 1 + max_abs(ss.b) + max_abs(ss.c) * sd;
    if (r.ab > tol * scale_b) {
        throw NotRealizable("check_physical: B != -C^flat D (residual " + std::to_string(r.ab) + ")", r.ab);
    }
    const double sc = max_abs(ss.c);
    const double scale_q = 1 + max_abs(ss.a) + sc * sc;
    if (r.q > tol * scale_q) {
        throw NotRealizable("check_physical: A + A^flat != -C^flat C (residual " + std::to_string(r.q) + ")", r.q);
    }
    const DoubledMatrix g = ss.a + dmul(flat(ss.c), ss.c) * 0.5;
    Generator omega;
    try {
        omega = Generator::from_minus_i_omega(g, tol * scale_q);
    } catch (const InvalidGenerator& e) {
        throw NotRealizable(std::string("check_physical: reconstructed Hamiltonian invalid: ") + e.what(),
                            e.diagnostic());
    }
    ModeLabels l = labels ? std::move(*labels) : default_labels("a", m);
    return LinearComponent(SymplecticMatrix(ss.d, tol * (1 + sd * sd)), ss.c, std::move(omega), std::move(l));
}

// ---- composition ------------------------------------------------------------

ModeRegister merge_modes(const ModeLabels& first, const ModeLabels& second) {
    ModeRegister reg;
    std::map<std::string, Index> where;
    for (const auto& l : first) {
        where[l] = static_cast<Index>(reg.labels.size());
        reg.first.push_back(static_cast<Index>(reg.labels.size()));
        reg.labels.push_back(l);
    }
    for (const auto& l : second) {
        auto it = where.find(l);
        if (it != where.end()) {
            reg.second.push_back(it->second);
            reg.shared = true;
        } else {
            where[l] = static_cast<Index>(reg.labels.size());
            reg.second.push_back(static_cast<Index>(reg.labels.size()));
            reg.labels.push_back(l);
        }
    }
    return reg;
}

DoubledMatrix expand_coupling(const DoubledMatrix& c, const IndexList& columns, Index total) {
    ComplexMatrix cm = ComplexMatrix::Zero(c.rows(), total);
    ComplexMatrix cp = ComplexMatrix::Zero(c.rows(), total);
    for (std::size_t k = 0; k < columns.size(); ++k) {
        cm.col(columns[k]) = c.minus().col(static_cast<Index>(k));
        cp.col(columns[k]) = c.plus().col(static_cast<Index>(k));
    }
    return DoubledMatrix(std::move(cm), std::move(cp));
}

Generator expand_generator(const Generator& g, const IndexList& columns, Index total) {
    ComplexMatrix om = ComplexMatrix::Zero(total, total);
    ComplexMatrix op = ComplexMatrix::Zero(total, total);
    const Index m = static_cast<Index>(columns.size());
    for (Index j = 0; j < m; ++j) {
        for (Index k = 0; k < m; ++k) {
            om(columns[j], columns[k]) += g.omega_minus()(j, k);
            op(columns[j], columns[k]) += g.omega_plus()(j, k);
        }
    }
    return Generator(std::move(om), std::move(op));
}

LinearComponent series(const LinearComponent& g2, const LinearComponent& g1) {
    if (g1.channels() != g2.channels()) {
        throw ChannelMismatch("series: channel counts differ (" + std::to_string(g2.channels()) + " vs " +
                              std::to_string(g1.channels()) + ")");
    }
    const ModeRegister reg = merge_modes(g1.mode_labels(), g2.mode_labels());
    const Index m = static_cast<Index>(reg.labels.size());
    const DoubledMatrix c1 = expand_coupling(g1.c_tilde(), reg.first, m);
    const DoubledMatrix c2 = expand_coupling(g2.c_tilde(), reg.second, m);
    const DoubledMatrix& s2 = g2.s_tilde();

    SymplecticMatrix s(dmul(s2, g1.s_tilde()), combined_tolerance(g2.scattering(), g1.scattering()));
    DoubledMatrix c = c2 + dmul(s2, c1);
    Generator omega = expand_generator(g1.omega(), reg.first, m) + expand_generator(g2.omega(), reg.second, m) +
                      im_flat(dmul(dmul(flat(c2), s2), c1));
    return LinearComponent(std::move(s), std::move(c), std::move(omega), reg.labels);
}

LinearComponent inverse(const LinearComponent& g) {
    const DoubledMatrix sflat = flat(g.s_tilde());
    return LinearComponent(g.scattering().inverse(), -dmul(sflat, g.c_tilde()), -g.omega(), g.mode_labels());
}

LinearComponent separate_inverse(const LinearComponent& g, const ModeNamer& namer) {
    if (!g.omega().is_zero()) {
        throw NotZeroHamiltonian("separate_inverse: component has a nonzero Hamiltonian",
                                 std::max(max_abs(g.omega().omega_minus()), max_abs(g.omega().omega_plus())));
    }
    const DoubledMatrix k(g.c_tilde().plus(), g.c_tilde().minus());
    ModeLabels labels;
    for (const auto& l : g.mode_labels()) labels.push_back(namer ? namer(l) : l + "_inv");
    return LinearComponent(g.scattering().inverse(), dmul(flat(g.s_tilde()), k), Generator::zero(g.modes()),
                           std::move(labels));
}

double parameter_distance(const LinearComponent& a, const LinearComponent& b) {
    if (a.channels() != b.channels() || a.modes() != b.modes()) return std::numeric_limits<double>::infinity();
    // Column of each of a's labels inside b; identity when the registers match.
    IndexList perm(static_cast<std::size_t>(a.modes()));
    for (Index k = 0; k < a.modes(); ++k) {
        const auto& labels = b.mode_labels();
        auto it = std::find(labels.begin(), labels.end(), a.mode_labels()[static_cast<std::size_t>(k)]);
        if (it == labels.end()) return std::numeric_limits<double>::infinity();
        perm[static_cast<std::size_t>(k)] = static_cast<Index>(it - labels.begin());
    }
    const IndexList rows = iota(0, a.channels());
    const DoubledMatrix bc = select(b.c_tilde(), rows, perm);
    const Generator bo(b.omega().omega_minus()(perm, perm), b.omega().omega_plus()(perm, perm));
    double d = max_abs(a.s_tilde() - b.s_tilde());
    d = std::max(d, max_abs(a.c_tilde() - bc));
    d = std::max(d, max_abs(ComplexMatrix(a.omega().omega_minus() - bo.omega_minus())));
    d = std::max(d, max_abs(ComplexMatrix(a.omega().omega_plus() - bo.omega_plus())));
    return d;
}

// ---- stability --------------------------------------------------------------

namespace {

ClosedFormStability closed_form_from(double gamma_minus, double gamma_plus, double omega_minus, Complex omega_plus) {
    ClosedFormStability cf;
    cf.gamma_minus = gamma_minus;
    cf.gamma_plus = gamma_plus;
    cf.zeta = std::norm(omega_plus) - omega_minus * omega_minus;
    const double half_gap = 0.5 * (gamma_minus - gamma_plus);
    cf.criterion_1 = cf.zeta <= 0 && gamma_minus > gamma_plus;
    cf.criterion_2 = cf.zeta > 0 && std::sqrt(cf.zeta) < half_gap;
    const Complex root = std::sqrt(Complex(cf.zeta, 0));
    cf.eigenvalues.resize(2);
    cf.eigenvalues << -half_gap + root, -half_gap - root;
    return cf;
}

}  // namespace

ClosedFormStability closed_form_stability(const LinearComponent& g) {
    if (g.channels() != 1 || g.modes() != 1) {
        throw DimensionError("closed_form_stability: requires one channel and one mode");
    }
    // for one mode C^flat C is diagonal, so A+ = -i w+
    return closed_form_from(std::norm(g.c_tilde().minus()(0, 0)), std::norm(g.c_tilde().plus()(0, 0)),
                            g.omega().omega_minus()(0, 0).real(), g.omega().omega_plus()(0, 0));
}

StabilityReport stability(const StateSpace& ss) {
    StabilityReport rep;
    const ComplexMatrix a = embed(ss.a);
    if (a.size() == 0) {
        rep.spectral_abscissa = -std::numeric_limits<double>::infinity();
        rep.hurwitz = true;
        return rep;
    }
    Eigen::ComplexEigenSolver<ComplexMatrix> ev(a, false);
    if (ev.info() != Eigen::Success) throw NumericalFailure("stability: eigen-solver failed");
    rep.eigenvalues = sorted_descending<double>(ev.eigenvalues());
    double abscissa = rep.eigenvalues.real().maxCoeff();
    // Rounding must not turn a marginal system into a stable one.
    if (std::abs(abscissa) <= 1e-12 * (1 + max_abs(a))) abscissa = 0.0;
    rep.spectral_abscissa = abscissa;
    rep.hurwitz = abscissa < 0;

    if (ss.modes() == 1 && ss.channels() == 1) {
        const DoubledMatrix g = ss.a + dmul(flat(ss.c), ss.c) * 0.5;  // -i Omega~
        rep.closed_form = closed_form_from(std::norm(ss.c.minus()(0, 0)), std::norm(ss.c.plus()(0, 0)),
                                           (kI * g.minus()(0, 0)).real(), kI * g.plus()(0, 0));
    }
    return rep;
}

StabilityReport stability(const LinearComponent& g) { return stability(realize(g)); }

}  // namespace lqfn
