// component.hpp: dynamical Bogoliubov components (S~, C~, Omega~), their
// state-space realization, the series product and stability analysis.

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lqfn/doubled.hpp"
#include "lqfn/generator.hpp"
#include "lqfn/symplectic.hpp"

namespace lqfn {

using ModeLabels = std::vector<std::string>;

class LinearComponent {
public:
    // Static components pass an empty coupling (n x 0) and Generator::zero(0).
    LinearComponent(SymplecticMatrix s, DoubledMatrix c, Generator omega, ModeLabels labels);

    Index channels() const noexcept { return s_.modes(); }
    Index modes() const noexcept { return omega_.modes(); }
    bool is_static() const noexcept { return modes() == 0; }

    const SymplecticMatrix& scattering() const noexcept { return s_; }
    const DoubledMatrix& s_tilde() const noexcept { return s_.delta(); }
    const DoubledMatrix& c_tilde() const noexcept { return c_; }
    const Generator& omega() const noexcept { return omega_; }
    const ModeLabels& mode_labels() const noexcept { return labels_; }

    LinearComponent relabeled(ModeLabels labels) const;

private:
    SymplecticMatrix s_;
    DoubledMatrix c_;
    Generator omega_;
    ModeLabels labels_;
};

// Default labels "<prefix>" for one mode, "<prefix>.<k>" (k from 1) for more.
ModeLabels default_labels(const std::string& prefix, Index m);

// ---- constructors -----------------------------------------------------------

LinearComponent static_component(const SymplecticMatrix& s);
LinearComponent identity_component(Index n);
LinearComponent cavity(double gamma, double omega, const std::string& label = "a");
LinearComponent dpa(double kappa, double epsilon, const std::string& label = "a");
LinearComponent squeezer(double r);
LinearComponent squeezer_cosh(double cosh_r);
// alpha = sqrt(eps), beta = sqrt(1 - eps)
LinearComponent beamsplitter(double epsilon);
// S_b = [[alpha, -beta], [beta, alpha]] with |alpha|^2 + |beta|^2 = 1, conj(alpha) beta real-aligned.
LinearComponent beamsplitter(Complex alpha, Complex beta);
LinearComponent phase_shift(double theta);
LinearComponent custom(const SymplecticMatrix& s, const ComplexMatrix& c_minus, const ComplexMatrix& c_plus,
                       const ComplexMatrix& omega_minus, const ComplexMatrix& omega_plus, ModeLabels labels);

// -Delta(cosh r0, sinh r0), r0 = ln((k0 + e0)/(k0 - e0))
LinearComponent dpa_static_limit(double kappa0, double epsilon0);
double dpa_static_r0(double kappa0, double epsilon0);

// ---- realization ------------------------------------------------------------

struct StateSpace {
    DoubledMatrix a;  // m x m blocks
    DoubledMatrix b;  // m x n
    DoubledMatrix c;  // n x m
    DoubledMatrix d;  // n x n

    Index modes() const noexcept { return a.rows(); }
    Index channels() const noexcept { return d.rows(); }
};

StateSpace realize(const LinearComponent& g);

// Residuals of the three realizability identities.
struct RealizabilityResiduals {
    double symplectic = 0;  // |D^flat D - I|
    double ab = 0;          // |B + C^flat D|
    double q = 0;           // |A + A^flat + C^flat C|
};
RealizabilityResiduals realizability_residuals(const StateSpace& ss);

LinearComponent check_physical(const StateSpace& ss, double tol = kDefaultTolerance,
                               std::optional<ModeLabels> labels = std::nullopt);

// ---- composition ------------------------------------------------------------

// Merged register: labels of g1 first, then new labels of g2 in order.
struct ModeRegister {
    ModeLabels labels;
    IndexList first;   // column of each g1 mode
    IndexList second;  // column of each g2 mode
    bool shared = false;
};
ModeRegister merge_modes(const ModeLabels& first, const ModeLabels& second);

// Re-express coupling / Hamiltonian over a larger register.
DoubledMatrix expand_coupling(const DoubledMatrix& c, const IndexList& columns, Index total);
Generator expand_generator(const Generator& g, const IndexList& columns, Index total);

// g2 <| g1: g1 feeds g2.
LinearComponent series(const LinearComponent& g2, const LinearComponent& g1);
LinearComponent inverse(const LinearComponent& g);

using ModeNamer = std::function<std::string(const std::string&)>;
LinearComponent separate_inverse(const LinearComponent& g, const ModeNamer& namer = {});

// Max parameter-level distance (S, C, Omega) of two components with the same
// register, labels aligned by name.
double parameter_distance(const LinearComponent& a, const LinearComponent& b);

// ---- stability --------------------------------------------------------------

struct ClosedFormStability {
    double zeta = 0;           // |w+|^2 - w-^2
    double gamma_minus = 0;
    double gamma_plus = 0;
    bool criterion_1 = false;  // zeta <= 0 and gamma- > gamma+
    bool criterion_2 = false;  // zeta > 0 and sqrt(zeta) < (gamma- - gamma+)/2
    ComplexVector eigenvalues; // -(gamma- - gamma+)/2 +- sqrt(zeta)
    bool hurwitz() const noexcept { return criterion_1 || criterion_2; }
};

struct StabilityReport {
    ComplexVector eigenvalues;  // of embed(A), sorted by (re, im) descending
    double spectral_abscissa = 0;
    bool hurwitz = false;
    std::optional<ClosedFormStability> closed_form;
};

StabilityReport stability(const StateSpace& ss);
StabilityReport stability(const LinearComponent& g);

// Only valid for n = m = 1 components.
ClosedFormStability closed_form_stability(const LinearComponent& g);

}  // namespace lqfn
