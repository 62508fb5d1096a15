// gaussian.hpp: Gaussian field states (N, M), the covariance F, and the
// Araki-Woods vacuum representation of a squeezed state.

#pragma once

#include <vector>

#include "lqfn/doubled.hpp"

namespace lqfn {

class GaussianState {
public:
    static GaussianState vacuum(Index m);
    static GaussianState scalar(double n, Complex m);
    static GaussianState general(ComplexMatrix n, ComplexMatrix m, ComplexVector mean = {},
                                 double tol = kDefaultTolerance);

    const ComplexMatrix& n_mat() const noexcept { return n_; }
    const ComplexMatrix& m_mat() const noexcept { return m_; }
    const ComplexVector& mean() const noexcept { return mean_; }
    Index modes() const noexcept { return n_.rows(); }

private:
    GaussianState(ComplexMatrix n, ComplexMatrix m, ComplexVector mean)
        : n_(std::move(n)), m_(std::move(m)), mean_(std::move(mean)) {}

    ComplexMatrix n_;
    ComplexMatrix m_;
    ComplexVector mean_;
};

// [[I + N^T, M], [M^dagger, N]]
ComplexMatrix covariance_F(const GaussianState& s);

// Coefficients of the products of field differentials, dt omitted.
struct ItoTable {
    ComplexMatrix db_dbdag;     // I + N^T
    ComplexMatrix db_db;        // M
    ComplexMatrix dbdag_dbdag;  // M#
    ComplexMatrix dbdag_db;     // N
};

ItoTable ito_table(const GaussianState& s);

struct ArakiWoodsFactors {
    ComplexMatrix v_diag;       // unitary with V^dagger N V = diag, descending
    RealVector n_eigenvalues;   // descending; dropped modes set to zero
    IndexList kept_modes;       // rotated-basis indices with positive eigenvalue
    ComplexMatrix x_mat;        // kept x kept
    ComplexMatrix y_mat;        // kept x kept, diagonal positive
    ComplexMatrix z_mat;        // kept x kept
    ComplexMatrix e0_minus;     // m x 2m, original basis
    ComplexMatrix e0_plus;      // m x 2m, original basis

    // Delta(E0-, E0+): m outputs driven by 2m vacuum inputs.
    DoubledMatrix s0() const { return DoubledMatrix(e0_minus, e0_plus); }
};

ArakiWoodsFactors araki_woods(const GaussianState& s, double tol = kDefaultTolerance);

// max(|XX^dag - YY^dag + ZZ^dag - I|, |YZ^T - ZY^T|)
double aw3_residual(const ArakiWoodsFactors& f);
// |S0 S0^flat - I|
double aw2_residual(const ArakiWoodsFactors& f);

DoubledMatrix squeezed_field_component(const GaussianState& s, double tol = kDefaultTolerance);

// (N, M) seen at the outputs of Delta(E-, E+) driven by vacuum.
struct StatePair {
    ComplexMatrix n;
    ComplexMatrix m;
};
StatePair vacuum_output_state(const DoubledMatrix& s0);

}  // namespace lqfn
