// observables.hpp: expectation values, Husimi Q function and fidelities

#pragma once

#include "nltc/hilbert.hpp"
#include "nltc/model.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <string>
#include <vector>

namespace nltc {

// Single-mode expectation values.
double expect_sz(const JointState& state);
double expect_excitations(const JointState& state);  // <a†a + S_z>
double expect_spin_squared(const JointState& state);

// Closed-form <S_z(t)> for the initial state |ee>|α>, α² = spectrum.n_mean.
double approx_sz(const LinearizedSpectrum& spectrum, double t);

// <α|α e^{iω'_N t}> with N = α².
Complex coherent_overlap(double alpha, const LinearizedSpectrum& spectrum, double t);

struct HusimiWindow {
    double re_min{-1.0};
    double re_max{1.0};
    double im_min{-1.0};
    double im_max{1.0};
    int resolution{201};

    // Square window of half-width 1.5α centred at the origin.
    static HusimiWindow around(double alpha, int resolution = 201);
    double re(int i) const;
    double im(int j) const;
    double cell_area() const;
};

struct HusimiPeak {
    Complex beta;
    double value;
};

struct HusimiGrid {
    HusimiWindow window;
    Eigen::MatrixXd values;  // values(j, i) = Q(re(i) + i im(j))
    double integral{0.0};    // Riemann sum of Q d²β
    std::vector<std::string> warnings;

    // Strict local maxima over the 8-neighbourhood with Q above threshold.
    std::vector<HusimiPeak> local_maxima(double threshold) const;
    void write_csv(std::ostream& os) const;
};

// Q(β) = <β|ρ|β>/π. Grids whose Riemann sum misses unity by more than 2%
// carry a warning.
HusimiGrid husimi(const Eigen::MatrixXcd& rho_oscillator, const HusimiWindow& window);
// Same, with ρ the oscillator reduction of a single-mode joint state.
HusimiGrid husimi(const JointState& state, const HusimiWindow& window);

// |<approx|exact>|² / normalization, approx unnormalized with squared norm
// `normalization`.
double state_fidelity(const JointState& exact, const JointState& approx, double normalization);
double state_fidelity(const JointState& a, const JointState& b);

// Uhlmann fidelity (Tr sqrt(sqrt(ρ) σ sqrt(ρ)))².
double atomic_fidelity(const AtomicDensityMatrix& rho, const AtomicDensityMatrix& sigma);

}  // namespace nltc
