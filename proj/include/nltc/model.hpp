// model.hpp: intensity-dependent coupling models and their spectral data
//
// The interaction V = Ω (f(a†a) a S+ + a† f(a†a) S-) is block diagonal in the
// excitation number n. Each block couples |gg,n+1>, |Ψ+,n>, |ee,n-1> through the
// matrix elements Ω_n and Ω_{n-1}. Everything the propagators need is derived
// from the function n -> Ω_n of the chosen model.

#pragma once

#include <string>
#include <vector>

namespace nltc {

enum class CouplingKind { TavisCummings, BuckSukumar, IonTrap };

std::string to_string(CouplingKind kind);

struct IntensityModel {
    CouplingKind kind{CouplingKind::TavisCummings};
    double omega_coupling{1.0};  // Ω, rad per unit time
    double lamb_dicke{0.0};      // η, only read for IonTrap

    static IntensityModel tavis_cummings(double omega = 1.0);
    static IntensityModel buck_sukumar(double omega = 1.0);
    static IntensityModel ion_trap(double eta, double omega = 1.0);

    // Throws DomainError when Ω <= 0 or (IonTrap and η <= 0).
    void validate() const;
};

// Linearization of the eigenfrequencies around the mean quantum number N:
// ω_n ≈ δ_N + ω'_N n.
struct LinearizedSpectrum {
    double n_mean{0.0};
    double omega_N{0.0};
    double omega_prime_N{0.0};
    double delta_N{0.0};
    double t_rabi{0.0};
    double t_collapse{0.0};
    double t_revival{0.0};
    double t_breakdown{0.0};
    int breakdown_order{2};             // Taylor order j that limits t_breakdown
    std::vector<std::string> warnings;  // validity-window diagnostics, never fatal
};

// Matrix elements Ω_n, ω_n and exact block frequencies ν_n = sqrt(Ω_n² + Ω_{n-1}²)
// for 0 <= n <= n_max. ν_0 has no 3x3 block and is stored as NaN
// (nu_defined_from == 1).
struct SpectralData {
    IntensityModel model;
    int n_max{0};
    std::vector<double> omega_n;
    std::vector<double> capital_omega_n;
    std::vector<double> nu_n;
    int nu_defined_from{1};
};

// Ω_n. Integer n uses the exact matrix element (Laguerre form for the ion trap);
// non-integer n, as needed for ω_n = sqrt(2)|Ω_{n-1/2}|, evaluates the same
// closed form at real argument (Bessel form for the ion trap).
double capital_omega(const IntensityModel& model, double n);

// Approximate eigenfrequency ω_n = sqrt(2)|Ω_{n-1/2}|.
double eigenfrequency(const IntensityModel& model, int n);

// ω(n) at real n, the function that is linearized.
double eigenfrequency_continuous(const IntensityModel& model, double n);

// j-th derivative (j = 1, 2, 3) with respect to n of the frequency function used
// for the breakdown estimate: ω(n) for Tavis-Cummings and the ion trap, the exact
// block frequency Ω sqrt(4n²+4n+2) for Buck-Sukumar.
double frequency_derivative(const IntensityModel& model, double n, int order);

LinearizedSpectrum linearize(const IntensityModel& model, double n_mean);

// Root of d²J1(sqrt(x))/dx² in (7, 13), located by bisection followed by Newton.
double ion_trap_x0();

// Optimal mean phonon number N = x0/(4η²) - 1/2.
double ion_trap_optimum(double eta);

// Inverse of ion_trap_optimum.
double ion_trap_eta_for(double n_mean);

// Largest η whose Poisson window still fits the near-linear Bessel interval.
inline constexpr double kIonTrapMaxEta = 0.156905;

SpectralData tabulate_spectrum(const IntensityModel& model, int n_max);

namespace detail {
// Associated Laguerre polynomial L_n^{(1)}(x) by upward three-term recurrence.
double laguerre1(int n, double x);
}  // namespace detail

}  // namespace nltc
