// evolution.hpp: exact block propagator, dense oracle, coherent-state approximation
//
// All dynamics is in the interaction picture with respect to ħωI, where the
// evolution operator is e^{-iVt}. The exact propagator acts block by block on
// (|gg,n+1>, |Ψ+,n>, |ee,n-1>); |Ψ-,n> is stationary.

#pragma once

#include "nltc/hilbert.hpp"
#include "nltc/model.hpp"

#include <Eigen/Dense>

#include <vector>

namespace nltc {

// e^{-iVt} restricted to the truncated Fock space. Blocks cut by the truncation
// lose the coupling to the missing state.
class BlockPropagator {
public:
    BlockPropagator(const SpectralData& spectrum, double t);

    int n_max() const { return n_max_; }
    double time() const { return t_; }

    // 3x3 block in the ordered basis (|gg,n+1>, |Ψ+,n>, |ee,n-1>), 0 <= n <= n_max.
    Eigen::Matrix3cd block(int n) const;

    // Single-mode states, or one mode (0 = a, 1 = b) of a two-mode state.
    void apply(JointState& state, int mode = 0) const;

private:
    struct Entry {
        double a;  // Ω_n, or 0 when |gg,n+1> is truncated away
        double b;  // Ω_{n-1}, or 0 for n = 0
        double c;  // cos ν t
        double s;  // sin(ν t)/ν
        double q;  // (cos ν t - 1)/ν²
    };
    void apply_slice(Complex* base, std::ptrdiff_t stride) const;

    int n_max_{0};
    double t_{0.0};
    std::vector<Entry> entries_;
};

// Throws TruncationError when the evolved state has more than 1e-6 of its
// probability in the last five Fock levels.
JointState evolve_exact(const JointState& state, const SpectralData& spectrum, double t);
JointState evolve_exact(const JointState& state, const IntensityModel& model, double t);
// Evolve a single mode of a two-mode state with that mode's coupling model.
JointState evolve_mode(const JointState& state, const SpectralData& spectrum, double t, int mode);

// Dense reference: diagonalizes the full truncated V (built in the bare atomic
// basis) and applies e^{-iVt}. Limited to n_max <= 64.
inline constexpr int kOracleMaxTruncation = 64;
Eigen::MatrixXcd dense_interaction(const IntensityModel& model, int n_max);
JointState evolve_oracle(const JointState& state, const IntensityModel& model, double t);

// Expectation-free coherent component: atomic vector (Bell basis, carries the
// coefficient) times the Fock-space coherent state |label>.
struct CoherentComponent {
    Vec4 atoms = Vec4::Zero();
    Complex label{0.0};
};

// Sum of coherent components, materialized with exact (unnormalized) truncated
// coherent amplitudes.
JointState materialize(const std::vector<CoherentComponent>& components, int n_max);

// Unnormalized approximate state |ζ>|α> + |Υ(t)>.
struct ApproxState {
    BellAmplitudes atoms;
    Complex b_plus{0.0};
    Complex b_minus{0.0};
    double alpha{0.0};
    LinearizedSpectrum spectrum;
    double t{0.0};
    double normalization{1.0};  // squared norm of the unnormalized state

    CoherentComponent stationary() const;
    std::vector<CoherentComponent> drifting() const;
    std::vector<CoherentComponent> components() const;
    JointState materialize(int n_max) const;
};

ApproxState approx_state(const BellAmplitudes& atoms, double alpha, const LinearizedSpectrum& spectrum,
                         double t);

// Squared norm 𝒩(t) of |ζ>|α> + |Υ(t)>.
double normalization(const ApproxState& approx);

// Closed-form state at an odd multiple k of t_r/4 (quarter) or t_r/2 (half):
// a stationary part |ζ>|α> and the time-dependent part.
struct RevivalState {
    CoherentComponent stationary;
    std::vector<CoherentComponent> drifting;
    Vec4 atomic_factor = Vec4::Zero();  // ζ_{1,k} or ζ_{2,k}, Bell basis
    double time{0.0};

    JointState materialize(int n_max) const;
    JointState materialize_time_dependent(int n_max) const;
};

RevivalState quarter_revival_state(const BellAmplitudes& atoms, double alpha, const LinearizedSpectrum& spectrum,
                                   int k);
RevivalState half_revival_state(const BellAmplitudes& atoms, double alpha, const LinearizedSpectrum& spectrum,
                                int k);

// Laboratory-frame state: e^{-iIωt} e^{iIφ} |Ψ(t)>, single mode.
JointState to_laboratory_frame(const JointState& state, double phi, double omega_free, double t);

}  // namespace nltc
