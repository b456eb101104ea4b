// protocols.hpp: separable gates, pointer measurements, GHZ/W generation and the
// two-mode Bell measurement
//
// Atomic operators are 4x4 matrices in the Bell basis. The idealized pointer
// basis treats {|α>, |-α>} as an orthonormal qubit, index 0 = |α>, 1 = |-α>.

#pragma once

#include "nltc/evolution.hpp"
#include "nltc/hilbert.hpp"
#include "nltc/model.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <string>
#include <vector>

namespace nltc {

using Mat2 = Eigen::Matrix2cd;
using Mat8 = Eigen::Matrix<Complex, 8, 8>;
using Vec8 = Eigen::Matrix<Complex, 8, 1>;

// Single-qubit matrices in (g, e).
Mat2 qubit_g(double theta);  // cos(θ/2) 1 + i sin(θ/2) σ_x
Mat2 qubit_gamma();          // |g><g| + i|e><e|

// a ⊗ b (first atom left) written in the Bell basis.
Mat4 local_product(const Mat2& a, const Mat2& b);

Mat4 gate_g_theta(double theta);
// e^{i S_z angle}
Mat4 sz_rotation(double angle);
// γ g†_{π/4} ⊗ γ g_{π/4}
Mat4 gate_t();

Vec4 psi_theta(double theta);  // cos θ |Ψ+> + i sin θ |Φ+>
Vec4 phi_theta(double theta);  // -i sin θ |Ψ+> - cos θ |Φ+>

Mat4 povm_m();  // |Ψ-><Ψ-| + |Φ-><Φ-|
Mat4 povm_l();  // |Ψ+><Ψ+| - |Φ+><Φ+|
Mat4 kraus_k(double theta);

// θ = δ_N t_r / 2 = π δ_N / |ω'_N|
double theta_from_spectrum(const LinearizedSpectrum& spectrum);

// Half-revival evolution on (atoms) x (pointer): M ⊗ 1 + K ⊗ |-α><α| + K* ⊗ |α><-α|.
// Index = 2 * bell + pointer.
Mat8 effective_three_qubit(double theta);
Vec8 pointer_product(const Vec4& atoms_bell, const Eigen::Vector2cd& pointer);

struct SplitResult {
    JointState state;
    JointState ideal;  // (c-Ψ- + d-Φ-)|α> + (c+Ψ+ - d+Φ+)|-α>
    double fidelity{0.0};
    double theta{0.0};
};

// G_θ followed by exact evolution over t_r/2. n_max <= 0 selects the default truncation.
SplitResult split_step(const BellAmplitudes& atoms, double alpha, const IntensityModel& model,
                       const LinearizedSpectrum& spectrum, int n_max = 0);

struct MeasurementOutcome {
    std::string label;
    double probability{0.0};
    bool valid{false};  // false when probability < 1e-12
    AtomicDensityMatrix postselected;
    Vec4 amplitudes = Vec4::Zero();  // normalized postselected Bell amplitudes
    Vec4 target = Vec4::Zero();      // expected Bell state, zero if none
    double expected_probability{0.0};
    double fidelity{0.0};            // |<target|postselected>|², 0 when invalid or no target
};

// Projection of the oscillator onto the coherent pointer |β>.
MeasurementOutcome povm_measure(const JointState& state, Complex pointer);
// Projection of both modes onto |β_a>|β_b>.
MeasurementOutcome povm_measure(const JointState& state, Complex pointer_a, Complex pointer_b);

struct GhzResult {
    JointState state;
    JointState ideal;  // (|gg>|α,-> + |ee>|α,+>)/√2, |α,±> = -(|-α> ± |α>)/√2
    double fidelity{0.0};
    double theta{0.0};
    AtomicDensityMatrix atoms;
};

GhzResult generate_ghz(double alpha, const IntensityModel& model, const LinearizedSpectrum& spectrum,
                       int n_max = 0);

struct WScan {
    int n_mean{0};
    double eta{0.0};  // η placing N at the ion-trap optimum
    double theta{0.0};
    double residual{0.0};  // |θ - π/4| reduced mod 2π
    int window_lo{0};
    int window_hi{0};
};

inline constexpr int kWWindowLo = 500;
inline constexpr int kWWindowHi = 2000;

// Integer N in [lo, hi], each at its optimal η, minimizing the θ residual.
// Throws ThetaMismatchError unless the best residual is < 0.01.
WScan scan_w_admissible(const IntensityModel& model, int lo = kWWindowLo, int hi = kWWindowHi);

struct WResult {
    WScan scan;
    Vec4 psi2 = Vec4::Zero();  // (|Ψ-> + i|Φ-> - i√2|Φ+>)/2
    double psi2_concurrence{0.0};
    Vec8 ideal_output = Vec8::Zero();  // T U|ψ1> in the pointer basis at θ = π/4
    double ideal_fidelity{0.0};
    JointState state;  // T U|ψ1> from the exact evolution at the scanned N
    double fidelity{0.0};
};

Vec8 w_initial_pointer();  // |ψ1> in the pointer basis
Vec8 w_target_pointer();   // (|ee>|α> + |ge>|-α> + |eg>|-α>)/√3

// Rejects the Buck-Sukumar and Tavis-Cummings models. The ion-trap coupling Ω is
// kept and η is set by the scan. full_simulation = false skips the Fock-space run.
WResult generate_w(const IntensityModel& model, bool full_simulation = true);

enum class BellPath { FullFock, PointerBasis };

struct BellMeasurementResult {
    std::vector<MeasurementOutcome> outcomes;  // (α,α), (α,-α), (-α,α), (-α,-α)
    double total_probability{0.0};
    double theta_a{0.0};
    double theta_b{0.0};
    int n_max{0};
};

inline constexpr int kBellMaxTruncation = 512;

// e^{-iS_zπ/2} G†_θ U_b e^{iS_zπ/2} U_a G_θ on |ψ>|α_a>|α_b>, then the four
// pointer projections. Targets: (α,α)→Ψ-, (α,-α)→Φ-, (-α,α)→Φ+, (-α,-α)→Ψ+.
BellMeasurementResult bell_measurement(const BellAmplitudes& atoms, double alpha_a, double alpha_b,
                                       const IntensityModel& model, BellPath path = BellPath::FullFock,
                                       int n_max = 0);

// Pointer-basis circuit with free angles; 16 amplitudes indexed (bell * 2 + pa) * 2 + pb.
Eigen::VectorXcd bell_circuit_pointer(const BellAmplitudes& atoms, double theta_a, double theta_b);

void write_outcomes_csv(std::ostream& os, const std::vector<MeasurementOutcome>& outcomes);

}  // namespace nltc
