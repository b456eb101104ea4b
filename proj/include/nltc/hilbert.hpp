// hilbert.hpp: two-atom states, truncated Fock spaces and joint atom-mode states
//
// Three atomic bases appear throughout:
//   bare      (|gg>, |ge>, |eg>, |ee>)      first atom on the left
//   Bell      (|Ψ->, |Ψ+>, |Φ->, |Φ+>)      Ψ± = (|ge> ± |eg>)/√2, Φ± = (|gg> ± |ee>)/√2
//   internal  (|Ψ->, |Ψ+>, |gg>, |ee>)      the basis in which V is block diagonal
// JointState stores amplitudes in the internal basis. Atomic operators and density
// matrices are exchanged in the Bell basis.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <string>

namespace nltc {

using Complex = std::complex<double>;
using Vec4 = Eigen::Vector4cd;
using Mat4 = Eigen::Matrix4cd;

// Internal atomic index of a JointState amplitude.
enum AtomIndex : int { kPsiMinus = 0, kPsiPlus = 1, kGG = 2, kEE = 3 };

// S_z eigenvalue of each internal atomic basis state.
inline constexpr int kSzOfAtom[4] = {0, 0, -1, 1};

namespace basis {
// Columns are the Bell states written in the bare basis: bare = bare_from_bell() * bell.
const Mat4& bare_from_bell();
// Columns are the Bell states written in the internal basis.
const Mat4& internal_from_bell();
// Change of basis for operators given in the Bell basis.
Mat4 bell_operator_to_bare(const Mat4& op_bell);
Mat4 bare_operator_to_bell(const Mat4& op_bare);
}  // namespace basis

// Two-atom pure state in the Bell basis: c-|Ψ-> + c+|Ψ+> + d-|Φ-> + d+|Φ+>.
struct BellAmplitudes {
    Complex c_minus{0.0};
    Complex c_plus{0.0};
    Complex d_minus{0.0};
    Complex d_plus{0.0};

    static BellAmplitudes from_bell_vector(const Vec4& v);
    static BellAmplitudes from_bare(const Vec4& bare);
    static BellAmplitudes from_internal(const Vec4& internal);
    // Named presets: gg, ee, ge, eg, psi+, psi-, phi+, phi-.
    static BellAmplitudes preset(const std::string& name);

    Vec4 bell_vector() const;
    Vec4 bare() const;
    Vec4 internal() const;

    Complex c_g() const;  // amplitude of |gg>
    Complex c_e() const;  // amplitude of |ee>

    double norm_sq() const;
    BellAmplitudes normalized() const;
};

struct CoherentSpec {
    double alpha{0.0};
    double phase{0.0};
    double n_mean() const { return alpha * alpha; }
};

// Exact Fock coefficients <m|β> = e^{-|β|²/2} β^m / sqrt(m!) for m <= n_max,
// evaluated in log space so that large |β| neither overflows nor underflows.
Eigen::VectorXcd coherent_amplitudes(Complex beta, int n_max);

// Truncated coherent state |α e^{iφ}>, renormalized after truncation.
// Throws TruncationError if the discarded tail exceeds 1e-8.
Eigen::VectorXcd coherent_fock(const CoherentSpec& spec, int n_max);

// Smallest truncation >= N + 8 sqrt(N) whose last five Fock levels carry less than
// 1e-12 of a Poisson(N) distribution.
int default_truncation(double n_mean);

// Amplitudes over {4 atomic states} x {Fock states of one or two modes}.
class JointState {
public:
    static constexpr int kMaxTwoModeTruncation = 4096;

    JointState() = default;
    JointState(int mode_count, int n_max);

    int mode_count() const { return mode_count_; }
    int n_max() const { return n_max_; }
    int fock_dim() const { return n_max_ + 1; }
    Eigen::Index size() const { return data_.size(); }

    Complex& at(int atom, int m) { return data_[index(atom, m)]; }
    Complex at(int atom, int m) const { return data_[index(atom, m)]; }
    Complex& at(int atom, int ma, int mb) { return data_[index(atom, ma, mb)]; }
    Complex at(int atom, int ma, int mb) const { return data_[index(atom, ma, mb)]; }

    Eigen::VectorXcd& data() { return data_; }
    const Eigen::VectorXcd& data() const { return data_; }

    double norm_sq() const { return data_.squaredNorm(); }
    // Probability carried by Fock levels above n_max - width (any mode).
    double tail_mass(int width = 5) const;
    // Atomic vector (internal basis) at a fixed Fock configuration.
    Vec4 atomic_slice(int m) const;

    Eigen::Index index(int atom, int m) const { return static_cast<Eigen::Index>(m) * 4 + atom; }
    Eigen::Index index(int atom, int ma, int mb) const {
        return (static_cast<Eigen::Index>(ma) * fock_dim() + mb) * 4 + atom;
    }

private:
    int mode_count_{1};
    int n_max_{0};
    Eigen::VectorXcd data_;
};

// |ψ>|φ> for an atomic state and one mode vector of length n_max+1.
JointState product_state(const BellAmplitudes& atoms, const Eigen::VectorXcd& field);
// |ψ>|φ_a>|φ_b> for two modes sharing the same truncation.
JointState product_state(const BellAmplitudes& atoms, const Eigen::VectorXcd& field_a,
                         const Eigen::VectorXcd& field_b);

// |ψ>|α>, with the tail-mass check applied to the result.
JointState build_initial(const BellAmplitudes& atoms, const CoherentSpec& field, int n_max);
JointState build_initial(const BellAmplitudes& atoms, const CoherentSpec& field_a,
                         const CoherentSpec& field_b, int n_max);

// Apply a 4x4 atomic operator given in the Bell basis to every Fock slice.
JointState apply_atomic(const JointState& state, const Mat4& op_bell);

// <a|b> over the full joint space; both states must have the same shape.
Complex inner_product(const JointState& a, const JointState& b);

// Pure state from the unitarily invariant measure on the unit sphere of C^4.
BellAmplitudes haar_random_two_qubit(std::uint64_t seed);
// Product of two independent single-qubit Haar states.
BellAmplitudes haar_random_product(std::uint64_t seed);
// Per-sample seed from a master seed; depends only on (master, index).
std::uint64_t sample_seed(std::uint64_t master, std::uint64_t index);

struct AtomicDensityMatrix {
    Mat4 bell = Mat4::Zero();

    static AtomicDensityMatrix from_pure(const BellAmplitudes& atoms);
    static AtomicDensityMatrix from_bell(const Mat4& m);

    Mat4 bare() const;
    Complex trace() const { return bell.trace(); }
    // Throws InvalidStateError when Hermiticity, unit trace or positivity fail.
    void validate(double tol = 1e-10) const;
};

AtomicDensityMatrix partial_trace_atoms(const JointState& state);
// Single-mode states only; (n_max+1)² Hermitian matrix.
Eigen::MatrixXcd partial_trace_oscillator(const JointState& state);

}  // namespace nltc
