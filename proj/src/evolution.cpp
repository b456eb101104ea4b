#include "nltc/evolution.hpp"

#include "nltc/errors.hpp"

#include <cmath>
#include <numbers>

namespace nltc {

namespace {

const Complex kI{0.0, 1.0};
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

double sinc(double x) {
    if (std::abs(x) < 1e-4) return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

void check_leak(const JointState& s) {
    if (s.tail_mass() > 1e-6) {
        throw TruncationError("evolution leaked probability into the truncation edge; increase n_max");
    }
}

// e^{-iσ S_z x}|φ_σ>, φ_σ = (|Ψ+> + σ|Φ+>)/√2, returned in the Bell basis.
Vec4 dressed_phi(int sigma, double x) {
    Vec4 internal = Vec4::Zero();
    internal[kPsiPlus] = kInvSqrt2;
    internal[kGG] = 0.5 * sigma * std::exp(kI * (sigma * x));
    internal[kEE] = 0.5 * sigma * std::exp(-kI * (sigma * x));
    return basis::internal_from_bell().adjoint() * internal;
}

Complex ipow(int k) {
    switch (((k % 4) + 4) % 4) {
        case 0: return 1.0;
        case 1: return kI;
        case 2: return -1.0;
        default: return -kI;
    }
}

}  // namespace

BlockPropagator::BlockPropagator(const SpectralData& spectrum, double t) : n_max_(spectrum.n_max), t_(t) {
    entries_.resize(n_max_ + 1);
    for (int n = 0; n <= n_max_; ++n) {
        Entry& e = entries_[n];
        e.a = (n + 1 <= n_max_) ? spectrum.capital_omega_n[n] : 0.0;
        e.b = (n >= 1) ? spectrum.capital_omega_n[n - 1] : 0.0;
        const double nu = std::hypot(e.a, e.b);
        e.c = std::cos(nu * t);
        e.s = t * sinc(nu * t);
        const double half = sinc(0.5 * nu * t);
        e.q = -0.5 * t * t * half * half;
    }
}

Eigen::Matrix3cd BlockPropagator::block(int n) const {
    if (n < 0 || n > n_max_) throw DomainError("block index out of range");
    const Entry& e = entries_[n];
    Eigen::Matrix3cd u;
    u(0, 0) = 1.0 + e.a * e.a * e.q;
    u(0, 1) = -kI * e.a * e.s;
    u(0, 2) = e.a * e.b * e.q;
    u(1, 0) = u(0, 1);
    u(1, 1) = e.c;
    u(1, 2) = -kI * e.b * e.s;
    u(2, 0) = u(0, 2);
    u(2, 1) = u(1, 2);
    u(2, 2) = 1.0 + e.b * e.b * e.q;
    return u;
}

void BlockPropagator::apply_slice(Complex* base, std::ptrdiff_t stride) const {
    // Process excitation blocks in increasing n. Block n reads gg at n+1, Ψ+ at n
    // and ee at n-1; no two blocks share an amplitude.
    for (int n = 0; n <= n_max_; ++n) {
        const Entry& e = entries_[n];
        Complex* gg = (n + 1 <= n_max_) ? base + (n + 1) * stride + kGG : nullptr;
        Complex* pp = base + n * stride + kPsiPlus;
        Complex* ee = (n >= 1) ? base + (n - 1) * stride + kEE : nullptr;
        const Complex x = gg ? *gg : Complex{};
        const Complex y = *pp;
        const Complex z = ee ? *ee : Complex{};
        const Complex mis_a = -kI * (e.a * e.s);
        const Complex mis_b = -kI * (e.b * e.s);
        const double abq = e.a * e.b * e.q;
        if (gg) *gg = (1.0 + e.a * e.a * e.q) * x + mis_a * y + abq * z;
        *pp = mis_a * x + e.c * y + mis_b * z;
        if (ee) *ee = abq * x + mis_b * y + (1.0 + e.b * e.b * e.q) * z;
    }
}

void BlockPropagator::apply(JointState& state, int mode) const {
    if (state.n_max() != n_max_) throw InvalidStateError("propagator truncation differs from the state");
    Complex* data = state.data().data();
    const std::ptrdiff_t d = state.fock_dim();
    if (state.mode_count() == 1) {
        if (mode != 0) throw std::invalid_argument("single-mode state has only mode 0");
        apply_slice(data, 4);
        return;
    }
    if (mode == 0) {
        for (std::ptrdiff_t mb = 0; mb < d; ++mb) apply_slice(data + 4 * mb, 4 * d);
    } else if (mode == 1) {
        for (std::ptrdiff_t ma = 0; ma < d; ++ma) apply_slice(data + 4 * d * ma, 4);
    } else {
        throw std::invalid_argument("mode index must be 0 or 1");
    }
}

JointState evolve_exact(const JointState& state, const SpectralData& spectrum, double t) {
    if (state.mode_count() != 1) throw std::invalid_argument("evolve_exact expects a single-mode state");
    return evolve_mode(state, spectrum, t, 0);
}

JointState evolve_exact(const JointState& state, const IntensityModel& model, double t) {
    return evolve_exact(state, tabulate_spectrum(model, state.n_max()), t);
}

JointState evolve_mode(const JointState& state, const SpectralData& spectrum, double t, int mode) {
    if (!(t >= 0.0)) throw DomainError("evolution time must be non-negative");
    JointState out = state;
    BlockPropagator(spectrum, t).apply(out, mode);
    check_leak(out);
    return out;
}

Eigen::MatrixXcd dense_interaction(const IntensityModel& model, int n_max) {
    if (n_max > kOracleMaxTruncation) throw SizeGuardError("dense oracle limited to n_max <= 64");
    const int dim = 4 * (n_max + 1);
    Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(dim, dim);
    // S+ in the bare basis (gg, ge, eg, ee): S+ = σ+ ⊗ 1 + 1 ⊗ σ+
    Eigen::Matrix4d splus = Eigen::Matrix4d::Zero();
    splus(1, 0) = 1.0;  // gg -> ge
    splus(2, 0) = 1.0;  // gg -> eg
    splus(3, 1) = 1.0;  // ge -> ee
    splus(3, 2) = 1.0;  // eg -> ee
    for (int m = 0; m < n_max; ++m) {
        // <m| f(a†a) a |m+1> Ω = Ω_m / √2
        const double amp = capital_omega(model, m) * kInvSqrt2;
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) {
                if (splus(i, j) == 0.0) continue;
                const int row = 4 * m + i;
                const int col = 4 * (m + 1) + j;
                v(row, col) += amp * splus(i, j);
                v(col, row) += amp * splus(i, j);
            }
        }
    }
    return v;
}

JointState evolve_oracle(const JointState& state, const IntensityModel& model, double t) {
    if (state.mode_count() != 1) throw std::invalid_argument("oracle expects a single-mode state");
    const int n_max = state.n_max();
    if (n_max > kOracleMaxTruncation) throw SizeGuardError("dense oracle limited to n_max <= 64");
    const Eigen::MatrixXcd v = dense_interaction(model, n_max);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(v);
    const Eigen::VectorXcd phases =
        (es.eigenvalues().cast<Complex>() * Complex(0.0, -t)).array().exp().matrix();
    const Eigen::MatrixXcd& w = es.eigenvectors();

    const Mat4 to_bare = basis::bare_from_bell() * basis::internal_from_bell().adjoint();
    Eigen::VectorXcd bare(state.size());
    for (int m = 0; m <= n_max; ++m) bare.segment<4>(4 * m) = to_bare * state.atomic_slice(m);
    const Eigen::VectorXcd evolved = w * phases.asDiagonal() * (w.adjoint() * bare);
    JointState out(1, n_max);
    for (int m = 0; m <= n_max; ++m) {
        out.data().segment<4>(4 * m) = to_bare.adjoint() * evolved.segment<4>(4 * m);
    }
    return out;
}

JointState materialize(const std::vector<CoherentComponent>& components, int n_max) {
    JointState out(1, n_max);
    const Mat4& t = basis::internal_from_bell();
    for (const auto& c : components) {
        const Vec4 atoms = t * c.atoms;
        if (atoms.squaredNorm() == 0.0) continue;
        const Eigen::VectorXcd field = coherent_amplitudes(c.label, n_max);
        for (int m = 0; m <= n_max; ++m) out.data().segment<4>(4 * m) += atoms * field[m];
    }
    return out;
}

CoherentComponent ApproxState::stationary() const {
    return CoherentComponent{Vec4(atoms.c_minus, 0.0, atoms.d_minus, 0.0), Complex(alpha, 0.0)};
}

std::vector<CoherentComponent> ApproxState::drifting() const {
    const double x = spectrum.omega_prime_N * t;
    const double dt = spectrum.delta_N * t;
    std::vector<CoherentComponent> out;
    for (int sigma : {+1, -1}) {
        const Complex b = sigma > 0 ? b_plus : b_minus;
        const Complex coef = b * std::exp(-kI * (sigma * dt));
        out.push_back({coef * dressed_phi(sigma, x), alpha * std::exp(-kI * (sigma * x))});
    }
    return out;
}

std::vector<CoherentComponent> ApproxState::components() const {
    std::vector<CoherentComponent> all{stationary()};
    for (auto& c : drifting()) all.push_back(c);
    return all;
}

JointState ApproxState::materialize(int n_max) const { return nltc::materialize(components(), n_max); }

ApproxState approx_state(const BellAmplitudes& atoms, double alpha, const LinearizedSpectrum& spectrum,
                         double t) {
    if (!(alpha >= 0.0)) throw DomainError("α must be non-negative");
    if (!(t >= 0.0)) throw DomainError("time must be non-negative");
    ApproxState a;
    a.atoms = atoms;
    a.b_plus = (atoms.c_plus + atoms.d_plus) * kInvSqrt2;
    a.b_minus = (atoms.c_plus - atoms.d_plus) * kInvSqrt2;
    a.alpha = alpha;
    a.spectrum = spectrum;
    a.t = t;
    a.normalization = normalization(a);
    return a;
}

double normalization(const ApproxState& a) {
    const double n = a.alpha * a.alpha;
    const double x = a.spectrum.omega_prime_N * a.t;
    const double dt = a.spectrum.delta_N * a.t;
    const double sx = std::sin(x);
    const double sh = std::sin(0.5 * x);
    const double h = dt + n * sx;
    const double env_half = std::exp(-2.0 * n * sh * sh);
    const double env_full = std::exp(-2.0 * n * sx * sx);
    const double base = a.atoms.norm_sq();
    const Complex pm = std::conj(a.b_plus) * a.b_minus * std::exp(kI * (2.0 * dt + n * std::sin(2.0 * x)));
    const Complex zeta = std::conj(a.atoms.d_minus) * (a.b_plus * std::exp(-kI * h) + a.b_minus * std::exp(kI * h));
    return base + 2.0 * pm.real() * env_full * sx * sx - std::sqrt(2.0) * zeta.imag() * env_half * sx;
}

JointState RevivalState::materialize(int n_max) const {
    std::vector<CoherentComponent> all{stationary};
    all.insert(all.end(), drifting.begin(), drifting.end());
    return nltc::materialize(all, n_max);
}

JointState RevivalState::materialize_time_dependent(int n_max) const {
    return nltc::materialize(drifting, n_max);
}

RevivalState quarter_revival_state(const BellAmplitudes& atoms, double alpha, const LinearizedSpectrum& spectrum,
                                   int k) {
    if (k % 2 == 0) throw ParityError("quarter-revival closed form needs odd k");
    RevivalState r;
    r.time = k * spectrum.t_revival / 4.0;
    r.stationary = CoherentComponent{Vec4(atoms.c_minus, 0.0, atoms.d_minus, 0.0), Complex(alpha, 0.0)};
    const double rr = std::sqrt(std::norm(atoms.c_plus) + std::norm(atoms.d_plus));
    if (rr == 0.0) return r;
    const int s = spectrum.omega_prime_N < 0.0 ? -1 : 1;
    // ζ_{1,k} = r (|Ψ+> + i^{sk}|Φ->)/√2
    r.atomic_factor = Vec4(0.0, rr * kInvSqrt2, rr * kInvSqrt2 * ipow(s * k), 0.0);
    const Vec4 unit = r.atomic_factor / rr;
    const Complex b_plus = (atoms.c_plus + atoms.d_plus) * kInvSqrt2;
    const Complex b_minus = (atoms.c_plus - atoms.d_plus) * kInvSqrt2;
    const double phase = k * spectrum.delta_N * spectrum.t_revival / 4.0;
    // pointers α e^{∓i s k π/2}
    const Complex turn = ipow(s * k);
    r.drifting.push_back({unit * (b_plus * std::exp(-kI * phase)), alpha * std::conj(turn)});
    r.drifting.push_back({unit * (b_minus * std::exp(kI * phase)), alpha * turn});
    return r;
}

RevivalState half_revival_state(const BellAmplitudes& atoms, double alpha, const LinearizedSpectrum& spectrum,
                                int k) {
    if (k % 2 == 0) throw ParityError("half-revival closed form needs odd k");
    RevivalState r;
    r.time = k * spectrum.t_revival / 2.0;
    r.stationary = CoherentComponent{Vec4(atoms.c_minus, 0.0, atoms.d_minus, 0.0), Complex(alpha, 0.0)};
    const double theta = spectrum.delta_N * k * spectrum.t_revival / 2.0;
    const Complex ck = atoms.c_plus * std::cos(theta) - kI * atoms.d_plus * std::sin(theta);
    const Complex dk = -ipow(2 * k + 1) * atoms.c_plus * std::sin(theta) + ipow(2 * k) * atoms.d_plus * std::cos(theta);
    r.atomic_factor = Vec4(0.0, ck, 0.0, dk);
    r.drifting.push_back({r.atomic_factor, Complex(-alpha, 0.0)});
    return r;
}

JointState to_laboratory_frame(const JointState& state, double phi, double omega_free, double t) {
    if (state.mode_count() != 1) throw std::invalid_argument("laboratory frame conversion is single-mode");
    JointState out = state;
    const double angle = omega_free * t - phi;
    for (int m = 0; m <= state.n_max(); ++m) {
        for (int a = 0; a < 4; ++a) {
            out.at(a, m) *= std::exp(-kI * (angle * (m + kSzOfAtom[a])));
        }
    }
    return out;
}

}  // namespace nltc
