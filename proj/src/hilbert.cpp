#include "nltc/hilbert.hpp"

#include "nltc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace nltc {

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

Mat4 make_bare_from_bell() {
    const double s = kInvSqrt2;
    Mat4 b = Mat4::Zero();
    // columns: Ψ-, Ψ+, Φ-, Φ+ ; rows: gg, ge, eg, ee
    b(1, 0) = s;  b(2, 0) = -s;
    b(1, 1) = s;  b(2, 1) = s;
    b(0, 2) = s;  b(3, 2) = -s;
    b(0, 3) = s;  b(3, 3) = s;
    return b;
}

Mat4 make_internal_from_bell() {
    const double s = kInvSqrt2;
    Mat4 b = Mat4::Zero();
    // columns: Ψ-, Ψ+, Φ-, Φ+ ; rows: Ψ-, Ψ+, gg, ee
    b(0, 0) = 1.0;
    b(1, 1) = 1.0;
    b(2, 2) = s;  b(3, 2) = -s;
    b(2, 3) = s;  b(3, 3) = s;
    return b;
}

double poisson_tail_above(double n_mean, int m) {
    // P(n > m) for Poisson(n_mean), summed in log space from m+1 upwards.
    if (n_mean == 0.0) return 0.0;
    double tail = 0.0;
    const double log_n = std::log(n_mean);
    for (int n = m + 1;; ++n) {
        const double term = std::exp(-n_mean + n * log_n - std::lgamma(n + 1.0));
        tail += term;
        if (n > n_mean && term < 1e-18 * std::max(tail, 1e-300)) break;
        if (n > m + 100000) break;
    }
    return tail;
}

}  // namespace

namespace basis {

const Mat4& bare_from_bell() {
    static const Mat4 m = make_bare_from_bell();
    return m;
}

const Mat4& internal_from_bell() {
    static const Mat4 m = make_internal_from_bell();
    return m;
}

Mat4 bell_operator_to_bare(const Mat4& op_bell) {
    const Mat4& b = bare_from_bell();
    return b * op_bell * b.adjoint();
}

Mat4 bare_operator_to_bell(const Mat4& op_bare) {
    const Mat4& b = bare_from_bell();
    return b.adjoint() * op_bare * b;
}

}  // namespace basis

BellAmplitudes BellAmplitudes::from_bell_vector(const Vec4& v) {
    return BellAmplitudes{v[0], v[1], v[2], v[3]};
}

BellAmplitudes BellAmplitudes::from_bare(const Vec4& bare) {
    return from_bell_vector(basis::bare_from_bell().adjoint() * bare);
}

BellAmplitudes BellAmplitudes::from_internal(const Vec4& internal) {
    return from_bell_vector(basis::internal_from_bell().adjoint() * internal);
}

BellAmplitudes BellAmplitudes::preset(const std::string& name) {
    Vec4 bare = Vec4::Zero();
    if (name == "gg") {
        bare[0] = 1.0;
    } else if (name == "ge") {
        bare[1] = 1.0;
    } else if (name == "eg") {
        bare[2] = 1.0;
    } else if (name == "ee") {
        bare[3] = 1.0;
    } else if (name == "psi-") {
        return BellAmplitudes{1.0, 0.0, 0.0, 0.0};
    } else if (name == "psi+") {
        return BellAmplitudes{0.0, 1.0, 0.0, 0.0};
    } else if (name == "phi-") {
        return BellAmplitudes{0.0, 0.0, 1.0, 0.0};
    } else if (name == "phi+") {
        return BellAmplitudes{0.0, 0.0, 0.0, 1.0};
    } else {
        throw std::invalid_argument("unknown atomic preset '" + name + "'");
    }
    return from_bare(bare);
}

Vec4 BellAmplitudes::bell_vector() const { return Vec4(c_minus, c_plus, d_minus, d_plus); }

Vec4 BellAmplitudes::bare() const { return basis::bare_from_bell() * bell_vector(); }

Vec4 BellAmplitudes::internal() const { return basis::internal_from_bell() * bell_vector(); }

Complex BellAmplitudes::c_g() const { return (d_plus + d_minus) * kInvSqrt2; }

Complex BellAmplitudes::c_e() const { return (d_plus - d_minus) * kInvSqrt2; }

double BellAmplitudes::norm_sq() const { return bell_vector().squaredNorm(); }

BellAmplitudes BellAmplitudes::normalized() const {
    const double n = std::sqrt(norm_sq());
    if (n == 0.0) throw InvalidStateError("cannot normalize a zero atomic state");
    return from_bell_vector(bell_vector() / n);
}

Eigen::VectorXcd coherent_amplitudes(Complex beta, int n_max) {
    if (n_max < 0) throw DomainError("n_max must be non-negative");
    Eigen::VectorXcd c(n_max + 1);
    const double r = std::abs(beta);
    const double phase = std::arg(beta);
    const double r2 = r * r;
    if (r == 0.0) {
        c.setZero();
        c[0] = 1.0;
        return c;
    }
    const double log_r = std::log(r);
    for (int m = 0; m <= n_max; ++m) {
        const double log_mag = -0.5 * r2 + m * log_r - 0.5 * std::lgamma(m + 1.0);
        c[m] = std::polar(std::exp(log_mag), m * phase);
    }
    return c;
}

Eigen::VectorXcd coherent_fock(const CoherentSpec& spec, int n_max) {
    if (!(spec.alpha >= 0.0)) throw DomainError("coherent amplitude α must be non-negative");
    Eigen::VectorXcd c = coherent_amplitudes(std::polar(spec.alpha, spec.phase), n_max);
    const double kept = c.squaredNorm();
    const double tail = 1.0 - kept;
    if (tail > 1e-8) {
        std::ostringstream os;
        os << "coherent state with N=" << spec.n_mean() << " loses " << tail
           << " of its norm at n_max=" << n_max;
        throw TruncationError(os.str());
    }
    c /= std::sqrt(kept);
    return c;
}

int default_truncation(double n_mean) {
    if (!(n_mean >= 0.0)) throw DomainError("mean quantum number must be non-negative");
    int m = static_cast<int>(std::ceil(n_mean + 8.0 * std::sqrt(n_mean)));
    m = std::max(m, 5);
    while (poisson_tail_above(n_mean, m - 5) > 1e-12) ++m;
    return m;
}

JointState::JointState(int mode_count, int n_max) : mode_count_(mode_count), n_max_(n_max) {
    if (mode_count != 1 && mode_count != 2) throw std::invalid_argument("mode_count must be 1 or 2");
    if (n_max < 0) throw DomainError("n_max must be non-negative");
    if (mode_count == 2 && n_max > kMaxTwoModeTruncation) {
        throw SizeGuardError("two-mode state rejected: n_max per mode exceeds 4096");
    }
    const Eigen::Index d = n_max + 1;
    data_ = Eigen::VectorXcd::Zero(4 * (mode_count == 1 ? d : d * d));
}

double JointState::tail_mass(int width) const {
    const int first = std::max(0, n_max_ - width + 1);
    double tail = 0.0;
    if (mode_count_ == 1) {
        for (int m = first; m <= n_max_; ++m) tail += atomic_slice(m).squaredNorm();
        return tail;
    }
    for (int ma = 0; ma <= n_max_; ++ma) {
        for (int mb = 0; mb <= n_max_; ++mb) {
            if (ma < first && mb < first) continue;
            for (int a = 0; a < 4; ++a) tail += std::norm(at(a, ma, mb));
        }
    }
    return tail;
}

Vec4 JointState::atomic_slice(int m) const { return data_.segment<4>(index(0, m)); }

JointState product_state(const BellAmplitudes& atoms, const Eigen::VectorXcd& field) {
    const int n_max = static_cast<int>(field.size()) - 1;
    JointState s(1, n_max);
    const Vec4 a = atoms.internal();
    for (int m = 0; m <= n_max; ++m) s.data().segment<4>(s.index(0, m)) = a * field[m];
    return s;
}

JointState product_state(const BellAmplitudes& atoms, const Eigen::VectorXcd& field_a,
                         const Eigen::VectorXcd& field_b) {
    if (field_a.size() != field_b.size()) {
        throw InvalidStateError("two-mode product state needs equal truncations");
    }
    const int n_max = static_cast<int>(field_a.size()) - 1;
    JointState s(2, n_max);
    const Vec4 a = atoms.internal();
    for (int ma = 0; ma <= n_max; ++ma) {
        for (int mb = 0; mb <= n_max; ++mb) {
            s.data().segment<4>(s.index(0, ma, mb)) = a * (field_a[ma] * field_b[mb]);
        }
    }
    return s;
}

JointState build_initial(const BellAmplitudes& atoms, const CoherentSpec& field, int n_max) {
    if (std::abs(atoms.norm_sq() - 1.0) > 1e-12) throw InvalidStateError("atomic state is not normalized");
    JointState s = product_state(atoms, coherent_fock(field, n_max));
    if (s.tail_mass() > 1e-8) throw TruncationError("initial state has significant mass near n_max");
    return s;
}

JointState build_initial(const BellAmplitudes& atoms, const CoherentSpec& field_a,
                         const CoherentSpec& field_b, int n_max) {
    if (std::abs(atoms.norm_sq() - 1.0) > 1e-12) throw InvalidStateError("atomic state is not normalized");
    JointState s = product_state(atoms, coherent_fock(field_a, n_max), coherent_fock(field_b, n_max));
    if (s.tail_mass() > 1e-8) throw TruncationError("initial state has significant mass near n_max");
    return s;
}

JointState apply_atomic(const JointState& state, const Mat4& op_bell) {
    const Mat4& t = basis::internal_from_bell();
    const Mat4 op = t * op_bell * t.adjoint();
    JointState out = state;
    const Eigen::Index slices = state.size() / 4;
    for (Eigen::Index k = 0; k < slices; ++k) {
        out.data().segment<4>(4 * k) = op * state.data().segment<4>(4 * k);
    }
    return out;
}

Complex inner_product(const JointState& a, const JointState& b) {
    if (a.mode_count() != b.mode_count() || a.n_max() != b.n_max()) {
        throw InvalidStateError("inner product between states of different shape");
    }
    return a.data().dot(b.data());
}

std::uint64_t sample_seed(std::uint64_t master, std::uint64_t index) {
    // splitmix64 finalizer over a counter
    std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

BellAmplitudes haar_random_two_qubit(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vec4 v;
    for (int i = 0; i < 4; ++i) v[i] = Complex(gauss(rng), gauss(rng));
    return BellAmplitudes::from_bell_vector(v / v.norm());
}

BellAmplitudes haar_random_product(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::Vector2cd q1, q2;
    for (int i = 0; i < 2; ++i) q1[i] = Complex(gauss(rng), gauss(rng));
    for (int i = 0; i < 2; ++i) q2[i] = Complex(gauss(rng), gauss(rng));
    q1.normalize();
    q2.normalize();
    const Vec4 bare(q1[0] * q2[0], q1[0] * q2[1], q1[1] * q2[0], q1[1] * q2[1]);
    return BellAmplitudes::from_bare(bare);
}

AtomicDensityMatrix AtomicDensityMatrix::from_pure(const BellAmplitudes& atoms) {
    const Vec4 v = atoms.bell_vector();
    return AtomicDensityMatrix{v * v.adjoint()};
}

AtomicDensityMatrix AtomicDensityMatrix::from_bell(const Mat4& m) { return AtomicDensityMatrix{m}; }

Mat4 AtomicDensityMatrix::bare() const { return basis::bell_operator_to_bare(bell); }

void AtomicDensityMatrix::validate(double tol) const {
    if ((bell - bell.adjoint()).cwiseAbs().maxCoeff() > tol) {
        throw InvalidStateError("density matrix is not Hermitian");
    }
    if (std::abs(bell.trace() - 1.0) > tol) throw InvalidStateError("density matrix trace differs from 1");
    Eigen::SelfAdjointEigenSolver<Mat4> es(bell);
    if (es.eigenvalues().minCoeff() < -tol) throw InvalidStateError("density matrix has a negative eigenvalue");
}

AtomicDensityMatrix partial_trace_atoms(const JointState& state) {
    const Eigen::Index slices = state.size() / 4;
    Mat4 rho = Mat4::Zero();
    for (Eigen::Index k = 0; k < slices; ++k) {
        const Vec4 v = state.data().segment<4>(4 * k);
        rho.noalias() += v * v.adjoint();
    }
    const Mat4& t = basis::internal_from_bell();
    return AtomicDensityMatrix{t.adjoint() * rho * t};
}

Eigen::MatrixXcd partial_trace_oscillator(const JointState& state) {
    if (state.mode_count() != 1) {
        throw std::invalid_argument("partial_trace_oscillator supports single-mode states");
    }
    const int d = state.fock_dim();
    // rows of `amp` are Fock levels, columns atomic states
    Eigen::MatrixXcd amp(d, 4);
    for (int m = 0; m < d; ++m) amp.row(m) = state.atomic_slice(m).transpose();
    return amp * amp.adjoint();
}

}  // namespace nltc
