#include "nltc/protocols.hpp"

#include "nltc/entanglement.hpp"
#include "nltc/errors.hpp"
#include "nltc/observables.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

namespace nltc {

namespace {

constexpr double kPi = std::numbers::pi;
const Complex kI{0.0, 1.0};
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

Vec4 bell_unit(int k) {
    Vec4 v = Vec4::Zero();
    v[k] = 1.0;
    return v;
}

enum BellIndex : int { kBellPsiMinus = 0, kBellPsiPlus = 1, kBellPhiMinus = 2, kBellPhiPlus = 3 };

int resolve_truncation(int n_max, double n_mean) { return n_max > 0 ? n_max : default_truncation(n_mean); }

JointState evolve_half_revival(const JointState& state, const IntensityModel& model, const LinearizedSpectrum& s,
                               int mode = 0) {
    const SpectralData data = tabulate_spectrum(model, state.n_max());
    return evolve_mode(state, data, 0.5 * s.t_revival, mode);
}

JointState coherent_sum(const std::vector<CoherentComponent>& parts, int n_max) {
    return materialize(parts, n_max);
}

void finish_outcome(MeasurementOutcome& out, const Vec4& unnormalized_bell) {
    out.probability = unnormalized_bell.squaredNorm();
    out.valid = out.probability >= 1e-12;
    if (!out.valid) return;
    out.amplitudes = unnormalized_bell / std::sqrt(out.probability);
    out.postselected = AtomicDensityMatrix::from_bell(out.amplitudes * out.amplitudes.adjoint());
    if (out.target.squaredNorm() > 0.0) out.fidelity = std::norm(out.target.dot(out.amplitudes));
}

std::string pointer_label(double sign) { return sign > 0 ? "+a" : "-a"; }

}  // namespace

Mat2 qubit_g(double theta) {
    Mat2 g;
    g << std::cos(0.5 * theta), kI * std::sin(0.5 * theta), kI * std::sin(0.5 * theta), std::cos(0.5 * theta);
    return g;
}

Mat2 qubit_gamma() {
    Mat2 g = Mat2::Zero();
    g(0, 0) = 1.0;
    g(1, 1) = kI;
    return g;
}

Mat4 local_product(const Mat2& a, const Mat2& b) {
    Mat4 bare;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l) bare(2 * i + j, 2 * k + l) = a(i, k) * b(j, l);
    return basis::bare_operator_to_bell(bare);
}

Mat4 gate_g_theta(double theta) { return local_product(qubit_g(theta), qubit_g(theta)); }

Mat4 sz_rotation(double angle) {
    Mat4 bare = Mat4::Zero();
    bare(0, 0) = std::exp(-kI * angle);
    bare(1, 1) = 1.0;
    bare(2, 2) = 1.0;
    bare(3, 3) = std::exp(kI * angle);
    return basis::bare_operator_to_bell(bare);
}

Mat4 gate_t() {
    const Mat2 g = qubit_g(kPi / 4.0);
    return local_product(qubit_gamma() * g.adjoint(), qubit_gamma() * g);
}

Vec4 psi_theta(double theta) {
    return std::cos(theta) * bell_unit(kBellPsiPlus) + kI * std::sin(theta) * bell_unit(kBellPhiPlus);
}

Vec4 phi_theta(double theta) {
    return -kI * std::sin(theta) * bell_unit(kBellPsiPlus) - std::cos(theta) * bell_unit(kBellPhiPlus);
}

Mat4 povm_m() {
    Mat4 m = Mat4::Zero();
    m(kBellPsiMinus, kBellPsiMinus) = 1.0;
    m(kBellPhiMinus, kBellPhiMinus) = 1.0;
    return m;
}

Mat4 povm_l() {
    Mat4 l = Mat4::Zero();
    l(kBellPsiPlus, kBellPsiPlus) = 1.0;
    l(kBellPhiPlus, kBellPhiPlus) = -1.0;
    return l;
}

Mat4 kraus_k(double theta) {
    return psi_theta(theta) * bell_unit(kBellPsiPlus).adjoint() + phi_theta(theta) * bell_unit(kBellPhiPlus).adjoint();
}

double theta_from_spectrum(const LinearizedSpectrum& s) { return kPi * s.delta_N / std::abs(s.omega_prime_N); }

Mat8 effective_three_qubit(double theta) {
    const Mat4 m = povm_m();
    const Mat4 k = kraus_k(theta);
    const Mat4 kc = k.conjugate();
    Mat8 u = Mat8::Zero();
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            u(2 * r, 2 * c) += m(r, c);
            u(2 * r + 1, 2 * c + 1) += m(r, c);
            u(2 * r + 1, 2 * c) += k(r, c);   // |−α><α|
            u(2 * r, 2 * c + 1) += kc(r, c);  // |α><−α|
        }
    }
    return u;
}

Vec8 pointer_product(const Vec4& atoms_bell, const Eigen::Vector2cd& pointer) {
    Vec8 v;
    for (int r = 0; r < 4; ++r)
        for (int p = 0; p < 2; ++p) v[2 * r + p] = atoms_bell[r] * pointer[p];
    return v;
}

SplitResult split_step(const BellAmplitudes& atoms, double alpha, const IntensityModel& model,
                       const LinearizedSpectrum& spectrum, int n_max) {
    const int trunc = resolve_truncation(n_max, alpha * alpha);
    SplitResult r;
    r.theta = theta_from_spectrum(spectrum);
    JointState s = build_initial(atoms, CoherentSpec{alpha, 0.0}, trunc);
    s = apply_atomic(s, gate_g_theta(r.theta));
    r.state = evolve_half_revival(s, model, spectrum);
    const Vec4 stay(atoms.c_minus, 0.0, atoms.d_minus, 0.0);
    const Vec4 flip(0.0, atoms.c_plus, 0.0, -atoms.d_plus);
    r.ideal = coherent_sum({{stay, Complex(alpha)}, {flip, Complex(-alpha)}}, trunc);
    r.fidelity = state_fidelity(r.state, r.ideal);
    return r;
}

MeasurementOutcome povm_measure(const JointState& state, Complex pointer) {
    if (state.mode_count() != 1) throw std::invalid_argument("single-pointer measurement needs a single-mode state");
    const Eigen::VectorXcd beta = coherent_amplitudes(pointer, state.n_max());
    Vec4 internal = Vec4::Zero();
    for (int m = 0; m <= state.n_max(); ++m) internal += std::conj(beta[m]) * state.atomic_slice(m);
    MeasurementOutcome out;
    out.label = pointer.real() >= 0 ? "+a" : "-a";
    finish_outcome(out, basis::internal_from_bell().adjoint() * internal);
    return out;
}

MeasurementOutcome povm_measure(const JointState& state, Complex pointer_a, Complex pointer_b) {
    if (state.mode_count() != 2) throw std::invalid_argument("two-pointer measurement needs a two-mode state");
    const int n = state.n_max();
    const Eigen::VectorXcd ba = coherent_amplitudes(pointer_a, n);
    const Eigen::VectorXcd bb = coherent_amplitudes(pointer_b, n);
    Vec4 internal = Vec4::Zero();
    for (int ma = 0; ma <= n; ++ma) {
        Vec4 row = Vec4::Zero();
        for (int mb = 0; mb <= n; ++mb) row += std::conj(bb[mb]) * state.data().segment<4>(state.index(0, ma, mb));
        internal += std::conj(ba[ma]) * row;
    }
    MeasurementOutcome out;
    out.label = "(" + pointer_label(pointer_a.real()) + "," + pointer_label(pointer_b.real()) + ")";
    finish_outcome(out, basis::internal_from_bell().adjoint() * internal);
    return out;
}

GhzResult generate_ghz(double alpha, const IntensityModel& model, const LinearizedSpectrum& spectrum, int n_max) {
    const SplitResult split = split_step(BellAmplitudes::preset("gg"), alpha, model, spectrum, n_max);
    GhzResult g;
    g.state = split.state;
    g.theta = split.theta;
    const int trunc = split.state.n_max();
    // |gg>|α,-> + |ee>|α,+> with |α,±> = -(|-α> ± |α>)/√2
    const Vec4 gg = BellAmplitudes::preset("gg").bell_vector();
    const Vec4 ee = BellAmplitudes::preset("ee").bell_vector();
    g.ideal = coherent_sum({{0.5 * (gg - ee), Complex(alpha)}, {-0.5 * (gg + ee), Complex(-alpha)}}, trunc);
    g.fidelity = state_fidelity(g.state, g.ideal);
    g.atoms = partial_trace_atoms(g.state);
    return g;
}

WScan scan_w_admissible(const IntensityModel& model, int lo, int hi) {
    if (model.kind != CouplingKind::IonTrap) {
        throw ThetaMismatchError("θ = π/4 cannot be reached: " + to_string(model.kind) +
                                 " has an N-independent revival angle");
    }
    if (lo < 1 || hi < lo) throw DomainError("empty N window");
    WScan best;
    best.window_lo = lo;
    best.window_hi = hi;
    best.residual = std::numeric_limits<double>::infinity();
    for (int n = lo; n <= hi; ++n) {
        const double eta = ion_trap_eta_for(n);
        const double theta = theta_from_spectrum(linearize(IntensityModel::ion_trap(eta, model.omega_coupling), n));
        const double res = std::abs(std::remainder(theta - kPi / 4.0, 2.0 * kPi));
        if (res < best.residual) {
            best.n_mean = n;
            best.eta = eta;
            best.theta = theta;
            best.residual = res;
        }
    }
    if (!(best.residual < 0.01)) {
        throw ThetaMismatchError("no admissible N: smallest θ residual is " + std::to_string(best.residual) + " rad");
    }
    return best;
}

Vec8 w_initial_pointer() {
    // |g>(|g> + i|e>)/√2 (|α> + √2|−α>)/√3
    Vec4 bare = Vec4::Zero();
    bare[0] = kInvSqrt2;       // gg
    bare[1] = kI * kInvSqrt2;  // ge
    const Vec4 atoms = BellAmplitudes::from_bare(bare).bell_vector();
    return pointer_product(atoms, Eigen::Vector2cd(1.0, std::sqrt(2.0)) / std::sqrt(3.0));
}

Vec8 w_target_pointer() {
    const Vec4 ee = BellAmplitudes::preset("ee").bell_vector();
    const Vec4 ge = BellAmplitudes::preset("ge").bell_vector();
    const Vec4 eg = BellAmplitudes::preset("eg").bell_vector();
    const Vec8 v = pointer_product(ee, Eigen::Vector2cd(1.0, 0.0)) + pointer_product(ge + eg, Eigen::Vector2cd(0.0, 1.0));
    return v / std::sqrt(3.0);
}

WResult generate_w(const IntensityModel& model, bool full_simulation) {
    WResult w;
    w.scan = scan_w_admissible(model);
    w.psi2 = Vec4(0.5, 0.0, 0.5 * kI, -kI * std::sqrt(2.0) / 2.0);
    w.psi2_concurrence = pure_concurrence(BellAmplitudes::from_bell_vector(w.psi2));

    Mat8 t8 = Mat8::Zero();
    const Mat4 t = gate_t();
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
            for (int p = 0; p < 2; ++p) t8(2 * r + p, 2 * c + p) = t(r, c);
    w.ideal_output = t8 * effective_three_qubit(kPi / 4.0) * w_initial_pointer();
    w.ideal_fidelity = std::norm(w_target_pointer().dot(w.ideal_output));

    if (!full_simulation) return w;
    const double n = w.scan.n_mean;
    const double alpha = std::sqrt(n);
    const IntensityModel tuned = IntensityModel::ion_trap(w.scan.eta, model.omega_coupling);
    const LinearizedSpectrum spectrum = linearize(tuned, n);
    const int trunc = default_truncation(n);
    Vec4 bare = Vec4::Zero();
    bare[0] = kInvSqrt2;
    bare[1] = kI * kInvSqrt2;
    const Vec4 atoms = BellAmplitudes::from_bare(bare).bell_vector();
    JointState s = coherent_sum({{atoms, Complex(alpha)}, {std::sqrt(2.0) * atoms, Complex(-alpha)}}, trunc);
    s.data() /= std::sqrt(s.norm_sq());
    s = evolve_half_revival(s, tuned, spectrum);
    w.state = apply_atomic(s, t);
    const Vec4 ee = BellAmplitudes::preset("ee").bell_vector();
    const Vec4 sym = BellAmplitudes::preset("ge").bell_vector() + BellAmplitudes::preset("eg").bell_vector();
    const JointState target = coherent_sum({{ee, Complex(alpha)}, {sym, Complex(-alpha)}}, trunc);
    w.fidelity = state_fidelity(w.state, target);
    return w;
}

Eigen::VectorXcd bell_circuit_pointer(const BellAmplitudes& atoms, double theta_a, double theta_b) {
    // index (bell * 2 + pa) * 2 + pb
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(16);
    const Vec4 a0 = gate_g_theta(theta_a) * atoms.bell_vector();
    for (int r = 0; r < 4; ++r) v[(r * 2 + 0) * 2 + 0] = a0[r];

    auto apply_atomic16 = [&](const Mat4& op) {
        Eigen::VectorXcd out = Eigen::VectorXcd::Zero(16);
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c)
                for (int p = 0; p < 4; ++p) out[r * 4 + p] += op(r, c) * v[c * 4 + p];
        v = out;
    };
    auto apply_mode = [&](const Mat8& u, int mode) {
        Eigen::VectorXcd out = Eigen::VectorXcd::Zero(16);
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c)
                for (int pr = 0; pr < 2; ++pr)
                    for (int pc = 0; pc < 2; ++pc)
                        for (int other = 0; other < 2; ++other) {
                            const int row = mode == 0 ? (r * 2 + pr) * 2 + other : (r * 2 + other) * 2 + pr;
                            const int col = mode == 0 ? (c * 2 + pc) * 2 + other : (c * 2 + other) * 2 + pc;
                            out[row] += u(2 * r + pr, 2 * c + pc) * v[col];
                        }
        v = out;
    };
    apply_mode(effective_three_qubit(theta_a), 0);
    apply_atomic16(sz_rotation(kPi / 2.0));
    apply_mode(effective_three_qubit(theta_b), 1);
    apply_atomic16(gate_g_theta(theta_b).adjoint());
    apply_atomic16(sz_rotation(-kPi / 2.0));
    return v;
}

BellMeasurementResult bell_measurement(const BellAmplitudes& atoms, double alpha_a, double alpha_b,
                                       const IntensityModel& model, BellPath path, int n_max) {
    const LinearizedSpectrum sa = linearize(model, alpha_a * alpha_a);
    const LinearizedSpectrum sb = linearize(model, alpha_b * alpha_b);
    BellMeasurementResult res;
    res.theta_a = theta_from_spectrum(sa);
    res.theta_b = theta_from_spectrum(sb);

    struct Slot {
        double sa, sb;
        int target;
        Complex expected;
    };
    const Slot slots[4] = {{+1, +1, kBellPsiMinus, atoms.c_minus},
                           {+1, -1, kBellPhiMinus, atoms.d_minus},
                           {-1, +1, kBellPhiPlus, atoms.d_plus},
                           {-1, -1, kBellPsiPlus, atoms.c_plus}};

    if (path == BellPath::PointerBasis) {
        const Eigen::VectorXcd v = bell_circuit_pointer(atoms, res.theta_a, res.theta_b);
        for (const Slot& sl : slots) {
            const int pa = sl.sa > 0 ? 0 : 1;
            const int pb = sl.sb > 0 ? 0 : 1;
            Vec4 bell;
            for (int r = 0; r < 4; ++r) bell[r] = v[(r * 2 + pa) * 2 + pb];
            MeasurementOutcome out;
            out.label = "(" + pointer_label(sl.sa) + "," + pointer_label(sl.sb) + ")";
            out.target = bell_unit(sl.target);
            out.expected_probability = std::norm(sl.expected);
            finish_outcome(out, bell);
            res.total_probability += out.probability;
            res.outcomes.push_back(out);
        }
        return res;
    }

    const int trunc = n_max > 0 ? n_max : default_truncation(std::max(alpha_a, alpha_b) * std::max(alpha_a, alpha_b));
    if (trunc > kBellMaxTruncation) {
        throw SizeGuardError("two-mode Bell measurement limited to n_max <= 512 per mode; use the pointer-basis path");
    }
    res.n_max = trunc;
    JointState s = build_initial(atoms, CoherentSpec{alpha_a, 0.0}, CoherentSpec{alpha_b, 0.0}, trunc);
    const SpectralData data = tabulate_spectrum(model, trunc);
    s = apply_atomic(s, gate_g_theta(res.theta_a));
    s = evolve_mode(s, data, 0.5 * sa.t_revival, 0);
    s = apply_atomic(s, sz_rotation(kPi / 2.0));
    s = evolve_mode(s, data, 0.5 * sb.t_revival, 1);
    s = apply_atomic(s, sz_rotation(-kPi / 2.0) * gate_g_theta(res.theta_b).adjoint());
    for (const Slot& sl : slots) {
        MeasurementOutcome out = povm_measure(s, Complex(sl.sa * alpha_a), Complex(sl.sb * alpha_b));
        out.target = bell_unit(sl.target);
        out.expected_probability = std::norm(sl.expected);
        if (out.valid) out.fidelity = std::norm(out.target.dot(out.amplitudes));
        res.total_probability += out.probability;
        res.outcomes.push_back(out);
    }
    return res;
}

void write_outcomes_csv(std::ostream& os, const std::vector<MeasurementOutcome>& outcomes) {
    os << "outcome,probability,expected_probability,valid,"
          "psi_minus_re,psi_minus_im,psi_plus_re,psi_plus_im,phi_minus_re,phi_minus_im,phi_plus_re,phi_plus_im,"
          "fidelity\n";
    for (const auto& o : outcomes) {
        os << o.label << ',' << o.probability << ',' << o.expected_probability << ',' << (o.valid ? 1 : 0);
        for (int r = 0; r < 4; ++r) os << ',' << o.amplitudes[r].real() << ',' << o.amplitudes[r].imag();
        os << ',' << o.fidelity << '\n';
    }
}

}  // namespace nltc
