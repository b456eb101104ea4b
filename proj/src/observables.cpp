#include "nltc/observables.hpp"

#include "nltc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

namespace nltc {

namespace {

constexpr double kPi = std::numbers::pi;

void require_single_mode(const JointState& s) {
    if (s.mode_count() != 1) throw std::invalid_argument("observable defined for single-mode states");
}

double atom_weight(const JointState& s, int atom) {
    double w = 0.0;
    for (int m = 0; m <= s.n_max(); ++m) w += std::norm(s.at(atom, m));
    return w;
}

// Rows: pure components of ρ scaled by sqrt of their weight, so that ρ = Σ v v†.
Eigen::MatrixXcd weighted_components(const Eigen::MatrixXcd& rho) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
    if (es.info() != Eigen::Success) throw InvalidStateError("oscillator density matrix eigensolver failed");
    std::vector<int> keep;
    for (int k = 0; k < es.eigenvalues().size(); ++k) {
        if (es.eigenvalues()[k] < -1e-9) throw InvalidStateError("oscillator density matrix is not positive");
        if (es.eigenvalues()[k] > 1e-14) keep.push_back(k);
    }
    Eigen::MatrixXcd out(keep.size(), rho.rows());
    for (std::size_t r = 0; r < keep.size(); ++r) {
        out.row(r) = std::sqrt(es.eigenvalues()[keep[r]]) * es.eigenvectors().col(keep[r]).transpose();
    }
    return out;
}

// components: rows are vectors u_k with ρ = Σ u_k u_k†.
HusimiGrid husimi_from_components(const Eigen::MatrixXcd& components, const HusimiWindow& w) {
    if (w.resolution < 2) throw DomainError("Husimi resolution must be at least 2");
    if (!(w.re_max > w.re_min) || !(w.im_max > w.im_min)) throw DomainError("empty Husimi window");
    HusimiGrid g;
    g.window = w;
    g.values.resize(w.resolution, w.resolution);
    const int n_max = static_cast<int>(components.cols()) - 1;
    for (int j = 0; j < w.resolution; ++j) {
        for (int i = 0; i < w.resolution; ++i) {
            const Eigen::VectorXcd beta = coherent_amplitudes(Complex(w.re(i), w.im(j)), n_max);
            // <β|u> = Σ conj(<m|β>) u_m
            const Eigen::VectorXcd proj = components * beta.conjugate();
            g.values(j, i) = proj.squaredNorm() / kPi;
        }
    }
    g.integral = g.values.sum() * w.cell_area();
    if (std::abs(g.integral - 1.0) > 0.02) {
        g.warnings.push_back("Husimi Riemann sum deviates from 1 by more than 2%; widen or refine the grid");
    }
    return g;
}

}  // namespace

double expect_sz(const JointState& state) {
    require_single_mode(state);
    return atom_weight(state, kEE) - atom_weight(state, kGG);
}

double expect_excitations(const JointState& state) {
    require_single_mode(state);
    double total = 0.0;
    for (int m = 0; m <= state.n_max(); ++m) {
        for (int a = 0; a < 4; ++a) total += std::norm(state.at(a, m)) * (m + kSzOfAtom[a]);
    }
    return total;
}

double expect_spin_squared(const JointState& state) {
    // S² is 0 on the singlet and 2 on the triplet
    return 2.0 * (state.norm_sq() - atom_weight(state, kPsiMinus));
}

double approx_sz(const LinearizedSpectrum& spectrum, double t) {
    const double n = spectrum.n_mean;
    const double x = spectrum.omega_prime_N * t;
    const double s = std::sin(0.5 * x);
    return std::exp(-2.0 * n * s * s) * std::cos(spectrum.delta_N * t + n * std::sin(x));
}

Complex coherent_overlap(double alpha, const LinearizedSpectrum& spectrum, double t) {
    const double n = alpha * alpha;
    const double x = spectrum.omega_prime_N * t;
    const double s = std::sin(0.5 * x);
    return std::exp(Complex(-2.0 * n * s * s, n * std::sin(x)));
}

HusimiWindow HusimiWindow::around(double alpha, int resolution) {
    const double h = 1.5 * alpha;
    return HusimiWindow{-h, h, -h, h, resolution};
}

double HusimiWindow::re(int i) const { return re_min + (re_max - re_min) * i / (resolution - 1); }
double HusimiWindow::im(int j) const { return im_min + (im_max - im_min) * j / (resolution - 1); }
double HusimiWindow::cell_area() const {
    return (re_max - re_min) / (resolution - 1) * (im_max - im_min) / (resolution - 1);
}

std::vector<HusimiPeak> HusimiGrid::local_maxima(double threshold) const {
    std::vector<HusimiPeak> peaks;
    const int n = window.resolution;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const double v = values(j, i);
            if (v <= threshold) continue;
            bool is_max = true;
            for (int dj = -1; dj <= 1 && is_max; ++dj) {
                for (int di = -1; di <= 1; ++di) {
                    if (di == 0 && dj == 0) continue;
                    const int jj = j + dj;
                    const int ii = i + di;
                    if (jj < 0 || jj >= n || ii < 0 || ii >= n) continue;
                    const double u = values(jj, ii);
                    // ties resolved toward the lower index so a flat top yields one peak
                    if (u > v || (u == v && (jj < j || (jj == j && ii < i)))) {
                        is_max = false;
                        break;
                    }
                }
            }
            if (is_max) peaks.push_back({Complex(window.re(i), window.im(j)), v});
        }
    }
    return peaks;
}

void HusimiGrid::write_csv(std::ostream& os) const {
    os << "beta_re,beta_im,Q\n";
    for (int j = 0; j < window.resolution; ++j) {
        for (int i = 0; i < window.resolution; ++i) {
            os << window.re(i) << ',' << window.im(j) << ',' << values(j, i) << '\n';
        }
    }
}

HusimiGrid husimi(const Eigen::MatrixXcd& rho_oscillator, const HusimiWindow& window) {
    if (rho_oscillator.rows() != rho_oscillator.cols() || rho_oscillator.rows() == 0) {
        throw InvalidStateError("oscillator density matrix must be square and non-empty");
    }
    if ((rho_oscillator - rho_oscillator.adjoint()).cwiseAbs().maxCoeff() > 1e-9) {
        throw InvalidStateError("oscillator density matrix is not Hermitian");
    }
    return husimi_from_components(weighted_components(rho_oscillator), window);
}

HusimiGrid husimi(const JointState& state, const HusimiWindow& window) {
    require_single_mode(state);
    // ρ_os = Σ_atom u_atom u_atom† with u_atom(m) = ψ(atom, m)
    Eigen::MatrixXcd comps(4, state.fock_dim());
    for (int a = 0; a < 4; ++a) {
        for (int m = 0; m <= state.n_max(); ++m) comps(a, m) = state.at(a, m);
    }
    return husimi_from_components(comps, window);
}

double state_fidelity(const JointState& exact, const JointState& approx, double normalization) {
    if (exact.size() != approx.size() || exact.mode_count() != approx.mode_count()) {
        throw std::invalid_argument("fidelity needs states of the same shape");
    }
    if (!(normalization > 0.0)) throw DomainError("normalization must be positive");
    return std::norm(inner_product(approx, exact)) / normalization;
}

double state_fidelity(const JointState& a, const JointState& b) {
    return state_fidelity(a, b, a.norm_sq() * b.norm_sq());
}

namespace {

Mat4 psd_sqrt(const Mat4& m) {
    Eigen::SelfAdjointEigenSolver<Mat4> es(m);
    Eigen::Vector4d ev = es.eigenvalues();
    for (int k = 0; k < 4; ++k) {
        if (ev[k] < -1e-9) throw InvalidStateError("density matrix is not positive semidefinite");
        ev[k] = ev[k] < 1e-12 ? 0.0 : std::sqrt(ev[k]);
    }
    return es.eigenvectors() * ev.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

double atomic_fidelity(const AtomicDensityMatrix& rho, const AtomicDensityMatrix& sigma) {
    const Mat4 s = psd_sqrt(rho.bell);
    Mat4 inner = s * sigma.bell * s;
    inner = 0.5 * (inner + inner.adjoint()).eval();
    const Mat4 root = psd_sqrt(inner);
    const double f = std::pow(root.trace().real(), 2);
    return std::clamp(f, 0.0, 1.0);
}

}  // namespace nltc
