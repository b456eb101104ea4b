#include "nltc/entanglement.hpp"

#include "nltc/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <functional>
#include <cmath>

namespace nltc {

double concurrence(const AtomicDensityMatrix& rho) {
    rho.validate(1e-8);
    const Mat4 bare = rho.bare();
    // σ_y ⊗ σ_y in (gg, ge, eg, ee)
    Mat4 yy = Mat4::Zero();
    yy(0, 3) = -1.0;
    yy(1, 2) = 1.0;
    yy(2, 1) = 1.0;
    yy(3, 0) = -1.0;
    const Mat4 flipped = yy * bare.conjugate() * yy;
    Eigen::ComplexEigenSolver<Mat4> es(bare * flipped, false);
    std::array<double, 4> lambda{};
    for (int k = 0; k < 4; ++k) {
        const double re = es.eigenvalues()[k].real();
        lambda[k] = re < 1e-10 ? 0.0 : std::sqrt(re);
    }
    std::sort(lambda.begin(), lambda.end(), std::greater<>());
    return std::max(0.0, lambda[0] - lambda[1] - lambda[2] - lambda[3]);
}

double pure_concurrence(const BellAmplitudes& a) {
    return std::abs(a.c_minus * a.c_minus - a.d_minus * a.d_minus - a.c_plus * a.c_plus + a.d_plus * a.d_plus);
}

double predicted_concurrence_quarter(const BellAmplitudes& a) {
    return std::abs(a.c_minus * a.c_minus - a.d_minus * a.d_minus);
}

double predicted_concurrence_half(const BellAmplitudes& a) {
    return std::abs(std::abs(a.c_minus * a.c_minus - a.d_minus * a.d_minus) -
                    std::abs(a.d_plus * a.d_plus - a.c_plus * a.c_plus));
}

double purity(const AtomicDensityMatrix& rho) { return (rho.bell * rho.bell).trace().real(); }

double predicted_purity(const BellAmplitudes& a, RevivalFraction which) {
    const double p = std::norm(a.c_minus) + std::norm(a.d_minus);
    if (which == RevivalFraction::Quarter) return p * p + (1.0 - p) * (1.0 - std::norm(a.c_minus));
    return p * p + (1.0 - p) * (1.0 - p);
}

}  // namespace nltc
