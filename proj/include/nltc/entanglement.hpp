// entanglement.hpp: concurrence, purity and their closed-form revival predictions

#pragma once

#include "nltc/hilbert.hpp"

namespace nltc {

// Wootters concurrence, spin flip taken in the bare basis.
double concurrence(const AtomicDensityMatrix& rho);

// |c-² - d-² - c+² + d+²| with complex squares.
double pure_concurrence(const BellAmplitudes& atoms);

// Atomic concurrence at odd multiples of t_r/4: |c-² - d-²|.
double predicted_concurrence_quarter(const BellAmplitudes& atoms);
// Atomic concurrence at odd multiples of t_r/2: ||c-² - d-²| - |d+² - c+²||.
double predicted_concurrence_half(const BellAmplitudes& atoms);

double purity(const AtomicDensityMatrix& rho);

enum class RevivalFraction { Quarter, Half };
// p² + (1-p)(1-|c-|²) at t_r/4, p² + (1-p)² at t_r/2, p = |c-|² + |d-|².
double predicted_purity(const BellAmplitudes& atoms, RevivalFraction which);

}  // namespace nltc
