#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mixwit/qstate.hpp"
#include "mixwit/rng.hpp"

namespace mixwit {

/// Haar-random pure state via normalized complex Gaussian amplitudes.
PureState haar_pure(int n, std::uint64_t seed);

/// Generalized Hilbert-Schmidt ensemble: (n+m)-qubit Haar state with the
/// last m qubits traced out.
DensityMatrix ghse(int n, int m, std::uint64_t seed);

/// Haar average of p_alpha to leading (Weingarten) order, by explicit
/// enumeration of all alpha! permutations:
///   (L_A L_B L_C)^(-alpha) sum_tau L_C^c(tau) L_A^c(s+ tau) L_B^c(s- tau)
/// with s+-(k) = (k +- 1) mod alpha. Finite-size deviations are expected and
/// never corrected for.
double haar_moment_formula(int alpha, double l_a, double l_b, double l_c);

enum class HaarPhase { PPT, ES, ME };

std::string to_string(HaarPhase phase);

struct HaarPrediction {
    HaarPhase phase = HaarPhase::PPT;
    bool boundary = false;          // partition sits on a phase boundary
    HaarPhase second_phase = HaarPhase::PPT; // other side, when boundary
    double predicted_e = 0.0;       // leading-order E (nats)
    double predicted_p4 = 0.0;      // leading-order E_H[p4]
};

/// Entanglement phase of the tripartite Haar ensemble (n_C traced).
HaarPrediction haar_phase(int n_a, int n_b, int n_c);

/// E_H[p_alpha] of (1-eps)|psi><psi| + eps I/2^n with |psi> Haar on n qubits
/// and bipartition (n - n_b, n_b); binomial mixture over haar_moment_formula.
double depolarized_haar_moment(int alpha, double eps, int n, int n_b);

/// Leading order of E_H[E_4] under noise eps = 1 - 2^(-beta n), beta <= 1/2:
/// min(n_A, n_B) ln2 - beta n ln2.
double depolarized_haar_e4(double beta, int n, int n_a, int n_b);

/// Exact p2 and p4 of tr_C |psi><psi| for a pure state laid out [A|B|C],
/// computed from the rank-L_C factorization (no 4^n_AB diagonalization).
struct TracedPtMoments {
    double p2 = 0.0;
    double p4 = 0.0;
};
TracedPtMoments traced_pure_pt_moments(const PureState& psi, int n_a, int n_b, int n_c);

} // namespace mixwit
