#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mixwit/qstate.hpp"
#include "mixwit/tensor.hpp"

namespace mixwit {

/// Finite open-boundary MPS; site tensors have shape (chi_left, 2, chi_right)
/// with chi_0 = chi_n = 1.
struct Mps {
    std::vector<ComplexTensor> tensors;
    std::optional<int> center; // orthogonality center, when canonicalized

    int n() const { return static_cast<int>(tensors.size()); }
    std::size_t bond(int i) const; // bond dimension left of site i (bond 0 = 1)
    void validate() const;
};

/// Finite MPO; site tensors have shape (chi_left, 2, 2, chi_right) indexed
/// (bond, ket, bra, bond).
struct Mpo {
    std::vector<ComplexTensor> tensors;

    int n() const { return static_cast<int>(tensors.size()); }
    void validate() const;
};

/// Normalized random MPS with all inner bonds chi (clipped near the edges).
Mps random_mps(int n, std::size_t chi, std::uint64_t seed);

/// Random gauge transform on every bond; represents the same state.
Mps scramble_gauge(const Mps& psi, std::uint64_t seed);

double mps_norm(const Mps& psi);

PureState mps_to_state(const Mps& psi); // n <= 20

/// Gauge-fix so sites < center are left-isometric and sites > center
/// right-isometric (QR sweeps).
Mps canonicalize(const Mps& psi, int center);

/// MPO of a density matrix: purification tensors G(chi,2,2_anc,chi) with the
/// ancilla leg traced; bond dimension chi^2, unit trace.
Mpo random_density_mpo(int n, std::size_t chi, std::uint64_t seed);

/// MPO of tr_C |psi><psi| for a contiguous kept window [first, last); traced
/// prefix/suffix environments fold into the edge tensors.
Mpo mpo_from_traced_mps(const Mps& psi, int first, int last);

ComplexTensor mpo_to_matrix(const Mpo& rho); // dense, n <= 10
double mpo_trace(const Mpo& rho);

/// Exact MPS of a dense state / MPO of a dense operator by successive SVD
/// splits (no truncation).
Mps mps_from_state(const PureState& psi);
Mpo mpo_from_dense(const ComplexTensor& op, int n);

/// tr((tr_C |psi><psi|)^Gamma)^alpha by the replica transfer contraction;
/// per-site permutation sigma+ on A, sigma- on B, identity on C. Cost
/// O(n alpha chi^(2 alpha + 1)).
double mps_pt_moment(const Mps& psi, const Partition& part, int alpha);

/// tr(rho_S^alpha) for a site subset S (identity permutation elsewhere).
double mps_subsystem_moment(const Mps& psi, const std::vector<int>& sites, int alpha);

/// Same replica contraction for an MPO state; cost O(n alpha chi^(alpha+1)).
double mpo_pt_moment(const Mpo& rho, const Partition& part, int alpha);

/// Singular values of the realignment matrix across bond `cut` (A = sites
/// left of cut), from the Schmidt decomposition of the vectorized MPO.
SpectrumData mpo_realignment_spectrum(const Mpo& rho, int cut);

/// Squared singular values of R_rho for A = [0, n_A), B = [n_A, n_A + n_B),
/// C the right remainder, via the bond-space Gamma matrix (O(chi^6 + n chi^5)).
SpectrumData mps_traced_gamma_spectrum(const Mps& psi, int n_a, int n_b);

/// r_alpha (even alpha) from the Gamma spectrum.
double mps_traced_gamma(const Mps& psi, int n_a, int n_b, int alpha);

struct EcSpectra {
    SpectrumData pt;      // nonzero PT eigenvalues of tr_C |psi><psi|
    SpectrumData realign; // nonzero singular values of R_rho
};

/// Middle-traced layout A = [0, n_A), C = [n_A, n_A + n_C), B = the rest.
/// Diagonalizes E_C^Gamma / SVDs E_C in the bond space.
EcSpectra ec_spectrum(const Mps& psi, int n_a, int n_c);

enum class TiQuantity { E, C, P_alpha, R_alpha };

struct TiLimits {
    double e = 0.0;       // 2 ln tr((L1 R1)^(1/2))
    double c = 0.0;       // e + ln tr((L1 R1)^2)
    double s2_a = 0.0;    // -2 ln tr((L1 R1)^2)
    double gap_ratio = 0.0; // |lambda_2 / lambda_1| of the transfer matrix
    std::vector<double> mu; // spectrum of L1 R1, descending, sums to 1

    double p_alpha(int alpha) const; // even alpha
    double r_alpha(int alpha) const;
};

/// Thermodynamic-limit values for a translation-invariant tensor (chi,2,chi),
/// from the dominant transfer eigenpair. Requires a unique dominant
/// eigenvalue (relative gap > 1e-8).
TiLimits ti_mps_limits(const ComplexTensor& site_tensor);

/// Random injective TI tensor whose transfer gap ratio is at most max_ratio
/// (blended toward a rank-one transfer fixed point when needed).
ComplexTensor random_injective_ti_tensor(std::size_t chi, std::uint64_t seed, double max_ratio);

/// Finite chain [C | A | B | C] built from a TI tensor (boundary vectors from
/// the dominant transfer eigenvectors are not needed; plain ones-vectors work
/// since quantities are normalized).
Mps ti_finite_chain(const ComplexTensor& site_tensor, int n);

} // namespace mixwit
