#pragma once

#include <map>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "mixwit/qstate.hpp"
#include "mixwit/witnesses.hpp"

namespace mixwit {

enum class SymmetryTag { Z2Parity, U1Weight };

/// Dense spin-chain Hamiltonian (open boundary). TFIM and XXZ are real
/// symmetric, so the matrix is stored as real doubles.
struct SpinHamiltonian {
    int n = 0;
    Eigen::MatrixXd h;
    SymmetryTag symmetry = SymmetryTag::Z2Parity;

    ComplexTensor matrix() const;
};

/// H = -sum sx_k sx_{k+1} - h sum sz_k
SpinHamiltonian tfim(int n, double field);

/// H = -sum (sx sx + sy sy + delta sz sz)
SpinHamiltonian xxz(int n, double delta);

/// Symmetry sector by Hamming weight: Z2 parity uses weight mod 2 (0 = even),
/// U(1) uses the weight itself (N_p = n - 2 weight).
struct Sector {
    int value = 0;
};

inline Sector half_filling_sector(int n) { return Sector{n / 2}; }

/// Lowest eigenvector, optionally restricted to a symmetry sector. Throws
/// invariant_error when the relevant gap is below 1e-10 (degenerate ground
/// space has no reproducible witness values).
PureState ground_state(const SpinHamiltonian& ham, std::optional<Sector> sector = std::nullopt);

double ground_energy(const SpinHamiltonian& ham, std::optional<Sector> sector = std::nullopt);

/// exp(-H/T)/Z by spectral decomposition, max-eigenvalue shifted.
DensityMatrix thermal_state(const SpinHamiltonian& ham, double temperature);

enum class DepolarizeMode { Global, Local };

/// Global: (1-p) rho + p I/2^n. Local: per-qubit channel
/// (1-p) rho + p tr_k(rho) (x) I_k/2 applied to every qubit.
DensityMatrix depolarize(const DensityMatrix& rho, double p, DepolarizeMode mode);

struct WernerState {
    int d = 2;
    double alpha_w = 0.0;
    ComplexTensor matrix;            // d^2 x d^2 over the qudit pair
    std::vector<double> pt_spectrum; // analytic, descending
};

/// Werner state on two qudits plus its closed-form PT spectrum.
WernerState werner(int d, double alpha_w);

/// Tripartite pure stabilizer composite: products, EPR pairs, GHZ triples.
struct StabilizerComposite {
    int s_a = 0, s_b = 0, s_c = 0;
    int g_abc = 0;
    int e_ab = 0, e_ac = 0, e_bc = 0;

    int n_a() const { return s_a + g_abc + e_ab + e_ac; }
    int n_b() const { return s_b + g_abc + e_ab + e_bc; }
    int n_c() const { return s_c + g_abc + e_ac + e_bc; }
    int n() const { return n_a() + n_b() + n_c(); }
};

struct StabilizerStateResult {
    PureState psi;
    Partition part;
};

/// Dense tensor product of the composite, laid out [A|B|C].
StabilizerStateResult stabilizer_state(const StabilizerComposite& spec);

struct StabilizerMoments {
    double p2 = 0.0, p3 = 0.0, p4 = 0.0;
    std::map<double, double> r_alpha;
    double e = 0.0;   // PT negativity (nats)
    double e3t = 0.0;
    double e4 = 0.0;
    double c = 0.0;   // CCNR negativity (nats)
    double c4 = 0.0;
    double pt_value = 0.0; // all nonzero PT eigenvalues are +-pt_value
};

StabilizerMoments stabilizer_moments(const StabilizerComposite& spec,
                                     const std::vector<double>& r_alphas = {2.0, 4.0});

} // namespace mixwit
