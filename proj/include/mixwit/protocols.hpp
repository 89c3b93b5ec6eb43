#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "mixwit/qstate.hpp"
#include "mixwit/witnesses.hpp"

namespace mixwit {

/// Simulated measurement outcome tally. Measurements are modelled as +-1
/// Bernoulli draws at the exact expectation value (statistically identical to
/// the SWAP-test / Bell-measurement circuits, which are out of scope).
struct EstimatorResult {
    double estimate = 0.0;     // clamped into the physical range when needed
    double raw_estimate = 0.0; // plain sample mean
    double epsilon = 0.0;
    double delta = 0.0;
    long samples = 0;
    long positive_count = 0;
    std::uint64_t seed = 0;
    bool clamped = false;
};

/// Hoeffding sample count: ceil(2 eps^-2 ln(2/delta)) for +-1 outcomes.
long hoeffding_samples(double epsilon, double delta);

/// Mean of L +-1 draws with the given expectation.
EstimatorResult binary_estimator(double true_mean, long samples, std::uint64_t seed);

/// Auto-sized estimators; the exact expectation comes from the dense witness
/// computation on rho.
EstimatorResult estimate_p4(const DensityMatrix& rho, const Partition& part, double epsilon, double delta,
                            std::uint64_t seed);
EstimatorResult estimate_purity(const DensityMatrix& rho, double epsilon, double delta, std::uint64_t seed);
EstimatorResult estimate_r4(const DensityMatrix& rho, const Partition& part, double epsilon, double delta,
                            std::uint64_t seed);

enum class Verdict { A, B };

struct TestVerdict {
    Verdict verdict = Verdict::A;
    double threshold_e = 0.0;  // tau_E or eps_t, depending on the test
    double threshold_s = 0.0;  // tau_S (entanglement test only)
    double estimate_1 = 0.0;   // E4-hat / p2-hat / r4-hat ratio
    double estimate_2 = 0.0;   // S2(rho_A)-hat where applicable
    long samples = 0;
    std::uint64_t seed = 0;
    bool clamped = false;
};

inline double default_test_threshold(int n) { return 2.0 * std::log(static_cast<double>(n)); }

/// Entanglement test: (a) iff E4-hat <= tau_e and S2(rho_A)-hat <= tau_s.
/// Exact means p2, p4 (PT) and the A-subsystem purity feed the simulated
/// estimators.
TestVerdict entanglement_test_from_values(double p2, double p4, double purity_a, double tau_e, double tau_s,
                                          double epsilon, double delta, std::uint64_t seed);
TestVerdict entanglement_test(const DensityMatrix& rho, const Partition& part, double tau_e, double tau_s,
                              double epsilon, double delta, std::uint64_t seed);

/// Schmidt-rank test (two-copy): promise (a) F_r >= eps1, (b) F_r <= eps2;
/// requires eps1^2/r > eps2 + 2 eps with eps = (eps1^2/r - eps2)/4. Decides
/// (a) iff the estimated purity of rho_A is >= eps_t = (eps1^2/r + eps2)/2.
TestVerdict schmidt_rank_test(const PureState& psi, const Partition& part, int r, double eps1, double eps2,
                              double delta, std::uint64_t seed);

/// Operator-Schmidt-rank test (four-copy): decides (a) iff r4-hat / r2-hat
/// >= eps_t with the adaptive eps, eps_t schedule.
TestVerdict operator_schmidt_rank_test(const DensityMatrix& rho, const Partition& part, int r, double eps1,
                                       double eps2, double delta, std::uint64_t seed);

struct DepthCertificate {
    double d_hat = 0.0;      // real-valued lower bound on circuit depth
    int certified_depth = 0; // ceil(d_hat): depth is an integer
    double p2_hat = 0.0;
    double p4_hat = 0.0;
    long samples = 0;
    double epsilon = 0.0; // n^-c
    bool vacuous = false; // p2-hat - eps <= 0: no nontrivial bound
};

/// d >= (1 / (2 |dA| ln2)) [ -ln(p4 + n^-c) + 3 ln(p2 - n^-c) ] with
/// L = n^(2c+1) samples per estimator.
DepthCertificate certify_depth(const DensityMatrix& rho, const Partition& part, int boundary_gates, double c,
                               std::uint64_t seed);

} // namespace mixwit
