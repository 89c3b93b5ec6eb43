#pragma once

#include <map>
#include <optional>
#include <vector>

#include "mixwit/qstate.hpp"
#include "mixwit/tensor.hpp"

namespace mixwit {

enum class MomentKind { PT, Realignment };
enum class MomentSource { Dense, TensorNetwork, ClosedForm };

/// Moments of the partial transpose (p_alpha) or of the realignment matrix
/// (r_alpha). `moments` holds the signed traces tr((rho^G)^alpha) for integer
/// alpha; `abs_moments` holds sum |lambda|^alpha for any real alpha >= 0
/// (p-tilde). For realignment moments the two coincide.
struct MomentSet {
    MomentKind kind = MomentKind::PT;
    MomentSource source = MomentSource::Dense;
    std::map<double, double> moments;
    std::map<double, double> abs_moments;
    std::optional<std::vector<double>> spectrum; // PT eigenvalues / singular values
    double zero_tol = 0.0; // threshold behind p0 and the alpha < 1 moments

    bool has(double alpha) const { return abs_moments.count(alpha) > 0; }
    double moment(double alpha) const;
    double abs_moment(double alpha) const;
};

/// MomentSet from an explicit spectrum (PT eigenvalues or singular values).
MomentSet moments_from_spectrum(MomentKind kind, std::vector<double> spectrum,
                                const std::vector<double>& alphas, MomentSource source);

MomentSet pt_moments(const ComplexTensor& rho_ab, std::size_t l_a, std::size_t l_b,
                     const std::vector<double>& alphas);
MomentSet pt_moments(const DensityMatrix& rho, const Partition& part, const std::vector<double>& alphas);

MomentSet realignment_moments(const ComplexTensor& rho_ab, std::size_t l_a, std::size_t l_b,
                              const std::vector<double>& alphas);
MomentSet realignment_moments(const DensityMatrix& rho, const Partition& part,
                              const std::vector<double>& alphas);

double pt_negativity(const DensityMatrix& rho, const Partition& part);
double ccnr_negativity(const DensityMatrix& rho, const Partition& part);
double negativity_from_spectrum(const std::vector<double>& spectrum);

/// p_alpha-negativity E_alpha = (1/(2-alpha)) [ln p~_alpha + (alpha-1) S2];
/// the alpha = 2 limit is evaluated from the spectrum (Shannon route).
double p_alpha_negativity(const MomentSet& ms, double alpha);
double r_alpha_negativity(const MomentSet& ms, double alpha);

/// E3~ = (1/2) ln(p2^2 / p3); undefined (nullopt) when p3 <= 0.
std::optional<double> e3_tilde(const MomentSet& pt);
double e2_tilde(const MomentSet& pt); // -S2/2
double e4_negativity(const MomentSet& pt);
double c4_negativity(const MomentSet& realign_ms);
double r2_tilde(const MomentSet& pt); // p2 p3 / p4

/// Renyi operator-space entanglement entropy of rho across the partition.
double osee(const DensityMatrix& rho, const Partition& part, double alpha);
double osee_from_singular_values(const std::vector<double>& sv, double alpha);
double osee_from_moments(double r_2alpha, double r2, double alpha);

/// sigma = sum_q P_q rho P_q over global charge projectors.
DensityMatrix symmetrize(const DensityMatrix& rho, const ChargeSpec& cs);

struct SrBlockValues {
    int q = 0;
    double p2 = 0.0;
    double p4 = 0.0;
    double e4_block = 0.0;
};

struct SrReport {
    double e4_sr = 0.0;
    double e2t_sr = 0.0;
    double c4_sr = 0.0;
    double c2t_sr = 0.0;
    std::vector<SrBlockValues> pt_blocks;
    int n_q = 0; // sectors carrying weight
};

SrReport sr_witnesses(const DensityMatrix& rho, const Partition& part, const ChargeSpec& cs);

struct UpperBounds {
    double half_n_ln2_minus_s2 = 0.0; // (1/2)(n ln2 - S2)
    double m_ln2 = 0.0;               // min(n_A, n_B) ln2
    double s_half_a = 0.0;            // S_{1/2}(rho_A)
    double s_half_b = 0.0;
    double ln_p0_bound = 0.0;         // 2 m ln2 + ln rank(rho)
    double c_bound = 0.0;             // m ln2 - S2/2
};

/// Computes the bound set and asserts E <= each PT-negativity bound.
UpperBounds upper_bounds(const DensityMatrix& rho, const Partition& part);

struct ReportOptions {
    std::vector<double> e_alphas = {0.0, 0.5, 1.0, 2.0, 3.0, 4.0, 6.0};
    std::vector<double> osee_alphas = {0.5, 1.0, 2.0};
    std::optional<ChargeSpec> charge;
};

struct WitnessReport {
    int n_a = 0;
    int n_b = 0;
    double s2 = 0.0;
    std::optional<double> e; // exact PT negativity, absent above 2^12
    std::map<double, double> e_alpha;
    std::optional<double> e3t;
    double e2t = 0.0;
    double r2t = 0.0;
    std::optional<double> c;
    std::map<double, double> c_alpha;
    std::map<double, double> osee_values;
    UpperBounds bounds;
    std::optional<SrReport> sr;
    MomentSet pt;
    MomentSet realignment;
};

WitnessReport witness_report(const DensityMatrix& rho, const Partition& part,
                             const ReportOptions& opts = {});

} // namespace mixwit
