#include "mixwit/protocols.hpp"

#include <algorithm>
#include <cmath>

#include "mixwit/rng.hpp"

namespace mixwit {

namespace {

constexpr double kLn2 = 0.6931471805599453094172321214581766;

double exact_p4(const DensityMatrix& rho, const Partition& part) {
    return pt_moments(rho, part, {4.0}).moment(4.0);
}

double exact_purity(const DensityMatrix& rho) {
    const std::size_t dim = rho.matrix.extent(0);
    double p2 = 0.0;
    for (std::size_t i = 0; i < dim * dim; ++i) p2 += std::norm(rho.matrix[i]);
    return p2;
}

double exact_r4(const DensityMatrix& rho, const Partition& part) {
    return realignment_moments(rho, part, {4.0}).moment(4.0);
}

EstimatorResult clamped_unit_estimator(double mean, double epsilon, double delta, std::uint64_t seed) {
    EstimatorResult res = binary_estimator(mean, hoeffding_samples(epsilon, delta), seed);
    res.epsilon = epsilon;
    res.delta = delta;
    if (res.estimate < 0.0 || res.estimate > 1.0) {
        res.estimate = std::clamp(res.estimate, 0.0, 1.0);
        res.clamped = true;
    }
    return res;
}

/// ln with a floor so that clamped-to-zero estimates map to -inf-like values
/// instead of NaN.
double safe_log(double x) { return std::log(std::max(x, 1e-300)); }

} // namespace

long hoeffding_samples(double epsilon, double delta) {
    if (epsilon <= 0.0 || epsilon >= 1.0 || delta <= 0.0 || delta >= 1.0)
        throw std::invalid_argument("hoeffding_samples: epsilon, delta must lie in (0,1)");
    return static_cast<long>(std::ceil(2.0 / (epsilon * epsilon) * std::log(2.0 / delta)));
}

EstimatorResult binary_estimator(double true_mean, long samples, std::uint64_t seed) {
    if (std::abs(true_mean) > 1.0 + 1e-12) throw std::invalid_argument("binary_estimator: |mean| <= 1");
    if (samples < 1) throw std::invalid_argument("binary_estimator: need samples >= 1");
    Rng rng(seed);
    long positives = 0;
    for (long i = 0; i < samples; ++i)
        if (rng.pm_one(std::clamp(true_mean, -1.0, 1.0)) > 0) ++positives;
    EstimatorResult res;
    res.samples = samples;
    res.positive_count = positives;
    res.seed = seed;
    res.raw_estimate = (2.0 * positives - samples) / static_cast<double>(samples);
    res.estimate = res.raw_estimate;
    return res;
}

EstimatorResult estimate_p4(const DensityMatrix& rho, const Partition& part, double epsilon, double delta,
                            std::uint64_t seed) {
    return clamped_unit_estimator(exact_p4(rho, part), epsilon, delta, seed);
}

EstimatorResult estimate_purity(const DensityMatrix& rho, double epsilon, double delta, std::uint64_t seed) {
    return clamped_unit_estimator(exact_purity(rho), epsilon, delta, seed);
}

EstimatorResult estimate_r4(const DensityMatrix& rho, const Partition& part, double epsilon, double delta,
                            std::uint64_t seed) {
    return clamped_unit_estimator(exact_r4(rho, part), epsilon, delta, seed);
}

TestVerdict entanglement_test_from_values(double p2, double p4, double purity_a, double tau_e, double tau_s,
                                          double epsilon, double delta, std::uint64_t seed) {
    Rng root(seed);
    const auto p2_hat = clamped_unit_estimator(p2, epsilon, delta, root.fork(1).seed());
    const auto p4_hat = clamped_unit_estimator(p4, epsilon, delta, root.fork(2).seed());
    const auto pa_hat = clamped_unit_estimator(purity_a, epsilon, delta, root.fork(3).seed());

    TestVerdict v;
    v.seed = seed;
    v.threshold_e = tau_e;
    v.threshold_s = tau_s;
    v.samples = p2_hat.samples + p4_hat.samples + pa_hat.samples;
    v.clamped = p2_hat.clamped || p4_hat.clamped || pa_hat.clamped;
    v.estimate_1 = 0.5 * (-safe_log(p4_hat.estimate) + 3.0 * safe_log(p2_hat.estimate)); // E4-hat
    v.estimate_2 = -safe_log(pa_hat.estimate);                                           // S2(rho_A)-hat
    v.verdict = (v.estimate_1 <= tau_e && v.estimate_2 <= tau_s) ? Verdict::A : Verdict::B;
    return v;
}

TestVerdict entanglement_test(const DensityMatrix& rho, const Partition& part, double tau_e, double tau_s,
                              double epsilon, double delta, std::uint64_t seed) {
    const double p2 = exact_purity(rho);
    const double p4 = exact_p4(rho, part);
    const double pa = exact_purity(partial_trace(rho, part.a_sites));
    return entanglement_test_from_values(p2, p4, pa, tau_e, tau_s, epsilon, delta, seed);
}

TestVerdict schmidt_rank_test(const PureState& psi, const Partition& part, int r, double eps1, double eps2,
                              double delta, std::uint64_t seed) {
    if (r < 1 || eps1 <= 0.0 || eps1 > 1.0 || eps2 < 0.0 || eps2 >= 1.0)
        throw std::invalid_argument("schmidt_rank_test: bad promise parameters");
    const double gap = eps1 * eps1 / r - eps2;
    const double epsilon = gap / 4.0;
    if (gap <= 0.0 || epsilon <= 0.0)
        throw std::invalid_argument("schmidt_rank_test: promise gap violated (need eps1^2/r > eps2 + 2 eps)");

    const auto rho_a = partial_trace(density_from_pure(psi), part.a_sites);
    const double purity = exact_purity(rho_a);
    const auto est = clamped_unit_estimator(purity, epsilon, delta, seed);

    TestVerdict v;
    v.seed = seed;
    v.samples = est.samples;
    v.clamped = est.clamped;
    v.threshold_e = 0.5 * (eps1 * eps1 / r + eps2); // eps_t
    v.estimate_1 = est.estimate;
    v.verdict = (est.estimate >= v.threshold_e) ? Verdict::A : Verdict::B;
    return v;
}

TestVerdict operator_schmidt_rank_test(const DensityMatrix& rho, const Partition& part, int r, double eps1,
                                       double eps2, double delta, std::uint64_t seed) {
    if (r < 1 || eps1 <= 0.0 || eps1 > 1.0 || eps2 < 0.0 || eps2 >= 1.0)
        throw std::invalid_argument("operator_schmidt_rank_test: bad promise parameters");
    const double gap = eps1 * eps1 / r - eps2;
    if (gap <= 0.0) throw std::invalid_argument("operator_schmidt_rank_test: need eps1^2/r > eps2");

    const double r2 = exact_purity(rho);       // r2 = tr(rho^2)
    const double r4 = exact_r4(rho, part);
    Rng root(seed);

    // coarse pass pins r2-hat, which fixes the adaptive epsilon
    const double eps0 = std::min(0.1, r2 * r2 / 4.0 + 1e-4);
    auto r2sq_hat = clamped_unit_estimator(r2 * r2, eps0, delta, root.fork(1).seed());
    if (r2sq_hat.estimate <= 2.0 * eps0)
        throw std::invalid_argument("operator_schmidt_rank_test: r2 not bounded away from zero");

    const double epsilon =
        0.5 * r2sq_hat.estimate / (2.0 + eps1 * eps1 / r + eps2) * gap;
    auto r2_final = clamped_unit_estimator(r2 * r2, epsilon, delta, root.fork(2).seed());
    auto r4_final = clamped_unit_estimator(r4, epsilon, delta, root.fork(3).seed());
    const double eps_t = 0.5 * (eps1 * eps1 / r + eps2) - epsilon / (2.0 * r2_final.estimate) * gap;

    TestVerdict v;
    v.seed = seed;
    v.samples = r2sq_hat.samples + r2_final.samples + r4_final.samples;
    v.clamped = r2sq_hat.clamped || r2_final.clamped || r4_final.clamped;
    v.threshold_e = eps_t;
    v.estimate_1 = r4_final.estimate / std::max(r2_final.estimate, 1e-300);
    v.verdict = (v.estimate_1 >= eps_t) ? Verdict::A : Verdict::B;
    return v;
}

DepthCertificate certify_depth(const DensityMatrix& rho, const Partition& part, int boundary_gates, double c,
                               std::uint64_t seed) {
    if (boundary_gates < 1) throw std::invalid_argument("certify_depth: need |dA| >= 1");
    if (c <= 0.0) throw std::invalid_argument("certify_depth: need c > 0");
    const int n = rho.n;
    const double nn = static_cast<double>(n);
    const long samples = static_cast<long>(std::ceil(std::pow(nn, 2.0 * c + 1.0)));
    const double epsilon = std::pow(nn, -c);

    Rng root(seed);
    auto clamp_unit = [](EstimatorResult r) {
        if (r.estimate < 0.0 || r.estimate > 1.0) {
            r.estimate = std::clamp(r.estimate, 0.0, 1.0);
            r.clamped = true;
        }
        return r;
    };
    const auto p4_hat = clamp_unit(binary_estimator(exact_p4(rho, part), samples, root.fork(1).seed()));
    const auto p2_hat = clamp_unit(binary_estimator(exact_purity(rho), samples, root.fork(2).seed()));

    DepthCertificate cert;
    cert.samples = samples;
    cert.epsilon = epsilon;
    cert.p2_hat = p2_hat.estimate;
    cert.p4_hat = p4_hat.estimate;
    if (p2_hat.estimate - epsilon <= 0.0) {
        cert.vacuous = true;
        cert.d_hat = 0.0;
        return cert;
    }
    const double bound = (-std::log(p4_hat.estimate + epsilon) + 3.0 * std::log(p2_hat.estimate - epsilon)) /
                         (2.0 * boundary_gates * kLn2);
    cert.d_hat = std::max(0.0, bound);
    cert.certified_depth = static_cast<int>(std::ceil(cert.d_hat - 1e-12));
    return cert;
}

} // namespace mixwit
