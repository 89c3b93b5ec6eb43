#include "mixwit/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

namespace mixwit {

namespace {

constexpr double kLn2 = 0.6931471805599453094172321214581766;

std::size_t pow2(int k) { return std::size_t{1} << k; }

int cycle_count(const std::vector<int>& perm) {
    const int n = static_cast<int>(perm.size());
    std::vector<bool> seen(perm.size(), false);
    int cycles = 0;
    for (int k = 0; k < n; ++k) {
        if (seen[static_cast<std::size_t>(k)]) continue;
        ++cycles;
        int j = k;
        while (!seen[static_cast<std::size_t>(j)]) {
            seen[static_cast<std::size_t>(j)] = true;
            j = perm[static_cast<std::size_t>(j)];
        }
    }
    return cycles;
}

} // namespace

PureState haar_pure(int n, std::uint64_t seed) {
    Rng rng(seed);
    const std::size_t dim = pow2(n);
    ComplexTensor amp({dim});
    double norm2 = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
        amp[i] = rng.gaussian_complex();
        norm2 += std::norm(amp[i]);
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& v : amp.data()) v *= inv;
    return PureState{n, std::move(amp)};
}

DensityMatrix ghse(int n, int m, std::uint64_t seed) {
    if (n < 1 || m < 0) throw std::invalid_argument("ghse: need n >= 1, m >= 0");
    const PureState psi = haar_pure(n + m, seed);
    if (m == 0) return density_from_pure(psi);
    std::vector<int> keep(static_cast<std::size_t>(n));
    std::iota(keep.begin(), keep.end(), 0);
    return partial_trace(psi, keep);
}

double haar_moment_formula(int alpha, double l_a, double l_b, double l_c) {
    if (alpha < 1 || alpha > 8) throw std::invalid_argument("haar_moment_formula: 1 <= alpha <= 8");
    std::vector<int> tau(static_cast<std::size_t>(alpha));
    std::iota(tau.begin(), tau.end(), 0);
    std::vector<int> sp(tau), sm(tau), comp(tau);
    for (int k = 0; k < alpha; ++k) {
        sp[static_cast<std::size_t>(k)] = (k + 1) % alpha;
        sm[static_cast<std::size_t>(k)] = (k - 1 + alpha) % alpha;
    }
    double total = 0.0;
    do {
        const int c_tau = cycle_count(tau);
        for (int k = 0; k < alpha; ++k) comp[static_cast<std::size_t>(k)] = sp[static_cast<std::size_t>(tau[static_cast<std::size_t>(k)])];
        const int c_sp = cycle_count(comp);
        for (int k = 0; k < alpha; ++k) comp[static_cast<std::size_t>(k)] = sm[static_cast<std::size_t>(tau[static_cast<std::size_t>(k)])];
        const int c_sm = cycle_count(comp);
        total += std::pow(l_c, c_tau) * std::pow(l_a, c_sp) * std::pow(l_b, c_sm);
    } while (std::next_permutation(tau.begin(), tau.end()));
    return total / std::pow(l_a * l_b * l_c, alpha);
}

std::string to_string(HaarPhase phase) {
    switch (phase) {
        case HaarPhase::PPT: return "PPT";
        case HaarPhase::ES: return "ES";
        case HaarPhase::ME: return "ME";
    }
    return "?";
}

HaarPrediction haar_phase(int n_a, int n_b, int n_c) {
    if (n_a < 0 || n_b < 0 || n_c < 0) throw std::invalid_argument("haar_phase: negative counts");
    const int n_ab = n_a + n_b;
    const int n = n_ab + n_c;
    const double l_ab = std::pow(2.0, n_ab);
    const double l_c = std::pow(2.0, n_c);

    HaarPrediction pred;
    if (n_c > n_ab) {
        pred.phase = HaarPhase::PPT;
        pred.predicted_e = 0.0;
        pred.predicted_p4 = std::pow(l_ab, -3.0);
    } else if (2 * n_a > n || 2 * n_b > n) {
        pred.phase = HaarPhase::ME;
        const int m = std::min(n_a, n_b);
        pred.predicted_e = m * kLn2;
        const double l_small = std::pow(2.0, m);
        pred.predicted_p4 = std::pow(l_c, -3.0) * std::pow(l_small, -2.0);
    } else {
        pred.phase = HaarPhase::ES;
        pred.predicted_e = 0.5 * (n_ab - n_c) * kLn2;
        pred.predicted_p4 = 2.0 / (l_ab * l_c * l_c); // C_2 = 2
    }
    // flag partitions sitting exactly on a phase boundary
    if (n_c == n_ab) {
        pred.boundary = true;
        pred.second_phase = (pred.phase == HaarPhase::PPT) ? HaarPhase::ES : HaarPhase::PPT;
    } else if (n_c < n_ab && (2 * n_a == n || 2 * n_b == n)) {
        pred.boundary = true;
        pred.second_phase = (pred.phase == HaarPhase::ME) ? HaarPhase::ES : HaarPhase::ME;
    }
    return pred;
}

double depolarized_haar_moment(int alpha, double eps, int n, int n_b) {
    if (eps < 0.0 || eps > 1.0) throw std::invalid_argument("depolarized_haar_moment: eps in [0,1]");
    if (n_b < 0 || n_b > n) throw std::invalid_argument("depolarized_haar_moment: bad n_b");
    const double dim = std::pow(2.0, n);
    const double l_a = std::pow(2.0, n - n_b);
    const double l_b = std::pow(2.0, n_b);
    double total = 0.0;
    for (int k = 0; k <= alpha; ++k) {
        const double mk = (k == 0) ? dim : haar_moment_formula(k, l_a, l_b, 1.0);
        double binom = 1.0;
        for (int j = 0; j < k; ++j) binom = binom * (alpha - j) / (j + 1);
        total += binom * std::pow(1.0 - eps, k) * mk * std::pow(eps / dim, alpha - k);
    }
    return total;
}

double depolarized_haar_e4(double beta, int n, int n_a, int n_b) {
    if (beta < 0.0 || beta > 0.5) throw std::invalid_argument("depolarized_haar_e4: beta in [0, 1/2]");
    return std::min(n_a, n_b) * kLn2 - beta * n * kLn2;
}

TracedPtMoments traced_pure_pt_moments(const PureState& psi, int n_a, int n_b, int n_c) {
    if (n_a + n_b + n_c != psi.n) throw std::invalid_argument("traced_pure_pt_moments: sizes do not cover");
    using Mat = Eigen::MatrixXcd;
    const std::size_t l_a = pow2(n_a), l_b = pow2(n_b), l_c = pow2(n_c);

    // V_k[a,b] = psi[a,b,k]; rho = sum_k |v_k><v_k| has rank <= L_C
    std::vector<Mat> v(l_c, Mat(static_cast<Eigen::Index>(l_a), static_cast<Eigen::Index>(l_b)));
    const auto& amp = psi.amplitudes.data();
    for (std::size_t a = 0; a < l_a; ++a)
        for (std::size_t b = 0; b < l_b; ++b)
            for (std::size_t k = 0; k < l_c; ++k)
                v[k](static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = amp[(a * l_b + b) * l_c + k];

    // p2 = ||Gram||_F^2
    double p2 = 0.0;
    for (std::size_t k = 0; k < l_c; ++k)
        for (std::size_t l = 0; l < l_c; ++l) {
            cplx g(0.0);
            for (Eigen::Index a = 0; a < v[k].rows(); ++a)
                for (Eigen::Index b = 0; b < v[k].cols(); ++b) g += std::conj(v[k](a, b)) * v[l](a, b);
            p2 += std::norm(g);
        }

    // T4[k,l,m,q] = tr(V_k V_l^H V_m V_q^H) via the smaller-side pair products;
    // p4 = sum T4[k,l,m,q] T4[l,m,q,k]
    const bool a_side = l_a <= l_b;
    const std::size_t r = l_c;
    std::vector<Mat> pair(r * r);
    for (std::size_t k = 0; k < r; ++k)
        for (std::size_t l = 0; l < r; ++l)
            pair[k * r + l] = a_side ? Mat(v[k] * v[l].adjoint()) : Mat(v[k].adjoint() * v[l]);

    std::vector<cplx> t4(r * r * r * r);
    for (std::size_t k = 0; k < r; ++k)
        for (std::size_t l = 0; l < r; ++l)
            for (std::size_t m = 0; m < r; ++m)
                for (std::size_t q = 0; q < r; ++q) {
                    // tr(V_k V_l^H V_m V_q^H) = tr(P_kl P_mq) = tr(Q_lm Q_qk)
                    const Mat& x = a_side ? pair[k * r + l] : pair[l * r + m];
                    const Mat& y = a_side ? pair[m * r + q] : pair[q * r + k];
                    t4[((k * r + l) * r + m) * r + q] = x.cwiseProduct(y.transpose()).sum();
                }

    cplx p4(0.0);
    for (std::size_t k = 0; k < r; ++k)
        for (std::size_t l = 0; l < r; ++l)
            for (std::size_t m = 0; m < r; ++m)
                for (std::size_t q = 0; q < r; ++q)
                    p4 += t4[((k * r + l) * r + m) * r + q] * t4[((l * r + m) * r + q) * r + k];
    if (std::abs(p4.imag()) > 1e-9) throw invariant_error("traced p4 has imaginary part");
    return {p2, p4.real()};
}

} // namespace mixwit
