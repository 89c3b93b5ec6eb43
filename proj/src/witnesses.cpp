#include "mixwit/witnesses.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <Eigen/Dense>

namespace mixwit {

namespace {

constexpr double kLn2 = 0.6931471805599453094172321214581766;

using RowMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const RowMat> map_matrix(const ComplexTensor& t) {
    return Eigen::Map<const RowMat>(t.data().data(), static_cast<Eigen::Index>(t.extent(0)),
                                    static_cast<Eigen::Index>(t.extent(1)));
}

bool is_integer(double alpha) { return std::abs(alpha - std::round(alpha)) < 1e-12; }

double signed_power_sum(const std::vector<double>& spec, double alpha) {
    double s = 0.0;
    for (double v : spec) s += std::pow(v, alpha);
    return s;
}

double abs_power_sum(const std::vector<double>& spec, double alpha, double tol) {
    if (alpha == 0.0) {
        std::size_t count = 0;
        for (double v : spec)
            if (std::abs(v) > tol) ++count;
        return static_cast<double>(count);
    }
    double s = 0.0;
    for (double v : spec) {
        const double a = std::abs(v);
        if (a > tol || alpha >= 1.0) s += std::pow(a, alpha);
    }
    return s;
}

/// Cross-check of spectrum-path integer moments against direct matrix power
/// traces (dims <= 1024 only; larger matrices are trusted to the eigensolver).
void cross_check_integer_moments(const ComplexTensor& m, MomentSet& ms) {
    const std::size_t dim = m.extent(0);
    if (dim > 1024) return;
    int max_int_alpha = 0;
    for (const auto& [alpha, v] : ms.moments)
        if (is_integer(alpha)) max_int_alpha = std::max(max_int_alpha, static_cast<int>(std::round(alpha)));
    if (max_int_alpha < 2) return;

    auto em = map_matrix(m);
    RowMat power = RowMat::Identity(em.rows(), em.cols());
    std::map<int, double> traces;
    for (int k = 1; k <= max_int_alpha; ++k) {
        power = (power * em).eval();
        traces[k] = power.trace().real();
    }
    for (const auto& [alpha, v] : ms.moments) {
        if (!is_integer(alpha)) continue;
        const int k = static_cast<int>(std::round(alpha));
        if (k < 1) continue;
        const double ref = traces.at(k);
        const double scale = std::max({std::abs(ref), std::abs(v), 1e-30});
        if (std::abs(ref - v) > 1e-10 * scale && std::abs(ref - v) > 1e-13)
            throw invariant_error("PT moment cross-check failed at alpha=" + std::to_string(k) +
                                  ": spectrum " + std::to_string(v) + " vs trace " + std::to_string(ref));
    }
}

} // namespace

double MomentSet::moment(double alpha) const {
    auto it = moments.find(alpha);
    if (it == moments.end()) throw std::invalid_argument("moment alpha=" + std::to_string(alpha) + " missing");
    return it->second;
}

double MomentSet::abs_moment(double alpha) const {
    auto it = abs_moments.find(alpha);
    if (it == abs_moments.end())
        throw std::invalid_argument("abs moment alpha=" + std::to_string(alpha) + " missing");
    return it->second;
}

MomentSet moments_from_spectrum(MomentKind kind, std::vector<double> spectrum,
                                const std::vector<double>& alphas, MomentSource source) {
    MomentSet ms;
    ms.kind = kind;
    ms.source = source;
    double max_abs = 0.0;
    for (double v : spectrum) max_abs = std::max(max_abs, std::abs(v));
    const double tol = zero_tolerance(spectrum.size(), max_abs);
    ms.zero_tol = tol;
    std::set<double> wanted(alphas.begin(), alphas.end());
    wanted.insert(2.0); // p2 always available: every witness normalizes by it
    for (double alpha : wanted) {
        if (alpha < 0.0) throw std::invalid_argument("moment order must be >= 0");
        ms.abs_moments[alpha] = abs_power_sum(spectrum, alpha, tol);
        if (kind == MomentKind::Realignment) {
            ms.moments[alpha] = ms.abs_moments[alpha];
        } else if (is_integer(alpha) && alpha >= 1.0) {
            ms.moments[alpha] = signed_power_sum(spectrum, alpha);
        }
    }
    ms.spectrum = std::move(spectrum);
    return ms;
}

MomentSet pt_moments(const ComplexTensor& rho_ab, std::size_t l_a, std::size_t l_b,
                     const std::vector<double>& alphas) {
    const ComplexTensor gamma = partial_transpose(rho_ab, l_a, l_b);
    auto spec = hermitian_spectrum(gamma);
    MomentSet ms = moments_from_spectrum(MomentKind::PT, std::move(spec), alphas, MomentSource::Dense);
    cross_check_integer_moments(gamma, ms);
    const double p1 = std::accumulate(ms.spectrum->begin(), ms.spectrum->end(), 0.0);
    if (std::abs(p1 - 1.0) > 1e-9) throw invariant_error("PT trace deviates from 1: " + std::to_string(p1));
    return ms;
}

MomentSet pt_moments(const DensityMatrix& rho, const Partition& part, const std::vector<double>& alphas) {
    const auto view = bipartite_view(rho, part);
    return pt_moments(view.matrix, view.l_a, view.l_b, alphas);
}

MomentSet realignment_moments(const ComplexTensor& rho_ab, std::size_t l_a, std::size_t l_b,
                              const std::vector<double>& alphas) {
    const ComplexTensor r = realign(rho_ab, l_a, l_b);
    auto sv = singular_values(r);
    return moments_from_spectrum(MomentKind::Realignment, std::move(sv), alphas, MomentSource::Dense);
}

MomentSet realignment_moments(const DensityMatrix& rho, const Partition& part,
                              const std::vector<double>& alphas) {
    const auto view = bipartite_view(rho, part);
    return realignment_moments(view.matrix, view.l_a, view.l_b, alphas);
}

double negativity_from_spectrum(const std::vector<double>& spectrum) {
    double s = 0.0;
    for (double v : spectrum) s += std::abs(v);
    return std::log(s);
}

double pt_negativity(const DensityMatrix& rho, const Partition& part) {
    const ComplexTensor gamma = partial_transpose(rho, part);
    return negativity_from_spectrum(hermitian_spectrum(gamma));
}

double ccnr_negativity(const DensityMatrix& rho, const Partition& part) {
    return negativity_from_spectrum(singular_values(realign(rho, part)));
}

namespace {

double alpha_negativity_impl(const MomentSet& ms, double alpha) {
    if (alpha < 0.0) throw std::invalid_argument("alpha-negativity needs alpha >= 0");
    const double p2 = ms.abs_moment(2.0);
    const double s2 = -std::log(p2);
    if (std::abs(alpha - 2.0) < 1e-12) {
        // limit alpha -> 2: (1/2)(H_1({lambda^2/p2}) - S2)
        if (!ms.spectrum) throw std::invalid_argument("alpha=2 witness needs the spectrum");
        std::vector<double> q;
        q.reserve(ms.spectrum->size());
        for (double v : *ms.spectrum) q.push_back(v * v / p2);
        return 0.5 * (renyi_entropy(q, 1.0) - s2);
    }
    const double pa = ms.abs_moment(alpha);
    return (std::log(pa) + (alpha - 1.0) * s2) / (2.0 - alpha);
}

} // namespace

double p_alpha_negativity(const MomentSet& ms, double alpha) {
    if (ms.kind != MomentKind::PT) throw std::invalid_argument("p_alpha_negativity expects PT moments");
    return alpha_negativity_impl(ms, alpha);
}

double r_alpha_negativity(const MomentSet& ms, double alpha) {
    if (ms.kind != MomentKind::Realignment)
        throw std::invalid_argument("r_alpha_negativity expects realignment moments");
    return alpha_negativity_impl(ms, alpha);
}

std::optional<double> e3_tilde(const MomentSet& pt) {
    const double p3 = pt.moment(3.0);
    if (p3 <= 0.0) return std::nullopt; // p3 can vanish or go negative (Werner-type states)
    const double p2 = pt.moment(2.0);
    return 0.5 * std::log(p2 * p2 / p3);
}

double e2_tilde(const MomentSet& pt) { return 0.5 * std::log(pt.abs_moment(2.0)); }

double e4_negativity(const MomentSet& pt) {
    const double p2 = pt.abs_moment(2.0);
    const double p4 = pt.abs_moment(4.0);
    return 0.5 * std::log(p2 * p2 * p2 / p4);
}

double c4_negativity(const MomentSet& rm) {
    const double r2 = rm.abs_moment(2.0);
    const double r4 = rm.abs_moment(4.0);
    return 0.5 * std::log(r2 * r2 * r2 / r4);
}

double r2_tilde(const MomentSet& pt) {
    return pt.moment(2.0) * pt.moment(3.0) / pt.moment(4.0);
}

double osee_from_singular_values(const std::vector<double>& sv, double alpha) {
    double r2 = 0.0;
    for (double s : sv) r2 += s * s;
    if (r2 <= 0.0) throw std::invalid_argument("osee: degenerate r2");
    std::vector<double> q;
    q.reserve(sv.size());
    for (double s : sv) q.push_back(s * s / r2);
    return renyi_entropy(q, alpha);
}

double osee_from_moments(double r_2alpha, double r2, double alpha) {
    if (std::abs(alpha - 1.0) < 1e-12)
        throw std::invalid_argument("osee_from_moments: alpha=1 needs the spectrum");
    if (r2 <= 0.0) throw std::invalid_argument("osee: degenerate r2");
    const double s2 = -std::log(r2);
    return std::log(r_2alpha) / (1.0 - alpha) + alpha / (1.0 - alpha) * s2;
}

double osee(const DensityMatrix& rho, const Partition& part, double alpha) {
    return osee_from_singular_values(singular_values(realign(rho, part)), alpha);
}

DensityMatrix symmetrize(const DensityMatrix& rho, const ChargeSpec& cs) {
    const int n = rho.n;
    const std::size_t dim = rho.matrix.extent(0);
    std::vector<int> q(dim);
    for (std::size_t x = 0; x < dim; ++x) {
        int v = 0;
        for (int s = 0; s < n; ++s) v += cs.weight(s) * bit_of(x, s, n);
        q[x] = cs.reduce(v);
    }
    ComplexTensor out({dim, dim});
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) out[i * dim + j] = (q[i] == q[j]) ? rho.matrix[i * dim + j] : 0.0;
    return DensityMatrix{n, std::move(out)};
}

SrReport sr_witnesses(const DensityMatrix& rho, const Partition& part, const ChargeSpec& cs) {
    const auto view = bipartite_view(rho, part);
    const ComplexTensor gamma = partial_transpose(view.matrix, view.l_a, view.l_b);
    Partition local;
    local.a_sites = part.a_sites;
    local.b_sites = part.b_sites;
    const auto blocks = pt_charge_blocks(gamma, local, cs);

    SrReport rep;
    double e4_sum = 0.0, e2_sum = 0.0;
    for (const auto& blk : blocks) {
        const auto spec = hermitian_spectrum(blk.block);
        double p2 = 0.0, p4 = 0.0;
        for (double v : spec) {
            p2 += v * v;
            p4 += v * v * v * v;
        }
        if (p2 < 1e-28) continue; // empty sector
        rep.pt_blocks.push_back({blk.q, p2, p4, 0.5 * std::log(p2 * p2 * p2 / p4)});
        e4_sum += std::sqrt(p2 * p2 * p2 / p4);
        e2_sum += std::sqrt(p2);
        ++rep.n_q;
    }
    rep.e4_sr = std::log(e4_sum);
    rep.e2t_sr = std::log(e2_sum);

    const ComplexTensor r = realign(view.matrix, view.l_a, view.l_b);
    const auto rblocks = realignment_charge_blocks(r, local, cs);
    double c4_sum = 0.0, c2_sum = 0.0;
    for (const auto& blk : rblocks) {
        const auto sv = singular_values(blk.block);
        double r2 = 0.0, r4 = 0.0;
        for (double s : sv) {
            r2 += s * s;
            r4 += s * s * s * s;
        }
        if (r2 < 1e-28) continue;
        c4_sum += std::sqrt(r2 * r2 * r2 / r4);
        c2_sum += std::sqrt(r2);
    }
    rep.c4_sr = std::log(c4_sum);
    rep.c2t_sr = std::log(c2_sum);
    return rep;
}

UpperBounds upper_bounds(const DensityMatrix& rho, const Partition& part) {
    const auto view = bipartite_view(rho, part);
    const int n_a = part.n_a();
    const int n_b = part.n_b();
    const int m = std::min(n_a, n_b);
    const std::size_t dim = view.l_a * view.l_b;

    auto rho_spec = hermitian_spectrum(view.matrix);
    double p2 = 0.0, max_e = 0.0;
    for (double v : rho_spec) {
        p2 += v * v;
        max_e = std::max(max_e, std::abs(v));
    }
    const double s2 = -std::log(p2);
    const double tol = zero_tolerance(dim, max_e);
    std::size_t rank = 0;
    for (double v : rho_spec)
        if (std::abs(v) > tol) ++rank;

    const DensityMatrix rho_ab{n_a + n_b, view.matrix};
    std::vector<int> a_local(static_cast<std::size_t>(n_a)), b_local(static_cast<std::size_t>(n_b));
    std::iota(a_local.begin(), a_local.end(), 0);
    std::iota(b_local.begin(), b_local.end(), n_a);
    const auto rho_a = partial_trace(rho_ab, a_local);
    const auto rho_b = partial_trace(rho_ab, b_local);

    auto s_half = [](const DensityMatrix& r) {
        auto spec = hermitian_spectrum(r.matrix);
        for (double& v : spec) v = std::max(v, 0.0);
        return renyi_entropy(spec, 0.5);
    };

    UpperBounds ub;
    ub.half_n_ln2_minus_s2 = 0.5 * (static_cast<double>(n_a + n_b) * kLn2 - s2);
    ub.m_ln2 = m * kLn2;
    ub.s_half_a = s_half(rho_a);
    ub.s_half_b = s_half(rho_b);
    ub.ln_p0_bound = 2.0 * m * kLn2 + std::log(static_cast<double>(rank));
    ub.c_bound = m * kLn2 - 0.5 * s2;

    if (dim <= 4096) {
        const double e = negativity_from_spectrum(
            hermitian_spectrum(partial_transpose(view.matrix, view.l_a, view.l_b)));
        for (double bound : {ub.half_n_ln2_minus_s2, ub.m_ln2, ub.s_half_a, ub.s_half_b})
            if (e > bound + 1e-9)
                throw invariant_error("PT negativity " + std::to_string(e) + " exceeds upper bound " +
                                      std::to_string(bound));
    }
    return ub;
}

WitnessReport witness_report(const DensityMatrix& rho, const Partition& part, const ReportOptions& opts) {
    const auto view = bipartite_view(rho, part);
    const std::size_t dim = view.l_a * view.l_b;

    WitnessReport rep;
    rep.n_a = part.n_a();
    rep.n_b = part.n_b();

    std::vector<double> alphas = opts.e_alphas;
    alphas.insert(alphas.end(), {2.0, 3.0, 4.0});
    rep.pt = pt_moments(view.matrix, view.l_a, view.l_b, alphas);
    std::vector<double> r_alphas = opts.e_alphas;
    for (double a : opts.osee_alphas) r_alphas.push_back(2.0 * a);
    r_alphas.insert(r_alphas.end(), {2.0, 4.0});
    rep.realignment = realignment_moments(view.matrix, view.l_a, view.l_b, r_alphas);

    rep.s2 = -std::log(rep.pt.abs_moment(2.0));
    if (dim <= 4096) {
        rep.e = negativity_from_spectrum(*rep.pt.spectrum);
        rep.c = negativity_from_spectrum(*rep.realignment.spectrum);
    }
    for (double a : opts.e_alphas) {
        rep.e_alpha[a] = p_alpha_negativity(rep.pt, a);
        rep.c_alpha[a] = r_alpha_negativity(rep.realignment, a);
    }
    rep.e3t = e3_tilde(rep.pt);
    rep.e2t = e2_tilde(rep.pt);
    rep.r2t = r2_tilde(rep.pt);
    for (double a : opts.osee_alphas)
        rep.osee_values[a] = osee_from_singular_values(*rep.realignment.spectrum, a);
    rep.bounds = upper_bounds(rho, part);
    if (opts.charge) rep.sr = sr_witnesses(rho, part, *opts.charge);

    if (rep.e) {
        for (const auto& [a, ea] : rep.e_alpha)
            if (a >= 1.0 && ea > *rep.e + 1e-9)
                throw invariant_error("E_alpha exceeds E at alpha=" + std::to_string(a));
        // SR bounds hold for the PT-side witnesses; the CCNR-side SR values
        // bound the robustness, not E, and may exceed E on PPT-entangled states
        if (rep.sr && rep.sr->e4_sr > *rep.e + 1e-9)
            throw invariant_error("symmetry-resolved E4 exceeds E");
        if (rep.sr && rep.sr->e2t_sr > *rep.e + 1e-9)
            throw invariant_error("symmetry-resolved E2t exceeds E");
    }
    return rep;
}

} // namespace mixwit
