#include "mixwit/qstate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <Eigen/Dense>

namespace mixwit {

namespace {

using RowMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::size_t pow2(int k) { return std::size_t{1} << k; }

/// Flat register label with the bits of `sub` placed at `sites` (MSB-first
/// register convention).
std::vector<std::size_t> spread_table(const std::vector<int>& sites, int n) {
    const std::size_t k = sites.size();
    std::vector<std::size_t> table(pow2(static_cast<int>(k)), 0);
    for (std::size_t sub = 0; sub < table.size(); ++sub) {
        std::size_t x = 0;
        for (std::size_t j = 0; j < k; ++j) {
            const std::size_t bit = (sub >> (k - 1 - j)) & 1u;
            x |= bit << (n - 1 - sites[j]);
        }
        table[sub] = x;
    }
    return table;
}

} // namespace

Partition Partition::contiguous(int n_a, int n_b, int n) {
    if (n_a < 1 || n_b < 1 || n_a + n_b > n) throw std::invalid_argument("bad contiguous partition");
    Partition p;
    for (int i = 0; i < n_a; ++i) p.a_sites.push_back(i);
    for (int i = 0; i < n_b; ++i) p.b_sites.push_back(n_a + i);
    for (int i = n_a + n_b; i < n; ++i) p.c_sites.push_back(i);
    return p;
}

void Partition::validate(int n) const {
    if (n_a() < 1 || n_b() < 1) throw std::invalid_argument("partition needs n_A, n_B >= 1");
    std::vector<int> all;
    all.insert(all.end(), a_sites.begin(), a_sites.end());
    all.insert(all.end(), b_sites.begin(), b_sites.end());
    all.insert(all.end(), c_sites.begin(), c_sites.end());
    if (static_cast<int>(all.size()) != n) throw std::invalid_argument("partition does not cover register");
    std::vector<int> sorted = all;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < n; ++i)
        if (sorted[static_cast<std::size_t>(i)] != i)
            throw std::invalid_argument("partition sites must be disjoint and cover 0..n-1");
}

int ChargeSpec::charge(const std::vector<int>& sites, std::size_t label, int n) const {
    int q = 0;
    for (std::size_t j = 0; j < sites.size(); ++j)
        q += weight(sites[j]) * bit_of(label, static_cast<int>(j), static_cast<int>(sites.size()));
    (void)n;
    return reduce(q);
}

int ChargeSpec::reduce(int q) const {
    if (!modulus) return q;
    const int m = *modulus;
    return ((q % m) + m) % m;
}

PureState make_pure(int n, ComplexTensor amplitudes, double norm_tol) {
    if (amplitudes.rank() != 1 || amplitudes.size() != pow2(n))
        throw std::invalid_argument("amplitude vector must have length 2^n");
    double norm2 = 0.0;
    for (const auto& v : amplitudes.data()) norm2 += std::norm(v);
    if (std::abs(norm2 - 1.0) > norm_tol)
        throw std::invalid_argument("state is not normalized: |amplitudes|^2 = " + std::to_string(norm2));
    return PureState{n, std::move(amplitudes)};
}

DensityMatrix make_density(int n, ComplexTensor matrix, double psd_tol) {
    const std::size_t dim = pow2(n);
    if (matrix.rank() != 2 || matrix.extent(0) != dim || matrix.extent(1) != dim)
        throw std::invalid_argument("density matrix must be 2^n x 2^n");
    double herm_dev = 0.0;
    cplx tr(0.0);
    for (std::size_t i = 0; i < dim; ++i) {
        tr += matrix[i * dim + i];
        for (std::size_t j = i; j < dim; ++j)
            herm_dev = std::max(herm_dev, std::abs(matrix[i * dim + j] - std::conj(matrix[j * dim + i])));
    }
    if (herm_dev > 1e-10) throw invariant_error("density matrix not Hermitian within 1e-10");
    if (std::abs(tr - cplx(1.0)) > 1e-10) throw invariant_error("density matrix trace deviates from 1");
    if (dim <= 1024) {
        const auto evals = hermitian_spectrum(matrix);
        if (evals.back() < -psd_tol)
            throw invariant_error("density matrix has eigenvalue " + std::to_string(evals.back()));
    }
    return DensityMatrix{n, std::move(matrix)};
}

DensityMatrix density_from_pure(const PureState& psi) {
    const std::size_t dim = psi.amplitudes.size();
    ComplexTensor rho({dim, dim});
    const auto& a = psi.amplitudes.data();
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) rho[i * dim + j] = a[i] * std::conj(a[j]);
    return DensityMatrix{psi.n, std::move(rho)};
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep) {
    const int n = rho.n;
    if (keep.empty()) throw std::invalid_argument("partial_trace: keep set must be non-empty");
    std::vector<int> traced;
    {
        std::vector<bool> kept(static_cast<std::size_t>(n), false);
        for (int s : keep) {
            if (s < 0 || s >= n) throw std::invalid_argument("partial_trace: site out of range");
            if (kept[static_cast<std::size_t>(s)]) throw std::invalid_argument("partial_trace: duplicate site");
            kept[static_cast<std::size_t>(s)] = true;
        }
        for (int s = 0; s < n; ++s)
            if (!kept[static_cast<std::size_t>(s)]) traced.push_back(s);
    }
    const auto keep_spread = spread_table(keep, n);
    const auto tr_spread = spread_table(traced, n);
    const std::size_t dk = keep_spread.size();
    const std::size_t dim = pow2(n);

    ComplexTensor out({dk, dk});
    for (std::size_t y = 0; y < dk; ++y)
        for (std::size_t yp = 0; yp < dk; ++yp) {
            cplx s(0.0);
            for (std::size_t t : tr_spread) s += rho.matrix[(keep_spread[y] | t) * dim + (keep_spread[yp] | t)];
            out[y * dk + yp] = s;
        }
    return DensityMatrix{static_cast<int>(keep.size()), std::move(out)};
}

DensityMatrix partial_trace(const PureState& psi, const std::vector<int>& keep) {
    const int n = psi.n;
    if (keep.empty()) throw std::invalid_argument("partial_trace: keep set must be non-empty");
    if (static_cast<int>(keep.size()) == n) return density_from_pure(psi);
    std::vector<int> traced;
    {
        std::vector<bool> kept(static_cast<std::size_t>(n), false);
        for (int s : keep) {
            if (s < 0 || s >= n) throw std::invalid_argument("partial_trace: site out of range");
            if (kept[static_cast<std::size_t>(s)]) throw std::invalid_argument("partial_trace: duplicate site");
            kept[static_cast<std::size_t>(s)] = true;
        }
        for (int s = 0; s < n; ++s)
            if (!kept[static_cast<std::size_t>(s)]) traced.push_back(s);
    }
    const auto keep_spread = spread_table(keep, n);
    const auto tr_spread = spread_table(traced, n);
    const std::size_t dk = keep_spread.size();
    const std::size_t dt = tr_spread.size();

    // psi as a (kept x traced) matrix, then rho = M M^dagger
    RowMat m(static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(dt));
    const auto& amp = psi.amplitudes.data();
    for (std::size_t y = 0; y < dk; ++y)
        for (std::size_t t = 0; t < dt; ++t)
            m(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(t)) = amp[keep_spread[y] | tr_spread[t]];

    ComplexTensor out({dk, dk});
    Eigen::Map<RowMat>(out.data().data(), static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(dk)) =
        m * m.adjoint();
    return DensityMatrix{static_cast<int>(keep.size()), std::move(out)};
}

ComplexTensor permute_sites(const ComplexTensor& rho, const std::vector<int>& order) {
    const int n = static_cast<int>(order.size());
    const std::size_t dim = pow2(n);
    if (rho.rank() != 2 || rho.extent(0) != dim || rho.extent(1) != dim)
        throw std::invalid_argument("permute_sites: dimension mismatch");
    const auto map = spread_table(order, n);
    ComplexTensor out({dim, dim});
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) out[i * dim + j] = rho[map[i] * dim + map[j]];
    return out;
}

BipartiteView bipartite_view(const DensityMatrix& rho, const Partition& part) {
    part.validate(rho.n);
    std::vector<int> keep = part.a_sites;
    keep.insert(keep.end(), part.b_sites.begin(), part.b_sites.end());
    BipartiteView view;
    view.l_a = pow2(part.n_a());
    view.l_b = pow2(part.n_b());
    if (part.c_sites.empty()) {
        bool identity = true;
        for (std::size_t k = 0; k < keep.size(); ++k)
            if (keep[k] != static_cast<int>(k)) identity = false;
        view.matrix = identity ? rho.matrix : permute_sites(rho.matrix, keep);
    } else {
        view.matrix = partial_trace(rho, keep).matrix;
    }
    return view;
}

ComplexTensor partial_transpose(const ComplexTensor& rho_ab, std::size_t l_a, std::size_t l_b) {
    const std::size_t dim = l_a * l_b;
    if (rho_ab.rank() != 2 || rho_ab.extent(0) != dim || rho_ab.extent(1) != dim)
        throw std::invalid_argument("partial_transpose: dimension mismatch");
    ComplexTensor out({dim, dim});
    for (std::size_t a = 0; a < l_a; ++a)
        for (std::size_t b = 0; b < l_b; ++b)
            for (std::size_t ap = 0; ap < l_a; ++ap)
                for (std::size_t bp = 0; bp < l_b; ++bp)
                    out[(a * l_b + bp) * dim + (ap * l_b + b)] = rho_ab[(a * l_b + b) * dim + (ap * l_b + bp)];
    return out;
}

ComplexTensor partial_transpose(const DensityMatrix& rho, const Partition& part) {
    const auto view = bipartite_view(rho, part);
    return partial_transpose(view.matrix, view.l_a, view.l_b);
}

ComplexTensor realign(const ComplexTensor& rho_ab, std::size_t l_a, std::size_t l_b) {
    const std::size_t dim = l_a * l_b;
    if (rho_ab.rank() != 2 || rho_ab.extent(0) != dim || rho_ab.extent(1) != dim)
        throw std::invalid_argument("realign: dimension mismatch");
    ComplexTensor out({l_a * l_a, l_b * l_b});
    for (std::size_t a = 0; a < l_a; ++a)
        for (std::size_t ap = 0; ap < l_a; ++ap)
            for (std::size_t b = 0; b < l_b; ++b)
                for (std::size_t bp = 0; bp < l_b; ++bp)
                    out[(a * l_a + ap) * (l_b * l_b) + (b * l_b + bp)] =
                        rho_ab[(a * l_b + b) * dim + (ap * l_b + bp)];
    return out;
}

ComplexTensor realign(const DensityMatrix& rho, const Partition& part) {
    const auto view = bipartite_view(rho, part);
    return realign(view.matrix, view.l_a, view.l_b);
}

SpectrumData schmidt(const PureState& psi, const Partition& part) {
    if (!part.c_sites.empty()) throw std::invalid_argument("schmidt: partition must be bipartite (empty C)");
    part.validate(psi.n);
    std::vector<int> order = part.a_sites;
    order.insert(order.end(), part.b_sites.begin(), part.b_sites.end());
    const auto map = spread_table(order, psi.n);
    const std::size_t l_a = pow2(part.n_a());
    const std::size_t l_b = pow2(part.n_b());

    ComplexTensor m({l_a, l_b});
    for (std::size_t i = 0; i < map.size(); ++i) m[i] = psi.amplitudes[map[i]];
    auto s = singular_values(m);
    SpectrumData out;
    out.kind = SpectrumKind::Schmidt;
    out.values.reserve(s.size());
    double sum = 0.0;
    for (double v : s) {
        out.values.push_back(v * v);
        sum += v * v;
    }
    if (std::abs(sum - 1.0) > 1e-10)
        throw invariant_error("Schmidt coefficients sum to " + std::to_string(sum));
    return out;
}

double renyi_entropy(const std::vector<double>& values, double alpha) {
    if (alpha < 0.0) throw std::invalid_argument("renyi_entropy: alpha must be >= 0");
    double sum = 0.0, max_v = 0.0;
    for (double v : values) {
        if (v < -1e-10) throw std::invalid_argument("renyi_entropy: negative entry " + std::to_string(v));
        sum += std::max(v, 0.0);
        max_v = std::max(max_v, v);
    }
    if (std::abs(sum - 1.0) > 1e-6)
        throw std::invalid_argument("renyi_entropy: spectrum not normalized, sum = " + std::to_string(sum));
    const double tol = zero_tolerance(values.size(), max_v);
    if (alpha == 0.0) {
        std::size_t count = 0;
        for (double v : values)
            if (v > tol) ++count;
        return std::log(static_cast<double>(count));
    }
    if (std::abs(alpha - 1.0) < 1e-12) {
        double s = 0.0;
        for (double v : values)
            if (v > tol) s -= (v / sum) * std::log(v / sum);
        return s;
    }
    double pow_sum = 0.0;
    for (double v : values)
        if (v > tol) pow_sum += std::pow(v / sum, alpha);
    return std::log(pow_sum) / (1.0 - alpha);
}

double renyi_entropy(const SpectrumData& spec, double alpha) { return renyi_entropy(spec.values, alpha); }

SpectrumData pure_pt_spectrum(const SpectrumData& schmidt_values, double p, int n) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("pure_pt_spectrum: p must be in [0,1]");
    const std::size_t r = schmidt_values.values.size();
    const std::size_t dim = pow2(n);
    if (r * r > dim) throw std::invalid_argument("pure_pt_spectrum: rank exceeds 2^(n/2)");
    const double shift = p / static_cast<double>(dim);
    SpectrumData out;
    out.kind = SpectrumKind::PtEigenvalues;
    out.values.reserve(dim);
    const auto& lam = schmidt_values.values;
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) {
            const double sign = (i <= j) ? 1.0 : -1.0;
            out.values.push_back((1.0 - p) * sign * std::sqrt(lam[i] * lam[j]) + shift);
        }
    for (std::size_t k = r * r; k < dim; ++k) out.values.push_back(shift);
    std::sort(out.values.begin(), out.values.end(), std::greater<>());
    double sum = std::accumulate(out.values.begin(), out.values.end(), 0.0);
    if (std::abs(sum - 1.0) > 1e-9) throw invariant_error("PT spectrum sums to " + std::to_string(sum));
    return out;
}

double pure_ppt_threshold(const SpectrumData& schmidt_values, int n) {
    const auto& lam = schmidt_values.values;
    const double l1 = lam.empty() ? 0.0 : lam[0];
    const double l2 = lam.size() > 1 ? lam[1] : 0.0;
    return 1.0 - 1.0 / (1.0 + static_cast<double>(pow2(n)) * std::sqrt(l1 * l2));
}

namespace {

int sub_charge(const ChargeSpec& cs, const std::vector<int>& sites, std::size_t sub_label) {
    const int k = static_cast<int>(sites.size());
    int q = 0;
    for (int j = 0; j < k; ++j) q += cs.weight(sites[static_cast<std::size_t>(j)]) * bit_of(sub_label, j, k);
    return q;
}

} // namespace

std::vector<ChargeBlock> pt_charge_blocks(const ComplexTensor& rho_gamma, const Partition& part,
                                          const ChargeSpec& cs, double sym_tol) {
    const std::size_t l_a = pow2(part.n_a());
    const std::size_t l_b = pow2(part.n_b());
    const std::size_t dim = l_a * l_b;
    if (rho_gamma.rank() != 2 || rho_gamma.extent(0) != dim)
        throw std::invalid_argument("pt_charge_blocks: dimension mismatch");

    std::vector<int> label_q(dim);
    for (std::size_t a = 0; a < l_a; ++a)
        for (std::size_t b = 0; b < l_b; ++b)
            label_q[a * l_b + b] = cs.reduce(sub_charge(cs, part.a_sites, a) - sub_charge(cs, part.b_sites, b));

    std::map<int, std::vector<std::size_t>> groups;
    for (std::size_t z = 0; z < dim; ++z) groups[label_q[z]].push_back(z);

    double off = 0.0;
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j)
            if (label_q[i] != label_q[j]) off = std::max(off, std::abs(rho_gamma[i * dim + j]));
    if (off > sym_tol)
        throw invariant_error("state not symmetric under charge spec: off-block mass " + std::to_string(off));

    std::vector<ChargeBlock> blocks;
    for (const auto& [q, idx] : groups) {
        ComplexTensor blk({idx.size(), idx.size()});
        for (std::size_t i = 0; i < idx.size(); ++i)
            for (std::size_t j = 0; j < idx.size(); ++j) blk[i * idx.size() + j] = rho_gamma[idx[i] * dim + idx[j]];
        blocks.push_back({q, std::move(blk)});
    }
    return blocks;
}

std::vector<ChargeBlock> realignment_charge_blocks(const ComplexTensor& realigned, const Partition& part,
                                                   const ChargeSpec& cs, double sym_tol) {
    const std::size_t l_a = pow2(part.n_a());
    const std::size_t l_b = pow2(part.n_b());
    if (realigned.rank() != 2 || realigned.extent(0) != l_a * l_a || realigned.extent(1) != l_b * l_b)
        throw std::invalid_argument("realignment_charge_blocks: dimension mismatch");

    std::vector<int> row_q(l_a * l_a), col_q(l_b * l_b);
    for (std::size_t a = 0; a < l_a; ++a)
        for (std::size_t ap = 0; ap < l_a; ++ap)
            row_q[a * l_a + ap] = cs.reduce(sub_charge(cs, part.a_sites, a) - sub_charge(cs, part.a_sites, ap));
    for (std::size_t b = 0; b < l_b; ++b)
        for (std::size_t bp = 0; bp < l_b; ++bp)
            col_q[b * l_b + bp] = cs.reduce(sub_charge(cs, part.b_sites, bp) - sub_charge(cs, part.b_sites, b));

    std::map<int, std::vector<std::size_t>> row_groups, col_groups;
    for (std::size_t i = 0; i < row_q.size(); ++i) row_groups[row_q[i]].push_back(i);
    for (std::size_t j = 0; j < col_q.size(); ++j) col_groups[col_q[j]].push_back(j);

    double off = 0.0;
    for (std::size_t i = 0; i < row_q.size(); ++i)
        for (std::size_t j = 0; j < col_q.size(); ++j)
            if (row_q[i] != col_q[j]) off = std::max(off, std::abs(realigned[i * col_q.size() + j]));
    if (off > sym_tol)
        throw invariant_error("state not symmetric under charge spec: off-block mass " + std::to_string(off));

    std::vector<ChargeBlock> blocks;
    for (const auto& [q, rows] : row_groups) {
        auto it = col_groups.find(q);
        std::vector<std::size_t> cols = (it == col_groups.end()) ? std::vector<std::size_t>{} : it->second;
        if (cols.empty()) continue;
        ComplexTensor blk({rows.size(), cols.size()});
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (std::size_t j = 0; j < cols.size(); ++j)
                blk[i * cols.size() + j] = realigned[rows[i] * col_q.size() + cols[j]];
        blocks.push_back({q, std::move(blk)});
    }
    return blocks;
}

PureState tensor_product_state(const PureState& a, const PureState& b) {
    ComplexTensor amp = tensor_product(a.amplitudes, b.amplitudes);
    return PureState{a.n + b.n, amp.reshape({amp.size()})};
}

} // namespace mixwit
