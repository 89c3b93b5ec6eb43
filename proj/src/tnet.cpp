#include "mixwit/tnet.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "eigen_bridge.hpp"
#include "mixwit/rng.hpp"

namespace mixwit {

namespace {

using detail::from_eigen;
using detail::to_eigen;
using Mat = Eigen::MatrixXcd;

std::size_t pow2(int k) { return std::size_t{1} << k; }

ComplexTensor random_tensor(const std::vector<std::size_t>& shape, Rng& rng) {
    ComplexTensor t(shape);
    for (auto& v : t.data()) v = rng.gaussian_complex();
    return t;
}

struct QrPair {
    Mat q;
    Mat r;
};

QrPair thin_qr(const Mat& m) {
    Eigen::HouseholderQR<Mat> qr(m);
    const Eigen::Index k = std::min(m.rows(), m.cols());
    Mat q = qr.householderQ() * Mat::Identity(m.rows(), k);
    Mat r = qr.matrixQR().topRows(k).template triangularView<Eigen::Upper>();
    return {std::move(q), std::move(r)};
}

/// m = l * q with q a co-isometry (q q^dag = I).
QrPair thin_lq(const Mat& m) {
    auto [q, r] = thin_qr(m.adjoint().eval());
    return {q.adjoint(), r.adjoint()}; // (q, l) swapped on purpose: first = co-isometry
}

/// Generic one-site sweeps over tensors of shape (chi_l, d, chi_r).
void left_sweep(std::vector<ComplexTensor>& ts, int upto) {
    for (int i = 0; i < upto; ++i) {
        const auto& sh = ts[static_cast<std::size_t>(i)].shape();
        Mat m = to_eigen(ts[static_cast<std::size_t>(i)], sh[0] * sh[1], sh[2]);
        auto [q, r] = thin_qr(m);
        const std::size_t k = static_cast<std::size_t>(q.cols());
        ts[static_cast<std::size_t>(i)] = from_eigen(q).reshape({sh[0], sh[1], k});
        ts[static_cast<std::size_t>(i + 1)] =
            contract(from_eigen(r), ts[static_cast<std::size_t>(i + 1)], {{1, 0}});
    }
}

void right_sweep(std::vector<ComplexTensor>& ts, int downto) {
    for (int i = static_cast<int>(ts.size()) - 1; i > downto; --i) {
        const auto& sh = ts[static_cast<std::size_t>(i)].shape();
        Mat m = to_eigen(ts[static_cast<std::size_t>(i)], sh[0], sh[1] * sh[2]);
        auto [q, l] = thin_lq(m);
        const std::size_t k = static_cast<std::size_t>(q.rows());
        ts[static_cast<std::size_t>(i)] = from_eigen(q).reshape({k, sh[1], sh[2]});
        ts[static_cast<std::size_t>(i - 1)] =
            contract(ts[static_cast<std::size_t>(i - 1)], from_eigen(l), {{2, 0}});
    }
}

/// Right sweep over the whole chain returning the final carry (bond matrix
/// left of site `downto`).
Mat right_sweep_carry(std::vector<ComplexTensor>& ts, int downto) {
    Mat carry = Mat::Identity(1, 1);
    for (int i = static_cast<int>(ts.size()) - 1; i >= downto; --i) {
        const auto& sh = ts[static_cast<std::size_t>(i)].shape();
        Mat m = to_eigen(ts[static_cast<std::size_t>(i)], sh[0], sh[1] * sh[2]);
        auto [q, l] = thin_lq(m);
        const std::size_t k = static_cast<std::size_t>(q.rows());
        ts[static_cast<std::size_t>(i)] = from_eigen(q).reshape({k, sh[1], sh[2]});
        if (i > downto)
            ts[static_cast<std::size_t>(i - 1)] =
                contract(ts[static_cast<std::size_t>(i - 1)], from_eigen(l), {{2, 0}});
        else
            carry = l;
    }
    return carry;
}

int removed_below(const std::vector<std::size_t>& removed, std::size_t p) {
    int c = 0;
    for (auto r : removed)
        if (r < p) ++c;
    return c;
}

double real_scalar(const ComplexTensor& t, const char* what) {
    std::size_t sz = 1;
    for (auto s : t.shape()) sz *= s;
    if (sz != 1) throw invariant_error(std::string(what) + ": contraction did not reduce to a scalar");
    const cplx v = t.data()[0];
    if (std::abs(v.imag()) > 1e-9 * std::max(1.0, std::abs(v.real())))
        throw invariant_error(std::string(what) + ": imaginary residue " + std::to_string(v.imag()));
    return v.real();
}

/// Per-site replica tags: 0 = sigma+, 1 = sigma-, 2 = identity.
std::vector<int> partition_tags(const Partition& part, int n) {
    part.validate(n);
    std::vector<int> tag(static_cast<std::size_t>(n), 2);
    for (int s : part.a_sites) tag[static_cast<std::size_t>(s)] = 0;
    for (int s : part.b_sites) tag[static_cast<std::size_t>(s)] = 1;
    return tag;
}

double mps_replica_moment(const Mps& psi, const std::vector<int>& tag, int alpha) {
    if (alpha < 1) throw std::invalid_argument("replica moment needs alpha >= 1");
    const int n = psi.n();
    const std::size_t a = static_cast<std::size_t>(alpha);

    ComplexTensor l(std::vector<std::size_t>(2 * a, 1));
    l[0] = 1.0;
    std::vector<std::size_t> pos_k(a), pos_b(a);
    for (std::size_t g = 0; g < a; ++g) {
        pos_k[g] = g;
        pos_b[g] = a + g;
    }

    for (int i = 0; i < n; ++i) {
        const ComplexTensor& site = psi.tensors[static_cast<std::size_t>(i)];
        const ComplexTensor site_conj = site.conjugate();
        const int t = tag[static_cast<std::size_t>(i)];
        for (std::size_t g = 0; g < a; ++g) {
            // ket copy g
            {
                const std::size_t rm = pos_k[g];
                l = contract(l, site, {{rm, 0}});
                for (std::size_t h = 0; h < a; ++h) {
                    if (pos_k[h] > rm) --pos_k[h];
                    if (pos_b[h] > rm) --pos_b[h];
                }
                pos_k[g] = l.rank() - 1;
            }
            const std::size_t s_pos = l.rank() - 2;
            // bra copy closing the physical leg: s'_gb pairs s_{pi(gb)} = s_g
            std::size_t gb = g;
            if (alpha > 1) {
                if (t == 0) gb = (g + a - 1) % a;      // pi = sigma+: gb = g - 1
                else if (t == 1) gb = (g + 1) % a;     // pi = sigma-: gb = g + 1
            }
            {
                const std::vector<std::size_t> rm = {std::min(pos_b[gb], s_pos), std::max(pos_b[gb], s_pos)};
                l = contract(l, site_conj, {{pos_b[gb], 0}, {s_pos, 1}});
                for (std::size_t h = 0; h < a; ++h) {
                    if (pos_k[h] != rm[0] && pos_k[h] != rm[1])
                        pos_k[h] -= static_cast<std::size_t>(removed_below(rm, pos_k[h]));
                    if (pos_b[h] != rm[0] && pos_b[h] != rm[1])
                        pos_b[h] -= static_cast<std::size_t>(removed_below(rm, pos_b[h]));
                }
                pos_b[gb] = l.rank() - 1;
            }
        }
    }
    return real_scalar(l, "mps replica moment");
}

} // namespace

std::size_t Mps::bond(int i) const {
    if (i <= 0) return tensors.front().extent(0);
    return tensors[static_cast<std::size_t>(i - 1)].extent(2);
}

void Mps::validate() const {
    if (tensors.empty()) throw std::invalid_argument("empty MPS");
    if (tensors.front().extent(0) != 1 || tensors.back().extent(2) != 1)
        throw std::invalid_argument("MPS boundary bonds must have dimension 1");
    for (std::size_t i = 0; i < tensors.size(); ++i) {
        if (tensors[i].rank() != 3 || tensors[i].extent(1) != 2)
            throw std::invalid_argument("MPS tensors must have shape (chi, 2, chi)");
        if (i + 1 < tensors.size() && tensors[i].extent(2) != tensors[i + 1].extent(0))
            throw std::invalid_argument("MPS bond dimension mismatch");
    }
}

void Mpo::validate() const {
    if (tensors.empty()) throw std::invalid_argument("empty MPO");
    if (tensors.front().extent(0) != 1 || tensors.back().extent(3) != 1)
        throw std::invalid_argument("MPO boundary bonds must have dimension 1");
    for (std::size_t i = 0; i < tensors.size(); ++i) {
        if (tensors[i].rank() != 4 || tensors[i].extent(1) != 2 || tensors[i].extent(2) != 2)
            throw std::invalid_argument("MPO tensors must have shape (chi, 2, 2, chi)");
        if (i + 1 < tensors.size() && tensors[i].extent(3) != tensors[i + 1].extent(0))
            throw std::invalid_argument("MPO bond dimension mismatch");
    }
}

Mps random_mps(int n, std::size_t chi, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("random_mps: n >= 1");
    Rng rng(seed);
    Mps psi;
    auto bond_dim = [&](int i) {
        const double cap = std::pow(2.0, std::min(i, n - i));
        return std::min<std::size_t>(chi, cap > 1e6 ? chi : static_cast<std::size_t>(cap));
    };
    for (int i = 0; i < n; ++i)
        psi.tensors.push_back(random_tensor({bond_dim(i), 2, bond_dim(i + 1)}, rng));
    // normalize: gauge to the last site, then scale the center
    Mps canon = canonicalize(psi, n - 1);
    auto& last = canon.tensors.back();
    double norm2 = 0.0;
    for (const auto& v : last.data()) norm2 += std::norm(v);
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& v : last.data()) v *= inv;
    return canon;
}

Mps scramble_gauge(const Mps& psi, std::uint64_t seed) {
    Rng rng(seed);
    Mps out = psi;
    out.center.reset();
    for (int b = 1; b < out.n(); ++b) {
        const std::size_t chi = out.bond(b);
        if (chi == 1) continue;
        Mat g = Mat::Zero(static_cast<Eigen::Index>(chi), static_cast<Eigen::Index>(chi));
        for (Eigen::Index i = 0; i < g.rows(); ++i)
            for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) = rng.gaussian_complex();
        auto qr = thin_qr(g);
        Eigen::VectorXd d = Eigen::VectorXd::Ones(g.rows());
        for (Eigen::Index i = 0; i < d.size(); ++i) d(i) = 0.75 + 0.5 * rng.uniform();
        Mat gm = qr.q * d.asDiagonal();
        Mat gi = d.cwiseInverse().asDiagonal() * qr.q.adjoint();
        out.tensors[static_cast<std::size_t>(b - 1)] =
            contract(out.tensors[static_cast<std::size_t>(b - 1)], from_eigen(gm), {{2, 0}});
        out.tensors[static_cast<std::size_t>(b)] =
            contract(from_eigen(gi), out.tensors[static_cast<std::size_t>(b)], {{1, 0}});
    }
    return out;
}

double mps_norm(const Mps& psi) {
    ComplexTensor l({1, 1});
    l[0] = 1.0;
    for (const auto& site : psi.tensors) {
        l = contract(l, site, {{0, 0}});                     // (bra, s, ket')
        l = contract(l, site.conjugate(), {{0, 0}, {1, 1}}); // (ket', bra')
    }
    return std::sqrt(std::abs(l.scalar().real()));
}

PureState mps_to_state(const Mps& psi) {
    const int n = psi.n();
    if (n > 20) throw std::invalid_argument("mps_to_state: n capped at 20");
    ComplexTensor acc = psi.tensors[0].reshape({2, psi.tensors[0].extent(2)});
    for (int i = 1; i < n; ++i) {
        acc = contract(acc, psi.tensors[static_cast<std::size_t>(i)], {{acc.rank() - 1, 0}});
        acc = acc.reshape({acc.size() / psi.tensors[static_cast<std::size_t>(i)].extent(2),
                           psi.tensors[static_cast<std::size_t>(i)].extent(2)});
    }
    return make_pure(n, acc.reshape({pow2(n)}));
}

Mps canonicalize(const Mps& psi, int center) {
    psi.validate();
    if (center < 0 || center >= psi.n()) throw std::invalid_argument("canonicalize: bad center");
    Mps out = psi;
    left_sweep(out.tensors, center);
    right_sweep(out.tensors, center);
    out.center = center;
    return out;
}

Mpo random_density_mpo(int n, std::size_t chi, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<ComplexTensor> g;
    auto bond_dim = [&](int i) {
        return std::min<std::size_t>(chi, static_cast<std::size_t>(std::pow(4.0, std::min(i, n - i))));
    };
    for (int i = 0; i < n; ++i) g.push_back(random_tensor({bond_dim(i), 2, 2, bond_dim(i + 1)}, rng));

    Mpo rho;
    for (int i = 0; i < n; ++i) {
        const auto& t = g[static_cast<std::size_t>(i)];
        // W[(x xb), s, s', (y yb)] = sum_anc G[x,s,anc,y] conj(G)[xb,s',anc,yb]
        ComplexTensor w = contract(t, t.conjugate(), {{2, 2}});
        // axes: x s y xb s' yb -> (x xb) s s' (y yb)
        w = w.permute({0, 3, 1, 4, 2, 5});
        const auto& sh = t.shape();
        rho.tensors.push_back(w.reshape({sh[0] * sh[0], 2, 2, sh[3] * sh[3]}));
    }
    const double tr = mpo_trace(rho);
    if (tr <= 0.0) throw invariant_error("random_density_mpo: nonpositive trace");
    rho.tensors[0] = rho.tensors[0].scaled(1.0 / tr);
    return rho;
}

Mpo mpo_from_traced_mps(const Mps& psi, int first, int last) {
    psi.validate();
    const int n = psi.n();
    if (first < 0 || last > n || first >= last) throw std::invalid_argument("mpo_from_traced_mps: bad window");

    // left environment over the traced prefix
    ComplexTensor env_l({1, 1});
    env_l[0] = 1.0;
    for (int i = 0; i < first; ++i) {
        const auto& a = psi.tensors[static_cast<std::size_t>(i)];
        env_l = contract(env_l, a, {{0, 0}});
        env_l = contract(env_l, a.conjugate(), {{0, 0}, {1, 1}});
    }
    ComplexTensor env_r({1, 1});
    env_r[0] = 1.0;
    for (int i = n - 1; i >= last; --i) {
        const auto& a = psi.tensors[static_cast<std::size_t>(i)];
        env_r = contract(a, env_r, {{2, 0}});              // (x, s, yb)
        env_r = contract(env_r, psi.tensors[static_cast<std::size_t>(i)].conjugate(), {{2, 2}, {1, 1}});
    }

    Mpo rho;
    for (int i = first; i < last; ++i) {
        const auto& a = psi.tensors[static_cast<std::size_t>(i)];
        ComplexTensor w = contract(a, a.conjugate(), std::vector<std::pair<std::size_t, std::size_t>>{});
        // axes: x s y xb s' yb
        w = w.permute({0, 3, 1, 4, 2, 5});
        const auto& sh = a.shape();
        w = w.reshape({sh[0] * sh[0], 2, 2, sh[2] * sh[2]});
        rho.tensors.push_back(std::move(w));
    }
    // fold the environments into the edge tensors
    {
        auto& w0 = rho.tensors.front();
        const std::size_t chi2 = w0.extent(0);
        ComplexTensor ev = env_l.reshape({1, chi2});
        w0 = contract(ev, w0, {{1, 0}});
    }
    {
        auto& wn = rho.tensors.back();
        const std::size_t chi2 = wn.extent(3);
        ComplexTensor ev = env_r.reshape({chi2, 1});
        wn = contract(wn, ev, {{3, 0}});
    }
    return rho;
}

ComplexTensor mpo_to_matrix(const Mpo& rho) {
    const int n = rho.n();
    if (n > 10) throw std::invalid_argument("mpo_to_matrix: n capped at 10");
    // running (ket, bra, bond)
    ComplexTensor acc = rho.tensors[0].reshape({2, 2, rho.tensors[0].extent(3)});
    for (int i = 1; i < n; ++i) {
        const auto& w = rho.tensors[static_cast<std::size_t>(i)];
        acc = contract(acc, w, {{2, 0}}); // (ket, bra, s, s', bond)
        const std::size_t dk = acc.extent(0), db = acc.extent(1);
        acc = acc.permute({0, 2, 1, 3, 4}).reshape({dk * 2, db * 2, w.extent(3)});
    }
    return acc.reshape({acc.extent(0), acc.extent(1)});
}

namespace {

/// Exact tensor-train split of a d^n vector; singular values below
/// rel_tol * s_max are dropped (numerical zeros only).
std::vector<ComplexTensor> tensor_train(const std::vector<cplx>& data, int n, std::size_t d,
                                        double rel_tol) {
    std::vector<ComplexTensor> tensors;
    std::size_t chi = 1;
    std::size_t cols = 1;
    for (int i = 1; i < n; ++i) cols *= d;
    Mat m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < cols; ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = data[r * cols + c];

    for (int i = 0; i + 1 < n; ++i) {
        Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto& sv = svd.singularValues();
        std::size_t k = 0;
        for (Eigen::Index j = 0; j < sv.size(); ++j)
            if (sv(j) > rel_tol * sv(0)) ++k;
        k = std::max<std::size_t>(k, 1);
        Mat u = svd.matrixU().leftCols(static_cast<Eigen::Index>(k));
        Mat carry = sv.head(static_cast<Eigen::Index>(k)).asDiagonal() *
                    svd.matrixV().leftCols(static_cast<Eigen::Index>(k)).adjoint();
        tensors.push_back(from_eigen(u).reshape({chi, d, k}));

        cols /= d;
        Mat next(static_cast<Eigen::Index>(k * d), static_cast<Eigen::Index>(cols));
        for (std::size_t a = 0; a < k; ++a)
            for (std::size_t s = 0; s < d; ++s)
                for (std::size_t c = 0; c < cols; ++c)
                    next(static_cast<Eigen::Index>(a * d + s), static_cast<Eigen::Index>(c)) =
                        carry(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(s * cols + c));
        m = std::move(next);
        chi = k;
    }
    tensors.push_back(from_eigen(m).reshape({chi, d, 1}));
    return tensors;
}

} // namespace

Mps mps_from_state(const PureState& psi) {
    Mps out;
    out.tensors = tensor_train(psi.amplitudes.data(), psi.n, 2, 1e-14);
    out.validate();
    return out;
}

Mpo mpo_from_dense(const ComplexTensor& op, int n) {
    const std::size_t dim = pow2(n);
    if (op.rank() != 2 || op.extent(0) != dim || op.extent(1) != dim)
        throw std::invalid_argument("mpo_from_dense: dimension mismatch");
    // vectorize with per-site composite digit (s_i, s'_i)
    std::vector<cplx> vec(dim * dim);
    for (std::size_t x = 0; x < dim; ++x)
        for (std::size_t y = 0; y < dim; ++y) {
            std::size_t key = 0;
            for (int i = 0; i < n; ++i) {
                const std::size_t digit = 2 * static_cast<std::size_t>(bit_of(x, i, n)) +
                                          static_cast<std::size_t>(bit_of(y, i, n));
                key = key * 4 + digit;
            }
            vec[key] = op[x * dim + y];
        }
    auto tensors = tensor_train(vec, n, 4, 1e-13);
    Mpo out;
    for (auto& t : tensors) {
        const auto& sh = t.shape();
        out.tensors.push_back(t.reshape({sh[0], 2, 2, sh[2]}));
    }
    out.validate();
    return out;
}

double mpo_trace(const Mpo& rho) {
    ComplexTensor l({1});
    l[0] = 1.0;
    for (const auto& w : rho.tensors) {
        const ComplexTensor wt = trace_axes(w, 1, 2);
        l = contract(l, wt, {{0, 0}});
    }
    return l.scalar().real();
}

double mps_pt_moment(const Mps& psi, const Partition& part, int alpha) {
    psi.validate();
    return mps_replica_moment(psi, partition_tags(part, psi.n()), alpha);
}

double mps_subsystem_moment(const Mps& psi, const std::vector<int>& sites, int alpha) {
    psi.validate();
    std::vector<int> tag(static_cast<std::size_t>(psi.n()), 2);
    for (int s : sites) tag.at(static_cast<std::size_t>(s)) = 0;
    return mps_replica_moment(psi, tag, alpha);
}

double mpo_pt_moment(const Mpo& rho, const Partition& part, int alpha) {
    rho.validate();
    if (alpha < 1) throw std::invalid_argument("mpo_pt_moment: alpha >= 1");
    const int n = rho.n();
    const auto tag = partition_tags(part, n);
    const std::size_t a = static_cast<std::size_t>(alpha);

    ComplexTensor l(std::vector<std::size_t>(a, 1));
    l[0] = 1.0;
    std::vector<std::size_t> pos_w(a);
    for (std::size_t g = 0; g < a; ++g) pos_w[g] = g;

    constexpr std::size_t kNone = static_cast<std::size_t>(-1);
    for (int i = 0; i < n; ++i) {
        const ComplexTensor& w = rho.tensors[static_cast<std::size_t>(i)];
        const int t = tag[static_cast<std::size_t>(i)];

        if (t == 2 || alpha == 1) {
            const ComplexTensor wt = trace_axes(w, 1, 2);
            for (std::size_t g = 0; g < a; ++g) {
                const std::size_t rm = pos_w[g];
                l = contract(l, wt, {{rm, 0}});
                for (std::size_t h = 0; h < a; ++h)
                    if (pos_w[h] > rm) --pos_w[h];
                pos_w[g] = l.rank() - 1;
            }
            continue;
        }

        std::vector<std::size_t> open_ket(a, kNone), open_bra(a, kNone);
        for (std::size_t g = 0; g < a; ++g) {
            const std::size_t tgt = (t == 0) ? (g + 1) % a : (g + a - 1) % a; // pi(g)
            const std::size_t src = (t == 0) ? (g + a - 1) % a : (g + 1) % a; // pi^{-1}(g)

            std::vector<std::pair<std::size_t, std::size_t>> pairs = {{pos_w[g], 0}};
            std::vector<std::size_t> removed = {pos_w[g]};
            bool ket_open = true, bra_open = true;
            if (open_bra[src] != kNone) { // s'_{src} = s_g
                pairs.push_back({open_bra[src], 1});
                removed.push_back(open_bra[src]);
                ket_open = false;
            }
            if (open_ket[tgt] != kNone) { // s'_g = s_{pi(g)}
                pairs.push_back({open_ket[tgt], 2});
                removed.push_back(open_ket[tgt]);
                bra_open = false;
            }
            std::sort(removed.begin(), removed.end());
            l = contract(l, w, pairs);

            auto fix = [&](std::size_t& p) {
                if (p == kNone) return;
                p -= static_cast<std::size_t>(removed_below(removed, p));
            };
            for (std::size_t h = 0; h < a; ++h) {
                fix(pos_w[h]);
                fix(open_ket[h]);
                fix(open_bra[h]);
            }
            if (open_bra[src] != kNone) open_bra[src] = kNone;
            if (open_ket[tgt] != kNone) open_ket[tgt] = kNone;
            // appended axes, assigned from the back: bond last, then s', then s
            std::size_t next = l.rank() - 1;
            pos_w[g] = next;
            if (bra_open) open_bra[g] = --next;
            if (ket_open) open_ket[g] = --next;
        }
    }
    return real_scalar(l, "mpo replica moment");
}

SpectrumData mpo_realignment_spectrum(const Mpo& rho, int cut) {
    rho.validate();
    const int n = rho.n();
    if (cut < 1 || cut >= n) throw std::invalid_argument("mpo_realignment_spectrum: bad cut");
    // vectorize: (chi, 2, 2, chi) -> (chi, 4, chi) MPS of |rho>
    std::vector<ComplexTensor> ts;
    ts.reserve(static_cast<std::size_t>(n));
    for (const auto& w : rho.tensors) ts.push_back(w.reshape({w.extent(0), 4, w.extent(3)}));
    left_sweep(ts, cut);
    Mat carry = right_sweep_carry(ts, cut);
    SpectrumData out;
    out.kind = SpectrumKind::RealignmentSingular;
    Eigen::JacobiSVD<Mat> svd(carry);
    out.values.assign(svd.singularValues().data(), svd.singularValues().data() + svd.singularValues().size());
    return out;
}

namespace {

/// sqrt of C_L (x) conj(C_L) where C_L is the Gram matrix of the left part
/// (orthogonality center included).
Mat gamma_s_half(const Mps& canon, int n_a) {
    const auto& m = canon.tensors[static_cast<std::size_t>(n_a - 1)];
    ComplexTensor cl = contract(m.conjugate(), m, {{0, 0}, {1, 1}}); // (beta, beta')
    const std::size_t chi = cl.extent(0);
    auto eig = hermitian_eig(cl, 1e-8);
    Mat u = to_eigen(eig.vectors);
    Eigen::VectorXd d(static_cast<Eigen::Index>(eig.values.size()));
    for (std::size_t j = 0; j < eig.values.size(); ++j)
        d(static_cast<Eigen::Index>(j)) = std::sqrt(std::max(eig.values[j], 0.0));
    Mat cl_half = u * d.asDiagonal() * u.adjoint();

    Mat s_half(static_cast<Eigen::Index>(chi * chi), static_cast<Eigen::Index>(chi * chi));
    for (std::size_t b = 0; b < chi; ++b)
        for (std::size_t bp = 0; bp < chi; ++bp)
            for (std::size_t dd = 0; dd < chi; ++dd)
                for (std::size_t dp = 0; dp < chi; ++dp)
                    s_half(static_cast<Eigen::Index>(b * chi + bp), static_cast<Eigen::Index>(dd * chi + dp)) =
                        cl_half(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(dd)) *
                        std::conj(cl_half(static_cast<Eigen::Index>(bp), static_cast<Eigen::Index>(dp)));
    return s_half;
}

} // namespace

SpectrumData mps_traced_gamma_spectrum(const Mps& psi, int n_a, int n_b) {
    psi.validate();
    const int n = psi.n();
    if (n_a < 1 || n_b < 1 || n_a + n_b > n) throw std::invalid_argument("mps_traced_gamma: bad sizes");
    const Mps canon = canonicalize(psi, n_a - 1);

    // propagate a Gram factor F with K = F F^dag through B (right to left):
    // K' = sum_{s,s'} (A^s (x) conj(A^s')) K (A^s (x) conj(A^s'))^dag, so the
    // factor update is a column concatenation plus LQ recompression. Keeping
    // the factor (instead of K itself) makes the singular values exact to
    // machine precision instead of sqrt(eps).
    // K starts as the rank-one projector onto vec(identity): a single column
    const std::size_t chi_e = canon.bond(n_a + n_b);
    Mat f = Mat::Zero(static_cast<Eigen::Index>(chi_e * chi_e), 1);
    for (std::size_t x = 0; x < chi_e; ++x) f(static_cast<Eigen::Index>(x * chi_e + x), 0) = 1.0;
    for (int i = n_a + n_b - 1; i >= n_a; --i) {
        const auto& a = canon.tensors[static_cast<std::size_t>(i)];
        const std::size_t cl = a.extent(0), cr = a.extent(2);
        const std::size_t w = static_cast<std::size_t>(f.cols());
        // F as a tensor (cr, cr, w); apply A^s on leg 1, conj(A^s') on leg 2
        ComplexTensor ft({cr, cr, w});
        for (std::size_t x = 0; x < cr; ++x)
            for (std::size_t y = 0; y < cr; ++y)
                for (std::size_t c = 0; c < w; ++c)
                    ft.at({x, y, c}) = f(static_cast<Eigen::Index>(x * cr + y), static_cast<Eigen::Index>(c));
        ComplexTensor t = contract(a, ft, {{2, 0}});               // (b1, s, y, c)
        t = contract(a.conjugate(), t, {{2, 2}});                  // (b2, s', b1, s, c)
        // columns indexed by (s, s', c)
        Mat fnext(static_cast<Eigen::Index>(cl * cl), static_cast<Eigen::Index>(4 * w));
        for (std::size_t b1 = 0; b1 < cl; ++b1)
            for (std::size_t b2 = 0; b2 < cl; ++b2)
                for (std::size_t s = 0; s < 2; ++s)
                    for (std::size_t sp = 0; sp < 2; ++sp)
                        for (std::size_t c = 0; c < w; ++c)
                            fnext(static_cast<Eigen::Index>(b1 * cl + b2),
                                  static_cast<Eigen::Index>((s * 2 + sp) * w + c)) =
                                t.at({b2, sp, b1, s, c});
        auto [q, l] = thin_lq(fnext);
        (void)q;
        f = l; // K = L L^dag
    }

    Mat prod = gamma_s_half(canon, n_a) * f;
    Eigen::JacobiSVD<Mat> svd(prod);
    SpectrumData out;
    out.kind = SpectrumKind::RealignmentSingular;
    out.values.assign(svd.singularValues().data(),
                      svd.singularValues().data() + svd.singularValues().size());
    return out;
}

double mps_traced_gamma(const Mps& psi, int n_a, int n_b, int alpha) {
    if (alpha < 2 || alpha % 2 != 0) throw std::invalid_argument("mps_traced_gamma: even alpha >= 2");
    psi.validate();
    const int n = psi.n();
    if (n_a < 1 || n_b < 1 || n_a + n_b > n) throw std::invalid_argument("mps_traced_gamma: bad sizes");
    const Mps canon = canonicalize(psi, n_a - 1);

    // K[b1,b2,b3,b4] over the bond left of site n_a; layers (A, Abar, Abar, A)
    // with physical pairings (1,3) and (2,4); init pairs (1,2), (3,4).
    const std::size_t chi_e = canon.bond(n_a + n_b);
    ComplexTensor k({chi_e, chi_e, chi_e, chi_e});
    for (std::size_t x = 0; x < chi_e; ++x)
        for (std::size_t y = 0; y < chi_e; ++y) k.at({x, x, y, y}) = 1.0;

    for (int i = n_a + n_b - 1; i >= n_a; --i) {
        const auto& a = canon.tensors[static_cast<std::size_t>(i)];
        const ComplexTensor ac = a.conjugate();
        // K'[b1,b2,b3,b4] = sum_{s,s'} A[b1,s,g1] Ac[b2,s',g2] Ac[b3,s,g3] A[b4,s',g4] K[g...]
        ComplexTensor t = contract(a, k, {{2, 0}});           // (b1, s, g2, g3, g4)
        t = contract(ac, t, {{2, 2}});                        // (b2,s',b1,s,g3,g4)
        t = contract(ac, t, {{2, 4}, {1, 3}});                // (b3, b2,s',b1,g4)
        t = contract(a, t, {{2, 4}, {1, 2}});                 // (b4, b3, b2, b1)
        k = t.permute({3, 2, 1, 0});
    }

    // Gamma = S K as a matrix over the copy pairs: rows (b1 b2), cols (b3 b4);
    // r_alpha = tr(Gamma^(alpha/2))
    const std::size_t chib = canon.bond(n_a);
    Mat km(static_cast<Eigen::Index>(chib * chib), static_cast<Eigen::Index>(chib * chib));
    for (std::size_t b1 = 0; b1 < chib; ++b1)
        for (std::size_t b2 = 0; b2 < chib; ++b2)
            for (std::size_t b3 = 0; b3 < chib; ++b3)
                for (std::size_t b4 = 0; b4 < chib; ++b4)
                    km(static_cast<Eigen::Index>(b1 * chib + b2), static_cast<Eigen::Index>(b3 * chib + b4)) =
                        k.at({b1, b2, b3, b4});
    const Mat s_half = gamma_s_half(canon, n_a);
    const Mat gamma = s_half * km * s_half;
    Mat power = gamma;
    for (int j = 1; j < alpha / 2; ++j) power = (power * gamma).eval();
    return power.trace().real();
}

EcSpectra ec_spectrum(const Mps& psi, int n_a, int n_c) {
    psi.validate();
    const int n = psi.n();
    const int n_b = n - n_a - n_c;
    if (n_a < 1 || n_b < 1 || n_c < 0) throw std::invalid_argument("ec_spectrum: bad layout");

    EcSpectra out;
    out.pt.kind = SpectrumKind::PtEigenvalues;
    out.realign.kind = SpectrumKind::RealignmentSingular;

    if (n_c == 0) {
        // pure state: both spectra follow from the bond Schmidt coefficients
        const Mps canon = canonicalize(psi, n_a - 1);
        const auto& m = canon.tensors[static_cast<std::size_t>(n_a - 1)];
        const auto& sh = m.shape();
        auto sv = singular_values(m.reshape({sh[0] * sh[1], sh[2]}));
        std::vector<double> lam;
        for (double s : sv) lam.push_back(s * s);
        for (std::size_t i = 0; i < lam.size(); ++i)
            for (std::size_t j = 0; j < lam.size(); ++j) {
                out.pt.values.push_back((i <= j ? 1.0 : -1.0) * std::sqrt(lam[i] * lam[j]));
                out.realign.values.push_back(std::sqrt(lam[i] * lam[j]));
            }
        std::sort(out.pt.values.begin(), out.pt.values.end(), std::greater<>());
        std::sort(out.realign.values.begin(), out.realign.values.end(), std::greater<>());
        return out;
    }

    const Mps canon = canonicalize(psi, n_a); // leftmost C site; spectrum is gauge independent
    const std::size_t chi_l = canon.bond(n_a);
    const std::size_t chi_r = canon.bond(n_a + n_c);

    // E_C[lk, lb, rk, rb]
    ComplexTensor ec({chi_l, chi_l, chi_l, chi_l});
    for (std::size_t x = 0; x < chi_l; ++x)
        for (std::size_t y = 0; y < chi_l; ++y) ec.at({x, y, x, y}) = 1.0;
    for (int i = n_a; i < n_a + n_c; ++i) {
        const auto& a = canon.tensors[static_cast<std::size_t>(i)];
        ComplexTensor t = contract(ec, a, {{2, 0}});      // (lk, lb, rb, s, rk')
        ec = contract(t, a.conjugate(), {{2, 0}, {3, 1}}); // (lk, lb, rk', rb')
    }

    const std::size_t rows = chi_l * chi_r;
    Mat ec_gamma(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(rows));
    Mat ec_mat(static_cast<Eigen::Index>(chi_l * chi_l), static_cast<Eigen::Index>(chi_r * chi_r));
    for (std::size_t lk = 0; lk < chi_l; ++lk)
        for (std::size_t lb = 0; lb < chi_l; ++lb)
            for (std::size_t rk = 0; rk < chi_r; ++rk)
                for (std::size_t rb = 0; rb < chi_r; ++rb) {
                    const cplx v = ec.at({lk, lb, rk, rb});
                    ec_gamma(static_cast<Eigen::Index>(lk * chi_r + rb), static_cast<Eigen::Index>(lb * chi_r + rk)) = v;
                    ec_mat(static_cast<Eigen::Index>(lk * chi_l + lb), static_cast<Eigen::Index>(rk * chi_r + rb)) = v;
                }

    out.pt.values = hermitian_spectrum(from_eigen(((ec_gamma + ec_gamma.adjoint()) / 2.0).eval()));
    Eigen::JacobiSVD<Mat> svd(ec_mat);
    out.realign.values.assign(svd.singularValues().data(),
                              svd.singularValues().data() + svd.singularValues().size());
    return out;
}

double TiLimits::p_alpha(int alpha) const {
    if (alpha < 2 || alpha % 2 != 0) throw std::invalid_argument("TiLimits::p_alpha: even alpha >= 2");
    double sa = 0.0, sh = 0.0;
    for (double m : mu) {
        sa += std::pow(m, alpha);
        sh += std::pow(m, alpha / 2.0);
    }
    return sa * sa * sh * sh;
}

double TiLimits::r_alpha(int alpha) const {
    if (alpha < 2 || alpha % 2 != 0) throw std::invalid_argument("TiLimits::r_alpha: even alpha >= 2");
    double s2 = 0.0, sh = 0.0;
    for (double m : mu) {
        s2 += m * m;
        sh += std::pow(m, alpha / 2.0);
    }
    return std::pow(s2, alpha) * sh * sh;
}

TiLimits ti_mps_limits(const ComplexTensor& site_tensor) {
    if (site_tensor.rank() != 3 || site_tensor.extent(1) != 2 ||
        site_tensor.extent(0) != site_tensor.extent(2))
        throw std::invalid_argument("ti_mps_limits: tensor must be (chi, 2, chi)");
    const std::size_t chi = site_tensor.extent(0);

    // transfer matrix E[(k b), (k' b')]
    ComplexTensor e = contract(site_tensor, site_tensor.conjugate(), {{1, 1}}); // (k, k', b, b')
    e = e.permute({0, 2, 1, 3}).reshape({chi * chi, chi * chi});
    auto eig = general_eig(e);

    TiLimits out;
    out.gap_ratio = eig.values.size() > 1 ? std::abs(eig.values[1]) / std::abs(eig.values[0]) : 0.0;
    if (eig.values.size() > 1 && 1.0 - out.gap_ratio <= 1e-8)
        throw invariant_error("ti_mps_limits: degenerate dominant transfer eigenvalue");

    auto fixed_point = [&](const ComplexTensor& vecs, std::size_t col, bool conj) {
        Mat v(static_cast<Eigen::Index>(chi), static_cast<Eigen::Index>(chi));
        for (std::size_t kk = 0; kk < chi; ++kk)
            for (std::size_t bb = 0; bb < chi; ++bb) {
                cplx val = vecs.at({kk * chi + bb, col});
                v(static_cast<Eigen::Index>(kk), static_cast<Eigen::Index>(bb)) = conj ? std::conj(val) : val;
            }
        cplx tr = v.trace();
        if (std::abs(tr) < 1e-14) throw invariant_error("ti_mps_limits: traceless fixed point");
        v *= std::abs(tr) / tr;
        v = ((v + v.adjoint()) / 2.0).eval();
        if (v.trace().real() < 0) v = -v;
        return v;
    };

    // zgeev's left vectors satisfy w^dag E = lambda w^dag; the matrix solving
    // sum_s A^dag X A = lambda X is the plain (unconjugated) reshape of w
    Mat r1 = fixed_point(eig.right, 0, false);
    Mat l1 = fixed_point(eig.left, 0, false);
    const double s = (l1 * r1).trace().real();
    if (s <= 0.0) throw invariant_error("ti_mps_limits: tr(L1 R1) <= 0");
    l1 /= s;

    // spectrum of L1 R1 via the Hermitian similarity R^(1/2) L R^(1/2)
    Eigen::SelfAdjointEigenSolver<Mat> es(r1);
    Eigen::VectorXd dr = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    Mat r_half = es.eigenvectors() * dr.asDiagonal() * es.eigenvectors().adjoint();
    Mat h = r_half * l1 * r_half;
    out.mu = hermitian_spectrum(from_eigen(((h + h.adjoint()) / 2.0).eval()));
    double sum = 0.0;
    for (double& m : out.mu) {
        m = std::max(m, 0.0);
        sum += m;
    }
    if (std::abs(sum - 1.0) > 1e-8) throw invariant_error("ti_mps_limits: mu spectrum sums to " + std::to_string(sum));

    double s_half = 0.0, s_2 = 0.0;
    for (double m : out.mu) {
        s_half += std::sqrt(m);
        s_2 += m * m;
    }
    out.e = 2.0 * std::log(s_half);
    out.c = out.e + std::log(s_2);
    out.s2_a = -2.0 * std::log(s_2);
    return out;
}

ComplexTensor random_injective_ti_tensor(std::size_t chi, std::uint64_t seed, double max_ratio) {
    Rng rng(seed);
    ComplexTensor g = random_tensor({chi, 2, chi}, rng);

    auto ratio_of = [&](const ComplexTensor& a) {
        ComplexTensor e = contract(a, a.conjugate(), {{1, 1}});
        e = e.permute({0, 2, 1, 3}).reshape({chi * chi, chi * chi});
        auto vals = general_spectrum(e);
        return vals.size() > 1 ? std::abs(vals[1]) / std::abs(vals[0]) : 0.0;
    };
    auto normalized = [&](ComplexTensor a) {
        ComplexTensor e = contract(a, a.conjugate(), {{1, 1}});
        e = e.permute({0, 2, 1, 3}).reshape({chi * chi, chi * chi});
        const double lam = std::abs(general_spectrum(e)[0]);
        return a.scaled(1.0 / std::sqrt(lam));
    };

    if (chi == 1 || ratio_of(g) <= max_ratio) return normalized(std::move(g));

    // blend toward a rank-one transfer fixed point until the gap is large enough
    ComplexTensor p({chi, 2, chi});
    std::vector<cplx> x(chi), y(chi);
    double nx = 0.0, ny = 0.0;
    for (std::size_t i = 0; i < chi; ++i) {
        x[i] = rng.gaussian_complex();
        y[i] = rng.gaussian_complex();
        nx += std::norm(x[i]);
        ny += std::norm(y[i]);
    }
    const double ms[2] = {1.0, 0.6};
    for (std::size_t i = 0; i < chi; ++i)
        for (std::size_t s = 0; s < 2; ++s)
            for (std::size_t j = 0; j < chi; ++j)
                p.at({i, s, j}) = ms[s] * x[i] * std::conj(y[j]) / std::sqrt(nx * ny);

    auto blend = [&](double t) {
        ComplexTensor a({chi, 2, chi});
        for (std::size_t k = 0; k < a.size(); ++k) a[k] = (1.0 - t) * g[k] + t * p[k];
        return a;
    };
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 40; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (ratio_of(blend(mid)) <= 0.95 * max_ratio)
            hi = mid;
        else
            lo = mid;
    }
    return normalized(blend(hi));
}

Mps ti_finite_chain(const ComplexTensor& site_tensor, int n) {
    if (n < 2) throw std::invalid_argument("ti_finite_chain: n >= 2");
    const std::size_t chi = site_tensor.extent(0);
    Mps psi;
    ComplexTensor vl({1, chi}), vr({chi, 1});
    for (std::size_t i = 0; i < chi; ++i) {
        vl[i] = 1.0 / std::sqrt(static_cast<double>(chi));
        vr[i] = 1.0 / std::sqrt(static_cast<double>(chi));
    }
    psi.tensors.push_back(contract(vl, site_tensor, {{1, 0}}));
    for (int i = 1; i + 1 < n; ++i) psi.tensors.push_back(site_tensor);
    psi.tensors.push_back(contract(site_tensor, vr, {{2, 0}}));

    Mps canon = canonicalize(psi, n - 1);
    auto& last = canon.tensors.back();
    double norm2 = 0.0;
    for (const auto& v : last.data()) norm2 += std::norm(v);
    for (auto& v : last.data()) v /= std::sqrt(norm2);
    return canon;
}

} // namespace mixwit
