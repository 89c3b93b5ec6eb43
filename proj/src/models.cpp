#include "mixwit/models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <lapacke.h>

namespace mixwit {

namespace {

constexpr double kLn2 = 0.6931471805599453094172321214581766;

std::size_t pow2(int k) { return std::size_t{1} << k; }

int hamming(std::size_t x) {
    int c = 0;
    while (x) {
        c += static_cast<int>(x & 1u);
        x >>= 1;
    }
    return c;
}

/// sz eigenvalue of site k in |x> (site 0 is the MSB).
double sz_of(std::size_t x, int k, int n) { return 1.0 - 2.0 * bit_of(x, k, n); }

struct SymEigRange {
    std::vector<double> values;
    Eigen::MatrixXd vectors; // columns
};

SymEigRange sym_eig_lowest(const Eigen::MatrixXd& m, int count) {
    const lapack_int n = static_cast<lapack_int>(m.rows());
    count = std::min<int>(count, static_cast<int>(n));
    Eigen::MatrixXd a = m;
    std::vector<double> w(static_cast<std::size_t>(n));
    Eigen::MatrixXd z(n, count);
    std::vector<lapack_int> isuppz(static_cast<std::size_t>(2 * std::max(1, count)));
    lapack_int found = 0;
    lapack_int info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'U', n, a.data(), n, 0.0, 0.0, 1,
                                     count, 0.0, &found, w.data(), z.data(), n, isuppz.data());
    if (info != 0) throw invariant_error("dsyevr failed, info=" + std::to_string(info));
    w.resize(static_cast<std::size_t>(found));
    return {std::move(w), std::move(z)};
}

struct SymEigAll {
    std::vector<double> values;
    Eigen::MatrixXd vectors;
};

SymEigAll sym_eig_all(const Eigen::MatrixXd& m) {
    const lapack_int n = static_cast<lapack_int>(m.rows());
    Eigen::MatrixXd a = m;
    std::vector<double> w(static_cast<std::size_t>(n));
    lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'U', n, a.data(), n, w.data());
    if (info != 0) throw invariant_error("dsyevd failed, info=" + std::to_string(info));
    return {std::move(w), std::move(a)};
}

std::vector<std::size_t> sector_basis(const SpinHamiltonian& ham, const Sector& sector) {
    const std::size_t dim = pow2(ham.n);
    std::vector<std::size_t> basis;
    for (std::size_t x = 0; x < dim; ++x) {
        const int w = hamming(x);
        const bool in = (ham.symmetry == SymmetryTag::Z2Parity) ? (w % 2 == sector.value % 2)
                                                                : (w == sector.value);
        if (in) basis.push_back(x);
    }
    if (basis.empty()) throw std::invalid_argument("empty symmetry sector");
    return basis;
}

} // namespace

ComplexTensor SpinHamiltonian::matrix() const {
    const std::size_t dim = pow2(n);
    ComplexTensor out({dim, dim});
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) out[i * dim + j] = h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    return out;
}

SpinHamiltonian tfim(int n, double field) {
    if (n < 2) throw std::invalid_argument("tfim: need n >= 2");
    const std::size_t dim = pow2(n);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t x = 0; x < dim; ++x) {
        double diag = 0.0;
        for (int k = 0; k < n; ++k) diag -= field * sz_of(x, k, n);
        h(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(x)) = diag;
        for (int k = 0; k + 1 < n; ++k) {
            const std::size_t mask = (std::size_t{1} << (n - 1 - k)) | (std::size_t{1} << (n - 2 - k));
            h(static_cast<Eigen::Index>(x ^ mask), static_cast<Eigen::Index>(x)) += -1.0;
        }
    }
    return SpinHamiltonian{n, std::move(h), SymmetryTag::Z2Parity};
}

SpinHamiltonian xxz(int n, double delta) {
    if (n < 2) throw std::invalid_argument("xxz: need n >= 2");
    const std::size_t dim = pow2(n);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t x = 0; x < dim; ++x) {
        double diag = 0.0;
        for (int k = 0; k + 1 < n; ++k) {
            diag -= delta * sz_of(x, k, n) * sz_of(x, k + 1, n);
            if (bit_of(x, k, n) != bit_of(x, k + 1, n)) {
                const std::size_t mask = (std::size_t{1} << (n - 1 - k)) | (std::size_t{1} << (n - 2 - k));
                h(static_cast<Eigen::Index>(x ^ mask), static_cast<Eigen::Index>(x)) += -2.0;
            }
        }
        h(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(x)) = diag;
    }
    return SpinHamiltonian{n, std::move(h), SymmetryTag::U1Weight};
}

PureState ground_state(const SpinHamiltonian& ham, std::optional<Sector> sector) {
    const std::size_t dim = pow2(ham.n);
    std::vector<std::size_t> basis;
    Eigen::MatrixXd hs;
    if (sector) {
        basis = sector_basis(ham, *sector);
        const Eigen::Index k = static_cast<Eigen::Index>(basis.size());
        hs.resize(k, k);
        for (Eigen::Index i = 0; i < k; ++i)
            for (Eigen::Index j = 0; j < k; ++j)
                hs(i, j) = ham.h(static_cast<Eigen::Index>(basis[static_cast<std::size_t>(i)]),
                                 static_cast<Eigen::Index>(basis[static_cast<std::size_t>(j)]));
    } else {
        hs = ham.h;
        basis.resize(dim);
        std::iota(basis.begin(), basis.end(), std::size_t{0});
    }

    const auto eig = sym_eig_lowest(hs, 2);
    if (eig.values.size() > 1 && eig.values[1] - eig.values[0] < 1e-10)
        throw invariant_error(std::string("degenerate ground space") +
                              (sector ? " within sector" : "; restrict to a symmetry sector"));

    ComplexTensor amp({dim});
    for (std::size_t i = 0; i < basis.size(); ++i) amp[basis[i]] = eig.vectors(static_cast<Eigen::Index>(i), 0);
    // deterministic phase: largest-magnitude amplitude real positive
    std::size_t imax = 0;
    for (std::size_t i = 1; i < dim; ++i)
        if (std::abs(amp[i]) > std::abs(amp[imax])) imax = i;
    if (amp[imax].real() < 0)
        for (auto& v : amp.data()) v = -v;
    return make_pure(ham.n, std::move(amp));
}

double ground_energy(const SpinHamiltonian& ham, std::optional<Sector> sector) {
    if (sector) {
        const auto basis = sector_basis(ham, *sector);
        const Eigen::Index k = static_cast<Eigen::Index>(basis.size());
        Eigen::MatrixXd hs(k, k);
        for (Eigen::Index i = 0; i < k; ++i)
            for (Eigen::Index j = 0; j < k; ++j)
                hs(i, j) = ham.h(static_cast<Eigen::Index>(basis[static_cast<std::size_t>(i)]),
                                 static_cast<Eigen::Index>(basis[static_cast<std::size_t>(j)]));
        return sym_eig_lowest(hs, 1).values[0];
    }
    return sym_eig_lowest(ham.h, 1).values[0];
}

DensityMatrix thermal_state(const SpinHamiltonian& ham, double temperature) {
    if (temperature <= 0.0) throw std::invalid_argument("thermal_state: T must be positive");
    if (ham.n > 12) throw std::invalid_argument("thermal_state: capped at n = 12");
    const auto eig = sym_eig_all(ham.h);
    const double e0 = eig.values[0];
    Eigen::VectorXd w(static_cast<Eigen::Index>(eig.values.size()));
    for (std::size_t k = 0; k < eig.values.size(); ++k)
        w(static_cast<Eigen::Index>(k)) = std::exp(-(eig.values[k] - e0) / temperature);
    w /= w.sum();
    Eigen::MatrixXd rho = eig.vectors * w.asDiagonal() * eig.vectors.transpose();

    const std::size_t dim = pow2(ham.n);
    ComplexTensor out({dim, dim});
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j)
            out[i * dim + j] = 0.5 * (rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) +
                                      rho(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)));
    return DensityMatrix{ham.n, std::move(out)};
}

DensityMatrix depolarize(const DensityMatrix& rho, double p, DepolarizeMode mode) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("depolarize: p must be in [0,1]");
    const int n = rho.n;
    const std::size_t dim = pow2(n);
    if (mode == DepolarizeMode::Global) {
        ComplexTensor out = rho.matrix.scaled(1.0 - p);
        const double shift = p / static_cast<double>(dim);
        for (std::size_t i = 0; i < dim; ++i) out[i * dim + i] += shift;
        return DensityMatrix{n, std::move(out)};
    }
    ComplexTensor cur = rho.matrix;
    for (int k = 0; k < n; ++k) {
        ComplexTensor next = cur.scaled(1.0 - p);
        const std::size_t kmask = std::size_t{1} << (n - 1 - k);
        // tr_k(rho) (x) I_k / 2: sum over the bit of site k, dropped onto both values
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = 0; j < dim; ++j) {
                if ((i & kmask) != (j & kmask)) continue;
                const cplx t = cur[(i & ~kmask) * dim + (j & ~kmask)] + cur[(i | kmask) * dim + (j | kmask)];
                next[i * dim + j] += p * 0.5 * t;
            }
        cur = std::move(next);
    }
    return DensityMatrix{n, std::move(cur)};
}

WernerState werner(int d, double alpha_w) {
    if (d < 2) throw std::invalid_argument("werner: need d >= 2");
    if (alpha_w < 0.0 || alpha_w > 1.0) throw std::invalid_argument("werner: alpha in [0,1]");
    const std::size_t dim = static_cast<std::size_t>(d) * static_cast<std::size_t>(d);
    const double sym_dim = d * (d + 1) / 2.0;
    const double asym_dim = d * (d - 1) / 2.0;

    ComplexTensor rho({dim, dim});
    // Pi+- = (I +- SWAP)/2; SWAP |i,j> = |j,i>
    for (std::size_t i = 0; i < static_cast<std::size_t>(d); ++i)
        for (std::size_t j = 0; j < static_cast<std::size_t>(d); ++j) {
            const std::size_t row = i * d + j;
            const std::size_t swapped = j * d + i;
            rho[row * dim + row] += 0.5 * (alpha_w / sym_dim + (1.0 - alpha_w) / asym_dim);
            rho[row * dim + swapped] += 0.5 * (alpha_w / sym_dim - (1.0 - alpha_w) / asym_dim);
        }

    WernerState out;
    out.d = d;
    out.alpha_w = alpha_w;
    out.matrix = std::move(rho);
    const double l0 = (2.0 * alpha_w - 1.0) / d;
    const double l1 = (1.0 + d - 2.0 * alpha_w) / (d * (static_cast<double>(d) * d - 1.0));
    out.pt_spectrum.assign(dim, l1);
    out.pt_spectrum[dim - 1] = l0;
    std::sort(out.pt_spectrum.begin(), out.pt_spectrum.end(), std::greater<>());
    return out;
}

StabilizerStateResult stabilizer_state(const StabilizerComposite& spec) {
    const int n = spec.n();
    if (n > 14) throw std::invalid_argument("stabilizer_state: composite too large for a dense build");
    if (spec.n_a() < 1 || spec.n_b() < 1)
        throw std::invalid_argument("stabilizer_state: composite leaves A or B empty");

    const int a0 = 0, b0 = spec.n_a(), c0 = spec.n_a() + spec.n_b();
    // site layout inside each party: products, GHZ legs, EPR legs
    const int a_ghz = a0 + spec.s_a, a_eab = a_ghz + spec.g_abc, a_eac = a_eab + spec.e_ab;
    const int b_ghz = b0 + spec.s_b, b_eab = b_ghz + spec.g_abc, b_ebc = b_eab + spec.e_ab;
    const int c_ghz = c0 + spec.s_c, c_eac = c_ghz + spec.g_abc, c_ebc = c_eac + spec.e_ac;

    struct Component {
        std::vector<int> sites; // 1 = product |0>, 2 = EPR, 3 = GHZ
    };
    std::vector<Component> comps;
    for (int i = 0; i < spec.s_a; ++i) comps.push_back({{a0 + i}});
    for (int i = 0; i < spec.s_b; ++i) comps.push_back({{b0 + i}});
    for (int i = 0; i < spec.s_c; ++i) comps.push_back({{c0 + i}});
    for (int i = 0; i < spec.g_abc; ++i) comps.push_back({{a_ghz + i, b_ghz + i, c_ghz + i}});
    for (int i = 0; i < spec.e_ab; ++i) comps.push_back({{a_eab + i, b_eab + i}});
    for (int i = 0; i < spec.e_ac; ++i) comps.push_back({{a_eac + i, c_eac + i}});
    for (int i = 0; i < spec.e_bc; ++i) comps.push_back({{b_ebc + i, c_ebc + i}});

    std::vector<std::size_t> branch_masks; // mask of all-ones branch per entangled component
    std::size_t base_scale_units = 0;
    for (const auto& c : comps)
        if (c.sites.size() > 1) {
            std::size_t mask = 0;
            for (int s : c.sites) mask |= std::size_t{1} << (n - 1 - s);
            branch_masks.push_back(mask);
            ++base_scale_units;
        }

    const std::size_t dim = pow2(n);
    ComplexTensor amp({dim});
    const double coeff = std::pow(0.5, 0.5 * static_cast<double>(base_scale_units));
    const std::size_t branches = pow2(static_cast<int>(branch_masks.size()));
    for (std::size_t br = 0; br < branches; ++br) {
        std::size_t x = 0;
        for (std::size_t k = 0; k < branch_masks.size(); ++k)
            if ((br >> k) & 1u) x |= branch_masks[k];
        amp[x] += coeff;
    }

    Partition part = Partition::contiguous(spec.n_a(), spec.n_b(), n);
    return {make_pure(n, std::move(amp)), std::move(part)};
}

StabilizerMoments stabilizer_moments(const StabilizerComposite& spec, const std::vector<double>& r_alphas) {
    const int big_g = spec.g_abc + spec.e_ac + spec.e_bc;
    StabilizerMoments m;
    m.p2 = std::pow(0.5, big_g);
    m.p3 = std::pow(0.25, spec.e_ab) * std::pow(0.25, big_g);
    m.p4 = std::pow(0.25, spec.e_ab) * std::pow(0.125, big_g);
    m.e = spec.e_ab * kLn2;
    m.e3t = 0.5 * std::log(m.p2 * m.p2 / m.p3);
    m.e4 = 0.5 * std::log(m.p2 * m.p2 * m.p2 / m.p4);
    m.pt_value = std::sqrt(m.p3);

    const int s_a = spec.g_abc + spec.e_ab + spec.e_ac;
    const int s_b = spec.g_abc + spec.e_ab + spec.e_bc;
    const int s_ab = big_g;
    for (double alpha : r_alphas)
        m.r_alpha[alpha] = std::pow(0.5, s_ab + (alpha / 2.0 - 1.0) * (s_a + s_b));
    m.c = (0.5 * (s_a + s_b) - s_ab) * kLn2;
    const double r2 = std::pow(0.5, static_cast<double>(s_ab));
    const double r4 = std::pow(0.5, s_ab + static_cast<double>(s_a + s_b));
    m.c4 = 0.5 * std::log(r2 * r2 * r2 / r4);
    return m;
}

} // namespace mixwit
