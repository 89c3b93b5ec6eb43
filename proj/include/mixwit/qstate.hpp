#pragma once

#include <optional>
#include <vector>

#include "mixwit/tensor.hpp"

namespace mixwit {

/// Site 0 is the most significant bit of computational basis labels.
inline int bit_of(std::size_t label, int site, int n) {
    return static_cast<int>((label >> (n - 1 - site)) & 1u);
}

struct PureState {
    int n = 0;
    ComplexTensor amplitudes; // shape {2^n}
};

struct DensityMatrix {
    int n = 0;
    ComplexTensor matrix; // 2^n x 2^n
};

/// Disjoint ordered site lists covering 0..n-1; c may be empty.
struct Partition {
    std::vector<int> a_sites;
    std::vector<int> b_sites;
    std::vector<int> c_sites;

    int n_a() const { return static_cast<int>(a_sites.size()); }
    int n_b() const { return static_cast<int>(b_sites.size()); }
    int n_c() const { return static_cast<int>(c_sites.size()); }
    int n_total() const { return n_a() + n_b() + n_c(); }

    static Partition bipartite(std::vector<int> a, std::vector<int> b) {
        return Partition{std::move(a), std::move(b), {}};
    }
    /// A = [0, n_a), B = [n_a, n_a + n_b), C = the rest.
    static Partition contiguous(int n_a, int n_b, int n);

    void validate(int n) const;
};

enum class ChargeKind { U1, Z2, Custom };

/// Additive charge of computational basis labels: sum over sites of a
/// per-site weight when the bit is 1 (weight 1 for U1 and Z2), reduced mod
/// `modulus` when set (2 for Z2).
struct ChargeSpec {
    ChargeKind kind = ChargeKind::U1;
    std::optional<int> modulus;            // set to 2 for Z2
    std::vector<int> site_weights;         // empty = all ones (indexed by site)

    static ChargeSpec u1() { return {ChargeKind::U1, std::nullopt, {}}; }
    static ChargeSpec z2() { return {ChargeKind::Z2, 2, {}}; }

    int weight(int site) const {
        return site_weights.empty() ? 1 : site_weights.at(static_cast<std::size_t>(site));
    }
    /// Charge of the bits of `label` (an n-site register) restricted to `sites`.
    int charge(const std::vector<int>& sites, std::size_t label, int n) const;
    int reduce(int q) const;
};

enum class SpectrumKind { PtEigenvalues, RealignmentSingular, Schmidt };

struct SpectrumData {
    std::vector<double> values;
    SpectrumKind kind = SpectrumKind::Schmidt;
    std::vector<int> charges; // optional, parallel to values
};

PureState make_pure(int n, ComplexTensor amplitudes, double norm_tol = 1e-10);
DensityMatrix make_density(int n, ComplexTensor matrix, double psd_tol = 1e-8);
DensityMatrix density_from_pure(const PureState& psi);

/// Reduced state on `keep`; the kept sites become the new register in the
/// given order.
DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep);
DensityMatrix partial_trace(const PureState& psi, const std::vector<int>& keep);

/// Reorder register sites: new site k is old site `order[k]`.
ComplexTensor permute_sites(const ComplexTensor& rho, const std::vector<int>& order);

/// rho restricted to A u B, re-ordered so that the A sites come first.
/// The input may still contain C sites (they get traced out).
struct BipartiteView {
    ComplexTensor matrix;
    std::size_t l_a = 1;
    std::size_t l_b = 1;
};
BipartiteView bipartite_view(const DensityMatrix& rho, const Partition& part);

/// <a,b'| rho^Gamma |a',b> = <a,b| rho |a',b'> (transpose on B).
ComplexTensor partial_transpose(const ComplexTensor& rho_ab, std::size_t l_a, std::size_t l_b);
ComplexTensor partial_transpose(const DensityMatrix& rho, const Partition& part);

/// <a,a'| R |b,b'> = <a,b| rho |a',b'>, an (l_a^2 x l_b^2) matrix.
ComplexTensor realign(const ComplexTensor& rho_ab, std::size_t l_a, std::size_t l_b);
ComplexTensor realign(const DensityMatrix& rho, const Partition& part);

/// Eigenvalues of rho_A (squared Schmidt coefficients), descending.
/// Requires an A|B bipartition of the full register (empty C).
SpectrumData schmidt(const PureState& psi, const Partition& part);

/// Renyi entropy H_alpha of a normalized nonnegative spectrum (natural log).
/// alpha = 1 is the von Neumann limit; alpha = 0 counts values above the
/// zero tolerance.
double renyi_entropy(const SpectrumData& spec, double alpha);
double renyi_entropy(const std::vector<double>& values, double alpha);

/// Full PT spectrum of (1-p)|psi><psi| + p I/2^n from the Schmidt spectrum
/// of |psi| (App-style closed form): entries (1-p) s_ij sqrt(l_i l_j) + p/2^n
/// for i,j <= r plus the shifted zero block, 2^n values in total.
SpectrumData pure_pt_spectrum(const SpectrumData& schmidt_values, double p, int n);

/// Depolarizing probability above which the state becomes PPT.
double pure_ppt_threshold(const SpectrumData& schmidt_values, int n);

struct ChargeBlock {
    int q = 0;
    ComplexTensor block;
};

/// Blocks of rho^Gamma under q = charge_A(a) - charge_B(b) (mod modulus).
/// Throws invariant_error if off-block mass exceeds sym_tol.
std::vector<ChargeBlock> pt_charge_blocks(const ComplexTensor& rho_gamma, const Partition& part,
                                          const ChargeSpec& cs, double sym_tol = 1e-10);

/// Blocks of the realignment matrix: rows (a,a') grouped by
/// charge_A(a) - charge_A(a'), each coupling to the matching column group.
std::vector<ChargeBlock> realignment_charge_blocks(const ComplexTensor& realigned, const Partition& part,
                                                   const ChargeSpec& cs, double sym_tol = 1e-10);

PureState tensor_product_state(const PureState& a, const PureState& b);

} // namespace mixwit
