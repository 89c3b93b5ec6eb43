#include <doctest.h>

#include <cmath>
#include <numeric>

#include "helpers.hpp"
#include "mixwit/ensembles.hpp"
#include "mixwit/qstate.hpp"
#include "mixwit/witnesses.hpp"

using namespace mixwit;
using namespace mixwit::testing;

TEST_SUITE_BEGIN("qstate");

TEST_CASE("partial trace of a Bell pair is maximally mixed") {
    auto rho = partial_trace(bell_00_11(), {0});
    CHECK(std::abs(rho.matrix.at({0, 0}) - cplx(0.5)) < 1e-12);
    CHECK(std::abs(rho.matrix.at({1, 1}) - cplx(0.5)) < 1e-12);
    CHECK(std::abs(rho.matrix.at({0, 1})) < 1e-12);
}

TEST_CASE("partial trace of |01> keeping site 1 gives |1><1|") {
    auto rho = partial_trace(basis_state(2, 0b01), {1});
    CHECK(std::abs(rho.matrix.at({1, 1}) - cplx(1.0)) < 1e-14);
    CHECK(std::abs(rho.matrix.at({0, 0})) < 1e-14);
}

TEST_CASE("GHZ3 traced to AB is the classical mixture of |00> and |11>") {
    auto rho = partial_trace(ghz(3), {0, 1});
    // direct-sum oracle: build by summing the traced index explicitly
    auto full = density_from_pure(ghz(3));
    ComplexTensor ref({4, 4});
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            for (std::size_t t = 0; t < 2; ++t) ref[i * 4 + j] += full.matrix.at({2 * i + t, 2 * j + t});
    CHECK(max_abs_diff(rho.matrix, ref) < 1e-14);
    CHECK(std::abs(rho.matrix.at({0, 0}) - cplx(0.5)) < 1e-14);
    CHECK(std::abs(rho.matrix.at({3, 3}) - cplx(0.5)) < 1e-14);
    CHECK(std::abs(rho.matrix.at({0, 3})) < 1e-14);
}

TEST_CASE("partial trace input validation") {
    auto rho = density_from_pure(bell_00_11());
    CHECK_THROWS_AS(partial_trace(rho, {}), std::invalid_argument);
    CHECK_THROWS_AS(partial_trace(rho, {0, 0}), std::invalid_argument);
}

TEST_CASE("partial transpose leaves separable diagonal states unchanged") {
    ComplexTensor m({4, 4});
    m.at({0, 0}) = 0.5;
    m.at({3, 3}) = 0.5;
    auto pt = partial_transpose(m, 2, 2);
    CHECK(max_abs_diff(pt, m) == 0.0);
}

TEST_CASE("Bell pair PT spectrum is {1/2,1/2,1/2,-1/2}") {
    auto rho = density_from_pure(bell_01_10());
    auto pt = partial_transpose(rho, Partition::bipartite({0}, {1}));
    CHECK(multiset_close(hermitian_spectrum(pt), {0.5, 0.5, 0.5, -0.5}, 1e-12));
}

TEST_CASE("partial transpose is an involution and preserves Hermiticity and trace") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        auto rho = ghse(4, 2, seed);
        auto part = Partition::bipartite({0, 1}, {2, 3});
        auto pt = partial_transpose(rho, part);
        auto back = partial_transpose(pt, 4, 4);
        CHECK(max_abs_diff(back, rho.matrix) < 1e-14);
        cplx tr(0.0);
        double herm = 0.0;
        for (std::size_t i = 0; i < 16; ++i) {
            tr += pt.at({i, i});
            for (std::size_t j = 0; j < 16; ++j)
                herm = std::max(herm, std::abs(pt.at({i, j}) - std::conj(pt.at({j, i}))));
        }
        CHECK(std::abs(tr - cplx(1.0)) < 1e-12);
        CHECK(herm < 1e-12);
    }
}

TEST_CASE("realignment of a product state is rank one") {
    Rng rng(5);
    auto u = random_unitary(2, rng);
    // rho_A = diag(0.8, 0.2) rotated, rho_B = diag(0.6, 0.4)
    ComplexTensor da({2, 2}), db({2, 2});
    da.at({0, 0}) = 0.8;
    da.at({1, 1}) = 0.2;
    db.at({0, 0}) = 0.6;
    db.at({1, 1}) = 0.4;
    auto ra = contract(contract(u, da, {{1, 0}}), u.conjugate(), {{1, 1}});
    auto rho = tensor_product(ra, db).permute({0, 2, 1, 3}).reshape({4, 4});
    auto sv = singular_values(realign(rho, 2, 2));
    double tra2 = 0.8 * 0.8 + 0.2 * 0.2, trb2 = 0.6 * 0.6 + 0.4 * 0.4;
    CHECK(sv[0] == doctest::Approx(std::sqrt(tra2 * trb2)).epsilon(1e-10));
    for (std::size_t k = 1; k < sv.size(); ++k) CHECK(sv[k] < 1e-12);
}

TEST_CASE("Bell realignment singular values are four halves") {
    auto rho = density_from_pure(bell_00_11());
    auto sv = singular_values(realign(rho, Partition::bipartite({0}, {1})));
    CHECK(multiset_close(sv, {0.5, 0.5, 0.5, 0.5}, 1e-12));
    const double c = std::log(std::accumulate(sv.begin(), sv.end(), 0.0));
    CHECK(c == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("maximally mixed two-qubit realignment has a single value 1/2") {
    ComplexTensor m({4, 4});
    for (std::size_t i = 0; i < 4; ++i) m.at({i, i}) = 0.25;
    auto sv = singular_values(realign(m, 2, 2));
    CHECK(sv[0] == doctest::Approx(0.5).epsilon(1e-12));
    for (std::size_t k = 1; k < sv.size(); ++k) CHECK(sv[k] < 1e-14);
}

TEST_CASE("realignment Frobenius norm squared equals the purity") {
    for (std::uint64_t seed : {10u, 11u}) {
        auto rho = ghse(4, 3, seed);
        auto r = realign(rho, Partition::bipartite({0, 1}, {2, 3}));
        double frob = 0.0;
        for (const auto& v : r.data()) frob += std::norm(v);
        double p2 = 0.0;
        for (const auto& v : rho.matrix.data()) p2 += std::norm(v);
        CHECK(frob == doctest::Approx(p2).epsilon(1e-12));
    }
}

TEST_CASE("schmidt spectrum of named states") {
    auto prod = schmidt(basis_state(2, 0b10), Partition::bipartite({0}, {1}));
    CHECK(prod.values[0] == doctest::Approx(1.0));

    auto bell = schmidt(bell_00_11(), Partition::bipartite({0}, {1}));
    CHECK(multiset_close(bell.values, {0.5, 0.5}, 1e-12));
}

TEST_CASE("schmidt equals the reduced-state spectrum on random states") {
    auto psi = haar_pure(6, 99);
    for (const auto& a : std::vector<std::vector<int>>{{0, 1, 2}, {0, 3, 5}, {1}}) {
        std::vector<int> b;
        for (int s = 0; s < 6; ++s)
            if (std::find(a.begin(), a.end(), s) == a.end()) b.push_back(s);
        auto lam = schmidt(psi, Partition::bipartite(a, b));
        auto rho_a = partial_trace(psi, a);
        CHECK(multiset_close(lam.values, hermitian_spectrum(rho_a.matrix), 1e-9));
    }
}

TEST_CASE("renyi entropy basics") {
    std::vector<double> flat{0.25, 0.25, 0.25, 0.25};
    for (double alpha : {0.0, 0.5, 1.0, 2.0, 7.0})
        CHECK(renyi_entropy(flat, alpha) == doctest::Approx(std::log(4.0)).epsilon(1e-12));
    for (double alpha : {0.0, 1.0, 3.0}) CHECK(renyi_entropy({1.0}, alpha) == doctest::Approx(0.0));
    CHECK(renyi_entropy({0.75, 0.25}, 2.0) == doctest::Approx(-std::log(0.625)).epsilon(1e-12));
    // monotone nonincreasing in alpha
    std::vector<double> spec{0.5, 0.3, 0.15, 0.05};
    double prev = renyi_entropy(spec, 0.0);
    for (double alpha : {0.5, 1.0, 1.5, 2.0, 3.0, 6.0}) {
        double cur = renyi_entropy(spec, alpha);
        CHECK(cur <= prev + 1e-12);
        prev = cur;
    }
    CHECK(renyi_entropy({0.5, 0.5, 0.0, 0.0}, 0.0) == doctest::Approx(std::log(2.0)));
    CHECK_THROWS_AS(renyi_entropy({0.9, 0.2, -0.1}, 2.0), std::invalid_argument);
}

TEST_CASE("pure_pt_spectrum closed form") {
    SpectrumData lam;
    lam.values = {0.5, 0.5};
    auto spec = pure_pt_spectrum(lam, 0.0, 2);
    CHECK(multiset_close(spec.values, {0.5, 0.5, 0.5, -0.5}, 1e-12));

    SpectrumData prod;
    prod.values = {1.0};
    for (double p : {0.0, 0.3, 1.0}) {
        auto s = pure_pt_spectrum(prod, p, 2);
        CHECK(std::accumulate(s.values.begin(), s.values.end(), 0.0) == doctest::Approx(1.0));
        for (double v : s.values) CHECK(v >= -1e-15); // product states stay PPT
    }

    // PPT threshold for the Bell pair: p >= 1 - 1/(1 + 2^n sqrt(l1 l2)) = 2/3
    CHECK(pure_ppt_threshold(lam, 2) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    auto just_below = pure_pt_spectrum(lam, 2.0 / 3.0 - 1e-6, 2);
    auto just_above = pure_pt_spectrum(lam, 2.0 / 3.0 + 1e-6, 2);
    CHECK(just_below.values.back() < 0.0);
    CHECK(just_above.values.back() >= 0.0);
}

TEST_CASE("dense PT spectrum of depolarized pure states matches the closed form") {
    for (std::uint64_t seed : {21u, 22u}) {
        auto psi = haar_pure(4, seed);
        auto part = Partition::bipartite({0, 1}, {2, 3});
        auto lam = schmidt(psi, part);
        auto rho = density_from_pure(psi);
        for (double p : {0.0, 0.4}) {
            ComplexTensor noisy = rho.matrix.scaled(1.0 - p);
            for (std::size_t i = 0; i < 16; ++i) noisy.at({i, i}) += p / 16.0;
            auto dense = hermitian_spectrum(partial_transpose(noisy, 4, 4));
            CHECK(multiset_close(dense, pure_pt_spectrum(lam, p, 4).values, 1e-9));
        }
        // ln ||rho^G||_1 = S_{1/2}(rho_A) for pure states
        auto pt_spec = hermitian_spectrum(partial_transpose(rho, part));
        double sum_abs = 0.0;
        for (double v : pt_spec) sum_abs += std::abs(v);
        CHECK(std::log(sum_abs) == doctest::Approx(renyi_entropy(lam, 0.5)).epsilon(1e-9));
    }
}

TEST_CASE("PT charge blocks of the Bell state") {
    auto rho = density_from_pure(bell_01_10());
    auto part = Partition::bipartite({0}, {1});
    auto gamma = partial_transpose(rho, part);
    auto blocks = pt_charge_blocks(gamma, part, ChargeSpec::u1());
    REQUIRE(blocks.size() == 3);
    // q = -1, 0, +1 sorted
    CHECK(blocks[0].q == -1);
    CHECK(blocks[0].block.size() == 1);
    CHECK(std::abs(blocks[0].block[0] - cplx(0.5)) < 1e-14);
    CHECK(blocks[2].q == 1);
    CHECK(std::abs(blocks[2].block[0] - cplx(0.5)) < 1e-14);
    CHECK(blocks[1].q == 0);
    REQUIRE(blocks[1].block.shape() == std::vector<std::size_t>{2, 2});
    CHECK(std::abs(blocks[1].block.at({0, 0})) < 1e-14);
    CHECK(std::abs(blocks[1].block.at({0, 1}) - cplx(0.5)) < 1e-14);
    CHECK(std::abs(blocks[1].block.at({1, 0}) - cplx(0.5)) < 1e-14);
}

TEST_CASE("separable diagonal state has PSD PT blocks") {
    ComplexTensor m({4, 4});
    m.at({0, 0}) = 0.5;
    m.at({3, 3}) = 0.5;
    auto part = Partition::bipartite({0}, {1});
    auto blocks = pt_charge_blocks(m, part, ChargeSpec::u1());
    for (const auto& b : blocks)
        for (double v : hermitian_spectrum(b.block)) CHECK(v >= -1e-12);
}

TEST_CASE("PT blocks of a symmetric random state reproduce p2") {
    auto rho = symmetrize(ghse(4, 2, 77), ChargeSpec::u1());
    auto part = Partition::bipartite({0, 1}, {2, 3});
    auto gamma = partial_transpose(rho, part);
    auto blocks = pt_charge_blocks(gamma, part, ChargeSpec::u1());
    double p2_blocks = 0.0;
    for (const auto& b : blocks) {
        const std::size_t d = b.block.extent(0);
        for (std::size_t i = 0; i < d * d; ++i) p2_blocks += std::norm(b.block[i]);
    }
    double p2 = 0.0;
    for (const auto& v : rho.matrix.data()) p2 += std::norm(v);
    CHECK(p2_blocks == doctest::Approx(p2).epsilon(1e-12));

    // non-symmetric input is rejected
    auto rho_asym = ghse(4, 2, 78);
    auto gamma_asym = partial_transpose(rho_asym, part);
    CHECK_THROWS_AS(pt_charge_blocks(gamma_asym, part, ChargeSpec::u1()), invariant_error);
}

TEST_CASE("realignment charge blocks") {
    auto part = Partition::bipartite({0}, {1});

    // product state diagonal in the charge basis: only the q = 0 sector carries weight
    ComplexTensor m({4, 4});
    m.at({0, 0}) = 0.48;
    m.at({1, 1}) = 0.32;
    m.at({2, 2}) = 0.12;
    m.at({3, 3}) = 0.08;
    auto blocks = realignment_charge_blocks(realign(m, 2, 2), part, ChargeSpec::u1());
    for (const auto& b : blocks) {
        double mass = 0.0;
        for (const auto& v : b.block.data()) mass += std::norm(v);
        if (b.q != 0) CHECK(mass < 1e-20);
    }

    // Bell: the sector singular values reproduce the full multiset
    auto rho = density_from_pure(bell_01_10());
    auto r = realign(rho, part);
    auto rb = realignment_charge_blocks(r, part, ChargeSpec::u1());
    std::vector<double> unioned;
    for (const auto& b : rb)
        for (double s : singular_values(b.block)) unioned.push_back(s);
    CHECK(multiset_close(unioned, singular_values(r), 1e-9));
}

TEST_CASE("realignment blocks of a symmetric state reproduce r2") {
    auto rho = symmetrize(ghse(4, 1, 5), ChargeSpec::u1());
    auto part = Partition::bipartite({0, 1}, {2, 3});
    auto r = realign(rho, part);
    auto rb = realignment_charge_blocks(r, part, ChargeSpec::u1());
    double r2_blocks = 0.0;
    for (const auto& b : rb)
        for (const auto& v : b.block.data()) r2_blocks += std::norm(v);
    double r2 = 0.0;
    for (const auto& v : r.data()) r2 += std::norm(v);
    CHECK(r2_blocks == doctest::Approx(r2).epsilon(1e-12));
}

TEST_CASE("state loaders reject invariant violations") {
    ComplexTensor amp({4});
    amp[0] = 1.1;
    CHECK_THROWS_AS(make_pure(2, std::move(amp)), std::invalid_argument);

    ComplexTensor bad({4, 4});
    bad.at({0, 0}) = 1.0;
    bad.at({0, 1}) = 0.5; // not Hermitian
    CHECK_THROWS_AS(make_density(2, std::move(bad)), invariant_error);
}

TEST_SUITE_END();
