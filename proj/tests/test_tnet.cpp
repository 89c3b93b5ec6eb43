#include <doctest.h>

#include <chrono>
#include <cmath>

#include "helpers.hpp"
#include "mixwit/models.hpp"
#include "mixwit/tnet.hpp"
#include "mixwit/witnesses.hpp"

using namespace mixwit;
using namespace mixwit::testing;

namespace {

Mps bell_mps() {
    ComplexTensor a0({1, 2, 2}), a1({2, 2, 1});
    const double c = std::pow(2.0, -0.25);
    a0.at({0, 0, 0}) = c;
    a0.at({0, 1, 1}) = c;
    a1.at({0, 0, 0}) = c;
    a1.at({1, 1, 0}) = c;
    Mps psi;
    psi.tensors = {a0, a1};
    return psi;
}

Mps product_mps(int n, std::uint64_t seed) {
    Rng rng(seed);
    Mps psi;
    for (int i = 0; i < n; ++i) {
        ComplexTensor t({1, 2, 1});
        t[0] = rng.gaussian_complex();
        t[1] = rng.gaussian_complex();
        const double nrm = std::sqrt(std::norm(t[0]) + std::norm(t[1]));
        t[0] /= nrm;
        t[1] /= nrm;
        psi.tensors.push_back(std::move(t));
    }
    return psi;
}

DensityMatrix dense_traced(const Mps& psi, int keep_n) {
    auto state = mps_to_state(psi);
    std::vector<int> keep;
    for (int s = 0; s < keep_n; ++s) keep.push_back(s);
    return partial_trace(state, keep);
}

} // namespace

TEST_SUITE_BEGIN("tnet");

TEST_CASE("random_mps is normalized and deterministic") {
    auto psi = random_mps(7, 5, 99);
    psi.validate();
    CHECK(mps_norm(psi) == doctest::Approx(1.0).epsilon(1e-12));
    auto again = random_mps(7, 5, 99);
    for (int i = 0; i < 7; ++i)
        CHECK(max_abs_diff(psi.tensors[static_cast<std::size_t>(i)],
                           again.tensors[static_cast<std::size_t>(i)]) == 0.0);
    auto state = mps_to_state(psi);
    double n2 = 0.0;
    for (const auto& v : state.amplitudes.data()) n2 += std::norm(v);
    CHECK(n2 == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("canonicalize preserves the state and builds isometries") {
    auto psi = scramble_gauge(random_mps(6, 4, 7), 8);
    auto before = mps_to_state(psi);
    auto canon = canonicalize(psi, 3);
    auto after = mps_to_state(canon);
    // global phase fixed by construction (QR keeps it deterministic); compare amplitudes
    CHECK(max_abs_diff(before.amplitudes, after.amplitudes) < 1e-12);

    // left isometry at sites < center: sum_s A^dag A = I
    for (int i = 0; i < 3; ++i) {
        const auto& t = canon.tensors[static_cast<std::size_t>(i)];
        auto gram = contract(t.conjugate(), t, {{0, 0}, {1, 1}});
        for (std::size_t a = 0; a < gram.extent(0); ++a)
            for (std::size_t b = 0; b < gram.extent(1); ++b)
                CHECK(std::abs(gram.at({a, b}) - (a == b ? cplx(1.0) : cplx(0.0))) < 1e-12);
    }
    // right isometry at sites > center
    for (int i = 4; i < 6; ++i) {
        const auto& t = canon.tensors[static_cast<std::size_t>(i)];
        auto gram = contract(t, t.conjugate(), {{1, 1}, {2, 2}});
        for (std::size_t a = 0; a < gram.extent(0); ++a)
            for (std::size_t b = 0; b < gram.extent(1); ++b)
                CHECK(std::abs(gram.at({a, b}) - (a == b ? cplx(1.0) : cplx(0.0))) < 1e-12);
    }
}

TEST_CASE("mps_pt_moment: product states give 1") {
    auto psi = product_mps(5, 3);
    for (int alpha : {1, 2, 3, 4}) {
        Partition part = Partition::contiguous(2, 3, 5);
        CHECK(mps_pt_moment(psi, part, alpha) == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("mps_pt_moment: Bell pair p4 = 1/4") {
    auto psi = bell_mps();
    CHECK(mps_norm(psi) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(mps_pt_moment(psi, Partition::bipartite({0}, {1}), 4) == doctest::Approx(0.25).epsilon(1e-10));
    CHECK(mps_pt_moment(psi, Partition::bipartite({0}, {1}), 3) == doctest::Approx(0.25).epsilon(1e-10));
}

TEST_CASE("mps_pt_moment matches the dense oracle") {
    for (std::uint64_t seed : {1u, 2u}) {
        auto psi = random_mps(6, 4, seed);
        auto rho = dense_traced(psi, 4);
        Partition part = Partition::contiguous(2, 2, 6);
        Partition dense_part = Partition::bipartite({0, 1}, {2, 3});
        auto ms = pt_moments(rho, dense_part, {2.0, 3.0, 4.0});
        for (int alpha : {2, 3, 4}) {
            const double tn = mps_pt_moment(psi, part, alpha);
            const double ref = ms.moment(static_cast<double>(alpha));
            CHECK(tn == doctest::Approx(ref).epsilon(1e-9));
        }
        // gauge independence
        auto scr = scramble_gauge(psi, seed + 100);
        CHECK(mps_pt_moment(scr, part, 3) == doctest::Approx(ms.moment(3.0)).epsilon(1e-9));
    }
}

TEST_CASE("mps_pt_moment handles interleaved partitions") {
    auto psi = random_mps(6, 3, 17);
    Partition part;
    part.a_sites = {0, 3};
    part.b_sites = {1, 4};
    part.c_sites = {2, 5};
    auto state = mps_to_state(psi);
    auto rho = partial_trace(state, {0, 3, 1, 4}); // A sites then B sites
    auto ms = pt_moments(rho, Partition::contiguous(2, 2, 4), {2.0, 3.0});
    CHECK(mps_pt_moment(psi, part, 2) == doctest::Approx(ms.moment(2.0)).epsilon(1e-9));
    CHECK(mps_pt_moment(psi, part, 3) == doctest::Approx(ms.moment(3.0)).epsilon(1e-9));
}

TEST_CASE("mps_subsystem_moment equals dense subsystem power traces") {
    auto psi = random_mps(6, 4, 23);
    auto state = mps_to_state(psi);
    for (const auto& sites : std::vector<std::vector<int>>{{0, 1}, {2, 3, 4}, {1, 4}}) {
        auto rho_s = partial_trace(state, sites);
        auto spec = hermitian_spectrum(rho_s.matrix);
        for (int alpha : {2, 3}) {
            double ref = 0.0;
            for (double v : spec) ref += std::pow(v, alpha);
            CHECK(mps_subsystem_moment(psi, sites, alpha) == doctest::Approx(ref).epsilon(1e-9));
        }
    }
}

TEST_CASE("mpo_pt_moment: maximally mixed MPO gives 2^(n(1-alpha))") {
    Mpo rho;
    const int n = 5;
    for (int i = 0; i < n; ++i) {
        ComplexTensor w({1, 2, 2, 1});
        w.at({0, 0, 0, 0}) = 0.5;
        w.at({0, 1, 1, 0}) = 0.5;
        rho.tensors.push_back(std::move(w));
    }
    Partition part = Partition::contiguous(2, 3, n);
    for (int alpha : {1, 2, 3, 4})
        CHECK(mpo_pt_moment(rho, part, alpha) ==
              doctest::Approx(std::pow(2.0, n * (1.0 - alpha))).epsilon(1e-10));
}

TEST_CASE("mpo_pt_moment matches dense on random density MPOs") {
    for (std::uint64_t seed : {4u, 5u}) {
        auto rho = random_density_mpo(5, 2, seed);
        auto dense = DensityMatrix{5, mpo_to_matrix(rho)};
        Partition part = Partition::contiguous(2, 3, 5);
        auto ms = pt_moments(dense, part, {2.0, 3.0, 4.0});
        for (int alpha : {2, 3, 4})
            CHECK(mpo_pt_moment(rho, part, alpha) ==
                  doctest::Approx(ms.moment(static_cast<double>(alpha))).epsilon(1e-9));
    }
}

TEST_CASE("MPO from a traced MPS agrees with the MPS replica path") {
    auto psi = random_mps(7, 3, 31);
    // trace sites 5, 6 (suffix): rho on sites 0..4
    auto rho = mpo_from_traced_mps(psi, 0, 5);
    CHECK(mpo_trace(rho) == doctest::Approx(1.0).epsilon(1e-10));
    Partition mps_part;
    mps_part.a_sites = {0, 1};
    mps_part.b_sites = {2, 3, 4};
    mps_part.c_sites = {5, 6};
    Partition mpo_part = Partition::contiguous(2, 3, 5);
    for (int alpha : {2, 3})
        CHECK(mpo_pt_moment(rho, mpo_part, alpha) ==
              doctest::Approx(mps_pt_moment(psi, mps_part, alpha)).epsilon(1e-9));

    // prefix + suffix traced
    auto rho2 = mpo_from_traced_mps(psi, 1, 6);
    Partition mps_part2;
    mps_part2.a_sites = {1, 2};
    mps_part2.b_sites = {3, 4, 5};
    mps_part2.c_sites = {0, 6};
    for (int alpha : {2, 3})
        CHECK(mpo_pt_moment(rho2, mpo_part, alpha) ==
              doctest::Approx(mps_pt_moment(psi, mps_part2, alpha)).epsilon(1e-9));
}

TEST_CASE("thermal TFIM re-encoded as an MPO matches dense p4") {
    auto ham = tfim(6, 1.2);
    auto rho = thermal_state(ham, 1.0);
    auto mpo = mpo_from_dense(rho.matrix, 6);
    auto back = mpo_to_matrix(mpo);
    CHECK(max_abs_diff(back, rho.matrix) < 1e-10);
    Partition part = Partition::contiguous(3, 3, 6);
    auto ms = pt_moments(rho, part, {2.0, 4.0});
    CHECK(mpo_pt_moment(mpo, part, 4) == doctest::Approx(ms.moment(4.0)).epsilon(1e-9));
    CHECK(mpo_pt_moment(mpo, part, 2) == doctest::Approx(ms.moment(2.0)).epsilon(1e-9));
}

TEST_CASE("mpo_realignment_spectrum: product and Bell MPOs") {
    // product: rho_A (x) rho_B with known purities
    ComplexTensor wa({1, 2, 2, 1}), wb({1, 2, 2, 1});
    wa.at({0, 0, 0, 0}) = 0.8;
    wa.at({0, 1, 1, 0}) = 0.2;
    wb.at({0, 0, 0, 0}) = 0.6;
    wb.at({0, 1, 1, 0}) = 0.4;
    Mpo prod;
    prod.tensors = {wa, wb};
    auto sv = mpo_realignment_spectrum(prod, 1);
    CHECK(sv.values[0] == doctest::Approx(std::sqrt(0.68 * 0.52)).epsilon(1e-10));
    for (std::size_t k = 1; k < sv.values.size(); ++k) CHECK(sv.values[k] < 1e-12);

    auto bell = mpo_from_traced_mps(bell_mps(), 0, 2);
    auto sb = mpo_realignment_spectrum(bell, 1);
    CHECK(multiset_close(sb.values, {0.5, 0.5, 0.5, 0.5}, 1e-10));
}

TEST_CASE("mpo_realignment_spectrum matches dense SVD on random MPOs") {
    for (std::uint64_t seed : {6u, 7u}) {
        auto rho = random_density_mpo(8, 3, seed);
        auto dense = DensityMatrix{8, mpo_to_matrix(rho)};
        Partition part = Partition::contiguous(4, 4, 8);
        auto ref = singular_values(realign(dense, part));
        auto sv = mpo_realignment_spectrum(rho, 4);
        CHECK(multiset_close(sv.values, ref, 1e-9));
        double c_tn = 0.0, c_ref = 0.0;
        for (double s : sv.values) c_tn += s;
        for (double s : ref) c_ref += s;
        CHECK(std::log(c_tn) == doctest::Approx(std::log(c_ref)).epsilon(1e-8));
    }
}

TEST_CASE("mps_traced_gamma: product MPS r_alpha = 1") {
    auto psi = product_mps(5, 9);
    for (int alpha : {2, 4}) CHECK(mps_traced_gamma(psi, 2, 2, alpha) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("mps_traced_gamma matches dense realignment moments") {
    for (std::uint64_t seed : {11u, 12u}) {
        auto psi = scramble_gauge(random_mps(6, 4, seed), seed + 1);
        auto rho = dense_traced(psi, 4);
        Partition part = Partition::contiguous(2, 2, 4);
        auto rm = realignment_moments(rho, part, {2.0, 4.0, 6.0});
        for (int alpha : {2, 4, 6})
            CHECK(mps_traced_gamma(psi, 2, 2, alpha) ==
                  doctest::Approx(rm.moment(static_cast<double>(alpha))).epsilon(1e-9));
        // full-spectrum mode: CCNR from the Gamma eigenvalues
        auto spec = mps_traced_gamma_spectrum(psi, 2, 2);
        CHECK(multiset_close(spec.values, *rm.spectrum, 1e-8));
        CHECK_THROWS_AS(mps_traced_gamma(psi, 2, 2, 3), std::invalid_argument);
    }
}

TEST_CASE("mps_traced_gamma with empty C reduces to the pure-state values") {
    auto psi = random_mps(5, 3, 44);
    auto rho = dense_traced(psi, 5);
    auto rm = realignment_moments(rho, Partition::contiguous(2, 3, 5), {2.0, 4.0});
    CHECK(mps_traced_gamma(psi, 2, 3, 4) == doctest::Approx(rm.moment(4.0)).epsilon(1e-9));
}

TEST_CASE("ec_spectrum: GHZ3 with the middle site traced") {
    auto psi = mps_from_state(ghz(3));
    auto spectra = ec_spectrum(psi, 1, 1);
    // PT spectrum {1/2, 1/2} plus zeros; E = 0
    std::vector<double> nonzero;
    for (double v : spectra.pt.values)
        if (std::abs(v) > 1e-12) nonzero.push_back(v);
    CHECK(multiset_close(nonzero, {0.5, 0.5}, 1e-10, false));
    double e = 0.0;
    for (double v : spectra.pt.values) e += std::abs(v);
    CHECK(std::log(e) == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("ec_spectrum with empty C degenerates to the pure-state PT spectrum") {
    auto psi = bell_mps();
    auto spectra = ec_spectrum(psi, 1, 0);
    CHECK(multiset_close(spectra.pt.values, {0.5, 0.5, 0.5, -0.5}, 1e-10));
    CHECK(multiset_close(spectra.realign.values, {0.5, 0.5, 0.5, 0.5}, 1e-10));
}

TEST_CASE("ec_spectrum matches dense on random instances") {
    for (std::uint64_t seed : {13u, 14u}) {
        auto psi = scramble_gauge(random_mps(8, 4, seed), seed + 2);
        // layout A = [0,3), C = [3,5), B = [5,8)
        auto state = mps_to_state(psi);
        auto rho = partial_trace(state, {0, 1, 2, 5, 6, 7});
        Partition part = Partition::contiguous(3, 3, 6);
        auto pt_ref = hermitian_spectrum(partial_transpose(rho, part));
        auto rm_ref = singular_values(realign(rho, part));

        auto spectra = ec_spectrum(psi, 3, 2);
        CHECK(multiset_close(spectra.pt.values, pt_ref, 1e-8));
        CHECK(multiset_close(spectra.realign.values, rm_ref, 1e-8));

        double e_tn = 0.0, e_ref = 0.0, c_tn = 0.0, c_ref = 0.0;
        for (double v : spectra.pt.values) e_tn += std::abs(v);
        for (double v : pt_ref) e_ref += std::abs(v);
        for (double v : spectra.realign.values) c_tn += v;
        for (double v : rm_ref) c_ref += v;
        CHECK(std::log(e_tn) == doctest::Approx(std::log(e_ref)).epsilon(1e-8));
        CHECK(std::log(c_tn) == doctest::Approx(std::log(c_ref)).epsilon(1e-8));
    }
}

TEST_CASE("state <-> tensor network round trips") {
    auto psi = haar_pure(6, 71);
    auto mps = mps_from_state(psi);
    auto back = mps_to_state(mps);
    CHECK(max_abs_diff(back.amplitudes, psi.amplitudes) < 1e-12);

    auto rho = ghse(4, 2, 72);
    auto mpo = mpo_from_dense(rho.matrix, 4);
    CHECK(max_abs_diff(mpo_to_matrix(mpo), rho.matrix) < 1e-11);
}

TEST_CASE("ti_mps_limits: trivial and identity checks") {
    ComplexTensor prod({1, 2, 1});
    prod[0] = std::sqrt(0.4);
    prod[1] = std::sqrt(0.6);
    auto lim = ti_mps_limits(prod);
    CHECK(lim.e == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(lim.c == doctest::Approx(0.0).epsilon(1e-12));
    for (int alpha : {2, 4}) CHECK(lim.p_alpha(alpha) == doctest::Approx(1.0).epsilon(1e-12));

    for (std::uint64_t seed : {81u, 82u, 83u}) {
        auto a = random_injective_ti_tensor(3, seed, 0.5);
        auto l = ti_mps_limits(a);
        CHECK(l.gap_ratio <= 0.5 + 1e-9);
        CHECK(l.e - l.c == doctest::Approx(0.5 * l.s2_a).epsilon(1e-12));
        CHECK(l.e >= l.c - 1e-12); // C is the weaker witness in the TI limit
        double mu_sum = 0.0;
        for (double m : l.mu) mu_sum += m;
        CHECK(mu_sum == doctest::Approx(1.0).epsilon(1e-9));
    }
}

namespace {

/// [C1 | A | B | C2] layout with segments n/4, rest split evenly.
Partition ti_partition(int n) {
    const int c1 = n / 4;
    const int a = (n - 2 * c1) / 2;
    Partition part;
    for (int s = c1; s < c1 + a; ++s) part.a_sites.push_back(s);
    for (int s = c1 + a; s < n - c1; ++s) part.b_sites.push_back(s);
    for (int s = 0; s < c1; ++s) part.c_sites.push_back(s);
    for (int s = n - c1; s < n; ++s) part.c_sites.push_back(s);
    return part;
}

} // namespace

TEST_CASE("finite chains converge to the TI limits") {
    auto a = random_injective_ti_tensor(2, 4242, 0.1);
    auto lim = ti_mps_limits(a);
    const int n = 30;
    auto chain = ti_finite_chain(a, n);
    auto part = ti_partition(n);
    CHECK(std::abs(mps_pt_moment(chain, part, 2) - lim.p_alpha(2)) < 1e-6);
    CHECK(std::abs(mps_pt_moment(chain, part, 4) - lim.p_alpha(4)) < 1e-6);

    // realignment route: MPO of the traced window, cut between A and B
    auto mpo = mpo_from_traced_mps(chain, 7, 23);
    auto sv = mpo_realignment_spectrum(mpo, 8);
    double r2 = 0.0, r4 = 0.0, c = 0.0;
    for (double s : sv.values) {
        r2 += s * s;
        r4 += s * s * s * s;
        c += s;
    }
    CHECK(std::abs(r2 - lim.r_alpha(2)) < 1e-6);
    CHECK(std::abs(r4 - lim.r_alpha(4)) < 1e-6);
    CHECK(std::abs(std::log(c) - lim.c) < 1e-5);

    // S2(rho_A) from the finite chain, against the limit
    const double p2_a = mps_subsystem_moment(chain, part.a_sites, 2);
    CHECK(std::abs(-std::log(p2_a) - lim.s2_a) < 1e-5);
}

TEST_CASE("TI finite-size errors decay geometrically with the segment length") {
    for (std::uint64_t seed : {91u, 92u}) {
        auto a = random_injective_ti_tensor(3, seed, 0.1);
        auto lim = ti_mps_limits(a);
        for (int alpha : {2, 4}) {
            double prev = 1e300;
            for (int n : {18, 24, 30}) {
                auto chain = ti_finite_chain(a, n);
                const double err = std::abs(mps_pt_moment(chain, ti_partition(n), alpha) - lim.p_alpha(alpha));
                // bounded by the gap ratio to the power of the smallest segment
                CHECK(err <= 2.0 * std::pow(lim.gap_ratio, n / 4) + 1e-12);
                CHECK(err <= prev + 1e-12);
                prev = err;
            }
        }
    }
}

TEST_SUITE_END();

TEST_SUITE_BEGIN("tnet_perf");

TEST_CASE("mps_pt_moment cost grows no faster than chi^(2 alpha + 1)") {
    const int n = 10, alpha = 3;
    Partition part = Partition::contiguous(4, 4, n);
    std::vector<double> times;
    for (std::size_t chi : {2u, 4u, 8u, 16u}) {
        auto psi = random_mps(n, chi, 1000 + chi);
        // warm once for allocation effects, then time
        volatile double sink = mps_pt_moment(psi, part, 2);
        (void)sink;
        auto t0 = std::chrono::steady_clock::now();
        volatile double v = mps_pt_moment(psi, part, alpha);
        (void)v;
        auto t1 = std::chrono::steady_clock::now();
        times.push_back(std::chrono::duration<double>(t1 - t0).count());
    }
    // chi -> 2 chi should cost at most 2^(2 alpha + 1) x 1.5 slack = 192x
    for (std::size_t k = 0; k + 1 < times.size(); ++k) {
        const double ratio = times[k + 1] / std::max(times[k], 1e-6);
        CHECK(ratio < 1.5 * std::pow(2.0, 2.0 * alpha + 1.0));
    }
}

TEST_SUITE_END();
