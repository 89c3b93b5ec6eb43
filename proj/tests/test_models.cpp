#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "mixwit/models.hpp"
#include "mixwit/witnesses.hpp"

using namespace mixwit;
using namespace mixwit::testing;

namespace {
constexpr double kLn2 = 0.6931471805599453;
}

TEST_SUITE_BEGIN("models");

TEST_CASE("tfim(2, 0) spectrum") {
    auto ham = tfim(2, 0.0);
    auto spec = hermitian_spectrum(ham.matrix());
    CHECK(multiset_close(spec, {-1.0, -1.0, 1.0, 1.0}, 1e-12, false));
}

TEST_CASE("tfim commutes with the parity operator") {
    Rng rng(2);
    for (int rep = 0; rep < 4; ++rep) {
        const int n = 2 + static_cast<int>(rng.uniform_index(5)); // 2..6
        const double h = rng.uniform(0.0, 2.0);
        auto ham = tfim(n, h);
        const std::size_t dim = std::size_t{1} << n;
        // P H P = H with P = prod sigma_z (diagonal signs by parity)
        double dev = 0.0;
        for (std::size_t x = 0; x < dim; ++x)
            for (std::size_t y = 0; y < dim; ++y) {
                const int px = __builtin_popcountll(x) % 2 ? -1 : 1;
                const int py = __builtin_popcountll(y) % 2 ? -1 : 1;
                dev = std::max(dev, std::abs(ham.h(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) * (px * py - 1)));
            }
        CHECK(dev < 1e-10);
    }
}

TEST_CASE("xxz(2, delta) ground state in the half-filling sector is the Bell state") {
    for (double delta : {0.0, -1.5, 0.7}) {
        auto ham = xxz(2, delta);
        CHECK(ground_energy(ham, half_filling_sector(2)) == doctest::Approx(delta - 2.0).epsilon(1e-10));
        auto psi = ground_state(ham, half_filling_sector(2));
        auto target = bell_01_10();
        // phase-fixed comparison
        double overlap = 0.0;
        for (std::size_t i = 0; i < 4; ++i)
            overlap += std::abs(std::conj(psi.amplitudes[i]) * target.amplitudes[i]);
        CHECK(overlap == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(pt_negativity(density_from_pure(psi), Partition::bipartite({0}, {1})) ==
              doctest::Approx(kLn2).epsilon(1e-10));
    }
}

TEST_CASE("strong-field TFIM ground state is nearly a product state") {
    auto psi = ground_state(tfim(2, 50.0));
    CHECK(std::abs(psi.amplitudes[0]) > 0.999);
    auto ms = pt_moments(density_from_pure(psi), Partition::bipartite({0}, {1}), {2.0, 4.0});
    CHECK(std::abs(e4_negativity(ms)) < 1e-3);
}

TEST_CASE("degenerate ground spaces are flagged") {
    CHECK_THROWS_AS(ground_state(tfim(2, 0.0)), invariant_error);
    CHECK_NOTHROW(ground_state(tfim(2, 0.0), Sector{0}));
}

TEST_CASE("xxz(12, -2) half filling: the moment witnesses detect the entanglement") {
    auto psi = ground_state(xxz(12, -2.0), half_filling_sector(12));
    auto rho = partial_trace(psi, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
    Partition part = Partition::bipartite({0, 1, 2, 3, 4}, {5, 6, 7, 8, 9});
    auto pt = pt_moments(rho, part, {2.0, 3.0, 4.0});
    auto e3 = e3_tilde(pt);
    REQUIRE(e3.has_value());
    CHECK(*e3 > 0.0);
    CHECK(e4_negativity(pt) > 0.0);
    auto sr = sr_witnesses(rho, part, ChargeSpec::u1());
    CHECK(sr.e4_sr > 0.0);
    CHECK(pt_negativity(rho, part) > sr.e4_sr); // E dominates its witnesses
}

TEST_CASE("thermal state limits") {
    auto ham = tfim(4, 1.3);
    // T -> infinity: maximally mixed
    auto hot = thermal_state(ham, 1e6);
    for (std::size_t i = 0; i < 16; ++i)
        CHECK(std::abs(hot.matrix.at({i, i}) - cplx(1.0 / 16.0)) < 1e-5);
    CHECK(pt_negativity(hot, Partition::bipartite({0, 1}, {2, 3})) < 1e-4);

    // T -> 0: ground-state projector
    auto cold = thermal_state(ham, 1e-6);
    auto psi = ground_state(ham);
    cplx fid(0.0);
    for (std::size_t i = 0; i < 16; ++i)
        for (std::size_t j = 0; j < 16; ++j)
            fid += std::conj(psi.amplitudes[i]) * cold.matrix.at({i, j}) * psi.amplitudes[j];
    CHECK(fid.real() > 1.0 - 1e-6);

    CHECK_THROWS_AS(thermal_state(ham, 0.0), std::invalid_argument);
}

TEST_CASE("depolarize limits and the Bell PPT crossing") {
    auto bell = density_from_pure(bell_00_11());
    auto same = depolarize(bell, 0.0, DepolarizeMode::Global);
    CHECK(max_abs_diff(same.matrix, bell.matrix) == 0.0);
    auto flat = depolarize(bell, 1.0, DepolarizeMode::Global);
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(flat.matrix.at({i, i}) - cplx(0.25)) < 1e-14);

    auto part = Partition::bipartite({0}, {1});
    auto below = depolarize(bell, 2.0 / 3.0 - 1e-3, DepolarizeMode::Global);
    auto above = depolarize(bell, 2.0 / 3.0 + 1e-3, DepolarizeMode::Global);
    CHECK(hermitian_spectrum(partial_transpose(below, part)).back() < 0.0);
    CHECK(hermitian_spectrum(partial_transpose(above, part)).back() > 0.0);
}

TEST_CASE("local depolarization is trace preserving and keeps the Z2 symmetry") {
    auto psi = ground_state(tfim(4, 0.8), Sector{0});
    auto rho = density_from_pure(psi);
    auto noisy = depolarize(rho, 0.13, DepolarizeMode::Local);
    cplx tr(0.0);
    for (std::size_t i = 0; i < 16; ++i) tr += noisy.matrix.at({i, i});
    CHECK(std::abs(tr - cplx(1.0)) < 1e-12);
    // [rho', P] = 0 for P = prod sigma_z
    double dev = 0.0;
    for (std::size_t x = 0; x < 16; ++x)
        for (std::size_t y = 0; y < 16; ++y) {
            const int px = __builtin_popcountll(x) % 2 ? -1 : 1;
            const int py = __builtin_popcountll(y) % 2 ? -1 : 1;
            if (px != py) dev = std::max(dev, std::abs(noisy.matrix.at({x, y})));
        }
    CHECK(dev < 1e-12);
    // global mode is affine: depolarize(rho, p) = (1-p) rho + p I/dim exactly
    auto glob = depolarize(rho, 0.35, DepolarizeMode::Global);
    for (std::size_t x = 0; x < 16; ++x)
        for (std::size_t y = 0; y < 16; ++y) {
            const cplx want = 0.65 * rho.matrix.at({x, y}) + (x == y ? cplx(0.35 / 16.0) : cplx(0.0));
            CHECK(std::abs(glob.matrix.at({x, y}) - want) < 1e-14);
        }
}

TEST_CASE("Werner states match the closed-form PT spectrum") {
    for (int d : {2, 3}) {
        for (double aw : {0.0, 0.25, 0.5, 0.8, 1.0}) {
            auto w = werner(d, aw);
            auto dense = hermitian_spectrum(
                partial_transpose(w.matrix, static_cast<std::size_t>(d), static_cast<std::size_t>(d)));
            CHECK(multiset_close(dense, w.pt_spectrum, 1e-12, false));
        }
    }
}

TEST_CASE("Werner d=2 witness values") {
    auto w0 = werner(2, 0.0);
    CHECK(multiset_close(w0.pt_spectrum, {-0.5, 0.5, 0.5, 0.5}, 1e-14, false));
    auto ms0 = pt_moments(w0.matrix, 2, 2, {1.0, 2.0, 4.0});
    CHECK(negativity_from_spectrum(*ms0.spectrum) == doctest::Approx(kLn2).epsilon(1e-12));
    CHECK(e4_negativity(ms0) == doctest::Approx(kLn2).epsilon(1e-10));

    auto wh = werner(2, 0.5);
    CHECK(multiset_close(wh.pt_spectrum, {0.0, 1.0 / 3, 1.0 / 3, 1.0 / 3}, 1e-14, false));
    auto msh = pt_moments(wh.matrix, 2, 2, {2.0, 4.0});
    CHECK(std::abs(e4_negativity(msh)) < 1e-10);
}

TEST_CASE("Werner E4 is positive exactly below alpha_W = 1/2") {
    for (int d : {2, 3}) {
        for (int k = 0; k <= 20; ++k) {
            const double aw = 0.05 * k;
            auto ms = pt_moments(werner(d, aw).matrix, static_cast<std::size_t>(d),
                                 static_cast<std::size_t>(d), {2.0, 4.0});
            const double e4 = e4_negativity(ms);
            if (aw < 0.5 - 1e-12)
                CHECK(e4 > 0.0);
            else if (aw > 0.5 + 1e-12)
                CHECK(e4 <= 1e-12);
            else
                CHECK(std::abs(e4) < 1e-10);
        }
    }
}

TEST_CASE("stabilizer composites: single GHZ") {
    StabilizerComposite spec;
    spec.g_abc = 1;
    auto built = stabilizer_state(spec);
    auto rho = partial_trace(built.psi, {0, 1});
    auto ms = pt_moments(rho, Partition::bipartite({0}, {1}), {2.0, 3.0, 4.0});
    auto cf = stabilizer_moments(spec);
    CHECK(ms.moment(2.0) == doctest::Approx(cf.p2).epsilon(1e-12));
    CHECK(ms.moment(3.0) == doctest::Approx(cf.p3).epsilon(1e-12));
    CHECK(ms.moment(4.0) == doctest::Approx(cf.p4).epsilon(1e-12));
    CHECK(cf.p2 == doctest::Approx(0.5));
    CHECK(cf.p3 == doctest::Approx(0.25));
    CHECK(cf.p4 == doctest::Approx(0.125));
    CHECK(cf.e == doctest::Approx(0.0));
    CHECK(pt_negativity(rho, Partition::bipartite({0}, {1})) == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("stabilizer composites: EPR_AB plus GHZ") {
    StabilizerComposite spec;
    spec.e_ab = 1;
    spec.g_abc = 1;
    auto cf = stabilizer_moments(spec);
    CHECK(cf.p4 == doctest::Approx(1.0 / 32.0));
    CHECK(cf.e == doctest::Approx(kLn2));
    CHECK(cf.e3t == doctest::Approx(kLn2).epsilon(1e-12));
    CHECK(cf.e4 == doctest::Approx(kLn2).epsilon(1e-12));

    auto built = stabilizer_state(spec);
    std::vector<int> keep;
    for (int s = 0; s < spec.n_a() + spec.n_b(); ++s) keep.push_back(s);
    auto rho = partial_trace(built.psi, keep);
    Partition part = Partition::bipartite({0, 1}, {2, 3});
    CHECK(pt_negativity(rho, part) == doctest::Approx(kLn2).epsilon(1e-10));
    auto ms = pt_moments(rho, part, {2.0, 3.0, 4.0});
    CHECK(ms.moment(4.0) == doctest::Approx(cf.p4).epsilon(1e-12));
}

TEST_CASE("stabilizer composites: single EPR_AB realignment values") {
    StabilizerComposite spec;
    spec.e_ab = 1;
    auto cf = stabilizer_moments(spec);
    CHECK(cf.r_alpha.at(2.0) == doctest::Approx(1.0));
    CHECK(cf.r_alpha.at(4.0) == doctest::Approx(0.25));
    CHECK(cf.c == doctest::Approx(kLn2));
    CHECK(cf.c4 == doctest::Approx(kLn2).epsilon(1e-12));
}

TEST_CASE("stabilizer grid: closed forms match dense and the spectrum is two-valued") {
    // all counts <= 1 here; the full grid runs in the acceptance suite
    for (int s_a : {0, 1})
        for (int g : {0, 1})
            for (int e_ab : {0, 1})
                for (int e_ac : {0, 1})
                    for (int e_bc : {0, 1}) {
                        StabilizerComposite spec;
                        spec.s_a = s_a;
                        spec.g_abc = g;
                        spec.e_ab = e_ab;
                        spec.e_ac = e_ac;
                        spec.e_bc = e_bc;
                        if (spec.n_a() < 1 || spec.n_b() < 1) continue;
                        auto built = stabilizer_state(spec);
                        std::vector<int> keep;
                        for (int s = 0; s < spec.n_a() + spec.n_b(); ++s) keep.push_back(s);
                        auto rho = partial_trace(built.psi, keep);
                        Partition part = Partition::bipartite(
                            std::vector<int>(built.part.a_sites.begin(), built.part.a_sites.end()),
                            std::vector<int>(built.part.b_sites.begin(), built.part.b_sites.end()));
                        auto cf = stabilizer_moments(spec);
                        auto ms = pt_moments(rho, part, {1.0, 2.0, 3.0, 4.0, 6.0});
                        CHECK(ms.moment(2.0) == doctest::Approx(cf.p2).epsilon(1e-12));
                        CHECK(ms.moment(3.0) == doctest::Approx(cf.p3).epsilon(1e-12));
                        CHECK(ms.moment(4.0) == doctest::Approx(cf.p4).epsilon(1e-12));
                        // nonzero PT eigenvalues sit at +-sqrt(p3)
                        for (double v : *ms.spectrum)
                            if (std::abs(v) > 1e-10)
                                CHECK(std::abs(std::abs(v) - cf.pt_value) < 1e-10);
                        const double e = pt_negativity(rho, part);
                        CHECK(e == doctest::Approx(cf.e).epsilon(1e-10));
                        CHECK(e4_negativity(ms) == doctest::Approx(cf.e).epsilon(1e-10));
                        // flat |PT spectrum|: every alpha-negativity saturates E
                        for (double alpha : {1.0, 2.0, 3.0, 4.0, 6.0})
                            CHECK(std::abs(p_alpha_negativity(ms, alpha) - cf.e) < 1e-10);
                        auto rm = realignment_moments(rho, part, {2.0, 4.0});
                        CHECK(rm.moment(2.0) == doctest::Approx(cf.r_alpha.at(2.0)).epsilon(1e-12));
                        CHECK(rm.moment(4.0) == doctest::Approx(cf.r_alpha.at(4.0)).epsilon(1e-12));
                        CHECK(ccnr_negativity(rho, part) == doctest::Approx(cf.c).epsilon(1e-10));
                        CHECK(c4_negativity(rm) == doctest::Approx(cf.c4).epsilon(1e-10));
                    }
}

TEST_SUITE_END();
