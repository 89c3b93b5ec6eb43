// mixwit: mixed-state entanglement witnesses from partial-transpose and
// realignment moments. Batch front-end over the library; CSV/JSON outputs
// carry the full config, seed, and version in their metadata.
#include <atomic>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "mixwit/acceptance.hpp"
#include "mixwit/ensembles.hpp"
#include "mixwit/io.hpp"
#include "mixwit/models.hpp"
#include "mixwit/protocols.hpp"
#include "mixwit/tnet.hpp"
#include "mixwit/version.hpp"
#include "mixwit/witnesses.hpp"

namespace {

using namespace mixwit;

struct Range {
    double start = 0.0, stop = 0.0, step = 0.0;

    std::vector<double> values() const {
        std::vector<double> out;
        if (step <= 0.0 || stop < start) {
            out.push_back(start);
            return out;
        }
        for (double v = start; v <= stop + 1e-12; v += step) out.push_back(v);
        return out;
    }
};

Range parse_range(const std::string& text) {
    Range r;
    const auto c1 = text.find(':');
    if (c1 == std::string::npos) {
        r.start = r.stop = std::stod(text);
        return r;
    }
    const auto c2 = text.find(':', c1 + 1);
    if (c2 == std::string::npos) throw std::invalid_argument("range must be start:stop:step");
    r.start = std::stod(text.substr(0, c1));
    r.stop = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
    r.step = std::stod(text.substr(c2 + 1));
    if (r.step <= 0.0) throw std::invalid_argument("range step must be positive");
    return r;
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto comma = text.find(',', pos);
        if (comma == std::string::npos) comma = text.size();
        out.push_back(std::stoi(text.substr(pos, comma - pos)));
        pos = comma + 1;
    }
    return out;
}

/// "middle:nA,nB" | "ends:nA,nB" | "0,1|2,3" (C = complement)
Partition parse_partition(const std::string& text, int n) {
    Partition part;
    if (text.rfind("middle:", 0) == 0 || text.rfind("ends:", 0) == 0) {
        const bool middle = text[0] == 'm';
        const auto body = text.substr(text.find(':') + 1);
        const auto comma = body.find(',');
        if (comma == std::string::npos) throw std::invalid_argument("expected nA,nB after the partition kind");
        const int n_a = std::stoi(body.substr(0, comma));
        const int n_b = std::stoi(body.substr(comma + 1));
        if (n_a + n_b > n) throw std::invalid_argument("partition larger than the register");
        if (middle) {
            const int start = (n - n_a - n_b) / 2;
            for (int s = 0; s < n_a; ++s) part.a_sites.push_back(start + s);
            for (int s = 0; s < n_b; ++s) part.b_sites.push_back(start + n_a + s);
        } else {
            for (int s = 0; s < n_a; ++s) part.a_sites.push_back(s);
            for (int s = 0; s < n_b; ++s) part.b_sites.push_back(n - n_b + s);
        }
    } else {
        const auto bar = text.find('|');
        if (bar == std::string::npos)
            throw std::invalid_argument("partition needs 'a,..|b,..' or middle:/ends:");
        part.a_sites = parse_int_list(text.substr(0, bar));
        part.b_sites = parse_int_list(text.substr(bar + 1));
    }
    std::vector<bool> used(static_cast<std::size_t>(n), false);
    for (int s : part.a_sites) used.at(static_cast<std::size_t>(s)) = true;
    for (int s : part.b_sites) used.at(static_cast<std::size_t>(s)) = true;
    for (int s = 0; s < n; ++s)
        if (!used[static_cast<std::size_t>(s)]) part.c_sites.push_back(s);
    part.validate(n);
    return part;
}

std::optional<ChargeSpec> parse_charge(const std::string& text) {
    if (text.empty() || text == "none") return std::nullopt;
    if (text == "u1") return ChargeSpec::u1();
    if (text == "z2") return ChargeSpec::z2();
    throw std::invalid_argument("charge must be one of u1, z2, none");
}

int worker_count() {
    if (const char* env = std::getenv("MIXWIT_WORKERS")) {
        const int k = std::atoi(env);
        if (k >= 1) return k;
    }
    return 1;
}

/// Deterministic parallel map: results land in input order.
template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn) {
    const int workers = std::min<int>(worker_count(), static_cast<int>(count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) fn(i);
        });
    for (auto& t : pool) t.join();
}

void emit(const json& j, const std::string& out_path) {
    if (out_path.empty())
        std::cout << j.dump(2) << "\n";
    else
        write_text_file(out_path, j.dump(2) + "\n");
}

struct WitnessRow {
    double e = 0.0, e3t = 0.0, e4 = 0.0, e4_sr = 0.0, e2t_sr = 0.0, s2 = 0.0, c = 0.0, c4 = 0.0;
};

WitnessRow witness_row(const DensityMatrix& rho, const Partition& part,
                       const std::optional<ChargeSpec>& charge) {
    WitnessRow row;
    auto pt = pt_moments(rho, part, {2.0, 3.0, 4.0});
    auto rm = realignment_moments(rho, part, {2.0, 4.0});
    row.s2 = -std::log(pt.abs_moment(2.0));
    row.e = negativity_from_spectrum(*pt.spectrum);
    row.e4 = e4_negativity(pt);
    auto e3 = e3_tilde(pt);
    row.e3t = e3 ? *e3 : std::nan("");
    row.c = negativity_from_spectrum(*rm.spectrum);
    row.c4 = c4_negativity(rm);
    if (charge) {
        auto sr = sr_witnesses(rho, part, *charge);
        row.e4_sr = sr.e4_sr;
        row.e2t_sr = sr.e2t_sr;
    } else {
        row.e4_sr = std::nan("");
        row.e2t_sr = std::nan("");
    }
    return row;
}

int cmd_witness(const std::string& state_path, const std::string& partition_text,
                const std::string& charge_text, const std::string& out_path) {
    auto j = load_json_file(state_path);
    DensityMatrix rho = (j.value("kind", "") == "pure") ? density_from_pure(pure_from_json(j))
                                                        : density_from_json(j);
    auto part = parse_partition(partition_text, rho.n);
    ReportOptions opts;
    opts.charge = parse_charge(charge_text);
    auto rep = witness_report(rho, part, opts);
    json out = report_to_json(rep);
    out["config"] = {{"command", "witness"},
                     {"state", state_path},
                     {"partition", partition_text},
                     {"charge", charge_text}};
    out["version"] = version_string;
    emit(out, out_path);
    return 0;
}

/// The swept parameter is whichever of --h/--delta/--p/--T was given as a
/// start:stop:step range; plain values pin the other parameters.
int cmd_sweep(const std::string& model, int n, const std::string& h_text, const std::string& delta_text,
              const std::string& p_text, const std::string& t_text, const std::string& noise_mode,
              const std::string& partition_text, const std::string& charge_text,
              const std::string& out_path, std::uint64_t seed) {
    std::string sweep_kind, grid_text;
    double fixed_h = 1.0, fixed_delta = 0.0;
    int provided = 0;
    for (const auto& [kind, text] : std::vector<std::pair<std::string, std::string>>{
             {"h", h_text}, {"delta", delta_text}, {"p", p_text}, {"T", t_text}}) {
        if (text.empty()) continue;
        ++provided;
        if (text.find(':') != std::string::npos) {
            if (!sweep_kind.empty()) throw std::invalid_argument("only one parameter may carry a range");
            sweep_kind = kind;
            grid_text = text;
        } else if (kind == "h") {
            fixed_h = std::stod(text);
        } else if (kind == "delta") {
            fixed_delta = std::stod(text);
        }
    }
    if (sweep_kind.empty()) {
        if (provided != 1)
            throw std::invalid_argument("give exactly one of --h/--delta/--p/--T as start:stop:step");
        for (const auto& [kind, text] : std::vector<std::pair<std::string, std::string>>{
                 {"h", h_text}, {"delta", delta_text}, {"p", p_text}, {"T", t_text}})
            if (!text.empty()) {
                sweep_kind = kind;
                grid_text = text;
            }
    }

    const auto grid = parse_range(grid_text).values();
    auto part = parse_partition(partition_text, n);
    auto charge = parse_charge(charge_text.empty() ? (model == "xxz" ? "u1" : "z2") : charge_text);

    std::vector<int> keep = part.a_sites;
    keep.insert(keep.end(), part.b_sites.begin(), part.b_sites.end());
    const Partition local = Partition::contiguous(part.n_a(), part.n_b(), part.n_a() + part.n_b());

    auto state_at = [&](double v) -> DensityMatrix {
        auto ground = [&](double h_or_delta) {
            auto ham = (model == "tfim") ? tfim(n, h_or_delta) : xxz(n, h_or_delta);
            return (model == "tfim") ? ground_state(ham, Sector{0})
                                     : ground_state(ham, half_filling_sector(n));
        };
        if (sweep_kind == "h" || sweep_kind == "delta") return partial_trace(ground(v), keep);
        const double fixed = (model == "tfim") ? fixed_h : fixed_delta;
        if (sweep_kind == "p") {
            auto noisy = depolarize(density_from_pure(ground(fixed)), v,
                                    noise_mode == "global" ? DepolarizeMode::Global : DepolarizeMode::Local);
            return partial_trace(noisy, keep);
        }
        if (sweep_kind == "T") {
            auto ham = (model == "tfim") ? tfim(n, fixed_h) : xxz(n, fixed_delta);
            return partial_trace(thermal_state(ham, v), keep);
        }
        throw std::invalid_argument("sweep kind must be one of h, delta, p, T");
    };

    std::vector<WitnessRow> rows(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) { rows[i] = witness_row(state_at(grid[i]), local, charge); });

    json meta = {{"command", "sweep"},   {"model", model},      {"n", n},
                 {"sweep", sweep_kind},  {"grid", grid_text},   {"h", fixed_h},
                 {"delta", fixed_delta}, {"noise", noise_mode}, {"partition", partition_text},
                 {"charge", charge ? (charge->kind == ChargeKind::U1 ? "u1" : "z2") : "none"},
                 {"seed", seed}};
    CsvWriter csv(out_path, meta, {sweep_kind, "E", "E3t", "E4", "E4_SR", "E2t_SR", "S2", "C", "C4"});
    for (std::size_t i = 0; i < grid.size(); ++i)
        csv.row({grid[i], rows[i].e, rows[i].e3t, rows[i].e4, rows[i].e4_sr, rows[i].e2t_sr, rows[i].s2,
                 rows[i].c, rows[i].c4});
    csv.flush();
    std::cout << "wrote " << out_path << " (" << grid.size() << " rows)\n";
    return 0;
}

int cmd_haar(int n_ab, const std::string& n_c_list, int samples, std::uint64_t seed,
             const std::string& out_path) {
    struct Row {
        int n_a, n_b, n_c;
        double mean_e4 = 0.0, stderr_e4 = 0.0, predicted = 0.0;
        std::string phase;
    };
    std::vector<Row> rows;
    for (int n_c : parse_int_list(n_c_list))
        for (int n_a = 1; n_a < n_ab; ++n_a) rows.push_back({n_a, n_ab - n_a, n_c});

    parallel_for(rows.size(), [&](std::size_t i) {
        auto& row = rows[i];
        const int n = n_ab + row.n_c;
        double sum = 0.0, sumsq = 0.0;
        for (int s = 0; s < samples; ++s) {
            const std::uint64_t draw =
                Rng::mix(seed, static_cast<std::uint64_t>(i) * 1000000 + static_cast<std::uint64_t>(s));
            auto psi = haar_pure(n, draw);
            auto mom = traced_pure_pt_moments(psi, row.n_a, row.n_b, row.n_c);
            const double e4 = 0.5 * std::log(mom.p2 * mom.p2 * mom.p2 / mom.p4);
            sum += e4;
            sumsq += e4 * e4;
        }
        row.mean_e4 = sum / samples;
        row.stderr_e4 = std::sqrt(
            std::max(sumsq / samples - row.mean_e4 * row.mean_e4, 0.0) / std::max(samples - 1, 1));
        auto pred = haar_phase(row.n_a, row.n_b, row.n_c);
        row.predicted = pred.predicted_e;
        row.phase = to_string(pred.phase);
        if (pred.boundary) row.phase += "/" + to_string(pred.second_phase);
    });

    json meta = {{"command", "haar"}, {"n_ab", n_ab}, {"n_c", n_c_list}, {"samples", samples}, {"seed", seed}};
    CsvWriter csv(out_path, meta,
                  {"n_A", "n_B", "n_C", "sample_count", "mean_E4", "stderr_E4", "predicted_E", "phase"});
    for (const auto& row : rows)
        csv.row({static_cast<double>(row.n_a), static_cast<double>(row.n_b), static_cast<double>(row.n_c),
                 static_cast<double>(samples), row.mean_e4, row.stderr_e4, row.predicted},
                {row.phase});
    csv.flush();
    std::cout << "wrote " << out_path << " (" << rows.size() << " rows)\n";
    return 0;
}

int cmd_stabilizer(int max_count, int max_n) {
    int combos = 0, failures = 0;
    double worst = 0.0;
    for (int s_a = 0; s_a <= max_count; ++s_a)
        for (int s_b = 0; s_b <= max_count; ++s_b)
            for (int s_c = 0; s_c <= max_count; ++s_c)
                for (int g = 0; g <= max_count; ++g)
                    for (int e_ab = 0; e_ab <= max_count; ++e_ab)
                        for (int e_ac = 0; e_ac <= max_count; ++e_ac)
                            for (int e_bc = 0; e_bc <= max_count; ++e_bc) {
                                StabilizerComposite spec{s_a, s_b, s_c, g, e_ab, e_ac, e_bc};
                                if (spec.n() > max_n || spec.n_a() < 1 || spec.n_b() < 1) continue;
                                ++combos;
                                auto built = stabilizer_state(spec);
                                std::vector<int> keep;
                                for (int s = 0; s < spec.n_a() + spec.n_b(); ++s) keep.push_back(s);
                                auto rho = partial_trace(built.psi, keep);
                                auto local = Partition::contiguous(spec.n_a(), spec.n_b(),
                                                                   spec.n_a() + spec.n_b());
                                auto cf = stabilizer_moments(spec);
                                auto pt = pt_moments(rho, local, {2.0, 3.0, 4.0});
                                for (auto [alpha, want] :
                                     {std::pair{2.0, cf.p2}, {3.0, cf.p3}, {4.0, cf.p4}}) {
                                    const double dev = std::abs(pt.moment(alpha) - want);
                                    worst = std::max(worst, dev);
                                    if (dev > 1e-12) ++failures;
                                }
                                const double dev_e = std::abs(negativity_from_spectrum(*pt.spectrum) - cf.e);
                                worst = std::max(worst, dev_e);
                                if (dev_e > 1e-10) ++failures;
                            }
    std::cout << "checked " << combos << " stabilizer composites, worst deviation " << worst << "\n";
    if (failures > 0) {
        std::cerr << failures << " closed-form mismatches\n";
        return 2;
    }
    return 0;
}

int cmd_werner(int d, const std::string& grid_text, const std::string& out_path) {
    const auto grid = parse_range(grid_text).values();
    json meta = {{"command", "werner"}, {"d", d}, {"alpha", grid_text}};
    CsvWriter csv(out_path, meta, {"alpha_W", "lambda0", "lambda1", "E", "E4", "C4", "ppt"});
    for (double aw : grid) {
        auto w = werner(d, aw);
        auto pt = pt_moments(w.matrix, static_cast<std::size_t>(d), static_cast<std::size_t>(d),
                             {1.0, 2.0, 4.0});
        auto rm = realignment_moments(w.matrix, static_cast<std::size_t>(d), static_cast<std::size_t>(d),
                                      {2.0, 4.0});
        const double l0 = (2.0 * aw - 1.0) / d;
        const double l1 = (1.0 + d - 2.0 * aw) / (d * (static_cast<double>(d) * d - 1.0));
        csv.row({aw, l0, l1, negativity_from_spectrum(*pt.spectrum), e4_negativity(pt), c4_negativity(rm),
                 pt.spectrum->back() >= -1e-14 ? 1.0 : 0.0});
    }
    csv.flush();
    std::cout << "wrote " << out_path << " (" << grid.size() << " rows)\n";
    return 0;
}

int cmd_test(const std::string& which, const std::string& state_path, const std::string& partition_text,
             int r, double eps1, double eps2, double tau_e, double tau_s, double epsilon, double delta,
             std::uint64_t seed, const std::string& out_path) {
    auto j = load_json_file(state_path);
    json out = {{"command", "test"}, {"which", which}, {"seed", seed}, {"version", version_string}};

    if (which == "schmidt") {
        auto psi = pure_from_json(j);
        auto part = parse_partition(partition_text, psi.n);
        auto v = schmidt_rank_test(psi, part, r, eps1, eps2, delta, seed);
        out["verdict"] = v.verdict == Verdict::A ? "a" : "b";
        out["purity_estimate"] = v.estimate_1;
        out["eps_t"] = v.threshold_e;
        out["samples"] = v.samples;
    } else {
        DensityMatrix rho = (j.value("kind", "") == "pure") ? density_from_pure(pure_from_json(j))
                                                            : density_from_json(j);
        auto part = parse_partition(partition_text, rho.n);
        if (which == "ent") {
            if (tau_e <= 0.0) tau_e = default_test_threshold(rho.n);
            if (tau_s <= 0.0) tau_s = default_test_threshold(rho.n);
            auto v = entanglement_test(rho, part, tau_e, tau_s, epsilon, delta, seed);
            out["verdict"] = v.verdict == Verdict::A ? "a" : "b";
            out["E4_estimate"] = v.estimate_1;
            out["S2_A_estimate"] = v.estimate_2;
            out["tau_E"] = v.threshold_e;
            out["tau_S"] = v.threshold_s;
            out["samples"] = v.samples;
            out["clamped"] = v.clamped;
        } else if (which == "op-schmidt") {
            auto v = operator_schmidt_rank_test(rho, part, r, eps1, eps2, delta, seed);
            out["verdict"] = v.verdict == Verdict::A ? "a" : "b";
            out["ratio_estimate"] = v.estimate_1;
            out["eps_t"] = v.threshold_e;
            out["samples"] = v.samples;
        } else {
            throw std::invalid_argument("--which must be ent, schmidt, or op-schmidt");
        }
    }
    emit(out, out_path);
    return 0;
}

int cmd_certify(const std::string& state_path, const std::string& partition_text, int gates, double c,
                std::uint64_t seed, const std::string& out_path) {
    auto j = load_json_file(state_path);
    DensityMatrix rho = (j.value("kind", "") == "pure") ? density_from_pure(pure_from_json(j))
                                                        : density_from_json(j);
    auto part = parse_partition(partition_text, rho.n);
    auto cert = certify_depth(rho, part, gates, c, seed);
    json out = {{"command", "certify-depth"},
                {"d_hat", cert.d_hat},
                {"certified_depth", cert.certified_depth},
                {"p2_hat", cert.p2_hat},
                {"p4_hat", cert.p4_hat},
                {"samples", cert.samples},
                {"epsilon", cert.epsilon},
                {"vacuous", cert.vacuous},
                {"boundary_gates", gates},
                {"c", c},
                {"seed", seed},
                {"version", version_string}};
    emit(out, out_path);
    return 0;
}

int cmd_tn(const std::string& file, const std::string& partition_text, const std::string& alphas_text,
           const std::string& method, const std::string& out_path) {
    auto j = load_json_file(file);
    json out = {{"command", "tn"}, {"file", file}, {"method", method}, {"version", version_string}};
    auto alphas = parse_int_list(alphas_text);

    if (j.value("kind", "") == "mps") {
        auto psi = mps_from_json(j);
        auto part = parse_partition(partition_text, psi.n());
        if (method == "moments" || method == "auto") {
            json moments = json::object();
            for (int alpha : alphas) moments[std::to_string(alpha)] = mps_pt_moment(psi, part, alpha);
            out["p_alpha"] = moments;
        } else if (method == "gamma") {
            json moments = json::object();
            for (int alpha : alphas)
                moments[std::to_string(alpha)] = mps_traced_gamma(psi, part.n_a(), part.n_b(), alpha);
            out["r_alpha"] = moments;
            auto spec = mps_traced_gamma_spectrum(psi, part.n_a(), part.n_b());
            double c = 0.0;
            for (double s : spec.values) c += s;
            out["C"] = std::log(c);
        } else if (method == "ec") {
            auto spectra = ec_spectrum(psi, part.n_a(), part.n_c());
            double e = 0.0, c = 0.0;
            for (double v : spectra.pt.values) e += std::abs(v);
            for (double v : spectra.realign.values) c += v;
            out["E"] = std::log(e);
            out["C"] = std::log(c);
        } else {
            throw std::invalid_argument("mps methods: moments, gamma, ec");
        }
    } else if (j.value("kind", "") == "mpo") {
        auto rho = mpo_from_json(j);
        auto part = parse_partition(partition_text, rho.n());
        if (method == "realign") {
            auto spec = mpo_realignment_spectrum(rho, part.n_a());
            json r_alpha = json::object();
            double c = 0.0;
            for (int alpha : alphas) {
                double r = 0.0;
                for (double s : spec.values) r += std::pow(s, alpha);
                r_alpha[std::to_string(alpha)] = r;
            }
            for (double s : spec.values) c += s;
            out["r_alpha"] = r_alpha;
            out["C"] = std::log(c);
        } else {
            json moments = json::object();
            for (int alpha : alphas) moments[std::to_string(alpha)] = mpo_pt_moment(rho, part, alpha);
            out["p_alpha"] = moments;
        }
    } else {
        throw std::invalid_argument("tn expects an mps or mpo file");
    }
    emit(out, out_path);
    return 0;
}

int cmd_selftest(const std::vector<int>& ids, std::uint64_t seed) {
    auto run = ids.empty() ? acceptance::all_ids() : ids;
    bool all_ok = true;
    for (int id : run) {
        auto res = acceptance::run_criterion(id, seed);
        std::printf("[%s] criterion %d: %s — %s (%.1f s)\n", res.passed ? "PASS" : "FAIL", res.id,
                    res.name.c_str(), res.detail.c_str(), res.seconds);
        std::fflush(stdout);
        all_ok = all_ok && res.passed;
    }
    return all_ok ? 0 : 2;
}

/// --config file.json expands to a command line: {"command": "sweep", ...};
/// explicit flags after --config still win.
std::vector<std::string> expand_config(int argc, char** argv) {
    std::vector<std::string> args;
    args.push_back(argv[0]);
    std::vector<std::string> rest;
    for (int i = 1; i < argc; ++i) {
        if (std::string(argv[i]) == "--config" && i + 1 < argc) {
            auto j = load_json_file(argv[++i]);
            if (!j.contains("command")) throw std::invalid_argument("config file needs a 'command' field");
            args.push_back(j["command"].get<std::string>());
            for (const auto& [key, value] : j.items()) {
                if (key == "command") continue;
                args.push_back("--" + key);
                args.push_back(value.is_string() ? value.get<std::string>() : value.dump());
            }
        } else {
            rest.push_back(argv[i]);
        }
    }
    args.insert(args.end(), rest.begin(), rest.end());
    return args;
}

} // namespace

int main(int argc, char** argv) {
    // deterministic BLAS unless the user overrides
    setenv("OPENBLAS_NUM_THREADS", "1", 0);

    CLI::App app{"mixed-state entanglement witnesses (PT and realignment moments)"};
    app.require_subcommand(1);

    std::string state_path, partition_text = "middle:1,1", charge_text, out_path, model = "tfim";
    std::string h_text, delta_text, p_text, t_text, noise_mode = "local", which = "ent";
    std::string file, method = "auto", alphas_text = "2,3,4", n_c_list = "2,4", grid_text = "0:1:0.05";
    int n = 12, d = 2, samples = 100, r = 1, gates = 1, max_count = 2, max_n = 10;
    double eps1 = 1.0, eps2 = 0.3, tau_e = 0.0, tau_s = 0.0;
    double epsilon = 0.02, delta = 0.01, c_exp = 1.5;
    std::uint64_t seed = 12345;
    std::vector<int> crit_ids;

    auto* witness = app.add_subcommand("witness", "full witness report for a state file");
    witness->add_option("--state", state_path, "state JSON file")->required();
    witness->add_option("--partition", partition_text, "a,..|b,.. or middle:nA,nB or ends:nA,nB")->required();
    witness->add_option("--charge", charge_text, "u1 | z2 | none");
    witness->add_option("--out", out_path, "output JSON path (stdout if omitted)");

    auto* sweep = app.add_subcommand("sweep", "witness sweep over a model parameter grid");
    sweep->set_help_flag("--help", "print help");
    sweep->add_option("--model", model, "tfim | xxz");
    sweep->add_option("--n", n, "chain length")->required();
    sweep->add_option("--h", h_text, "field: start:stop:step to sweep, plain value to pin");
    sweep->add_option("--delta", delta_text, "anisotropy: range or value");
    sweep->add_option("--p", p_text, "depolarization probability: range sweeps it");
    sweep->add_option("--T", t_text, "temperature: range sweeps it");
    sweep->add_option("--noise", noise_mode, "local | global (p sweeps)");
    sweep->add_option("--partition", partition_text)->required();
    sweep->add_option("--charge", charge_text, "u1 | z2 | none (default by model)");
    sweep->add_option("--seed", seed);
    sweep->add_option("--out", out_path, "CSV path")->required();

    auto* haar = app.add_subcommand("haar", "Haar phase-diagram sampling");
    haar->add_option("--n-ab", n, "n_A + n_B")->required();
    haar->add_option("--n-c", n_c_list, "comma list of traced sizes");
    haar->add_option("--samples", samples);
    haar->add_option("--seed", seed);
    haar->add_option("--out", out_path, "CSV path")->required();

    auto* stab = app.add_subcommand("stabilizer", "verify stabilizer composites against closed forms");
    stab->add_option("--max-count", max_count);
    stab->add_option("--max-n", max_n);

    auto* wern = app.add_subcommand("werner", "Werner-state witness sweep");
    wern->add_option("--d", d, "local dimension");
    wern->add_option("--alpha", grid_text, "alpha_W grid start:stop:step");
    wern->add_option("--out", out_path, "CSV path")->required();

    auto* test = app.add_subcommand("test", "simulated testing protocols");
    test->add_option("--which", which, "ent | schmidt | op-schmidt");
    test->add_option("--state", state_path)->required();
    test->add_option("--partition", partition_text)->required();
    test->add_option("--r", r, "rank promise");
    test->add_option("--eps1", eps1);
    test->add_option("--eps2", eps2);
    test->add_option("--tau-e", tau_e, "entanglement-test threshold (default 2 ln n)");
    test->add_option("--tau-s", tau_s);
    test->add_option("--epsilon", epsilon, "estimator precision");
    test->add_option("--delta", delta, "estimator failure probability");
    test->add_option("--seed", seed);
    test->add_option("--out", out_path);

    auto* certify = app.add_subcommand("certify-depth", "certified circuit-depth lower bound");
    certify->add_option("--state", state_path)->required();
    certify->add_option("--partition", partition_text)->required();
    certify->add_option("--boundary-gates", gates, "|dA|");
    certify->add_option("--c", c_exp, "precision exponent: eps = n^-c, L = n^(2c+1)");
    certify->add_option("--seed", seed);
    certify->add_option("--out", out_path);

    auto* tn = app.add_subcommand("tn", "moments from MPS/MPO files");
    tn->add_option("--file", file)->required();
    tn->add_option("--partition", partition_text)->required();
    tn->add_option("--alpha", alphas_text, "comma list of moment orders");
    tn->add_option("--method", method, "mps: moments|gamma|ec, mpo: moments|realign");
    tn->add_option("--out", out_path);

    auto* selftest = app.add_subcommand("selftest", "run the acceptance suite");
    selftest->add_option("--criterion", crit_ids, "criteria to run (default all)");
    selftest->add_option("--seed", seed);

    try {
        auto args = expand_config(argc, argv);
        std::vector<const char*> cargs;
        for (const auto& a : args) cargs.push_back(a.c_str());
        app.parse(static_cast<int>(cargs.size()), cargs.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::invalid_argument& err) {
        std::cerr << "invalid input: " << err.what() << "\n";
        return 1;
    }

    try {
        if (witness->parsed()) return cmd_witness(state_path, partition_text, charge_text, out_path);
        if (sweep->parsed())
            return cmd_sweep(model, n, h_text, delta_text, p_text, t_text, noise_mode, partition_text,
                             charge_text, out_path, seed);
        if (haar->parsed()) return cmd_haar(n, n_c_list, samples, seed, out_path);
        if (stab->parsed()) return cmd_stabilizer(max_count, max_n);
        if (wern->parsed()) return cmd_werner(d, grid_text, out_path);
        if (test->parsed())
            return cmd_test(which, state_path, partition_text, r, eps1, eps2, tau_e, tau_s, epsilon, delta,
                            seed, out_path);
        if (certify->parsed()) return cmd_certify(state_path, partition_text, gates, c_exp, seed, out_path);
        if (tn->parsed()) return cmd_tn(file, partition_text, alphas_text, method, out_path);
        if (selftest->parsed()) return cmd_selftest(crit_ids, seed);
    } catch (const invariant_error& err) {
        std::cerr << "numerical invariant breach: " << err.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& err) {
        std::cerr << "invalid input: " << err.what() << "\n";
        return 1;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    return 0;
}
