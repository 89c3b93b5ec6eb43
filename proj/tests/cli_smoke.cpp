// End-to-end smoke checks of the CLI binary (path passed as argv[1]).
#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "mixwit/io.hpp"
#include "mixwit/tnet.hpp"

using namespace mixwit;

namespace {

int failures = 0;

void expect(bool cond, const std::string& what) {
    if (!cond) {
        ++failures;
        std::cerr << "FAILED: " << what << "\n";
    }
}

struct RunResult {
    int status = -1;
    std::string out;
};

RunResult run(const std::string& cmd) {
    RunResult res;
    FILE* pipe = popen((cmd + " 2>/dev/null").c_str(), "r");
    if (!pipe) return res;
    std::array<char, 4096> buf{};
    while (std::size_t got = fread(buf.data(), 1, buf.size(), pipe)) res.out.append(buf.data(), got);
    res.status = pclose(pipe);
    if (res.status != -1) res.status = WEXITSTATUS(res.status);
    return res;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: cli_smoke <mixwit-binary>\n";
        return 2;
    }
    const std::string bin = argv[1];
    const std::string dir = "/tmp/mixwit_smoke";
    std::system(("rm -rf " + dir + " && mkdir -p " + dir).c_str());

    // fixtures
    {
        ComplexTensor amp({4});
        amp[1] = amp[2] = 1.0 / std::sqrt(2.0);
        write_text_file(dir + "/bell.json", state_to_json(make_pure(2, std::move(amp))).dump());
        write_text_file(dir + "/mps.json", mps_to_json(random_mps(6, 3, 77)).dump());
        write_text_file(dir + "/mpo.json", mpo_to_json(random_density_mpo(5, 2, 78)).dump());
    }

    // witness report on the Bell pair: E = E4 = ln 2
    {
        auto res = run(bin + " witness --state " + dir + "/bell.json --partition '0|1' --charge u1");
        expect(res.status == 0, "witness exit status");
        auto j = json::parse(res.out, nullptr, false);
        expect(!j.is_discarded(), "witness emits JSON");
        if (!j.is_discarded()) {
            expect(std::abs(j["E"].get<double>() - std::log(2.0)) < 1e-9, "witness E = ln 2");
            expect(std::abs(j["E_alpha"]["4"].get<double>() - std::log(2.0)) < 1e-9, "witness E4 = ln 2");
        }
    }

    // werner sweep: E4 positive strictly below 1/2 (d = 2)
    {
        auto res = run(bin + " werner --d 2 --alpha 0:1:0.25 --out " + dir + "/werner.csv");
        expect(res.status == 0, "werner exit status");
        std::ifstream in(dir + "/werner.csv");
        std::string line;
        std::getline(in, line);
        expect(line.rfind("# ", 0) == 0, "werner metadata line");
        std::getline(in, line);
        expect(line.rfind("alpha_W", 0) == 0, "werner header");
        int rows = 0;
        while (std::getline(in, line)) {
            std::stringstream ss(line);
            std::string field;
            std::getline(ss, field, ',');
            const double aw = std::stod(field);
            for (int skip = 0; skip < 3; ++skip) std::getline(ss, field, ',');
            std::getline(ss, field, ',');
            const double e4 = std::stod(field);
            if (aw < 0.5 - 1e-9)
                expect(e4 > 1e-12, "werner E4 positive at alpha_W = " + std::to_string(aw));
            else
                expect(e4 <= 1e-10, "werner E4 nonpositive at alpha_W = " + std::to_string(aw));
            ++rows;
        }
        expect(rows == 5, "werner row count");
    }

    // small TFIM sweep is deterministic: identical bytes on a rerun
    {
        const std::string cmd = bin + " sweep --model tfim --n 6 --h 0.5:1.5:0.5 " +
                                "--partition middle:2,2 --out " + dir + "/sweep";
        expect(run(cmd + "1.csv").status == 0, "sweep exit status");
        expect(run(cmd + "2.csv").status == 0, "sweep rerun exit status");
        const auto a = slurp(dir + "/sweep1.csv"), b = slurp(dir + "/sweep2.csv");
        expect(!a.empty() && a == b, "sweep output is bitwise reproducible");
    }

    // tn moments agree with the library call
    {
        auto res = run(bin + " tn --file " + dir + "/mps.json --partition '0,1|2,3' --alpha 2,3");
        expect(res.status == 0, "tn exit status");
        auto j = json::parse(res.out, nullptr, false);
        expect(!j.is_discarded(), "tn emits JSON");
        if (!j.is_discarded()) {
            auto psi = mps_from_json(load_json_file(dir + "/mps.json"));
            Partition part;
            part.a_sites = {0, 1};
            part.b_sites = {2, 3};
            part.c_sites = {4, 5};
            const double want = mps_pt_moment(psi, part, 3);
            expect(std::abs(j["p_alpha"]["3"].get<double>() - want) < 1e-12, "tn p3 value");
        }
    }

    // mpo realignment through the CLI
    {
        auto res = run(bin + " tn --file " + dir + "/mpo.json --partition '0,1|2,3,4' --alpha 2,4 " +
                       "--method realign");
        expect(res.status == 0, "tn mpo exit status");
        auto j = json::parse(res.out, nullptr, false);
        expect(!j.is_discarded() && j.contains("C"), "tn mpo C present");
    }

    // validation failures exit with code 1
    {
        expect(run(bin + " witness --state " + dir + "/nope.json --partition '0|1'").status == 1,
               "missing state file exits 1");
        expect(run(bin + " werner --d 1 --alpha 0:1:0.5 --out " + dir + "/x.csv").status == 1,
               "invalid dimension exits 1");
    }

    // JSON config mirrors the flags
    {
        write_text_file(dir + "/job.json",
                        json{{"command", "werner"}, {"d", 2}, {"alpha", "0:1:0.5"},
                             {"out", dir + "/wc.csv"}}.dump());
        expect(run(bin + " --config " + dir + "/job.json").status == 0, "config-file run");
        expect(!slurp(dir + "/wc.csv").empty(), "config-file run writes output");
    }

    // protocol drivers
    {
        auto res = run(bin + " test --which schmidt --state " + dir + "/bell.json --partition '0|1' " +
                       "--r 1 --eps1 0.9 --eps2 0.55 --seed 7");
        auto j = json::parse(res.out, nullptr, false);
        expect(res.status == 0 && !j.is_discarded() && j["verdict"] == "b", "schmidt test verdict (b)");

        auto res2 = run(bin + " certify-depth --state " + dir + "/bell.json --partition '0|1' " +
                        "--boundary-gates 1 --c 4 --seed 9");
        auto j2 = json::parse(res2.out, nullptr, false);
        expect(res2.status == 0 && !j2.is_discarded() && j2["certified_depth"].get<int>() == 1,
               "Bell pair certifies depth 1");
    }

    if (failures == 0) std::puts("cli smoke: all checks passed");
    return failures == 0 ? 0 : 1;
}
