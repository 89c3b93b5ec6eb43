#include "mixwit/io.hpp"

#include <fstream>
#include <sstream>

#include "mixwit/version.hpp"

namespace mixwit {

namespace {

json data_to_json(const std::vector<cplx>& data) {
    json arr = json::array();
    for (const auto& v : data) arr.push_back({v.real(), v.imag()});
    return arr;
}

std::vector<cplx> data_from_json(const json& arr) {
    if (!arr.is_array()) throw std::invalid_argument("state file: data must be an array");
    std::vector<cplx> out;
    out.reserve(arr.size());
    for (const auto& e : arr) {
        if (!e.is_array() || e.size() != 2)
            throw std::invalid_argument("state file: entries must be [re, im] pairs");
        out.emplace_back(e[0].get<double>(), e[1].get<double>());
    }
    return out;
}

int checked_n(const json& j) {
    if (!j.contains("n") || !j["n"].is_number_integer())
        throw std::invalid_argument("state file: missing integer field 'n'");
    const int n = j["n"].get<int>();
    if (n < 1 || n > 20) throw std::invalid_argument("state file: n out of range");
    return n;
}

void check_kind(const json& j, const std::string& expected) {
    if (!j.contains("kind") || j["kind"].get<std::string>() != expected)
        throw std::invalid_argument("state file: expected kind '" + expected + "'");
}

} // namespace

json state_to_json(const PureState& psi) {
    return json{{"kind", "pure"}, {"n", psi.n}, {"data", data_to_json(psi.amplitudes.data())}};
}

json state_to_json(const DensityMatrix& rho) {
    return json{{"kind", "density"}, {"n", rho.n}, {"data", data_to_json(rho.matrix.data())}};
}

json mps_to_json(const Mps& psi) {
    json tensors = json::array();
    for (const auto& t : psi.tensors) {
        json shape = json::array();
        for (auto s : t.shape()) shape.push_back(s);
        tensors.push_back({{"shape", shape}, {"data", data_to_json(t.data())}});
    }
    return json{{"kind", "mps"}, {"n", psi.n()}, {"tensors", tensors}};
}

json mpo_to_json(const Mpo& rho) {
    json tensors = json::array();
    for (const auto& t : rho.tensors) {
        json shape = json::array();
        for (auto s : t.shape()) shape.push_back(s);
        tensors.push_back({{"shape", shape}, {"data", data_to_json(t.data())}});
    }
    return json{{"kind", "mpo"}, {"n", rho.n()}, {"tensors", tensors}};
}

PureState pure_from_json(const json& j) {
    check_kind(j, "pure");
    const int n = checked_n(j);
    auto data = data_from_json(j.at("data"));
    const std::size_t len = data.size();
    if (len != (std::size_t{1} << n)) throw std::invalid_argument("state file: wrong amplitude count");
    return make_pure(n, ComplexTensor({len}, std::move(data)));
}

DensityMatrix density_from_json(const json& j) {
    check_kind(j, "density");
    const int n = checked_n(j);
    const std::size_t dim = std::size_t{1} << n;
    auto data = data_from_json(j.at("data"));
    if (data.size() != dim * dim) throw std::invalid_argument("state file: wrong matrix size");
    return make_density(n, ComplexTensor({dim, dim}, std::move(data)));
}

namespace {

std::vector<ComplexTensor> tensors_from_json(const json& j, std::size_t expected_rank) {
    if (!j.contains("tensors") || !j["tensors"].is_array())
        throw std::invalid_argument("tensor-network file: missing 'tensors'");
    std::vector<ComplexTensor> out;
    for (const auto& tj : j["tensors"]) {
        std::vector<std::size_t> shape;
        for (const auto& s : tj.at("shape")) shape.push_back(s.get<std::size_t>());
        if (shape.size() != expected_rank)
            throw std::invalid_argument("tensor-network file: wrong tensor rank");
        out.emplace_back(std::move(shape), data_from_json(tj.at("data")));
    }
    return out;
}

} // namespace

Mps mps_from_json(const json& j) {
    check_kind(j, "mps");
    const int n = checked_n(j);
    Mps psi;
    psi.tensors = tensors_from_json(j, 3);
    if (psi.n() != n) throw std::invalid_argument("mps file: tensor count differs from n");
    psi.validate();
    const double norm = mps_norm(psi);
    if (std::abs(norm - 1.0) > 1e-10)
        throw std::invalid_argument("mps file: state norm " + std::to_string(norm));
    return psi;
}

Mpo mpo_from_json(const json& j) {
    check_kind(j, "mpo");
    const int n = checked_n(j);
    Mpo rho;
    rho.tensors = tensors_from_json(j, 4);
    if (rho.n() != n) throw std::invalid_argument("mpo file: tensor count differs from n");
    rho.validate();
    const double tr = mpo_trace(rho);
    if (std::abs(tr - 1.0) > 1e-8) throw std::invalid_argument("mpo file: trace " + std::to_string(tr));
    // the moment algorithms assume a Hermitian operator; only checkable
    // densely, so larger MPOs are trusted as documented
    if (n <= 10) {
        const auto dense = mpo_to_matrix(rho);
        const std::size_t dim = dense.extent(0);
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t k = i; k < dim; ++k)
                if (std::abs(dense[i * dim + k] - std::conj(dense[k * dim + i])) > 1e-8)
                    throw std::invalid_argument("mpo file: operator is not Hermitian");
    }
    return rho;
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path);
    json j;
    in >> j;
    return j;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write " + path);
    out << text;
}

json report_to_json(const WitnessReport& rep) {
    auto map_to_json = [](const std::map<double, double>& m) {
        json out = json::object();
        for (const auto& [k, v] : m) {
            std::ostringstream key;
            key << k;
            out[key.str()] = v;
        }
        return out;
    };
    json j;
    j["n_a"] = rep.n_a;
    j["n_b"] = rep.n_b;
    j["S2"] = rep.s2;
    j["E"] = rep.e ? json(*rep.e) : json();
    j["E_alpha"] = map_to_json(rep.e_alpha);
    j["E3t"] = rep.e3t ? json(*rep.e3t) : json();
    j["E2t"] = rep.e2t;
    j["r2t"] = rep.r2t;
    j["C"] = rep.c ? json(*rep.c) : json();
    j["C_alpha"] = map_to_json(rep.c_alpha);
    j["osee"] = map_to_json(rep.osee_values);
    j["bounds"] = {{"half_n_ln2_minus_s2", rep.bounds.half_n_ln2_minus_s2},
                   {"m_ln2", rep.bounds.m_ln2},
                   {"s_half_a", rep.bounds.s_half_a},
                   {"s_half_b", rep.bounds.s_half_b},
                   {"ln_p0_bound", rep.bounds.ln_p0_bound},
                   {"c_bound", rep.bounds.c_bound}};
    j["flags"] = {{"e3t_undefined", !rep.e3t.has_value()}, {"e_unavailable", !rep.e.has_value()}};
    j["moments"] = {{"pt", map_to_json(rep.pt.moments)},
                    {"pt_abs", map_to_json(rep.pt.abs_moments)},
                    {"realignment", map_to_json(rep.realignment.moments)}};
    if (rep.sr) {
        json blocks = json::array();
        for (const auto& b : rep.sr->pt_blocks)
            blocks.push_back({{"q", b.q}, {"p2", b.p2}, {"p4", b.p4}, {"E4_block", b.e4_block}});
        j["sr"] = {{"E4_SR", rep.sr->e4_sr},
                   {"E2t_SR", rep.sr->e2t_sr},
                   {"C4_SR", rep.sr->c4_sr},
                   {"C2t_SR", rep.sr->c2t_sr},
                   {"n_q", rep.sr->n_q},
                   {"blocks", blocks}};
    }
    return j;
}

CsvWriter::CsvWriter(std::string path, json metadata, std::vector<std::string> columns)
    : path_(std::move(path)), n_columns_(columns.size()) {
    metadata["version"] = version_string;
    buffer_ += "# " + metadata.dump() + "\n";
    for (std::size_t i = 0; i < columns.size(); ++i)
        buffer_ += columns[i] + (i + 1 < columns.size() ? "," : "\n");
}

void CsvWriter::row(const std::vector<double>& values, const std::vector<std::string>& tail) {
    if (values.size() + tail.size() != n_columns_)
        throw std::invalid_argument("csv row has wrong arity");
    std::vector<std::string> fields;
    fields.reserve(n_columns_);
    for (double v : values) {
        std::ostringstream s;
        s.precision(12);
        s << v;
        fields.push_back(s.str());
    }
    fields.insert(fields.end(), tail.begin(), tail.end());
    for (std::size_t i = 0; i < fields.size(); ++i)
        buffer_ += fields[i] + (i + 1 < fields.size() ? "," : "\n");
}

void CsvWriter::flush() {
    write_text_file(path_, buffer_);
}

} // namespace mixwit
