#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "mixwit/qstate.hpp"
#include "mixwit/tnet.hpp"
#include "mixwit/witnesses.hpp"

namespace mixwit {

/// State files: {"kind":"pure"|"density","n":int,"data":[[re,im],...]} row-major.
/// MPS/MPO files: {"kind":"mps"|"mpo","n":int,"tensors":[{"shape":[...],"data":[[re,im],...]}]}.
using json = nlohmann::json;

json state_to_json(const PureState& psi);
json state_to_json(const DensityMatrix& rho);
json mps_to_json(const Mps& psi);
json mpo_to_json(const Mpo& rho);

/// Loaders validate shapes and the type invariants and throw
/// std::invalid_argument on malformed input.
PureState pure_from_json(const json& j);
DensityMatrix density_from_json(const json& j);
Mps mps_from_json(const json& j);
Mpo mpo_from_json(const json& j);

json load_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

json report_to_json(const WitnessReport& rep);

/// CSV with '#'-prefixed metadata lines (config, seed, version) before the
/// header row.
class CsvWriter {
  public:
    CsvWriter(std::string path, json metadata, std::vector<std::string> columns);
    void row(const std::vector<double>& values, const std::vector<std::string>& tail = {});
    void flush();
    const std::string& path() const { return path_; }

  private:
    std::string path_;
    std::string buffer_;
    std::size_t n_columns_;
};

} // namespace mixwit
