#ifndef GFDM_SERIALIZE_HPP
#define GFDM_SERIALIZE_HPP

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "gfdm/optimize.hpp"

namespace gfdm {

using json = nlohmann::json;

json to_json(const GfdmConfig& cfg);
GfdmConfig config_from_json(const json& j);

json to_json(const FilterSpec& f);
FilterSpec filter_from_json(const json& j);

/// Complex vectors as parallel re/im arrays.
json to_json(const CVec& v);
CVec cvec_from_json(const json& j);

/// The modulation matrix is serialized by its defining data (dimensions plus
/// filter coefficients); the matrix itself is reconstructible.
json to_json(const ModulationMatrix& mm);
ModulationMatrix modulation_matrix_from_json(const json& j);

json to_json(const WindowSpec& w);
WindowSpec window_from_json(const json& j);

json to_json(const RateReport& r);
json to_json(const PsdGrid& g);
json to_json(const OptResult& r);

/// Shortest round-trip double formatting ("%.17g" trimmed): identical doubles
/// always print identically and re-parse exactly.
std::string format_double(double v);

/// Linear power to dB (10*log10), floored far below any physical value.
double to_db(double linear);

void write_psd_csv(std::ostream& os, const PsdGrid& g);
void write_rate_csv_row(std::ostream& os, double snr_db, Receiver receiver, double rate_bits);

/// 16-hex-digit FNV-1a of a canonical (sorted-key) JSON dump.
std::string config_hash(const json& j);

/// "# key=value" provenance headers carried by every CLI output file.
void write_provenance(std::ostream& os, const std::string& tool_version,
                      const std::string& cfg_hash, std::uint64_t seed);

/// Throws config_error (with the offending path) if `j` holds keys outside
/// `allowed`.
void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed,
                         const std::string& path);

}  // namespace gfdm

#endif
