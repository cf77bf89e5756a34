#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include "json.hpp"

#include "photocorr/errors.hpp"
#include "photocorr/scan.hpp"

namespace photocorr {

namespace {

using nlohmann::json;

template <class T>
T get_as(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ArgumentError(fmt::format("scan config: bad field '{}': {}", key, e.what()));
  }
}

void read_params(const json& p, JCParams& out) {
  if (!p.is_object()) throw ArgumentError("scan config: 'params' must be an object");
  const bool absolute = p.contains("kappa") || p.contains("gamma") || p.contains("drive");
  const bool ratios = p.contains("two_kappa_over_g") || p.contains("gamma_over_g") || p.contains("drive_over_kappa");
  if (absolute && ratios) throw ArgumentError("scan config: mix of absolute rates and ratios in 'params'");
  if (p.contains("g")) out.g = get_as<double>(p, "g");
  if (ratios) {
    const double two_kappa = p.contains("two_kappa_over_g") ? get_as<double>(p, "two_kappa_over_g") : 2.0 * out.kappa / out.g;
    const double gamma = p.contains("gamma_over_g") ? get_as<double>(p, "gamma_over_g") : out.gamma / out.g;
    const double drive = p.contains("drive_over_kappa") ? get_as<double>(p, "drive_over_kappa")
                                                        : (out.kappa > 0 ? out.drive / out.kappa : 0.0);
    out = JCParams::from_ratios(out.g, two_kappa, gamma, drive);
  } else {
    if (p.contains("kappa")) out.kappa = get_as<double>(p, "kappa");
    if (p.contains("gamma")) out.gamma = get_as<double>(p, "gamma");
    if (p.contains("drive")) out.drive = get_as<double>(p, "drive");
  }
  if (p.contains("delta")) throw ArgumentError("scan config: 'delta' is set by the grid, not by params");
}

}  // namespace

ScanConfig parse_scan_config(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ArgumentError(fmt::format("scan config: invalid JSON: {}", e.what()));
  }
  if (!j.is_object()) throw ArgumentError("scan config: top level must be an object");

  static const char* known[] = {"preset", "name", "params", "delta_over_g", "n_photon_max", "k_max",
                                "measure_orders", "outputs"};
  for (const auto& item : j.items()) {
    if (std::find(std::begin(known), std::end(known), item.key()) == std::end(known)) {
      throw ArgumentError(fmt::format("scan config: unknown field '{}'", item.key()));
    }
  }

  ScanConfig cfg;
  if (j.contains("preset")) cfg = figure_preset(get_as<std::string>(j, "preset"));
  if (j.contains("name")) cfg.name = get_as<std::string>(j, "name");
  if (j.contains("params")) read_params(j.at("params"), cfg.params);
  if (j.contains("delta_over_g")) {
    const auto& g = j.at("delta_over_g");
    if (g.is_string()) {
      cfg.delta_over_g = Grid::parse(g.get<std::string>());
    } else if (g.is_object()) {
      cfg.delta_over_g = Grid{get_as<double>(g, "min"), get_as<double>(g, "max"), get_as<int>(g, "count")};
    } else {
      throw ArgumentError("scan config: 'delta_over_g' must be a string or an object");
    }
  }
  if (j.contains("n_photon_max")) cfg.n_photon_max = get_as<int>(j, "n_photon_max");
  if (j.contains("k_max")) cfg.k_max = get_as<int>(j, "k_max");
  if (j.contains("measure_orders")) {
    cfg.measure_orders.clear();
    for (const auto& o : j.at("measure_orders")) {
      cfg.measure_orders.push_back({get_as<int>(o, "n"), get_as<int>(o, "n_tr")});
    }
  }
  if (j.contains("outputs")) cfg.outputs = get_as<std::vector<std::string>>(j, "outputs");
  cfg.validate();
  return cfg;
}

ScanConfig load_scan_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError(fmt::format("cannot open scan config '{}'", path));
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scan_config(buf.str());
}

}  // namespace photocorr
