#include "georelay/scenario.hpp"

#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "georelay/errors.hpp"

namespace georelay {
namespace {

using nlohmann::json;

// Reads one JSON object, remembering which keys were consumed so that the
// leftovers can be rejected.
class Block {
 public:
  Block(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  void number(const char* key, double& out) {
    if (const json* v = take(key)) {
      if (!v->is_number()) throw ConfigError(where(key) + ": expected a number");
      out = v->get<double>();
    }
  }

  template <typename Int>
  void integer(const char* key, Int& out) {
    if (const json* v = take(key)) {
      if (!v->is_number_integer() && !v->is_number_unsigned()) throw ConfigError(where(key) + ": expected an integer");
      if (v->is_number_unsigned()) {
        out = static_cast<Int>(v->get<std::uint64_t>());
      } else {
        const auto x = v->get<std::int64_t>();
        if constexpr (std::is_unsigned_v<Int>) {
          if (x < 0) throw ConfigError(where(key) + ": expected a non-negative integer");
        }
        out = static_cast<Int>(x);
      }
    }
  }

  void boolean(const char* key, bool& out) {
    if (const json* v = take(key)) {
      if (!v->is_boolean()) throw ConfigError(where(key) + ": expected true or false");
      out = v->get<bool>();
    }
  }

  void string(const char* key, std::string& out) {
    if (const json* v = take(key)) {
      if (!v->is_string()) throw ConfigError(where(key) + ": expected a string");
      out = v->get<std::string>();
    }
  }

  void numbers(const char* key, std::vector<double>& out) {
    if (const json* v = take(key)) {
      if (!v->is_array()) throw ConfigError(where(key) + ": expected an array of numbers");
      out.clear();
      for (const auto& x : *v) {
        if (!x.is_number()) throw ConfigError(where(key) + ": expected an array of numbers");
        out.push_back(x.get<double>());
      }
    }
  }

  void integers(const char* key, std::vector<int>& out) {
    if (const json* v = take(key)) {
      if (!v->is_array()) throw ConfigError(where(key) + ": expected an array of integers");
      out.clear();
      for (const auto& x : *v) {
        if (!x.is_number_integer()) throw ConfigError(where(key) + ": expected an array of integers");
        out.push_back(x.get<int>());
      }
    }
  }

  const json* child(const char* key) { return take(key); }
  std::string where(const std::string& key) const { return path_ + "." + key; }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key())) throw ConfigError(where(item.key()) + ": unknown key");
    }
  }

 private:
  const json* take(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_constellation(const json& j, ConstellationConfig& c) {
  Block b(j, "constellation");
  b.number("earth_radius_m", c.earth_radius_m);
  b.number("geos_altitude_m", c.geos_altitude_m);
  b.number("geos_coverage_angle_deg", c.geos_coverage_angle_deg);
  b.number("entry_boundary_angle_deg", c.entry_boundary_angle_deg);
  if (const json* leos = b.child("leos")) {
    if (!leos->is_array() || leos->empty()) throw ConfigError("constellation.leos: expected a non-empty array");
    c.leos.clear();
    for (std::size_t i = 0; i < leos->size(); ++i) {
      Block lb((*leos)[i], "constellation.leos[" + std::to_string(i) + "]");
      LeoConfig leo;
      lb.number("altitude_m", leo.altitude_m);
      lb.number("velocity_mps", leo.velocity_mps);
      lb.number("phase_offset_deg", leo.phase_offset_deg);
      lb.finish();
      c.leos.push_back(leo);
    }
  }
  b.finish();
}

void read_code(const json& j, CodeConfig& c) {
  Block b(j, "code");
  b.string("point", c.point);
  b.integer("M", c.n_files);
  b.integer("N", c.n_nodes);
  b.integer("K", c.reconstruct_k);
  b.integer("D", c.repair_d);
  b.integer("alpha", c.per_node_files);
  b.integer("beta", c.per_helper_files);
  b.number("file_bits", c.file_bits);
  b.finish();
}

template <typename Link>
void read_common_link(Block& b, Link& c) {
  b.number("bandwidth_hz", c.bandwidth_hz);
  b.number("tx_gain_db", c.tx_gain_db);
  b.number("rx_gain_db", c.rx_gain_db);
  b.numbers("attenuation_db", c.attenuation_db);
  b.number("noise_level_db", c.noise_level_db);
  b.number("calibration_db", c.calibration_db);
  b.number("pmax_w", c.pmax_w);
  b.number("emax_j", c.emax_j);
  b.number("t_start_s", c.t_start_s);
  b.number("horizon_s", c.horizon_s);
}

void read_downlink(const json& j, DownlinkConfig& c) {
  Block b(j, "downlink");
  b.number("carrier_hz", c.carrier_hz);
  read_common_link(b, c);
  b.finish();
}

void read_uplink(const json& j, UplinkConfig& c) {
  Block b(j, "uplink");
  b.numbers("carriers_hz", c.carriers_hz);
  b.integers("baseline_mu_energy", c.baseline_mu_energy);
  b.integers("baseline_mu_time", c.baseline_mu_time);
  read_common_link(b, c);
  b.finish();
}

void read_repair(const json& j, RepairConfig& c) {
  Block b(j, "repair");
  b.integer("failed_node", c.failed_node);
  b.number("carrier_hz", c.carrier_hz);
  b.number("bandwidth_hz", c.bandwidth_hz);
  b.number("tx_gain_db", c.tx_gain_db);
  b.number("rx_gain_db", c.rx_gain_db);
  b.number("attenuation_db", c.attenuation_db);
  b.number("noise_level_db", c.noise_level_db);
  b.number("calibration_db", c.calibration_db);
  b.number("pmax_w", c.pmax_w);
  b.number("emax_j", c.emax_j);
  b.number("t_start_s", c.t_start_s);
  b.number("horizon_s", c.horizon_s);
  b.boolean("greedy", c.greedy);
  b.finish();
}

void read_solver(const json& j, SolverConfig& c) {
  Block b(j, "solver");
  b.number("dt_s", c.dt_s);
  b.number("epsilon_rel", c.epsilon_rel);
  b.integer("max_iterations", c.max_iterations);
  b.number("energy_rel_tol", c.energy_rel_tol);
  b.number("t_upper_factor", c.t_upper_factor);
  b.integer("max_bisections", c.max_bisections);
  b.integer("seed", c.seed);
  b.integer("field_order", c.field_order);
  b.integer("min_field_order", c.min_field_order);
  b.finish();
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

json leo_json(const LeoConfig& l) {
  return json{{"altitude_m", l.altitude_m}, {"velocity_mps", l.velocity_mps}, {"phase_offset_deg", l.phase_offset_deg}};
}

}  // namespace

void validate_scenario(const Scenario& s) {
  const std::size_t n = s.constellation.leos.size();
  require(s.downlink.attenuation_db.size() == n, "downlink.attenuation_db: one entry per LEOS required");
  require(s.uplink.attenuation_db.size() == n, "uplink.attenuation_db: one entry per LEOS required");
  require(s.uplink.carriers_hz.size() == n, "uplink.carriers_hz: one carrier per LEOS required");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = i + 1; k < n; ++k) {
      require(s.uplink.carriers_hz[i] != s.uplink.carriers_hz[k], "uplink.carriers_hz: carriers must be distinct");
    }
  }
  for (const auto* mu : {&s.uplink.baseline_mu_energy, &s.uplink.baseline_mu_time}) {
    require(mu->size() == n, "uplink baseline file splits need one entry per LEOS");
  }
  require(s.code.point == "msr" || s.code.point == "mbr", "code.point: expected \"msr\" or \"mbr\"");
  require(s.code.n_nodes == static_cast<int>(n), "code.N: must equal the number of LEOSs");
  require(s.code.file_bits > 0.0, "code.file_bits: must be positive");
  require(s.repair.failed_node >= 1 && s.repair.failed_node <= static_cast<int>(n),
          "repair.failed_node: must be a LEOS index between 1 and N");
  require(s.solver.dt_s > 0.0, "solver.dt_s: must be positive");
  require(s.solver.epsilon_rel > 0.0, "solver.epsilon_rel: must be positive");
  require(s.solver.max_iterations >= 1, "solver.max_iterations: must be at least 1");
  require(s.solver.energy_rel_tol > 0.0, "solver.energy_rel_tol: must be positive");
  require(s.solver.t_upper_factor > 1.0, "solver.t_upper_factor: must exceed 1");
  require(s.solver.max_bisections >= 1, "solver.max_bisections: must be at least 1");
  for (const char* which : {"downlink", "uplink", "repair"}) {
    const bool dl = std::string(which) == "downlink";
    const bool ul = std::string(which) == "uplink";
    const double pmax = dl ? s.downlink.pmax_w : ul ? s.uplink.pmax_w : s.repair.pmax_w;
    const double emax = dl ? s.downlink.emax_j : ul ? s.uplink.emax_j : s.repair.emax_j;
    const double ts = dl ? s.downlink.t_start_s : ul ? s.uplink.t_start_s : s.repair.t_start_s;
    const double horizon = dl ? s.downlink.horizon_s : ul ? s.uplink.horizon_s : s.repair.horizon_s;
    require(pmax > 0.0, std::string(which) + ".pmax_w: must be positive");
    require(emax > 0.0, std::string(which) + ".emax_j: must be positive");
    require(ts >= 0.0, std::string(which) + ".t_start_s: must be non-negative");
    require(horizon > 0.0, std::string(which) + ".horizon_s: must be positive");
  }
  try {
    build_constellation(s, Geos::kGeos1);
    const RegenParams p = build_regen_params(s);
    const ParamReport report = validate_params(p);
    if (!report.ok) throw ConfigError("code: " + report.violation);
    for (const auto* mu : {&s.uplink.baseline_mu_energy, &s.uplink.baseline_mu_time}) {
      int sum = 0;
      for (int k : *mu) {
        require(k >= 0 && k <= p.per_node_files, "uplink baseline file splits: entries must lie in [0, alpha]");
        sum += k;
      }
      require(sum == p.n_files, "uplink baseline file splits: entries must sum to M");
    }
    downlink_links(s).front().validate();
    for (const auto& l : uplink_links(s)) l.validate();
    repair_links(s).front().validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

Scenario parse_scenario(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text.empty() ? std::string("{}") : json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("scenario is not valid JSON: ") + e.what());
  }
  Scenario s;
  Block b(root, "scenario");
  if (const json* j = b.child("constellation")) read_constellation(*j, s.constellation);
  if (const json* j = b.child("code")) read_code(*j, s.code);
  if (const json* j = b.child("downlink")) read_downlink(*j, s.downlink);
  if (const json* j = b.child("uplink")) read_uplink(*j, s.uplink);
  if (const json* j = b.child("repair")) read_repair(*j, s.repair);
  if (const json* j = b.child("solver")) read_solver(*j, s.solver);
  b.finish();
  validate_scenario(s);
  return s;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scenario(text.str());
}

std::string to_json(const Scenario& s) {
  json leos = json::array();
  for (const auto& l : s.constellation.leos) leos.push_back(leo_json(l));
  const RegenParams p = build_regen_params(s);
  json root{
      {"constellation",
       {{"earth_radius_m", s.constellation.earth_radius_m},
        {"geos_altitude_m", s.constellation.geos_altitude_m},
        {"geos_coverage_angle_deg", s.constellation.geos_coverage_angle_deg},
        {"entry_boundary_angle_deg", s.constellation.entry_boundary_angle_deg},
        {"leos", leos}}},
      {"code",
       {{"point", s.code.point}, {"M", p.n_files}, {"N", p.n_nodes}, {"K", p.reconstruct_k},
        {"D", p.repair_d}, {"alpha", p.per_node_files}, {"beta", p.per_helper_files},
        {"file_bits", p.file_bits}}},
      {"downlink",
       {{"carrier_hz", s.downlink.carrier_hz}, {"bandwidth_hz", s.downlink.bandwidth_hz},
        {"tx_gain_db", s.downlink.tx_gain_db}, {"rx_gain_db", s.downlink.rx_gain_db},
        {"attenuation_db", s.downlink.attenuation_db}, {"noise_level_db", s.downlink.noise_level_db},
        {"calibration_db", s.downlink.calibration_db}, {"pmax_w", s.downlink.pmax_w},
        {"emax_j", s.downlink.emax_j}, {"t_start_s", s.downlink.t_start_s},
        {"horizon_s", s.downlink.horizon_s}}},
      {"uplink",
       {{"carriers_hz", s.uplink.carriers_hz}, {"baseline_mu_energy", s.uplink.baseline_mu_energy},
        {"baseline_mu_time", s.uplink.baseline_mu_time}, {"bandwidth_hz", s.uplink.bandwidth_hz},
        {"tx_gain_db", s.uplink.tx_gain_db}, {"rx_gain_db", s.uplink.rx_gain_db},
        {"attenuation_db", s.uplink.attenuation_db}, {"noise_level_db", s.uplink.noise_level_db},
        {"calibration_db", s.uplink.calibration_db}, {"pmax_w", s.uplink.pmax_w},
        {"emax_j", s.uplink.emax_j}, {"t_start_s", s.uplink.t_start_s},
        {"horizon_s", s.uplink.horizon_s}}},
      {"repair",
       {{"failed_node", s.repair.failed_node}, {"carrier_hz", s.repair.carrier_hz},
        {"bandwidth_hz", s.repair.bandwidth_hz}, {"tx_gain_db", s.repair.tx_gain_db},
        {"rx_gain_db", s.repair.rx_gain_db}, {"attenuation_db", s.repair.attenuation_db},
        {"noise_level_db", s.repair.noise_level_db}, {"calibration_db", s.repair.calibration_db},
        {"pmax_w", s.repair.pmax_w},
        {"emax_j", s.repair.emax_j}, {"t_start_s", s.repair.t_start_s},
        {"horizon_s", s.repair.horizon_s}, {"greedy", s.repair.greedy}}},
      {"solver",
       {{"dt_s", s.solver.dt_s}, {"epsilon_rel", s.solver.epsilon_rel},
        {"max_iterations", s.solver.max_iterations}, {"energy_rel_tol", s.solver.energy_rel_tol},
        {"t_upper_factor", s.solver.t_upper_factor}, {"max_bisections", s.solver.max_bisections},
        {"seed", s.solver.seed}, {"field_order", s.solver.field_order},
        {"min_field_order", s.solver.min_field_order}}}};
  return root.dump(2);
}

ConstellationScenario build_constellation(const Scenario& s, Geos reference) {
  std::vector<LeoOrbit> leos;
  for (const auto& l : s.constellation.leos) {
    leos.push_back(LeoOrbit{l.altitude_m, l.velocity_mps, deg_to_rad(l.phase_offset_deg)});
  }
  try {
    return ConstellationScenario(s.constellation.earth_radius_m, s.constellation.geos_altitude_m,
                                 deg_to_rad(s.constellation.geos_coverage_angle_deg), std::move(leos),
                                 deg_to_rad(s.constellation.entry_boundary_angle_deg), reference);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("constellation: ") + e.what());
  }
}

RegenPoint build_point(const Scenario& s) { return s.code.point == "mbr" ? RegenPoint::kMbr : RegenPoint::kMsr; }

RegenParams build_regen_params(const Scenario& s) {
  const CodeConfig& c = s.code;
  RegenParams p{c.n_files, c.n_nodes, c.reconstruct_k, c.repair_d, c.per_node_files, c.per_helper_files, c.file_bits};
  if (c.per_node_files == 0 || c.per_helper_files == 0) {
    if (c.reconstruct_k < 1 || c.repair_d < c.reconstruct_k || c.n_files < 1) {
      throw ConfigError("code: need 1 <= K <= D and M >= 1 to derive alpha and beta");
    }
    const OperatingPoint op = build_point(s) == RegenPoint::kMsr ? msr_point(c.n_files, c.reconstruct_k, c.repair_d)
                                                                 : mbr_point(c.n_files, c.reconstruct_k, c.repair_d);
    if (op.alpha.denominator() != 1 || op.beta.denominator() != 1) {
      throw ConfigError("code: the operating point has fractional alpha or beta; give them explicitly");
    }
    if (c.per_node_files == 0) p.per_node_files = static_cast<int>(op.alpha.numerator());
    if (c.per_helper_files == 0) p.per_helper_files = static_cast<int>(op.beta.numerator());
  }
  return p;
}

std::vector<LinkParams> downlink_links(const Scenario& s) {
  std::vector<LinkParams> out;
  for (double a : s.downlink.attenuation_db) {
    LinkParams l;
    l.carrier_hz = s.downlink.carrier_hz;
    l.bandwidth_hz = s.downlink.bandwidth_hz;
    l.tx_gain_db = s.downlink.tx_gain_db;
    l.rx_gain_db = s.downlink.rx_gain_db;
    l.attenuation_db = a;
    l.noise_level_db = s.downlink.noise_level_db;
    l.calibration_db = s.downlink.calibration_db;
    out.push_back(l);
  }
  return out;
}

std::vector<LinkParams> uplink_links(const Scenario& s) {
  std::vector<LinkParams> out;
  for (std::size_t i = 0; i < s.uplink.attenuation_db.size(); ++i) {
    LinkParams l;
    l.carrier_hz = i < s.uplink.carriers_hz.size() ? s.uplink.carriers_hz[i] : 0.0;
    l.bandwidth_hz = s.uplink.bandwidth_hz;
    l.tx_gain_db = s.uplink.tx_gain_db;
    l.rx_gain_db = s.uplink.rx_gain_db;
    l.attenuation_db = s.uplink.attenuation_db[i];
    l.noise_level_db = s.uplink.noise_level_db;
    l.calibration_db = s.uplink.calibration_db;
    out.push_back(l);
  }
  return out;
}

std::vector<LinkParams> repair_links(const Scenario& s) {
  LinkParams l;
  l.carrier_hz = s.repair.carrier_hz;
  l.bandwidth_hz = s.repair.bandwidth_hz;
  l.tx_gain_db = s.repair.tx_gain_db;
  l.rx_gain_db = s.repair.rx_gain_db;
  l.attenuation_db = s.repair.attenuation_db;
  l.noise_level_db = s.repair.noise_level_db;
  l.calibration_db = s.repair.calibration_db;
  return std::vector<LinkParams>(s.constellation.leos.size(), l);
}

DownlinkRequest build_downlink_request(const Scenario& s) {
  DownlinkRequest r;
  r.scenario = build_constellation(s, Geos::kGeos1);
  r.links = downlink_links(s);
  r.alpha = build_regen_params(s).per_node_files;
  r.file_bits = s.code.file_bits;
  r.t_start_s = s.downlink.t_start_s;
  r.horizon_s = s.downlink.horizon_s;
  r.pmax_w = s.downlink.pmax_w;
  r.emax_j = s.downlink.emax_j;
  r.dt_s = s.solver.dt_s;
  r.t_upper_factor = s.solver.t_upper_factor;
  r.energy_rel_tol = s.solver.energy_rel_tol;
  r.max_bisections = s.solver.max_bisections;
  return r;
}

namespace {

TimeSearchOptions time_options(const Scenario& s) {
  TimeSearchOptions o;
  o.t_upper_factor = s.solver.t_upper_factor;
  o.energy_rel_tol = s.solver.energy_rel_tol;
  o.max_bisections = s.solver.max_bisections;
  return o;
}

}  // namespace

UplinkRequest build_uplink_request(const Scenario& s) {
  UplinkRequest r;
  const RegenParams p = build_regen_params(s);
  r.scenario = build_constellation(s, Geos::kGeos2);
  r.links = uplink_links(s);
  r.n_files = p.n_files;
  r.alpha = p.per_node_files;
  r.file_bits = p.file_bits;
  r.t_start_s = s.uplink.t_start_s;
  r.horizon_s = s.uplink.horizon_s;
  r.pmax_w = s.uplink.pmax_w;
  r.emax_j = s.uplink.emax_j;
  r.dt_s = s.solver.dt_s;
  r.epsilon_rel = s.solver.epsilon_rel;
  r.max_iterations = s.solver.max_iterations;
  r.time_search = time_options(s);
  return r;
}

RepairRequest build_repair_request(const Scenario& s) {
  RepairRequest r;
  r.scenario = build_constellation(s, Geos::kGeos2);
  r.links = repair_links(s);
  r.params = build_regen_params(s);
  r.point = build_point(s);
  r.failed_node = static_cast<std::size_t>(s.repair.failed_node - 1);
  r.t_start_s = s.repair.t_start_s;
  r.horizon_s = s.repair.horizon_s;
  r.pmax_w = s.repair.pmax_w;
  r.emax_j = s.repair.emax_j;
  r.dt_s = s.solver.dt_s;
  r.epsilon_rel = s.solver.epsilon_rel;
  r.max_iterations = s.solver.max_iterations;
  r.greedy = s.repair.greedy;
  r.time_search = time_options(s);
  return r;
}

}  // namespace georelay
