#include "dwlab/config.hpp"

#include <algorithm>
#include <cerrno>
#include <climits>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <sstream>

namespace dwlab {

bool RunConfig::operator==(const RunConfig& o) const {
  return write_config(*this) == write_config(o);
}

namespace {

struct Entry {
  std::string value;
  int line = 0;  // 0 means default / override
};

using Table = std::map<std::string, Entry>;

[[noreturn]] void fail(int line, const std::string& msg) {
  if (line > 0)
    throw ConfigError("config line " + std::to_string(line) + ": " + msg);
  throw ConfigError("config: " + msg);
}

const char* const kKeys[] = {
    "schema_version", "model.lambda",
    "grid.x_min", "grid.x_max", "grid.n",
    "relax.x_min", "relax.x_max", "relax.n",
    "relax.kind", "relax.method",
    "relax.initial_amplitude", "relax.amplitude_decay", "relax.trials_per_stage",
    "relax.max_stages", "relax.convergence_tol", "relax.rng_seed",
    "flow.step", "flow.tol", "flow.max_iters",
    "evolve.dt", "evolve.t_end", "evolve.boundary",
    "evolve.sponge_width", "evolve.sponge_strength", "evolve.snapshot_stride",
    "collision.left", "collision.right",
    "collision.x_left", "collision.x_right",
    "collision.v_left", "collision.v_right",
    "classify.noise_floor", "classify.capture_radius",
    "classify.persistence_fraction", "classify.oscillation_amplitude",
    "classify.min_oscillations", "classify.presence_charge",
    "classify.decay_ratio",
    "scan.v_values", "scan.workers",
    "heatmap.quantity", "heatmap.limit", "heatmap.x_stride", "heatmap.t_stride",
};

bool known_key(const std::string& k) {
  for (const char* s : kKeys)
    if (k == s) return true;
  return false;
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_double(const Entry& e, const std::string& key) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(e.value.c_str(), &end);
  if (end == e.value.c_str() || *end != '\0' || errno == ERANGE || !std::isfinite(v))
    fail(e.line, key + ": expected a finite number, got '" + e.value + "'");
  return v;
}

long parse_long(const Entry& e, const std::string& key) {
  errno = 0;
  char* end = nullptr;
  const long v = std::strtol(e.value.c_str(), &end, 10);
  if (end == e.value.c_str() || *end != '\0' || errno == ERANGE)
    fail(e.line, key + ": expected an integer, got '" + e.value + "'");
  return v;
}

int parse_int(const Entry& e, const std::string& key) {
  const long v = parse_long(e, key);
  if (v < INT_MIN || v > INT_MAX) fail(e.line, key + ": integer out of range");
  return static_cast<int>(v);
}

std::vector<double> parse_list(const Entry& e, const std::string& key) {
  std::vector<double> out;
  const std::string& s = e.value;
  if (trim(s).empty()) return out;
  size_t pos = 0;
  while (pos <= s.size()) {
    const size_t next = s.find(',', pos);
    const std::string item = trim(s.substr(pos, next == std::string::npos
                                                    ? std::string::npos
                                                    : next - pos));
    Entry tmp{item, e.line};
    out.push_back(parse_double(tmp, key));
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return out;
}

struct Schema {
  Table table;

  const Entry* find(const std::string& key) const {
    auto it = table.find(key);
    return it == table.end() ? nullptr : &it->second;
  }
  int line_of(const std::string& key) const {
    const Entry* e = find(key);
    return e ? e->line : 0;
  }
  void get(const std::string& key, double& dst) const {
    if (const Entry* e = find(key)) dst = parse_double(*e, key);
  }
  void get(const std::string& key, int& dst) const {
    if (const Entry* e = find(key)) dst = parse_int(*e, key);
  }
  void get(const std::string& key, long& dst) const {
    if (const Entry* e = find(key)) dst = parse_long(*e, key);
  }
  void get(const std::string& key, std::uint64_t& dst) const {
    if (const Entry* e = find(key)) {
      errno = 0;
      char* end = nullptr;
      const unsigned long long v = std::strtoull(e->value.c_str(), &end, 10);
      if (end == e->value.c_str() || *end != '\0' || errno == ERANGE ||
          e->value.find('-') != std::string::npos)
        fail(e->line, key + ": expected a non-negative integer, got '" + e->value + "'");
      dst = static_cast<std::uint64_t>(v);
    }
  }
  void get(const std::string& key, std::vector<double>& dst) const {
    if (const Entry* e = find(key)) dst = parse_list(*e, key);
  }
};

RelaxTarget parse_target(const Entry& e, const std::string& key, bool allow_all) {
  const std::string& v = e.value;
  if (v == "kink") return RelaxTarget::kink;
  if (v == "antikink") return RelaxTarget::antikink;
  if (v == "psi_plus") return RelaxTarget::psi_plus;
  if (v == "psi_minus") return RelaxTarget::psi_minus;
  if (v == "molecule") return RelaxTarget::molecule;
  if (allow_all && v == "all") return RelaxTarget::all;
  fail(e.line, key + ": unknown kind '" + v + "'");
}

}  // namespace

const char* relax_target_name(RelaxTarget k) {
  switch (k) {
    case RelaxTarget::kink: return "kink";
    case RelaxTarget::antikink: return "antikink";
    case RelaxTarget::psi_plus: return "psi_plus";
    case RelaxTarget::psi_minus: return "psi_minus";
    case RelaxTarget::molecule: return "molecule";
    case RelaxTarget::all: return "all";
  }
  return "kink";
}

const char* relax_method_name(RelaxMethodChoice m) {
  switch (m) {
    case RelaxMethodChoice::stochastic: return "stochastic";
    case RelaxMethodChoice::gradient_flow: return "gradient_flow";
    case RelaxMethodChoice::hybrid: return "hybrid";
  }
  return "hybrid";
}

RunConfig read_config(const std::string& text,
                      const std::vector<std::string>& overrides) {
  Schema sch;
  {
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
      ++line;
      const size_t hash = raw.find('#');
      if (hash != std::string::npos) raw.erase(hash);
      const std::string s = trim(raw);
      if (s.empty()) continue;
      const size_t eq = s.find('=');
      if (eq == std::string::npos) fail(line, "expected key=value, got '" + s + "'");
      const std::string key = trim(s.substr(0, eq));
      const std::string value = trim(s.substr(eq + 1));
      if (!known_key(key)) fail(line, "unknown key '" + key + "'");
      if (sch.table.count(key)) fail(line, "duplicate key '" + key + "'");
      sch.table[key] = Entry{value, line};
    }
  }
  for (const std::string& ov : overrides) {
    const size_t eq = ov.find('=');
    if (eq == std::string::npos)
      throw ConfigError("override '" + ov + "': expected key=value");
    const std::string key = trim(ov.substr(0, eq));
    if (!known_key(key)) throw ConfigError("override: unknown key '" + key + "'");
    sch.table[key] = Entry{trim(ov.substr(eq + 1)), 0};
  }

  RunConfig c;
  sch.get("schema_version", c.schema_version);
  if (c.schema_version != 1)
    fail(sch.line_of("schema_version"),
         "unsupported schema_version " + std::to_string(c.schema_version));

  sch.get("model.lambda", c.lambda);
  if (!(c.lambda >= 0.0))
    fail(sch.line_of("model.lambda"), "model.lambda must be >= 0");

  auto read_grid = [&](const char* prefix, Grid& g) {
    double x_min = g.x_min, x_max = g.x_max;
    int n = g.n;
    sch.get(std::string(prefix) + ".x_min", x_min);
    sch.get(std::string(prefix) + ".x_max", x_max);
    sch.get(std::string(prefix) + ".n", n);
    if (!(x_min < x_max))
      fail(sch.line_of(std::string(prefix) + ".x_min"),
           std::string(prefix) + ": require x_min < x_max");
    if (n < 8)
      fail(sch.line_of(std::string(prefix) + ".n"),
           std::string(prefix) + ".n must be >= 8");
    g = Grid{x_min, x_max, n};
  };
  read_grid("grid", c.grid);
  read_grid("relax", c.relax_grid);

  if (const Entry* e = sch.find("relax.kind"))
    c.relax_kind = parse_target(*e, "relax.kind", true);
  if (const Entry* e = sch.find("relax.method")) {
    if (e->value == "stochastic") c.relax_method = RelaxMethodChoice::stochastic;
    else if (e->value == "gradient_flow") c.relax_method = RelaxMethodChoice::gradient_flow;
    else if (e->value == "hybrid") c.relax_method = RelaxMethodChoice::hybrid;
    else fail(e->line, "relax.method: unknown method '" + e->value + "'");
  }

  sch.get("relax.initial_amplitude", c.schedule.initial_amplitude);
  if (!(c.schedule.initial_amplitude > 0.0))
    fail(sch.line_of("relax.initial_amplitude"), "relax.initial_amplitude must be > 0");
  sch.get("relax.amplitude_decay", c.schedule.amplitude_decay);
  if (!(c.schedule.amplitude_decay > 0.0 && c.schedule.amplitude_decay <= 1.0))
    fail(sch.line_of("relax.amplitude_decay"), "relax.amplitude_decay must be in (0,1]");
  sch.get("relax.trials_per_stage", c.schedule.trials_per_stage);
  if (c.schedule.trials_per_stage < 0)
    fail(sch.line_of("relax.trials_per_stage"), "relax.trials_per_stage must be >= 0");
  sch.get("relax.max_stages", c.schedule.max_stages);
  if (c.schedule.max_stages < 1)
    fail(sch.line_of("relax.max_stages"), "relax.max_stages must be >= 1");
  sch.get("relax.convergence_tol", c.schedule.convergence_tol);
  if (!(c.schedule.convergence_tol > 0.0))
    fail(sch.line_of("relax.convergence_tol"), "relax.convergence_tol must be > 0");
  sch.get("relax.rng_seed", c.schedule.rng_seed);

  sch.get("flow.step", c.flow_step);
  if (c.flow_step < 0.0)
    fail(sch.line_of("flow.step"), "flow.step must be >= 0 (0 = auto)");
  if (c.flow_step > 0.0 && c.flow_step >= 0.5 * c.relax_grid.dx() * c.relax_grid.dx())
    fail(sch.line_of("flow.step"), "flow.step must be < dx^2/2 on the relax grid");
  sch.get("flow.tol", c.flow_tol);
  if (!(c.flow_tol > 0.0)) fail(sch.line_of("flow.tol"), "flow.tol must be > 0");
  sch.get("flow.max_iters", c.flow_max_iters);
  if (c.flow_max_iters < 1)
    fail(sch.line_of("flow.max_iters"), "flow.max_iters must be >= 1");

  sch.get("evolve.dt", c.evolve.dt);
  if (!(c.evolve.dt > 0.0)) fail(sch.line_of("evolve.dt"), "evolve.dt must be > 0");
  if (c.evolve.dt > 0.5 * c.grid.dx())
    fail(sch.line_of("evolve.dt"),
         "evolve.dt violates the CFL bound dt <= 0.5*dx (dx = " +
             format_double(c.grid.dx()) + ")");
  sch.get("evolve.t_end", c.evolve.t_end);
  if (!(c.evolve.t_end > 0.0))
    fail(sch.line_of("evolve.t_end"), "evolve.t_end must be > 0");
  if (const Entry* e = sch.find("evolve.boundary")) {
    if (e->value == "pinned_vacuum") c.evolve.boundary = BoundaryKind::pinned_vacuum;
    else if (e->value == "sponge") c.evolve.boundary = BoundaryKind::sponge;
    else fail(e->line, "evolve.boundary: unknown boundary '" + e->value + "'");
  }
  sch.get("evolve.sponge_width", c.evolve.sponge_width);
  sch.get("evolve.sponge_strength", c.evolve.sponge_strength);
  sch.get("evolve.snapshot_stride", c.evolve.snapshot_stride);
  if (c.evolve.snapshot_stride < 1)
    fail(sch.line_of("evolve.snapshot_stride"), "evolve.snapshot_stride must be >= 1");
  try {
    c.evolve.validate(c.grid);
  } catch (const std::exception& ex) {
    fail(sch.line_of("evolve.dt"), ex.what());
  }

  if (const Entry* e = sch.find("collision.left"))
    c.collision_left = parse_target(*e, "collision.left", false);
  if (c.collision_left == RelaxTarget::molecule)
    fail(sch.line_of("collision.left"), "collision.left: molecule cannot be boosted as a collision partner");
  if (const Entry* e = sch.find("collision.right")) {
    if (e->value != "mirror") parse_target(*e, "collision.right", false);
    if (e->value == "molecule")
      fail(e->line, "collision.right: molecule cannot be boosted as a collision partner");
    c.collision_right = e->value;
  }
  sch.get("collision.x_left", c.x_left);
  sch.get("collision.x_right", c.x_right);
  if (!(c.x_left < c.x_right))
    fail(sch.line_of("collision.x_left"), "collision: require x_left < x_right");
  sch.get("collision.v_left", c.v_left);
  sch.get("collision.v_right", c.v_right);
  if (!(std::fabs(c.v_left) < 1.0))
    fail(sch.line_of("collision.v_left"), "collision.v_left: require |v| < 1");
  if (!(std::fabs(c.v_right) < 1.0))
    fail(sch.line_of("collision.v_right"), "collision.v_right: require |v| < 1");

  sch.get("classify.noise_floor", c.thresholds.noise_floor);
  if (!(c.thresholds.noise_floor > 0.0))
    fail(sch.line_of("classify.noise_floor"), "classify.noise_floor must be > 0");
  if (const Entry* e = sch.find("classify.capture_radius")) {
    c.thresholds.capture_radius = parse_double(*e, "classify.capture_radius");
    if (!(c.thresholds.capture_radius > 0.0))
      fail(e->line, "classify.capture_radius must be > 0");
  } else {
    // Dressed-kink half-width is 1/sqrt(lambda) for 0 < lambda < 2, the
    // bare 1/sqrt(2) otherwise; the default radius follows the model.
    const double hw = (c.lambda > 0.0 && c.lambda < 2.0)
                          ? 1.0 / std::sqrt(c.lambda)
                          : kKinkHalfWidth;
    c.thresholds.capture_radius = 4.0 * hw;
  }
  sch.get("classify.persistence_fraction", c.thresholds.persistence_fraction);
  if (!(c.thresholds.persistence_fraction > 0.0 && c.thresholds.persistence_fraction < 1.0))
    fail(sch.line_of("classify.persistence_fraction"),
         "classify.persistence_fraction must be in (0,1)");
  sch.get("classify.oscillation_amplitude", c.thresholds.oscillation_amplitude);
  if (!(c.thresholds.oscillation_amplitude > 0.0))
    fail(sch.line_of("classify.oscillation_amplitude"),
         "classify.oscillation_amplitude must be > 0");
  sch.get("classify.min_oscillations", c.thresholds.min_oscillations);
  if (c.thresholds.min_oscillations < 1)
    fail(sch.line_of("classify.min_oscillations"), "classify.min_oscillations must be >= 1");
  sch.get("classify.presence_charge", c.thresholds.presence_charge);
  if (!(c.thresholds.presence_charge > 0.0 && c.thresholds.presence_charge < 2.0))
    fail(sch.line_of("classify.presence_charge"), "classify.presence_charge must be in (0,2)");
  sch.get("classify.decay_ratio", c.thresholds.decay_ratio);
  if (!(c.thresholds.decay_ratio > 0.0 && c.thresholds.decay_ratio <= 1.0))
    fail(sch.line_of("classify.decay_ratio"), "classify.decay_ratio must be in (0,1]");

  sch.get("scan.v_values", c.scan_v);
  for (double v : c.scan_v)
    if (!(v > 0.0 && v < 1.0))
      fail(sch.line_of("scan.v_values"), "scan.v_values entries must be in (0,1)");
  sch.get("scan.workers", c.scan_workers);
  if (c.scan_workers < 0)
    fail(sch.line_of("scan.workers"), "scan.workers must be >= 0 (0 = auto)");

  if (const Entry* e = sch.find("heatmap.quantity")) {
    if (e->value == "charge_density") c.heatmap.quantity = HeatmapQuantity::charge_density;
    else if (e->value == "energy_density") c.heatmap.quantity = HeatmapQuantity::energy_density;
    else fail(e->line, "heatmap.quantity: unknown quantity '" + e->value + "'");
  }
  sch.get("heatmap.limit", c.heatmap.limit);
  if (c.heatmap.limit < 0.0)
    fail(sch.line_of("heatmap.limit"), "heatmap.limit must be >= 0 (0 = auto)");
  sch.get("heatmap.x_stride", c.heatmap.x_stride);
  sch.get("heatmap.t_stride", c.heatmap.t_stride);
  if (c.heatmap.x_stride < 1 || c.heatmap.t_stride < 1)
    fail(std::max(sch.line_of("heatmap.x_stride"), sch.line_of("heatmap.t_stride")),
         "heatmap strides must be >= 1");

  return c;
}

std::string write_config(const RunConfig& c) {
  std::string out;
  auto kv = [&out](const char* k, const std::string& v) {
    out += k;
    out += '=';
    out += v;
    out += '\n';
  };
  auto kvd = [&](const char* k, double v) { kv(k, format_double(v)); };
  auto kvi = [&](const char* k, long long v) { kv(k, std::to_string(v)); };

  kvi("schema_version", c.schema_version);
  kvd("model.lambda", c.lambda);
  kvd("grid.x_min", c.grid.x_min);
  kvd("grid.x_max", c.grid.x_max);
  kvi("grid.n", c.grid.n);
  kvd("relax.x_min", c.relax_grid.x_min);
  kvd("relax.x_max", c.relax_grid.x_max);
  kvi("relax.n", c.relax_grid.n);
  kv("relax.kind", relax_target_name(c.relax_kind));
  kv("relax.method", relax_method_name(c.relax_method));
  kvd("relax.initial_amplitude", c.schedule.initial_amplitude);
  kvd("relax.amplitude_decay", c.schedule.amplitude_decay);
  kvi("relax.trials_per_stage", c.schedule.trials_per_stage);
  kvi("relax.max_stages", c.schedule.max_stages);
  kvd("relax.convergence_tol", c.schedule.convergence_tol);
  kv("relax.rng_seed", std::to_string(c.schedule.rng_seed));
  kvd("flow.step", c.flow_step);
  kvd("flow.tol", c.flow_tol);
  kvi("flow.max_iters", c.flow_max_iters);
  kvd("evolve.dt", c.evolve.dt);
  kvd("evolve.t_end", c.evolve.t_end);
  kv("evolve.boundary",
     c.evolve.boundary == BoundaryKind::sponge ? "sponge" : "pinned_vacuum");
  kvd("evolve.sponge_width", c.evolve.sponge_width);
  kvd("evolve.sponge_strength", c.evolve.sponge_strength);
  kvi("evolve.snapshot_stride", c.evolve.snapshot_stride);
  kv("collision.left", relax_target_name(c.collision_left));
  kv("collision.right", c.collision_right);
  kvd("collision.x_left", c.x_left);
  kvd("collision.x_right", c.x_right);
  kvd("collision.v_left", c.v_left);
  kvd("collision.v_right", c.v_right);
  kvd("classify.noise_floor", c.thresholds.noise_floor);
  kvd("classify.capture_radius", c.thresholds.capture_radius);
  kvd("classify.persistence_fraction", c.thresholds.persistence_fraction);
  kvd("classify.oscillation_amplitude", c.thresholds.oscillation_amplitude);
  kvi("classify.min_oscillations", c.thresholds.min_oscillations);
  kvd("classify.presence_charge", c.thresholds.presence_charge);
  kvd("classify.decay_ratio", c.thresholds.decay_ratio);
  {
    std::string list;
    for (size_t i = 0; i < c.scan_v.size(); ++i) {
      if (i) list += ',';
      list += format_double(c.scan_v[i]);
    }
    kv("scan.v_values", list);
  }
  kvi("scan.workers", c.scan_workers);
  kv("heatmap.quantity", c.heatmap.quantity == HeatmapQuantity::energy_density
                             ? "energy_density"
                             : "charge_density");
  kvd("heatmap.limit", c.heatmap.limit);
  kvi("heatmap.x_stride", c.heatmap.x_stride);
  kvi("heatmap.t_stride", c.heatmap.t_stride);
  return out;
}

}  // namespace dwlab
