#include "impulse/scenarios.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <future>
#include <set>
#include <sstream>

#include "impulse/errors.hpp"

namespace impulse {

using nlohmann::json;

namespace {

// Reads one JSON object, tracking which keys were consumed so leftovers can
// be reported as unknown.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string where) : obj_(obj), where_(std::move(where)) {
    if (!obj_.is_object()) throw ValidationError(where_ + ": expected an object");
  }

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  void number(const std::string& key, double& out) {
    if (const json* j = find(key)) {
      if (!j->is_number()) throw ValidationError(path(key) + ": expected a number");
      out = j->get<double>();
    }
  }

  template <typename Int>
  void integer(const std::string& key, Int& out) {
    if (const json* j = find(key)) {
      if (!j->is_number_integer() || (!j->is_number_unsigned() && j->get<long long>() < 0)) {
        throw ValidationError(path(key) + ": expected a non-negative integer");
      }
      out = j->get<Int>();
    }
  }

  void boolean(const std::string& key, bool& out) {
    if (const json* j = find(key)) {
      if (!j->is_boolean()) throw ValidationError(path(key) + ": expected true or false");
      out = j->get<bool>();
    }
  }

  void string(const std::string& key, std::string& out) {
    if (const json* j = find(key)) {
      if (!j->is_string()) throw ValidationError(path(key) + ": expected a string");
      out = j->get<std::string>();
    }
  }

  void finish() const {
    for (const auto& [key, _] : obj_.items()) {
      if (!seen_.count(key)) throw ValidationError("unknown key '" + path(key) + "'");
    }
  }

  std::string path(const std::string& key) const {
    return where_.empty() ? key : where_ + "." + key;
  }

 private:
  const json& obj_;
  std::string where_;
  std::set<std::string> seen_;
};

json damping_to_json(const DampingModel& model) {
  return std::visit(
      [](const auto& m) -> json {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, ConstantDamping>) {
          return {{"kind", "constant"}, {"value", m.value}};
        } else if constexpr (std::is_same_v<T, TimeVaryingDamping>) {
          json j = {{"kind", "time_varying"},
                    {"seed", m.seed},
                    {"time_constant", m.time_constant},
                    {"noise_scale", m.noise_scale},
                    {"bias", nullptr}};
          if (m.bias) j["bias"] = *m.bias;
          return j;
        } else {
          json bp = json::array();
          for (const auto& [t, d] : m.breakpoints) bp.push_back(json::array({t, d}));
          return {{"kind", "schedule"}, {"breakpoints", bp}};
        }
      },
      model);
}

DampingModel damping_from_json(const json& j) {
  ObjectReader r(j, "damping");
  std::string kind = "constant";
  r.string("kind", kind);
  DampingModel model;
  if (kind == "constant") {
    ConstantDamping c;
    r.number("value", c.value);
    model = c;
  } else if (kind == "time_varying") {
    TimeVaryingDamping tv;
    r.integer("seed", tv.seed);
    r.number("time_constant", tv.time_constant);
    r.number("noise_scale", tv.noise_scale);
    if (const json* b = r.find("bias"); b && !b->is_null()) {
      if (!b->is_number()) throw ValidationError("damping.bias: expected a number or null");
      tv.bias = b->get<double>();
    }
    model = tv;
  } else if (kind == "schedule") {
    ScheduledDamping s;
    if (const json* bp = r.find("breakpoints")) {
      if (!bp->is_array()) throw ValidationError("damping.breakpoints: expected an array");
      for (const auto& p : *bp) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
          throw ValidationError("damping.breakpoints: expected [t, d] number pairs");
        }
        s.breakpoints.emplace_back(p[0].get<double>(), p[1].get<double>());
      }
    }
    model = s;
  } else {
    throw ValidationError("damping.kind must be constant, time_varying or schedule (got '" +
                          kind + "')");
  }
  r.finish();
  return model;
}

ScenarioSpec table1_base(std::string name) {
  ScenarioSpec spec;
  spec.name = std::move(name);
  spec.plant = PlantParams{};  // m=0.1 K=10 D=0.5 d in [0.15, 1.5]
  spec.controller = ControllerParams{0.6, 1.5, CMode::Auto};
  spec.executor = ExecutorConfig{};
  spec.initial = {0.0, 0.5, 0.0};
  return spec;
}

template <typename Int>
Int parse_integer(std::string_view text, const std::string& path) {
  Int value{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw ValidationError(path + ": '" + std::string(text) + "' is not an integer");
  }
  return value;
}

double parse_double(std::string_view text, const std::string& path) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw ValidationError(path + ": '" + std::string(text) + "' is not a number");
  }
  return value;
}

json* locate_key(json& doc, std::string_view path) {
  json* node = &doc;
  std::string_view rest = path;
  while (true) {
    const auto dot = rest.find('.');
    const std::string part(rest.substr(0, dot));
    if (!node->is_object() || !node->contains(part)) {
      throw ValidationError("unknown key '" + std::string(path) + "'");
    }
    node = &(*node)[part];
    if (dot == std::string_view::npos) break;
    rest = rest.substr(dot + 1);
  }
  if (node->is_object() || node->is_array()) {
    throw ValidationError("key '" + std::string(path) + "' is not a scalar");
  }
  return node;
}

}  // namespace

std::string_view to_string(Variants v) noexcept {
  switch (v) {
    case Variants::ImpulsesOn: return "impulses_on";
    case Variants::ImpulsesOff: return "impulses_off";
    case Variants::Both: return "both";
  }
  return "both";
}

Variants parse_variants(std::string_view text) {
  if (text == "impulses_on") return Variants::ImpulsesOn;
  if (text == "impulses_off") return Variants::ImpulsesOff;
  if (text == "both") return Variants::Both;
  throw ValidationError("variants must be impulses_on, impulses_off or both (got '" +
                        std::string(text) + "')");
}

void ScenarioSpec::validate() const {
  if (name.empty()) throw ValidationError("name must not be empty");
  plant.validate();
  impulse::validate(damping);
  friction.validate();
  controller.validate();
  executor.validate();
  if (!is_finite(initial)) throw ValidationError("initial state must be finite");
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"fig1_overdamped", "fig1_underdamped",
                                                 "fig2_underdamped_hybrid", "fig4_timevarying",
                                                 "fig5_coulomb"};
  return names;
}

ScenarioSpec preset(std::string_view name) {
  ScenarioSpec spec = table1_base(std::string(name));
  if (name == "fig1_overdamped") {
    spec.damping = ConstantDamping{1.5};
    spec.variants = Variants::ImpulsesOff;
  } else if (name == "fig1_underdamped") {
    spec.damping = ConstantDamping{0.15};
    spec.variants = Variants::ImpulsesOff;
  } else if (name == "fig2_underdamped_hybrid") {
    spec.damping = ConstantDamping{0.15};
  } else if (name == "fig4_timevarying") {
    spec.damping = TimeVaryingDamping{42, 0.05, 0.3, std::nullopt};
  } else if (name == "fig5_coulomb") {
    spec.damping = ConstantDamping{0.15};
    spec.plant.F_c = 1.0;
    spec.friction = FrictionConfig{true, 1e-5};
    spec.initial = {0.0, 0.15, 0.0};
    // Near the origin each sticking impulse only shaves O(x^2) off the
    // position, so a 1e-6 band would take ~1e5 jumps to reach.
    spec.executor.deadband_x = 1e-3;
  } else {
    throw ValidationError("unknown scenario '" + std::string(name) + "'");
  }
  spec.validate();
  return spec;
}

json to_json(const ScenarioSpec& spec) {
  const auto& p = spec.plant;
  const auto& e = spec.executor;
  return {
      {"name", spec.name},
      {"plant",
       {{"m", p.m}, {"K", p.K}, {"D", p.D}, {"d_lo", p.d_lo}, {"d_hi", p.d_hi}, {"F_c", p.F_c},
        {"x_r", p.x_r}}},
      {"damping", damping_to_json(spec.damping)},
      {"friction", {{"enabled", spec.friction.enabled}, {"v_stick", spec.friction.v_stick}}},
      {"controller",
       {{"gamma", spec.controller.gamma},
        {"d_hi_assumed", spec.controller.d_hi_assumed},
        {"c_mode", std::string(to_string(spec.controller.c_mode))}}},
      {"executor",
       {{"dt", e.dt},
        {"t_end", e.t_end},
        {"event_tol", e.event_tol},
        {"deadband_x", e.deadband_x},
        {"deadband_v", e.deadband_v},
        {"bisection_iters", e.bisection_iters},
        {"max_jumps", e.max_jumps},
        {"settle_tol", e.settle_tol}}},
      {"initial", {{"t", spec.initial.t}, {"x", spec.initial.x}, {"v", spec.initial.v}}},
      {"variants", std::string(to_string(spec.variants))},
  };
}

ScenarioSpec scenario_from_json(const json& doc) {
  ObjectReader top(doc, "");
  ScenarioSpec spec = table1_base("");
  top.string("name", spec.name);

  if (const json* j = top.find("plant")) {
    ObjectReader r(*j, "plant");
    r.number("m", spec.plant.m);
    r.number("K", spec.plant.K);
    r.number("D", spec.plant.D);
    r.number("d_lo", spec.plant.d_lo);
    r.number("d_hi", spec.plant.d_hi);
    r.number("F_c", spec.plant.F_c);
    r.number("x_r", spec.plant.x_r);
    r.finish();
  }
  if (const json* j = top.find("damping")) spec.damping = damping_from_json(*j);
  if (const json* j = top.find("friction")) {
    ObjectReader r(*j, "friction");
    r.boolean("enabled", spec.friction.enabled);
    r.number("v_stick", spec.friction.v_stick);
    r.finish();
  }
  if (const json* j = top.find("controller")) {
    ObjectReader r(*j, "controller");
    r.number("gamma", spec.controller.gamma);
    r.number("d_hi_assumed", spec.controller.d_hi_assumed);
    std::string mode(to_string(spec.controller.c_mode));
    r.string("c_mode", mode);
    spec.controller.c_mode = parse_c_mode(mode);
    r.finish();
  }
  if (const json* j = top.find("executor")) {
    ObjectReader r(*j, "executor");
    auto& e = spec.executor;
    r.number("dt", e.dt);
    r.number("t_end", e.t_end);
    r.number("event_tol", e.event_tol);
    r.number("deadband_x", e.deadband_x);
    r.number("deadband_v", e.deadband_v);
    r.integer("bisection_iters", e.bisection_iters);
    r.integer("max_jumps", e.max_jumps);
    r.number("settle_tol", e.settle_tol);
    r.finish();
  }
  if (const json* j = top.find("initial")) {
    ObjectReader r(*j, "initial");
    r.number("t", spec.initial.t);
    r.number("x", spec.initial.x);
    r.number("v", spec.initial.v);
    r.finish();
  }
  std::string variants(to_string(spec.variants));
  top.string("variants", variants);
  spec.variants = parse_variants(variants);
  top.finish();

  spec.validate();
  return spec;
}

std::string dump_scenario(const ScenarioSpec& spec) { return to_json(spec).dump(2) + "\n"; }

ScenarioSpec parse_scenario(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("scenario parse error: ") + e.what());
  }
  return scenario_from_json(doc);
}

ScenarioSpec load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open scenario file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

void save_scenario_file(const ScenarioSpec& spec, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write scenario file '" + path.string() + "'");
  out << dump_scenario(spec);
}

ScenarioSpec resolve_scenario(std::string_view name_or_path) {
  for (const auto& n : preset_names()) {
    if (n == name_or_path) return preset(n);
  }
  const std::filesystem::path p(name_or_path);
  if (std::filesystem::exists(p)) return load_scenario_file(p);
  throw ValidationError("unknown scenario '" + std::string(name_or_path) +
                        "' (not a preset name or an existing file)");
}

ScenarioSpec apply_override(const ScenarioSpec& spec, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ValidationError("override '" + std::string(assignment) + "' is not of the form path=value");
  }
  return apply_override(spec, assignment.substr(0, eq), assignment.substr(eq + 1));
}

ScenarioSpec apply_override(const ScenarioSpec& spec, std::string_view path,
                            std::string_view value) {
  const std::string key(path);
  json doc = to_json(spec);
  json* node = locate_key(doc, path);

  if (key == "damping.kind") {
    doc["damping"] = json{{"kind", std::string(value)}};
  } else if (node->is_number_float()) {
    *node = parse_double(value, key);
  } else if (node->is_number_unsigned() || node->is_number_integer()) {
    *node = parse_integer<std::uint64_t>(value, key);
  } else if (node->is_boolean()) {
    if (value == "true") {
      *node = true;
    } else if (value == "false") {
      *node = false;
    } else {
      throw ValidationError(key + ": expected true or false");
    }
  } else if (node->is_string()) {
    *node = std::string(value);
  } else if (node->is_null()) {
    if (value == "null") {
      *node = nullptr;
    } else {
      *node = parse_double(value, key);
    }
  }
  return scenario_from_json(doc);
}

void require_override_path(const ScenarioSpec& spec, std::string_view path) {
  json doc = to_json(spec);
  locate_key(doc, path);
}

Comparison compare(const std::optional<SettlingReport>& on,
                   const std::optional<SettlingReport>& off) {
  Comparison cmp;
  cmp.on = on;
  cmp.off = off;
  if (on && off) {
    if (on->settling_time && off->settling_time) {
      cmp.settling_delta = *on->settling_time - *off->settling_time;
      if (*off->settling_time > 0.0) cmp.settling_ratio = *on->settling_time / *off->settling_time;
    }
    cmp.jump_delta = static_cast<long long>(on->jump_count) - static_cast<long long>(off->jump_count);
    if (off->peak_speed > 0.0) cmp.peak_speed_ratio = on->peak_speed / off->peak_speed;
  }
  return cmp;
}

ScenarioResult run_scenario(const ScenarioSpec& spec) {
  spec.validate();
  auto launch = [&spec](bool impulses) {
    return std::async(std::launch::async, [&spec, impulses] {
      return run(spec.initial, spec.plant, spec.damping, spec.friction, spec.controller,
                 spec.executor, impulses);
    });
  };

  ScenarioResult result;
  std::future<Trajectory> on_future;
  if (spec.runs_on()) on_future = launch(true);
  if (spec.runs_off()) {
    result.off = run(spec.initial, spec.plant, spec.damping, spec.friction, spec.controller,
                     spec.executor, false);
  }
  if (on_future.valid()) result.on = on_future.get();

  std::optional<SettlingReport> on_rep;
  std::optional<SettlingReport> off_rep;
  if (result.on) on_rep = result.on->metrics;
  if (result.off) off_rep = result.off->metrics;
  result.comparison = compare(on_rep, off_rep);
  return result;
}

json to_json(const SettlingReport& rep) {
  json j = {{"settling_time", nullptr},
            {"overshoot", rep.overshoot},
            {"peak_speed", rep.peak_speed},
            {"jump_count", rep.jump_count},
            {"final_state",
             {{"t", rep.final_state.t}, {"x", rep.final_state.x}, {"v", rep.final_state.v}}},
            {"iae", rep.iae}};
  if (rep.settling_time) j["settling_time"] = *rep.settling_time;
  return j;
}

json to_json(const Comparison& cmp) {
  auto opt = [](const std::optional<double>& v) -> json {
    return v ? json(*v) : json(nullptr);
  };
  json j = {{"on", cmp.on ? to_json(*cmp.on) : json(nullptr)},
            {"off", cmp.off ? to_json(*cmp.off) : json(nullptr)},
            {"settling_ratio", opt(cmp.settling_ratio)},
            {"settling_delta", opt(cmp.settling_delta)},
            {"jump_delta", cmp.jump_delta},
            {"peak_speed_ratio", opt(cmp.peak_speed_ratio)}};
  return j;
}

}  // namespace impulse
