#include "periparab/config.hpp"

#include <cmath>
#include <filesystem>
#include <initializer_list>
#include <string>

#include "json.hpp"
#include "periparab/errors.hpp"
#include "periparab/jsonout.hpp"

namespace periparab {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& message) {
  throw ValidationError("config: " + message);
}

/// Rejects keys outside the allowlist so typos cannot silently change runs.
void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* key : allowed) {
      if (it.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) fail("unknown key '" + it.key() + "' in " + where);
  }
}

const json* find(const json& obj, const char* key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

const json& require_member(const json& obj, const std::string& where,
                           const char* key) {
  const json* v = find(obj, key);
  if (v == nullptr) fail(where + " is missing required key '" + key + "'");
  return *v;
}

double as_number(const json& v, const std::string& where) {
  if (!v.is_number()) fail(where + " must be a number");
  const double value = v.get<double>();
  if (!std::isfinite(value)) fail(where + " must be finite");
  return value;
}

int as_integer(const json& v, const std::string& where) {
  if (!v.is_number_integer()) fail(where + " must be an integer");
  return v.get<int>();
}

bool as_boolean(const json& v, const std::string& where) {
  if (!v.is_boolean()) fail(where + " must be a boolean");
  return v.get<bool>();
}

std::string as_string(const json& v, const std::string& where) {
  if (!v.is_string()) fail(where + " must be a string");
  return v.get<std::string>();
}

std::vector<double> as_number_array(const json& v, const std::string& where) {
  if (!v.is_array()) fail(where + " must be an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(as_number(v[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

void expect_object(const json& v, const std::string& where) {
  if (!v.is_object()) fail(where + " must be an object");
}

std::string resolve_path(const std::string& base_dir, const std::string& path,
                         const std::string& where) {
  namespace fs = std::filesystem;
  fs::path p(path);
  if (!p.is_absolute()) p = fs::path(base_dir) / p;
  if (!fs::exists(p)) {
    fail(where + " references a file that does not exist: " + p.string());
  }
  return p.string();
}

GridConfig parse_grid(const json& v) {
  expect_object(v, "grid");
  check_keys(v, "grid", {"length", "n_nodes"});
  GridConfig grid;
  grid.length = as_number(require_member(v, "grid", "length"), "grid.length");
  grid.n_nodes =
      as_integer(require_member(v, "grid", "n_nodes"), "grid.n_nodes");
  if (grid.length <= 0.0) fail("grid.length must be positive");
  if (grid.n_nodes < 3) fail("grid.n_nodes must be at least 3");
  return grid;
}

CoefficientConfig parse_coefficient(const json& v, const std::string& where,
                                    int n_nodes) {
  CoefficientConfig coeff;
  if (v.is_number()) {
    coeff.constant = true;
    coeff.value = as_number(v, where);
    return coeff;
  }
  expect_object(v, where);
  check_keys(v, where, {"samples"});
  coeff.constant = false;
  coeff.samples =
      as_number_array(require_member(v, where, "samples"), where + ".samples");
  if (static_cast<int>(coeff.samples.size()) != n_nodes) {
    fail(where + ".samples must hold one value per grid node (" +
         std::to_string(n_nodes) + ")");
  }
  return coeff;
}

OperatorConfig parse_operator(const json& v, int n_nodes) {
  expect_object(v, "operator");
  check_keys(v, "operator", {"a", "b", "c"});
  OperatorConfig op;
  if (const json* a = find(v, "a")) op.a = parse_coefficient(*a, "operator.a", n_nodes);
  if (const json* b = find(v, "b")) op.b = parse_coefficient(*b, "operator.b", n_nodes);
  if (const json* c = find(v, "c")) op.c = parse_coefficient(*c, "operator.c", n_nodes);
  return op;
}

TimeConfig parse_time(const json& v) {
  expect_object(v, "time");
  check_keys(v, "time", {"horizon", "n_steps"});
  TimeConfig time;
  time.horizon =
      as_number(require_member(v, "time", "horizon"), "time.horizon");
  time.n_steps =
      as_integer(require_member(v, "time", "n_steps"), "time.n_steps");
  if (time.horizon <= 0.0) fail("time.horizon must be positive");
  if (time.n_steps < 1) fail("time.n_steps must be at least 1");
  return time;
}

SplitConfig parse_split(const json& v, int n_modes) {
  expect_object(v, "split");
  check_keys(v, "split", {"mode", "k", "mu_target", "k_max"});
  SplitConfig split;
  const std::string mode =
      as_string(require_member(v, "split", "mode"), "split.mode");
  if (mode == "auto") {
    split.automatic = true;
    if (const json* m = find(v, "mu_target")) {
      split.mu_target = as_number(*m, "split.mu_target");
    }
    if (const json* m = find(v, "k_max")) {
      split.k_max = as_integer(*m, "split.k_max");
    }
    if (find(v, "k") != nullptr) {
      fail("split.k is only valid with mode == \"fixed\"");
    }
    if (!(split.mu_target > 0.0 && split.mu_target < 1.0)) {
      fail("split.mu_target must lie in (0, 1)");
    }
    if (split.k_max < 0) fail("split.k_max must be nonnegative");
  } else if (mode == "fixed") {
    split.automatic = false;
    split.k = as_integer(require_member(v, "split", "k"), "split.k");
    if (find(v, "mu_target") != nullptr || find(v, "k_max") != nullptr) {
      fail("split.mu_target and split.k_max are only valid with mode == \"auto\"");
    }
    if (split.k < 0 || split.k >= n_modes) {
      fail("split.k must lie in [0, n_modes)");
    }
  } else {
    fail("split.mode must be \"auto\" or \"fixed\"");
  }
  return split;
}

FieldConfig parse_field(const json& v, const std::string& where,
                        const std::string& base_dir) {
  expect_object(v, where);
  check_keys(v, where, {"source", "value", "path"});
  FieldConfig field;
  const std::string source =
      as_string(require_member(v, where, "source"), where + ".source");
  if (source == "zero") {
    field.source = FieldSource::zero;
    if (find(v, "value") != nullptr || find(v, "path") != nullptr) {
      fail(where + ": source \"zero\" takes no value or path");
    }
  } else if (source == "constant") {
    field.source = FieldSource::constant;
    field.value =
        as_number(require_member(v, where, "value"), where + ".value");
    if (find(v, "path") != nullptr) {
      fail(where + ": source \"constant\" takes no path");
    }
  } else if (source == "file") {
    field.source = FieldSource::file;
    if (find(v, "value") != nullptr) {
      fail(where + ": source \"file\" takes no value");
    }
    field.path = resolve_path(
        base_dir, as_string(require_member(v, where, "path"), where + ".path"),
        where);
  } else {
    fail(where + ".source must be \"zero\", \"constant\", or \"file\"");
  }
  return field;
}

PerturbationConfig parse_perturbation(const json& v, const std::string& where,
                                      const std::string& base_dir) {
  expect_object(v, where);
  check_keys(v, where, {"source", "value", "path", "q", "bound_M"});
  PerturbationConfig pert;
  json field_part = json::object();
  if (const json* s = find(v, "source")) field_part["source"] = *s;
  if (const json* s = find(v, "value")) field_part["value"] = *s;
  if (const json* s = find(v, "path")) field_part["path"] = *s;
  pert.field = parse_field(field_part, where, base_dir);
  if (const json* q = find(v, "q")) pert.q = as_number(*q, where + ".q");
  if (const json* m = find(v, "bound_M")) {
    pert.bound_M = as_number(*m, where + ".bound_M");
  }
  if (pert.q < 1.5) fail(where + ".q must be at least 3/2");
  if (pert.bound_M <= 0.0) fail(where + ".bound_M must be positive");
  return pert;
}

SolveOptions parse_solve(const json& v) {
  expect_object(v, "solve");
  check_keys(v, "solve", {"a_head", "tol", "max_iter", "method"});
  SolveOptions solve;
  if (const json* a = find(v, "a_head")) {
    solve.a_head = as_number_array(*a, "solve.a_head");
  }
  if (const json* t = find(v, "tol")) solve.tol = as_number(*t, "solve.tol");
  if (const json* m = find(v, "max_iter")) {
    solve.max_iter = as_integer(*m, "solve.max_iter");
  }
  if (const json* m = find(v, "method")) {
    solve.method = as_string(*m, "solve.method");
  }
  if (solve.tol <= 0.0) fail("solve.tol must be positive");
  if (solve.max_iter < 1) fail("solve.max_iter must be at least 1");
  if (solve.method != "fixed_point" && solve.method != "direct") {
    fail("solve.method must be \"fixed_point\" or \"direct\"");
  }
  return solve;
}

WindowConfig parse_window(const json& v) {
  expect_object(v, "identify.window");
  check_keys(v, "identify.window", {"mode", "lo", "hi"});
  WindowConfig window;
  const std::string mode =
      as_string(require_member(v, "identify.window", "mode"),
                "identify.window.mode");
  if (mode == "full") {
    window.full = true;
    if (find(v, "lo") != nullptr || find(v, "hi") != nullptr) {
      fail("identify.window: mode \"full\" takes no lo/hi");
    }
  } else if (mode == "interval") {
    window.full = false;
    window.lo = as_integer(require_member(v, "identify.window", "lo"),
                           "identify.window.lo");
    window.hi = as_integer(require_member(v, "identify.window", "hi"),
                           "identify.window.hi");
  } else {
    fail("identify.window.mode must be \"full\" or \"interval\"");
  }
  return window;
}

TargetConfig parse_target(const json& v, const std::string& base_dir) {
  expect_object(v, "identify.target");
  const std::string source =
      as_string(require_member(v, "identify.target", "source"),
                "identify.target.source");
  TargetConfig target;
  if (source == "file") {
    check_keys(v, "identify.target", {"source", "path"});
    target.from_file = true;
    target.path = resolve_path(
        base_dir,
        as_string(require_member(v, "identify.target", "path"),
                  "identify.target.path"),
        "identify.target");
  } else if (source == "twin") {
    check_keys(v, "identify.target",
               {"source", "e", "a_head", "noise_sigma", "noise_seed"});
    target.from_file = false;
    target.twin.e = parse_perturbation(
        require_member(v, "identify.target", "e"), "identify.target.e",
        base_dir);
    if (const json* a = find(v, "a_head")) {
      target.twin.a_head = as_number_array(*a, "identify.target.a_head");
    }
    if (const json* s = find(v, "noise_sigma")) {
      target.twin.noise_sigma = as_number(*s, "identify.target.noise_sigma");
      if (target.twin.noise_sigma < 0.0) {
        fail("identify.target.noise_sigma must be nonnegative");
      }
    }
    if (const json* s = find(v, "noise_seed")) {
      if (!s->is_number_integer() || s->get<long long>() < 0) {
        fail("identify.target.noise_seed must be a nonnegative integer");
      }
      target.twin.noise_seed = s->get<std::uint64_t>();
    }
  } else {
    fail("identify.target.source must be \"file\" or \"twin\"");
  }
  return target;
}

IdentifyOptions parse_identify(const json& v, const std::string& base_dir) {
  expect_object(v, "identify");
  check_keys(v, "identify",
             {"window", "target", "n_ex", "n_et", "q", "bound_M", "fixed_a",
              "initial_params", "step_size", "max_outer", "fd_step", "tol",
              "step_floor", "tikhonov"});
  IdentifyOptions opts;
  if (const json* w = find(v, "window")) opts.window = parse_window(*w);
  opts.target =
      parse_target(require_member(v, "identify", "target"), base_dir);
  if (const json* n = find(v, "n_ex")) {
    opts.n_ex = as_integer(*n, "identify.n_ex");
  }
  if (const json* n = find(v, "n_et")) {
    opts.n_et = as_integer(*n, "identify.n_et");
  }
  if (const json* q = find(v, "q")) opts.q = as_number(*q, "identify.q");
  if (const json* m = find(v, "bound_M")) {
    opts.bound_M = as_number(*m, "identify.bound_M");
  }
  if (const json* a = find(v, "fixed_a")) {
    opts.fixed_a = as_number_array(*a, "identify.fixed_a");
  }
  if (const json* p = find(v, "initial_params")) {
    opts.initial_params = as_number_array(*p, "identify.initial_params");
  }
  if (const json* s = find(v, "step_size")) {
    opts.step_size = as_number(*s, "identify.step_size");
  }
  if (const json* m = find(v, "max_outer")) {
    opts.max_outer = as_integer(*m, "identify.max_outer");
  }
  if (const json* s = find(v, "fd_step")) {
    opts.fd_step = as_number(*s, "identify.fd_step");
  }
  if (const json* t = find(v, "tol")) opts.tol = as_number(*t, "identify.tol");
  if (const json* s = find(v, "step_floor")) {
    opts.step_floor = as_number(*s, "identify.step_floor");
  }
  if (const json* t = find(v, "tikhonov")) {
    opts.tikhonov = as_number(*t, "identify.tikhonov");
  }
  if (opts.n_ex < 1 || opts.n_et < 1) {
    fail("identify.n_ex and identify.n_et must be at least 1");
  }
  if (opts.q < 1.5) fail("identify.q must be at least 3/2");
  if (opts.bound_M <= 0.0) fail("identify.bound_M must be positive");
  if (!opts.initial_params.empty() &&
      static_cast<int>(opts.initial_params.size()) != opts.n_ex * opts.n_et) {
    fail("identify.initial_params must hold n_ex * n_et entries");
  }
  return opts;
}

Example34Options parse_example34(const json& v) {
  expect_object(v, "example34");
  check_keys(v, "example34",
             {"K", "n_modes", "n_nodes", "n_steps", "x_mode", "amplitude",
              "profile", "a_head"});
  Example34Options opts;
  opts.K = as_integer(require_member(v, "example34", "K"), "example34.K");
  if (opts.K < 1) fail("example34.K must be at least 1");
  if (const json* n = find(v, "n_modes")) {
    opts.n_modes = as_integer(*n, "example34.n_modes");
    if (opts.n_modes <= opts.K) fail("example34.n_modes must exceed K");
  }
  if (const json* n = find(v, "n_nodes")) {
    opts.n_nodes = as_integer(*n, "example34.n_nodes");
    if (opts.n_nodes < 3) fail("example34.n_nodes must be at least 3");
  }
  if (const json* n = find(v, "n_steps")) {
    opts.n_steps = as_integer(*n, "example34.n_steps");
    if (opts.n_steps < 1) fail("example34.n_steps must be at least 1");
  }
  opts.x_mode = as_integer(require_member(v, "example34", "x_mode"),
                           "example34.x_mode");
  if (opts.x_mode < 1) fail("example34.x_mode must be at least 1");
  if (const json* a = find(v, "amplitude")) {
    opts.amplitude = as_number(*a, "example34.amplitude");
  }
  if (const json* p = find(v, "profile")) {
    opts.profile = as_string(*p, "example34.profile");
    if (opts.profile != "constant" && opts.profile != "linear") {
      fail("example34.profile must be \"constant\" or \"linear\"");
    }
  }
  if (const json* a = find(v, "a_head")) {
    opts.a_head = as_number_array(*a, "example34.a_head");
  }
  return opts;
}

}  // namespace

RunConfig parse_config_text(const std::string& text,
                            const std::string& command,
                            const std::string& base_dir) {
  if (command != "solve" && command != "choose-k" && command != "identify" &&
      command != "example34") {
    fail("unknown command '" + command + "'");
  }
  const json root = json::parse(text, nullptr, false);
  if (root.is_discarded()) fail("malformed JSON");
  expect_object(root, "the configuration root");

  const json& schema = require_member(root, "the configuration root", "schema");
  if (!schema.is_number_integer() || schema.get<long long>() != 1) {
    fail("schema must be the integer 1");
  }

  RunConfig cfg;
  cfg.command = command;

  if (command == "example34") {
    check_keys(root, "the configuration root", {"schema", "example34"});
    cfg.example34 = parse_example34(
        require_member(root, "the configuration root", "example34"));
    return cfg;
  }

  if (command == "solve") {
    check_keys(root, "the configuration root",
               {"schema", "grid", "operator", "time", "n_modes", "split",
                "perturbation", "forcing", "seed", "solve"});
  } else if (command == "choose-k") {
    check_keys(root, "the configuration root",
               {"schema", "grid", "operator", "time", "n_modes",
                "perturbation", "forcing", "seed", "choose_k"});
  } else {
    check_keys(root, "the configuration root",
               {"schema", "grid", "operator", "time", "n_modes", "split",
                "forcing", "seed", "identify"});
  }

  cfg.grid = parse_grid(require_member(root, "the configuration root", "grid"));
  cfg.time = parse_time(require_member(root, "the configuration root", "time"));
  cfg.n_modes = as_integer(
      require_member(root, "the configuration root", "n_modes"), "n_modes");
  if (cfg.n_modes < 1) fail("n_modes must be at least 1");

  if (const json* op = find(root, "operator")) {
    cfg.op = parse_operator(*op, cfg.grid.n_nodes);
  }
  if (const json* seed = find(root, "seed")) {
    if (!seed->is_number_integer() || seed->get<long long>() < 0) {
      fail("seed must be a nonnegative integer");
    }
    cfg.seed = seed->get<std::uint64_t>();
  }
  if (const json* f = find(root, "forcing")) {
    cfg.forcing = parse_field(*f, "forcing", base_dir);
  }

  if (command == "solve" || command == "choose-k") {
    if (const json* p = find(root, "perturbation")) {
      cfg.perturbation = parse_perturbation(*p, "perturbation", base_dir);
    }
  }

  if (command == "solve") {
    if (const json* s = find(root, "split")) {
      cfg.split = parse_split(*s, cfg.n_modes);
    }
    if (const json* s = find(root, "solve")) cfg.solve = parse_solve(*s);
  } else if (command == "choose-k") {
    if (const json* c = find(root, "choose_k")) {
      expect_object(*c, "choose_k");
      check_keys(*c, "choose_k", {"mu_target", "k_max"});
      if (const json* m = find(*c, "mu_target")) {
        cfg.split.mu_target = as_number(*m, "choose_k.mu_target");
      }
      if (const json* m = find(*c, "k_max")) {
        cfg.split.k_max = as_integer(*m, "choose_k.k_max");
      }
      if (!(cfg.split.mu_target > 0.0 && cfg.split.mu_target < 1.0)) {
        fail("choose_k.mu_target must lie in (0, 1)");
      }
      if (cfg.split.k_max < 0) fail("choose_k.k_max must be nonnegative");
    }
    cfg.split.automatic = true;
  } else {  // identify
    const json& split =
        require_member(root, "the configuration root", "split");
    cfg.split = parse_split(split, cfg.n_modes);
    if (cfg.split.automatic) {
      fail("identify requires split.mode == \"fixed\"");
    }
    cfg.identify = parse_identify(
        require_member(root, "the configuration root", "identify"), base_dir);
    if (cfg.identify.fixed_a.has_value() &&
        static_cast<int>(cfg.identify.fixed_a->size()) != cfg.split.k) {
      fail("identify.fixed_a must hold one entry per head mode");
    }
  }

  return cfg;
}

RunConfig parse_config_file(const std::string& path,
                            const std::string& command) {
  const std::string text = read_text_file(path);
  const std::string base_dir =
      std::filesystem::path(path).parent_path().string();
  return parse_config_text(text, command, base_dir.empty() ? "." : base_dir);
}

}  // namespace periparab
