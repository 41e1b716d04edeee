#include "fedswitch/config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fedswitch/trace_io.hpp"

namespace fedswitch {

namespace fs = std::filesystem;

namespace {

std::string join_path(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

const json& require_field(const json& j, const std::string& path, const std::string& key) {
  if (!j.is_object())
    throw ConfigError("config error at " + (path.empty() ? std::string("<root>") : path) +
                      ": expected an object");
  auto it = j.find(key);
  if (it == j.end())
    throw ConfigError("config error at " + join_path(path, key) + ": missing required field");
  return *it;
}

const json* optional_field(const json& j, const std::string& key) {
  if (!j.is_object()) return nullptr;
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

double as_double(const json& v, const std::string& where) {
  if (!v.is_number())
    throw ConfigError("config error at " + where + ": expected a number");
  return v.get<double>();
}

int as_int(const json& v, const std::string& where) {
  if (!v.is_number_integer())
    throw ConfigError("config error at " + where + ": expected an integer");
  return v.get<int>();
}

std::uint64_t as_u64(const json& v, const std::string& where) {
  if (!v.is_number_integer())
    throw ConfigError("config error at " + where + ": expected an integer");
  return v.get<std::uint64_t>();
}

std::string as_string(const json& v, const std::string& where) {
  if (!v.is_string())
    throw ConfigError("config error at " + where + ": expected a string");
  return v.get<std::string>();
}

bool as_bool(const json& v, const std::string& where) {
  if (!v.is_boolean())
    throw ConfigError("config error at " + where + ": expected a boolean");
  return v.get<bool>();
}

double get_double(const json& j, const std::string& path, const std::string& key) {
  return as_double(require_field(j, path, key), join_path(path, key));
}

int get_int(const json& j, const std::string& path, const std::string& key) {
  return as_int(require_field(j, path, key), join_path(path, key));
}

DomainSpec parse_domain(const json& j, const std::string& path) {
  DomainSpec d;
  const std::string kind = as_string(require_field(j, path, "kind"), join_path(path, "kind"));
  if (kind == "unbounded") {
    d.kind = DomainSpec::Kind::unbounded;
  } else if (kind == "ball") {
    d.kind = DomainSpec::Kind::ball;
    d.radius = get_double(j, path, "radius");
  } else if (kind == "box") {
    d.kind = DomainSpec::Kind::box;
    d.halfwidth = get_double(j, path, "halfwidth");
  } else {
    throw ConfigError("config error at " + join_path(path, "kind") +
                      ": expected unbounded, ball or box");
  }
  return d;
}

json domain_to_json(const DomainSpec& d) {
  switch (d.kind) {
    case DomainSpec::Kind::unbounded: return {{"kind", "unbounded"}};
    case DomainSpec::Kind::ball: return {{"kind", "ball"}, {"radius", d.radius}};
    case DomainSpec::Kind::box: return {{"kind", "box"}, {"halfwidth", d.halfwidth}};
  }
  return {};
}

CompressorFileSpec parse_compressor(const json& j, const std::string& path) {
  CompressorFileSpec c;
  c.kind = as_string(require_field(j, path, "kind"), join_path(path, "kind"));
  if (c.kind == "top_k" || c.kind == "rand_k") {
    c.k = get_int(j, path, "k");
  } else if (c.kind == "uniform_quant") {
    c.bits = get_int(j, path, "bits");
  } else if (c.kind != "identity") {
    throw ConfigError("config error at " + join_path(path, "kind") +
                      ": expected identity, top_k, rand_k or uniform_quant");
  }
  if (const json* q = optional_field(j, "q")) c.q = as_double(*q, join_path(path, "q"));
  return c;
}

json compressor_to_json(const CompressorFileSpec& c) {
  json j{{"kind", c.kind}};
  if (c.kind == "top_k" || c.kind == "rand_k") j["k"] = c.k;
  if (c.kind == "uniform_quant") j["bits"] = c.bits;
  if (c.q) j["q"] = *c.q;
  return j;
}

ProblemSpec parse_problem(const json& j, const std::string& path) {
  ProblemSpec p;
  const std::string type = as_string(require_field(j, path, "type"), join_path(path, "type"));
  if (const json* dom = optional_field(j, "domain"))
    p.domain = parse_domain(*dom, join_path(path, "domain"));
  if (const json* seed = optional_field(j, "seed"))
    p.seed = as_u64(*seed, join_path(path, "seed"));
  if (const json* bs = optional_field(j, "batch_size"))
    p.batch_size = as_int(*bs, join_path(path, "batch_size"));
  if (const json* part = optional_field(j, "partition")) {
    const std::string s = as_string(*part, join_path(path, "partition"));
    if (s == "iid")
      p.partition = Partition::iid_split;
    else if (s == "replicate")
      p.partition = Partition::replicate;
    else
      throw ConfigError("config error at " + join_path(path, "partition") +
                        ": expected iid or replicate");
  }

  if (type == "np_csv") {
    p.type = ProblemSpec::Type::np_csv;
    p.path = as_string(require_field(j, path, "path"), join_path(path, "path"));
  } else if (type == "np_synthetic") {
    p.type = ProblemSpec::Type::np_synthetic;
    p.rows = get_int(j, path, "rows");
    p.d_feat = get_int(j, path, "d_feat");
    if (const json* cb = optional_field(j, "class_balance"))
      p.class_balance = as_double(*cb, join_path(path, "class_balance"));
    if (const json* mg = optional_field(j, "margin"))
      p.margin = as_double(*mg, join_path(path, "margin"));
  } else if (type == "linear_ball") {
    p.type = ProblemSpec::Type::linear_ball;
    p.d = get_int(j, path, "d");
    if (const json* dir = optional_field(j, "direction")) {
      if (!dir->is_array())
        throw ConfigError("config error at " + join_path(path, "direction") +
                          ": expected an array");
      for (const auto& v : *dir)
        p.direction.push_back(as_double(v, join_path(path, "direction")));
    }
    p.radius = get_double(j, path, "radius");
    if (const json* hw = optional_field(j, "halfwidth"))
      p.halfwidth = as_double(*hw, join_path(path, "halfwidth"));
    if (const json* pert = optional_field(j, "perturbation"))
      p.perturbation = as_double(*pert, join_path(path, "perturbation"));
  } else {
    throw ConfigError("config error at " + join_path(path, "type") +
                      ": expected np_csv, np_synthetic or linear_ball");
  }
  return p;
}

json problem_to_json(const ProblemSpec& p) {
  json j;
  switch (p.type) {
    case ProblemSpec::Type::np_csv:
      j["type"] = "np_csv";
      j["path"] = p.path;
      break;
    case ProblemSpec::Type::np_synthetic:
      j["type"] = "np_synthetic";
      j["rows"] = p.rows;
      j["d_feat"] = p.d_feat;
      j["class_balance"] = p.class_balance;
      j["margin"] = p.margin;
      break;
    case ProblemSpec::Type::linear_ball:
      j["type"] = "linear_ball";
      j["d"] = p.d;
      j["direction"] = p.direction;
      j["radius"] = p.radius;
      j["halfwidth"] = p.halfwidth;
      j["perturbation"] = p.perturbation;
      break;
  }
  if (p.type != ProblemSpec::Type::linear_ball) {
    j["domain"] = domain_to_json(p.domain);
    j["partition"] = p.partition == Partition::iid_split ? "iid" : "replicate";
    j["batch_size"] = p.batch_size;
    j["seed"] = p.seed;
  } else {
    j["seed"] = p.seed;
  }
  return j;
}

}  // namespace

CompressorSpec CompressorFileSpec::to_spec() const {
  if (kind == "identity") return CompressorSpec::identity();
  if (kind == "top_k") return CompressorSpec::top_k(k);
  if (kind == "rand_k") return CompressorSpec::rand_k(k);
  if (kind == "uniform_quant") return CompressorSpec::uniform_quant(bits, q);
  throw ConfigError("unknown compressor kind: " + kind);
}

RunSpec parse_run_spec(const json& j) {
  RunSpec spec;
  spec.problem = parse_problem(require_field(j, "", "problem"), "problem");

  const json& rounds = require_field(j, "", "rounds");
  spec.T = get_int(rounds, "rounds", "T");
  spec.E = get_int(rounds, "rounds", "E");
  spec.n = get_int(rounds, "rounds", "n");
  spec.m = get_int(rounds, "rounds", "m");
  spec.seed = as_u64(require_field(rounds, "rounds", "seed"), "rounds.seed");

  const json& sw = require_field(rounds, "rounds", "switch");
  const std::string mode = as_string(require_field(sw, "rounds.switch", "mode"),
                                     "rounds.switch.mode");
  if (mode == "hard")
    spec.switch_spec.kind = SwitchMode::Kind::hard;
  else if (mode == "soft")
    spec.switch_spec.kind = SwitchMode::Kind::soft;
  else
    throw ConfigError("config error at rounds.switch.mode: expected hard or soft");
  if (const json* eps = optional_field(sw, "epsilon"))
    spec.switch_spec.epsilon = as_double(*eps, "rounds.switch.epsilon");
  if (const json* beta = optional_field(sw, "beta"))
    spec.switch_spec.beta = as_double(*beta, "rounds.switch.beta");

  if (const json* comp = optional_field(rounds, "compression")) {
    const json* enabled = optional_field(*comp, "enabled");
    spec.comp_enabled = enabled ? as_bool(*enabled, "rounds.compression.enabled") : true;
    if (spec.comp_enabled) {
      spec.uplink = parse_compressor(require_field(*comp, "rounds.compression", "uplink"),
                                     "rounds.compression.uplink");
      spec.downlink =
          parse_compressor(require_field(*comp, "rounds.compression", "downlink"),
                           "rounds.compression.downlink");
    }
  }

  const json& params = require_field(j, "", "params");
  const std::string pmode =
      as_string(require_field(params, "params", "mode"), "params.mode");
  if (pmode == "manual") {
    spec.params.mode = ParamSpec::Mode::manual;
    spec.params.eta = get_double(params, "params", "eta");
  } else if (pmode == "theorem") {
    spec.params.mode = ParamSpec::Mode::theorem;
    if (optional_field(params, "eta"))
      throw ConfigError(
          "config error at params.eta: theorem mode derives eta; remove the manual value");
    auto opt = [&](const char* key) -> std::optional<double> {
      if (const json* v = optional_field(params, key))
        return as_double(*v, join_path("params", key));
      return std::nullopt;
    };
    spec.params.D = opt("D");
    spec.params.G = opt("G");
    spec.params.q = opt("q");
    spec.params.q0 = opt("q0");
    spec.params.sigma = opt("sigma");
    spec.params.delta = opt("delta");
    if (const json* reg = optional_field(params, "regime")) {
      const std::string r = as_string(*reg, "params.regime");
      if (r == "full")
        spec.params.regime = Regime::full;
      else if (r == "partial")
        spec.params.regime = Regime::partial;
      else
        throw ConfigError("config error at params.regime: expected full or partial");
    }
    if (const json* est = optional_field(params, "estimate_sigma"))
      spec.params.estimate_sigma = as_bool(*est, "params.estimate_sigma");
  } else {
    throw ConfigError("config error at params.mode: expected manual or theorem");
  }

  if (const json* od = optional_field(j, "output_dir"))
    spec.output_dir = as_string(*od, "output_dir");
  if (const json* sc = optional_field(j, "snapshot_cadence"))
    spec.snapshot_cadence = as_int(*sc, "snapshot_cadence");
  if (const json* th = optional_field(j, "threads"))
    spec.threads = as_int(*th, "threads");
  if (const json* w0 = optional_field(j, "w0")) {
    if (!w0->is_array()) throw ConfigError("config error at w0: expected an array");
    std::vector<double> v;
    for (const auto& x : *w0) v.push_back(as_double(x, "w0"));
    spec.w0 = std::move(v);
  }
  if (const json* sweep = optional_field(j, "sweep")) {
    if (!sweep->is_object())
      throw ConfigError("config error at sweep: expected an object of path -> values");
    spec.sweep = *sweep;
  }
  return spec;
}

RunSpec parse_run_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config parse failure in " + path + ": " + e.what());
  }
  return parse_run_spec(j);
}

json to_json(const RunSpec& spec) {
  json rounds{{"T", spec.T}, {"E", spec.E}, {"n", spec.n}, {"m", spec.m},
              {"seed", spec.seed}};
  json sw{{"mode", spec.switch_spec.kind == SwitchMode::Kind::hard ? "hard" : "soft"}};
  if (spec.switch_spec.epsilon) sw["epsilon"] = *spec.switch_spec.epsilon;
  if (spec.switch_spec.beta) sw["beta"] = *spec.switch_spec.beta;
  rounds["switch"] = sw;
  if (spec.comp_enabled) {
    rounds["compression"] = json{{"enabled", true},
                                 {"uplink", compressor_to_json(spec.uplink)},
                                 {"downlink", compressor_to_json(spec.downlink)}};
  }

  json params;
  if (spec.params.mode == ParamSpec::Mode::manual) {
    params["mode"] = "manual";
    params["eta"] = *spec.params.eta;
  } else {
    params["mode"] = "theorem";
    auto put = [&params](const char* key, const std::optional<double>& v) {
      if (v) params[key] = *v;
    };
    put("D", spec.params.D);
    put("G", spec.params.G);
    put("q", spec.params.q);
    put("q0", spec.params.q0);
    put("sigma", spec.params.sigma);
    put("delta", spec.params.delta);
    if (spec.params.regime)
      params["regime"] = *spec.params.regime == Regime::full ? "full" : "partial";
    if (spec.params.estimate_sigma) params["estimate_sigma"] = true;
  }

  json j{{"problem", problem_to_json(spec.problem)},
         {"rounds", rounds},
         {"params", params},
         {"output_dir", spec.output_dir},
         {"snapshot_cadence", spec.snapshot_cadence},
         {"threads", spec.threads}};
  if (spec.w0) j["w0"] = *spec.w0;
  if (!spec.sweep.empty()) j["sweep"] = spec.sweep;
  return j;
}

json apply_override(json config, const std::string& dotted_path, const json& value) {
  json* node = &config;
  std::string rest = dotted_path;
  while (true) {
    const auto pos = rest.find('.');
    const std::string key = rest.substr(0, pos);
    if (key.empty()) throw ConfigError("sweep: empty path segment in " + dotted_path);
    if (pos == std::string::npos) {
      (*node)[key] = value;
      return config;
    }
    node = &(*node)[key];
    rest = rest.substr(pos + 1);
  }
}

FederatedProblem build_problem(const ProblemSpec& spec, int n) {
  auto make_domain = [&spec](std::size_t d) {
    switch (spec.domain.kind) {
      case DomainSpec::Kind::unbounded:
        return Domain::unbounded();
      case DomainSpec::Kind::ball:
        return Domain::ball(ModelVector::zeros(d), spec.domain.radius);
      case DomainSpec::Kind::box: {
        ModelVector lo(d), hi(d);
        for (std::size_t i = 0; i < d; ++i) {
          lo[i] = -spec.domain.halfwidth;
          hi[i] = spec.domain.halfwidth;
        }
        return Domain::box(std::move(lo), std::move(hi));
      }
    }
    throw ConfigError("unknown domain kind");
  };

  switch (spec.type) {
    case ProblemSpec::Type::np_csv: {
      LabeledDataset data = load_csv(spec.path);
      return build_np_classification(data, n, spec.seed, make_domain(data.feature_dim()),
                                     spec.partition, spec.batch_size);
    }
    case ProblemSpec::Type::np_synthetic: {
      LabeledDataset data = make_synthetic_dataset(spec.rows, spec.d_feat,
                                                   spec.class_balance, spec.seed,
                                                   spec.margin);
      return build_np_classification(data, n, spec.seed, make_domain(data.feature_dim()),
                                     spec.partition, spec.batch_size);
    }
    case ProblemSpec::Type::linear_ball: {
      ModelVector direction;
      if (spec.direction.empty()) {
        direction = ModelVector(std::vector<double>(static_cast<std::size_t>(spec.d), 1.0));
      } else {
        if (spec.direction.size() != static_cast<std::size_t>(spec.d))
          throw ConfigError("problem.direction: length must equal problem.d");
        direction = ModelVector(spec.direction);
      }
      return build_synthetic_linear_ball(spec.d, direction, spec.radius, n,
                                         spec.halfwidth, spec.perturbation, spec.seed);
    }
  }
  throw ConfigError("unknown problem type");
}

PreparedRun prepare_run(const RunSpec& spec) {
  PreparedRun out;
  out.problem = build_problem(spec.problem, spec.n);

  out.w0 = spec.w0 ? ModelVector(*spec.w0) : ModelVector::zeros(out.problem.dim);
  if (out.w0.dim() != out.problem.dim)
    throw ConfigError("w0: dimension does not match the problem");

  RoundConfig rc;
  rc.T = spec.T;
  rc.E = spec.E;
  rc.n = spec.n;
  rc.m = spec.m;
  rc.seed = spec.seed;
  rc.snapshot_cadence = spec.snapshot_cadence;
  rc.threads = spec.threads;
  if (spec.comp_enabled)
    rc.comp = CompressionConfig::on(spec.uplink.to_spec(), spec.downlink.to_spec());

  double eta = 0.0, epsilon = 0.0;
  if (spec.params.mode == ParamSpec::Mode::manual) {
    if (!spec.params.eta) throw ConfigError("params.eta: required in manual mode");
    if (!spec.switch_spec.epsilon)
      throw ConfigError("rounds.switch.epsilon: required in manual mode");
    eta = *spec.params.eta;
    epsilon = *spec.switch_spec.epsilon;
  } else {
    if (spec.switch_spec.epsilon)
      throw ConfigError(
          "rounds.switch.epsilon: theorem mode derives epsilon; remove the manual value");

    TheoremInputs ti;
    ti.E = spec.E;
    ti.T = spec.T;
    ti.n = spec.n;
    ti.m = spec.m;
    ti.D = spec.params.D ? *spec.params.D : diameter(out.problem.domain);
    ti.G = spec.params.G ? *spec.params.G : out.problem.lipschitz_G();

    auto resolve_q = [&](const CompressorFileSpec& c, const std::optional<double>& override_q,
                         const char* which) {
      if (override_q) return *override_q;
      if (!spec.comp_enabled) return 1.0;
      if (c.kind == "uniform_quant" && !c.q)
        throw ConfigError(std::string("params.") + which +
                          ": required for uniform_quant compressors in theorem mode");
      return contraction(c.to_spec(), out.problem.dim);
    };
    ti.q = resolve_q(spec.uplink, spec.params.q, "q");
    ti.q0 = resolve_q(spec.downlink, spec.params.q0, "q0");

    const Regime regime = spec.params.regime
                              ? *spec.params.regime
                              : (spec.m < spec.n ? Regime::partial : Regime::full);
    if (regime == Regime::partial) {
      if (!spec.params.delta)
        throw ConfigError("params.delta: required for the partial regime");
      ti.delta = *spec.params.delta;
      if (spec.params.sigma) {
        ti.sigma = *spec.params.sigma;
      } else if (spec.params.estimate_sigma) {
        out.sigma_estimate = estimate_sigma(out.problem, project(out.w0, out.problem.domain));
        ti.sigma = *out.sigma_estimate;
      } else {
        ti.sigma = 0.0;
      }
    }
    out.theorem = theorem1_params(ti, regime);
    eta = out.theorem->eta;
    epsilon = out.theorem->epsilon;
  }

  if (spec.switch_spec.kind == SwitchMode::Kind::hard) {
    rc.switch_mode = SwitchMode::hard(epsilon);
  } else {
    double beta = 0.0;
    if (spec.switch_spec.beta) {
      beta = *spec.switch_spec.beta;
    } else if (spec.params.mode == ParamSpec::Mode::theorem && epsilon > 0.0) {
      beta = 2.0 / epsilon;  // smallest sharpness the soft guarantee asks for
    } else {
      throw ConfigError("rounds.switch.beta: required in soft mode");
    }
    rc.switch_mode = SwitchMode::soft(epsilon, beta);
  }
  rc.eta = eta;
  rc.validate();
  out.round_config = rc;
  return out;
}

namespace {

json verdict_to_json(const Verdict& v) {
  json j;
  j["violation"] = v.violation;
  j["subopt_gap"] = v.subopt_gap ? json(*v.subopt_gap) : json("unknown");
  j["is_eps_solution"] = v.is_eps_solution ? json(*v.is_eps_solution) : json("unknown");
  return j;
}

}  // namespace

json execute_run(const RunSpec& spec) {
  PreparedRun prep = prepare_run(spec);
  RunTrace trace = run(prep.round_config, prep.problem, prep.w0);

  const GlobalEval final_eval = global_eval(prep.problem, trace.final_state.w);
  int a_size = 0;
  for (const auto& rec : trace.records)
    if (rec.in_A) ++a_size;

  json summary;
  summary["config"] = to_json(spec);
  summary["seed"] = spec.seed;
  summary["final_f"] = final_eval.f;
  summary["final_g"] = final_eval.g;
  summary["epsilon"] = prep.round_config.switch_mode.epsilon;
  summary["eta"] = prep.round_config.eta;
  summary["gamma"] = prep.theorem ? json(prep.theorem->gamma) : json();
  summary["A_size"] = a_size;
  if (prep.sigma_estimate)
    summary["sigma_estimate"] = {{"value", *prep.sigma_estimate},
                                 {"provenance", "empirical per-client spread at w0"}};

  json verdict_json;
  try {
    const double epsilon = prep.round_config.switch_mode.epsilon;
    const ModelVector w_bar =
        prep.round_config.switch_mode.is_soft()
            ? averaged_iterate_soft(trace, prep.round_config.switch_mode.beta, epsilon)
            : averaged_iterate_hard(trace);
    verdict_json = verdict_to_json(verdict(prep.problem, w_bar, epsilon));
  } catch (const std::exception& e) {
    verdict_json = {{"error", e.what()}};
  }
  summary["w_bar_verdict"] = verdict_json;

  fs::create_directories(spec.output_dir);
  write_trace_csv(trace, (fs::path(spec.output_dir) / "trace.csv").string());
  std::ofstream out(fs::path(spec.output_dir) / "summary.json", std::ios::binary);
  if (!out) throw std::runtime_error("cannot write summary.json in " + spec.output_dir);
  out << summary.dump(2) << '\n';
  return summary;
}

namespace {

std::string sanitize_component(std::string s) {
  for (char& c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '-' || c == '=';
    if (!ok) c = '-';
  }
  return s;
}

}  // namespace

int execute_sweep(const RunSpec& spec) {
  if (spec.sweep.empty() || !spec.sweep.is_object())
    throw ConfigError("sweep: a nonempty object of path -> value arrays is required");

  std::vector<std::pair<std::string, json>> axes;
  for (auto it = spec.sweep.begin(); it != spec.sweep.end(); ++it) {
    if (!it.value().is_array() || it.value().empty())
      throw ConfigError("sweep." + it.key() + ": expected a nonempty array of values");
    axes.emplace_back(it.key(), it.value());
  }

  std::size_t cells = 1;
  for (const auto& [path, values] : axes) cells *= values.size();

  const json base = to_json(spec);
  fs::create_directories(spec.output_dir);
  std::ofstream index((fs::path(spec.output_dir) / "index.csv").string(),
                      std::ios::binary);
  index << "cell,overrides,status,final_f,final_g,A_size,epsilon,eta\n";

  int failures = 0;
  for (std::size_t cell = 0; cell < cells; ++cell) {
    json cell_config = base;
    cell_config.erase("sweep");
    // Every cell derives its own seed; an explicit rounds.seed axis wins.
    cell_config["rounds"]["seed"] = derive_seed(spec.seed, "cell", cell);

    std::size_t remainder = cell;
    std::string label, overrides;
    for (const auto& [path, values] : axes) {
      const json& value = values[remainder % values.size()];
      remainder /= values.size();
      cell_config = apply_override(cell_config, path, value);
      const std::string rendered = value.is_string() ? value.get<std::string>() : value.dump();
      label += "__" + sanitize_component(path + "=" + rendered);
      if (!overrides.empty()) overrides += ' ';
      overrides += path + "=" + rendered;
    }

    char cell_id[32];
    std::snprintf(cell_id, sizeof(cell_id), "cell_%03zu", cell);
    const fs::path cell_dir = fs::path(spec.output_dir) / (cell_id + label);
    cell_config["output_dir"] = cell_dir.string();

    index << cell_id << ",\"" << overrides << "\",";
    try {
      const RunSpec cell_spec = parse_run_spec(cell_config);
      const json summary = execute_run(cell_spec);
      index << "ok," << format_double(summary["final_f"].get<double>()) << ','
            << format_double(summary["final_g"].get<double>()) << ','
            << summary["A_size"].get<int>() << ','
            << format_double(summary["epsilon"].get<double>()) << ','
            << format_double(summary["eta"].get<double>()) << '\n';
    } catch (const std::exception& e) {
      ++failures;
      std::string msg = e.what();
      std::replace(msg.begin(), msg.end(), '"', '\'');
      std::replace(msg.begin(), msg.end(), '\n', ' ');
      index << "failed: " << msg << ",,,,,\n";
    }
  }
  return failures;
}

}  // namespace fedswitch
