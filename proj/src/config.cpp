#include "banditforge/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace banditforge {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

struct RawSection {
  std::string name;   // "instance", "agent", "run", "scale"
  std::string label;  // optional agent label
  std::vector<std::pair<std::string, std::string>> kv;
};

class Collector {
 public:
  explicit Collector(std::vector<ConfigError>& errors) : errors_(errors) {}
  void add(const std::string& path, const std::string& message) {
    errors_.push_back({path, message});
  }
  bool empty() const { return errors_.empty(); }

 private:
  std::vector<ConfigError>& errors_;
};

bool parse_double_str(const std::string& s, double& out) {
  try {
    std::size_t pos = 0;
    out = std::stod(s, &pos);
    return pos == s.size() && std::isfinite(out);
  } catch (...) {
    return false;
  }
}

bool parse_i64_str(const std::string& s, std::int64_t& out) {
  const char* b = s.data();
  const char* e = b + s.size();
  auto [p, ec] = std::from_chars(b, e, out);
  return ec == std::errc{} && p == e;
}

bool parse_u64_str(const std::string& s, std::uint64_t& out) {
  const char* b = s.data();
  const char* e = b + s.size();
  auto [p, ec] = std::from_chars(b, e, out);
  return ec == std::errc{} && p == e;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

// A typed view over one section's keys with duplicate/unknown detection.
class KeyReader {
 public:
  KeyReader(const RawSection& sec, const std::string& path, Collector& errors)
      : path_(path), errors_(errors) {
    for (const auto& [k, v] : sec.kv) {
      if (values_.count(k) != 0) {
        errors_.add(path_ + "." + k, "duplicate key");
        continue;
      }
      values_[k] = v;
    }
  }

  ~KeyReader() = default;

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::optional<std::string> raw(const std::string& key) {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    used_.insert(key);
    return it->second;
  }

  void get_double(const std::string& key, double& out) {
    if (auto v = raw(key)) {
      if (!parse_double_str(*v, out))
        errors_.add(path_ + "." + key, "expected a real number, got '" + *v + "'");
    }
  }

  void get_int(const std::string& key, int& out) {
    if (auto v = raw(key)) {
      std::int64_t x;
      if (!parse_i64_str(*v, x))
        errors_.add(path_ + "." + key, "expected an integer, got '" + *v + "'");
      else
        out = static_cast<int>(x);
    }
  }

  void get_i64(const std::string& key, std::int64_t& out) {
    if (auto v = raw(key)) {
      if (!parse_i64_str(*v, out))
        errors_.add(path_ + "." + key, "expected an integer, got '" + *v + "'");
    }
  }

  void get_u64(const std::string& key, std::uint64_t& out) {
    if (auto v = raw(key)) {
      if (!parse_u64_str(*v, out))
        errors_.add(path_ + "." + key,
                    "expected an unsigned integer, got '" + *v + "'");
    }
  }

  void get_bool(const std::string& key, bool& out) {
    if (auto v = raw(key)) {
      if (*v == "true" || *v == "1")
        out = true;
      else if (*v == "false" || *v == "0")
        out = false;
      else
        errors_.add(path_ + "." + key, "expected true/false, got '" + *v + "'");
    }
  }

  void get_string(const std::string& key, std::string& out) {
    if (auto v = raw(key)) out = *v;
  }

  void finish() {
    for (const auto& [k, _] : values_) {
      if (used_.count(k) == 0) errors_.add(path_ + "." + k, "unknown key");
    }
  }

  const std::string& path() const { return path_; }
  Collector& errors() { return errors_; }

 private:
  std::string path_;
  Collector& errors_;
  std::map<std::string, std::string> values_;
  std::set<std::string> used_;
};

void parse_action_set(const std::string& text, const std::string& path,
                      ActionSetSpec& out, Collector& errors) {
  if (text == "l2ball") {
    out.kind = SetKind::L2Ball;
    return;
  }
  if (text.rfind("lqball:", 0) == 0) {
    double q;
    if (!parse_double_str(text.substr(7), q)) {
      errors.add(path, "lqball needs a numeric exponent, e.g. lqball:3");
      return;
    }
    if (!(q >= 1.01 && q <= 100.0)) {
      errors.add(path, "lqball exponent q must lie in [1.01, 100]");
      return;
    }
    out.kind = SetKind::LqBall;
    out.q = q;
    return;
  }
  if (text.rfind("finite(", 0) == 0 && text.back() == ')') {
    const std::string body = text.substr(7, text.size() - 8);
    std::vector<Vec> points;
    for (const std::string& pt : split(body, ';')) {
      if (pt.empty()) continue;
      Vec v;
      std::istringstream is(pt);
      double x;
      while (is >> x) v.push_back(x);
      if (!is.eof()) {
        errors.add(path, "finite point '" + pt + "' is not a number list");
        return;
      }
      points.push_back(std::move(v));
    }
    if (points.empty()) {
      errors.add(path, "finite set needs at least one point");
      return;
    }
    out.kind = SetKind::Finite;
    out.points = std::move(points);
    return;
  }
  errors.add(path, "unknown action set '" + text +
                       "' (expected l2ball, lqball:<q> or finite(...))");
}

void apply_preset(const std::string& name, InstanceSpec& inst,
                  const std::string& path, Collector& errors) {
  if (name == "sphere") {
    inst.set = {};  // l2ball
    inst.theta = {true, 0.8, {}};
    inst.S = 0.5;
    inst.R = 1.0;
  } else if (name == "smooth") {
    inst.set.kind = SetKind::LqBall;
    inst.set.q = 3.0;
    inst.theta = {true, 0.8, {}};
    inst.S = 0.5;
    inst.R = 1.0;
  } else if (name == "trap") {
    // Finite, non-absorbing: the second arm is informative but looks worse,
    // the first reveals nothing about the second coordinate.
    inst.d = 2;
    inst.set.kind = SetKind::Finite;
    inst.set.points = {{1.0, 0.0}, {0.8, 0.6}};
    inst.theta = {false, 0.0, {0.78, 0.62}};
    inst.S = 0.5;
    inst.R = 1.0;
  } else {
    errors.add(path, "unknown scenario '" + name +
                         "' (expected smooth, sphere or trap)");
  }
}

InstanceSpec parse_instance(const RawSection& sec, Collector& errors) {
  InstanceSpec inst;
  KeyReader r(sec, "instance", errors);

  if (auto v = r.raw("scenario")) apply_preset(*v, inst, "instance.scenario", errors);

  r.get_int("d", inst.d);
  if (inst.d < 1) errors.add("instance.d", "dimension must be at least 1");

  if (auto v = r.raw("theta_star")) {
    if (*v == "random") {
      inst.theta.random = true;
    } else {
      Vec vec;
      for (const std::string& part : split(*v, ',')) {
        double x;
        if (!parse_double_str(part, x)) {
          errors.add("instance.theta_star",
                     "expected 'random' or a comma-separated vector");
          vec.clear();
          break;
        }
        vec.push_back(x);
      }
      if (!vec.empty()) {
        inst.theta.random = false;
        inst.theta.explicit_value = std::move(vec);
      }
    }
  }
  r.get_double("theta_norm", inst.theta.norm);
  if (auto v = r.raw("action_set"))
    parse_action_set(*v, "instance.action_set", inst.set, errors);
  if (auto v = r.raw("noise")) {
    if (*v == "gaussian")
      inst.noise = NoiseKind::Gaussian;
    else if (*v == "uniform")
      inst.noise = NoiseKind::Uniform;
    else
      errors.add("instance.noise", "expected gaussian or uniform");
  }
  r.get_double("S", inst.S);
  r.get_double("R", inst.R);
  r.finish();

  if (!(inst.S >= 0.0)) errors.add("instance.S", "noise scale must be >= 0");
  if (!(inst.R > 0.0)) errors.add("instance.R", "parameter bound must be > 0");
  if (inst.theta.random) {
    if (!(inst.theta.norm > 0.0))
      errors.add("instance.theta_norm", "norm of a random theta must be > 0");
    else if (inst.theta.norm > inst.R)
      errors.add("instance.theta_norm", "norm exceeds the parameter bound R");
  } else {
    if (static_cast<int>(inst.theta.explicit_value.size()) != inst.d)
      errors.add("instance.theta_star", "vector length differs from d");
    else if (norm2(inst.theta.explicit_value) == 0.0)
      errors.add("instance.theta_star", "theta_star must be nonzero");
    else if (norm2(inst.theta.explicit_value) > inst.R * (1.0 + 1e-12))
      errors.add("instance.theta_star", "norm exceeds the parameter bound R");
  }
  if (inst.set.kind == SetKind::Finite) {
    for (const auto& p : inst.set.points) {
      if (static_cast<int>(p.size()) != inst.d) {
        errors.add("instance.action_set", "finite point length differs from d");
        break;
      }
      if (norm2(p) > 1.0 + 1e-12) {
        errors.add("instance.action_set", "finite point outside the unit ball");
        break;
      }
    }
  }
  return inst;
}

AgentSpec parse_agent(const RawSection& sec, Collector& errors) {
  AgentSpec agent;
  const std::string path = sec.label.empty() ? "agent" : "agent " + sec.label;
  KeyReader r(sec, path, errors);

  std::string kind = "randomised";
  r.get_string("kind", kind);
  bool is_randomised = false;
  if (kind == "randomised" || kind == "lints") {
    agent.config.kind = RandomisedCfg{};
    is_randomised = true;
  } else if (kind == "oful") {
    agent.config.kind = OfulCfg{};
  } else if (kind == "phased_etc") {
    agent.config.kind = PhasedEtcCfg{};
  } else if (kind == "uniform_random") {
    agent.config.kind = UniformRandomCfg{};
  } else {
    errors.add(path + ".kind",
               "expected randomised|lints|oful|phased_etc|uniform_random");
  }

  if (is_randomised) {
    auto& cfg = std::get<RandomisedCfg>(agent.config.kind);
    if (auto v = r.raw("perturbation")) {
      if (*v == "gaussian") {
        cfg.perturbation = PerturbationSpec::standard_gaussian();
      } else if (*v == "sphere") {
        cfg.perturbation = PerturbationSpec::uniform_sphere();
      } else if (v->rfind("scaled_gaussian:", 0) == 0) {
        double sigma;
        if (!parse_double_str(v->substr(16), sigma) || !(sigma > 0.0))
          errors.add(path + ".perturbation",
                     "scaled_gaussian needs a positive sigma");
        else
          cfg.perturbation = PerturbationSpec::scaled_gaussian(sigma);
      } else {
        errors.add(path + ".perturbation",
                   "expected gaussian, sphere or scaled_gaussian:<sigma>");
      }
    }
    r.get_double("inflation", cfg.inflation);
    if (!(cfg.inflation >= 1.0))
      errors.add(path + ".inflation", "inflation must be at least 1");
  } else {
    for (const char* k : {"perturbation", "inflation"})
      if (r.raw(k)) errors.add(path + "." + k, "only valid for randomised agents");
  }

  if (auto* o = std::get_if<OfulCfg>(&agent.config.kind)) {
    r.get_int("restarts", o->restarts);
    r.get_int("iters", o->iters);
    if (o->restarts < 1) errors.add(path + ".restarts", "must be at least 1");
    if (o->iters < 1) errors.add(path + ".iters", "must be at least 1");
  } else {
    for (const char* k : {"restarts", "iters"})
      if (r.raw(k)) errors.add(path + "." + k, "only valid for oful agents");
  }

  r.get_double("lambda", agent.config.lambda);
  r.get_double("delta", agent.config.delta);
  r.finish();

  if (!(agent.config.lambda > 0.0))
    errors.add(path + ".lambda", "must be positive");
  if (!(agent.config.delta > 0.0 && agent.config.delta < 1.0))
    errors.add(path + ".delta", "must lie in (0,1)");

  agent.name = sec.label.empty() ? kind : sec.label;
  return agent;
}

RunSpec parse_run(const RawSection& sec, Collector& errors) {
  RunSpec run;
  KeyReader r(sec, "run", errors);
  r.get_i64("horizon", run.horizon);
  r.get_int("trials", run.trials);
  r.get_u64("master_seed", run.master_seed);
  r.get_int("workers", run.workers);
  r.get_bool("diagnostics", run.diagnostics);
  r.get_string("out_dir", run.out_dir);
  r.finish();
  if (run.horizon < 0) errors.add("run.horizon", "must be nonnegative");
  if (run.trials < 1) errors.add("run.trials", "must be at least 1");
  if (run.workers < 0) errors.add("run.workers", "must be positive");
  if (run.out_dir.empty()) errors.add("run.out_dir", "must not be empty");
  return run;
}

ScaleSpec parse_scale(const RawSection& sec, Collector& errors) {
  ScaleSpec sc;
  KeyReader r(sec, "scale", errors);
  if (auto v = r.raw("d_values")) {
    sc.d_values.clear();
    for (const std::string& part : split(*v, ',')) {
      std::int64_t x;
      if (!parse_i64_str(part, x) || x < 1) {
        errors.add("scale.d_values", "expected a comma list of dimensions >= 1");
        break;
      }
      sc.d_values.push_back(static_cast<int>(x));
    }
  }
  if (auto v = r.raw("checkpoints")) {
    sc.checkpoints.clear();
    for (const std::string& part : split(*v, ',')) {
      std::int64_t x;
      if (!parse_i64_str(part, x) || x < 1) {
        errors.add("scale.checkpoints", "expected a comma list of horizons >= 1");
        break;
      }
      sc.checkpoints.push_back(x);
    }
  }
  r.get_int("trials", sc.trials);
  r.get_i64("dim_checkpoint", sc.dim_checkpoint);
  r.finish();
  if (sc.trials < 2) errors.add("scale.trials", "must be at least 2");
  if (sc.checkpoints.size() < 2)
    errors.add("scale.checkpoints", "needs at least 2 checkpoints");
  if (sc.dim_checkpoint < 1) errors.add("scale.dim_checkpoint", "must be >= 1");
  return sc;
}

}  // namespace

ActionSet ActionSetSpec::build(std::size_t dim) const {
  switch (kind) {
    case SetKind::L2Ball:
      return ActionSet::l2_ball(dim);
    case SetKind::LqBall:
      return ActionSet::lq_ball(dim, q);
    case SetKind::Finite:
      return ActionSet::finite(points);
    case SetKind::Transformed:
      throw Error("transformed sets are built through the library API");
  }
  throw Error("action set spec: unreachable");
}

ParseResult parse_config(const std::string& text) {
  ParseResult result;
  Collector errors(result.errors);

  std::vector<RawSection> sections;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        errors.add("line " + std::to_string(lineno), "unterminated section header");
        continue;
      }
      const std::string header = trim(line.substr(1, line.size() - 2));
      RawSection sec;
      if (auto sp = header.find(' '); sp != std::string::npos) {
        sec.name = header.substr(0, sp);
        sec.label = trim(header.substr(sp + 1));
      } else {
        sec.name = header;
      }
      if (sec.name != "instance" && sec.name != "agent" && sec.name != "run" &&
          sec.name != "scale") {
        errors.add(sec.name, "unknown section");
      }
      sections.push_back(std::move(sec));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      errors.add("line " + std::to_string(lineno), "expected key = value");
      continue;
    }
    if (sections.empty()) {
      errors.add("line " + std::to_string(lineno), "key outside any section");
      continue;
    }
    sections.back().kv.emplace_back(trim(line.substr(0, eq)),
                                    trim(line.substr(eq + 1)));
  }

  ExperimentConfig cfg;
  bool saw_instance = false, saw_run = false, saw_scale = false;
  std::set<std::string> agent_names;
  for (const auto& sec : sections) {
    if (sec.name == "instance") {
      if (saw_instance) {
        errors.add("instance", "duplicate section");
        continue;
      }
      saw_instance = true;
      cfg.instance = parse_instance(sec, errors);
    } else if (sec.name == "agent") {
      AgentSpec agent = parse_agent(sec, errors);
      if (!agent_names.insert(agent.name).second)
        errors.add("agent " + agent.name, "duplicate agent name");
      cfg.agents.push_back(std::move(agent));
    } else if (sec.name == "run") {
      if (saw_run) {
        errors.add("run", "duplicate section");
        continue;
      }
      saw_run = true;
      cfg.run = parse_run(sec, errors);
    } else if (sec.name == "scale") {
      if (saw_scale) {
        errors.add("scale", "duplicate section");
        continue;
      }
      saw_scale = true;
      cfg.scale = parse_scale(sec, errors);
    }
  }
  if (cfg.agents.empty()) errors.add("agent", "at least one agent section required");

  if (errors.empty()) result.config = std::move(cfg);
  return result;
}

ParseResult parse_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) {
    ParseResult r;
    r.errors.push_back({path, "cannot open config file"});
    return r;
  }
  std::ostringstream os;
  os << f.rdbuf();
  return parse_config(os.str());
}

}  // namespace banditforge
