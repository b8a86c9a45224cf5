#include "kslab/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "kslab/errors.hpp"

namespace kslab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

using SectionMap = std::map<std::string, std::map<std::string, std::string>>;

SectionMap parse_sections(const std::string& text) {
  static const char* known[] = {"grid", "model", "data", "phi", "output"};
  SectionMap sections;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw ConfigError(t, "malformed section header");
      section = trim(t.substr(1, t.size() - 2));
      if (std::find(std::begin(known), std::end(known), section) == std::end(known))
        throw ConfigError(section, "unknown section");
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno), "expected key = value");
    if (section.empty()) throw ConfigError(trim(t.substr(0, eq)), "key outside any section");
    const std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    const auto hash = value.find(" #");
    if (hash != std::string::npos) value = trim(value.substr(0, hash));
    if (key.empty()) throw ConfigError(section + ".", "empty key");
    if (!sections[section].emplace(key, value).second)
      throw ConfigError(section + "." + key, "duplicate key");
  }
  return sections;
}

class SectionReader {
 public:
  SectionReader(SectionMap& all, std::string name) : name_(std::move(name)) {
    auto it = all.find(name_);
    if (it != all.end()) kv_ = &it->second;
  }

  bool has(const std::string& key) const { return kv_ && kv_->count(key); }

  std::string raw(const std::string& key) {
    auto it = kv_->find(key);
    std::string v = it->second;
    kv_->erase(it);
    return v;
  }

  double num(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    return to_num(key, raw(key));
  }
  double num_required(const std::string& key) {
    if (!has(key)) throw ConfigError(name_ + "." + key, "missing required key");
    return to_num(key, raw(key));
  }
  int integer(const std::string& key, int fallback) {
    if (!has(key)) return fallback;
    const double v = to_num(key, raw(key));
    if (v != std::floor(v)) throw ConfigError(name_ + "." + key, "expected an integer");
    return static_cast<int>(v);
  }
  bool flag(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    std::string v = raw(key);
    std::transform(v.begin(), v.end(), v.begin(), ::tolower);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError(name_ + "." + key, "expected a boolean");
  }
  std::string text(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    return raw(key);
  }
  std::string text_required(const std::string& key) {
    if (!has(key)) throw ConfigError(name_ + "." + key, "missing required key");
    return raw(key);
  }
  std::vector<double> numbers(const std::string& key) {
    std::vector<double> out;
    if (!has(key)) return out;
    std::string v = raw(key);
    for (char& c : v)
      if (c == ';' || c == ',') c = ' ';
    std::istringstream in(v);
    std::string tok;
    while (in >> tok) out.push_back(to_num(key, tok));
    return out;
  }

  void reject_leftovers() const {
    if (kv_ && !kv_->empty())
      throw ConfigError(name_ + "." + kv_->begin()->first, "unknown key");
  }

  void fail(const std::string& key, const std::string& why) const {
    throw ConfigError(name_ + "." + key, why);
  }

 private:
  double to_num(const std::string& key, const std::string& v) const {
    try {
      std::size_t used = 0;
      const double x = std::stod(v, &used);
      if (used != v.size()) throw std::invalid_argument("trailing characters");
      return x;
    } catch (const std::exception&) {
      throw ConfigError(name_ + "." + key, "expected a number, got '" + v + "'");
    }
  }

  std::string name_;
  std::map<std::string, std::string>* kv_ = nullptr;
};

DatumKind parse_kind(SectionReader& data) {
  const std::string v = data.text_required("kind");
  if (v == "spike") return DatumKind::spike;
  if (v == "multi_spike") return DatumKind::multi_spike;
  if (v == "plateau_noise") return DatumKind::plateau_noise;
  if (v == "smooth") return DatumKind::smooth;
  data.fail("kind", "unknown datum kind '" + v + "'");
  return DatumKind::spike;  // unreachable
}

VKind parse_vkind(SectionReader& data) {
  const std::string v = data.text("v_kind", "cosine_mix");
  if (v == "constant") return VKind::constant;
  if (v == "cosine_mix") return VKind::cosine_mix;
  if (v == "kink") return VKind::kink;
  data.fail("v_kind", "unknown signal kind '" + v + "'");
  return VKind::cosine_mix;  // unreachable
}

std::vector<Point> parse_centers(SectionReader& data) {
  std::vector<Point> out;
  if (!data.has("centers")) return {{0.5, 0.5}};
  std::string v = data.raw("centers");
  std::replace(v.begin(), v.end(), ',', ' ');
  std::istringstream groups(v);
  std::string group;
  while (std::getline(groups, group, ';')) {
    group = trim(group);
    if (group.empty()) continue;
    std::istringstream in(group);
    Point p;
    if (!(in >> p.x >> p.y)) data.fail("centers", "expected 'x y' pairs separated by ';'");
    std::string leftover;
    if (in >> leftover) data.fail("centers", "expected 'x y' pairs separated by ';'");
    out.push_back(p);
  }
  if (out.empty()) data.fail("centers", "no centers given");
  return out;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  SectionMap sections = parse_sections(text);
  RunConfig cfg;

  SectionReader grid(sections, "grid");
  if (!grid.has("nx")) grid.fail("nx", "missing required key");
  if (!grid.has("ny")) grid.fail("ny", "missing required key");
  cfg.grid.nx = grid.integer("nx", 0);
  cfg.grid.ny = grid.integer("ny", 0);
  cfg.grid.lx = grid.num("lx", 1.0);
  cfg.grid.ly = grid.num("ly", 1.0);
  if (cfg.grid.nx < 8) grid.fail("nx", "need nx >= 8");
  if (cfg.grid.ny < 8) grid.fail("ny", "need ny >= 8");
  if (!(cfg.grid.lx > 0.0)) grid.fail("lx", "need lx > 0");
  if (!(cfg.grid.ly > 0.0)) grid.fail("ly", "need ly > 0");
  grid.reject_leftovers();

  SectionReader model(sections, "model");
  cfg.model.chi = model.num_required("chi");
  cfg.model.kappa = model.num_required("kappa");
  cfg.model.mu = model.num_required("mu");
  cfg.model.eps = model.num_required("eps");
  cfg.model.T = model.num_required("T");
  cfg.model.dt_max = model.num("dt_max", cfg.model.dt_max);
  cfg.model.cfl = model.num("cfl", cfg.model.cfl);
  cfg.model.tol = model.num("tol", cfg.model.tol);
  cfg.model.saturated_source = model.flag("saturated_source", cfg.model.saturated_source);
  if (cfg.model.mu < 0.0) model.fail("mu", "need mu >= 0");
  if (cfg.model.eps < 0.0) model.fail("eps", "need eps >= 0");
  if (cfg.model.T < 0.0) model.fail("T", "need T >= 0");
  if (!(cfg.model.dt_max > 0.0)) model.fail("dt_max", "need dt_max > 0");
  if (!(cfg.model.cfl > 0.0 && cfg.model.cfl <= 1.0)) model.fail("cfl", "need cfl in (0, 1]");
  if (!(cfg.model.tol >= 0.0 && cfg.model.tol <= 1.0)) model.fail("tol", "need tol in [0, 1]");
  model.reject_leftovers();

  SectionReader data(sections, "data");
  cfg.data.kind = parse_kind(data);
  cfg.data.alpha = data.num("alpha", 1.0);
  cfg.data.amplitude = data.num("amplitude", 1.0);
  cfg.data.centers = parse_centers(data);
  cfg.data.v_kind = parse_vkind(data);
  cfg.data.v_amplitude = data.num("v_amplitude", 0.5);
  cfg.q0 = data.num("q0", 2.5);
  cfg.family_k_min = data.integer("family_k_min", 2);
  cfg.family_k_max = data.integer("family_k_max", 8);
  cfg.delta_scale = data.num("delta_scale", 0.25);
  if (!(cfg.data.alpha > 0.0 && cfg.data.alpha < 2.0)) data.fail("alpha", "need alpha in (0, 2)");
  if (cfg.data.amplitude < 0.0) data.fail("amplitude", "need amplitude >= 0");
  if (cfg.data.v_amplitude < 0.0) data.fail("v_amplitude", "need v_amplitude >= 0");
  if (!(cfg.q0 > 2.0)) data.fail("q0", "need q0 > 2");
  if (cfg.family_k_min < 0 || cfg.family_k_max < cfg.family_k_min || cfg.family_k_max > 30)
    data.fail("family_k_max", "need 0 <= family_k_min <= family_k_max <= 30");
  if (!(cfg.delta_scale > 0.0 && cfg.delta_scale <= 1.0))
    data.fail("delta_scale", "need delta_scale in (0, 1]");
  for (const Point& p : cfg.data.centers)
    if (!(p.x > 0.0 && p.x < cfg.grid.lx && p.y > 0.0 && p.y < cfg.grid.ly))
      data.fail("centers", "center outside the open domain");
  data.reject_leftovers();

  SectionReader phi(sections, "phi");
  cfg.phi_k_max = phi.integer("k_max", 12);
  cfg.phi_x_max = phi.num("x_max", 0.0);
  cfg.march_step = phi.num("march_step", 1e-3);
  if (cfg.phi_k_max < 1 || cfg.phi_k_max > 40) phi.fail("k_max", "need k_max in [1, 40]");
  if (cfg.phi_x_max < 0.0) phi.fail("x_max", "need x_max >= 0");
  if (!(cfg.march_step > 0.0 && cfg.march_step <= 0.1))
    phi.fail("march_step", "need march_step in (0, 0.1]");
  phi.reject_leftovers();

  SectionReader output(sections, "output");
  cfg.out_dir = output.text_required("dir");
  cfg.tau = output.num("tau", 0.1);
  cfg.extra_times = output.numbers("times");
  cfg.ladder_depth = output.integer("ladder_depth", 10);
  cfg.jobs = output.integer("jobs", 0);
  cfg.sweep_probe_time = output.num("sweep_probe_time", 0.5);
  if (!(cfg.tau > 0.0)) output.fail("tau", "need tau > 0");
  for (double t : cfg.extra_times)
    if (!(t > 0.0)) output.fail("times", "snapshot times must be > 0");
  if (cfg.ladder_depth < 1 || cfg.ladder_depth > 30)
    output.fail("ladder_depth", "need ladder_depth in [1, 30]");
  if (cfg.jobs < 0) output.fail("jobs", "need jobs >= 0");
  if (!(cfg.sweep_probe_time > 0.0)) output.fail("sweep_probe_time", "need a positive time");
  output.reject_leftovers();

  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::vector<double> snapshot_times(const RunConfig& cfg) {
  std::vector<double> times = cfg.extra_times;
  for (int k = 1; k * cfg.tau <= cfg.model.T * (1.0 + 1e-12); ++k)
    times.push_back(std::min(k * cfg.tau, cfg.model.T));
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end(),
                          [](double a, double b) { return std::fabs(a - b) < 1e-12; }),
              times.end());
  while (!times.empty() && times.back() > cfg.model.T) times.pop_back();
  return times;
}

}  // namespace kslab
