#include "kslab/harness.hpp"

#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "kslab/errors.hpp"
#include "kslab/kernels.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace kslab {

namespace {

constexpr const char* kSeriesHeader =
    "step,t,dt,mass,l2u_sq,l3u,linf_u,l2v_sq,gradv_l2_sq,gradv_l4_4,lap_v_l2_sq,vt_l2_sq,"
    "phi_u,phiprime_u_usq,clipped_mass";

const char* kind_name(DatumKind k) {
  switch (k) {
    case DatumKind::spike: return "spike";
    case DatumKind::multi_spike: return "multi_spike";
    case DatumKind::plateau_noise: return "plateau_noise";
    case DatumKind::smooth: return "smooth";
  }
  return "spike";
}

const char* vkind_name(VKind k) {
  switch (k) {
    case VKind::constant: return "constant";
    case VKind::cosine_mix: return "cosine_mix";
    case VKind::kink: return "kink";
  }
  return "cosine_mix";
}

std::string eps_tag(double eps) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", eps);
  std::string s = buf;
  for (char& c : s)
    if (c == '.') c = 'p';
  return "eps_" + s;
}

json config_echo(const RunConfig& cfg) {
  json grid{{"nx", cfg.grid.nx}, {"ny", cfg.grid.ny}, {"lx", cfg.grid.lx}, {"ly", cfg.grid.ly}};
  json model{{"chi", cfg.model.chi},     {"kappa", cfg.model.kappa},
             {"mu", cfg.model.mu},       {"eps", cfg.model.eps},
             {"T", cfg.model.T},         {"dt_max", cfg.model.dt_max},
             {"cfl", cfg.model.cfl},     {"tol", cfg.model.tol},
             {"saturated_source", cfg.model.saturated_source}};
  json centers = json::array();
  for (const Point& p : cfg.data.centers) centers.push_back({p.x, p.y});
  json data{{"kind", kind_name(cfg.data.kind)},
            {"alpha", cfg.data.alpha},
            {"amplitude", cfg.data.amplitude},
            {"centers", centers},
            {"v_kind", vkind_name(cfg.data.v_kind)},
            {"v_amplitude", cfg.data.v_amplitude},
            {"q0", cfg.q0},
            {"family_k_min", cfg.family_k_min},
            {"family_k_max", cfg.family_k_max},
            {"delta_scale", cfg.delta_scale}};
  json phi{{"k_max", cfg.phi_k_max}, {"x_max", cfg.phi_x_max}, {"march_step", cfg.march_step}};
  json output{{"dir", cfg.out_dir},
             {"tau", cfg.tau},
             {"times", cfg.extra_times},
             {"ladder_depth", cfg.ladder_depth},
             {"jobs", cfg.jobs},
             {"sweep_probe_time", cfg.sweep_probe_time}};
  return json{{"grid", grid}, {"model", model}, {"data", data}, {"phi", phi}, {"output", output}};
}

json initial_json(const StepRecord& r) {
  return json{{"mass", r.mass},
              {"l2u_sq", r.l2u_sq},
              {"l3u", r.l3u},
              {"linf_u", r.linf_u},
              {"l2v_sq", r.l2v_sq},
              {"gradv_l2_sq", r.gradv_l2_sq},
              {"gradv_l4_4", r.gradv_l4_4},
              {"lap_v_l2_sq", r.lap_v_l2_sq},
              {"phi_u", r.phi_u},
              {"phiprime_u_usq", r.phiprime_u_usq}};
}

StepRecord initial_from_json(const json& j) {
  StepRecord r;
  r.mass = j.at("mass").get<double>();
  r.l2u_sq = j.at("l2u_sq").get<double>();
  r.l3u = j.at("l3u").get<double>();
  r.linf_u = j.at("linf_u").get<double>();
  r.l2v_sq = j.at("l2v_sq").get<double>();
  r.gradv_l2_sq = j.at("gradv_l2_sq").get<double>();
  r.gradv_l4_4 = j.at("gradv_l4_4").get<double>();
  r.lap_v_l2_sq = j.at("lap_v_l2_sq").get<double>();
  r.phi_u = j.at("phi_u").get<double>();
  r.phiprime_u_usq = j.at("phiprime_u_usq").get<double>();
  return r;
}

std::string snapshot_to_string(const Field& f, double t) {
  std::ostringstream os;
  write_snapshot(os, f, t);
  return os.str();
}

// integral of the weight composed with a field (serial; used by cmd_phi only)
double integral_phi_of(const Field& f, const FinalWeight& w) {
  double s = 0.0;
  for (double v : f.a) s += w.phi(v);
  return s * f.grid.cell_area();
}

struct MemberOutcome {
  double eps = 0.0;
  std::string dir;
  bool completed = false;
  bool bounds_pass = false;
  Field u_final, v_final;
  std::string error;
};

void run_member(const RunConfig& cfg, const PhiArtifact* phi, MemberOutcome& out) {
  try {
    SpectralSolver solver(cfg.grid);
    RunProducts prod = execute_run(cfg, phi, solver);
    persist_run(cfg, prod, phi);
    out.completed = prod.result.completed;
    out.bounds_pass = prod.report.all_pass();
    out.u_final = prod.result.state.u;
    out.v_final = prod.result.state.v;
  } catch (const std::exception& e) {
    out.completed = false;
    out.error = e.what();
  }
}

void print_bound_table(const std::string& label, const BoundReport& rep) {
  std::printf("%s\n", label.c_str());
  std::printf("  %-16s %-6s %12s %10s\n", "check", "pass", "margin", "at_t");
  for (const BoundEntry& e : rep.entries)
    std::printf("  %-16s %-6s %12.4e %10.4g\n", e.lemma.c_str(), e.pass ? "PASS" : "FAIL",
                e.margin, e.at_t);
}

}  // namespace

// --- utilities --------------------------------------------------------------

std::uint64_t fnv1a64(const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 14695981039346656037ull;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("short write to " + path);
}

// --- serialization ----------------------------------------------------------

std::string series_to_csv(const std::vector<StepRecord>& series) {
  std::string out = kSeriesHeader;
  out += '\n';
  char buf[512];
  for (const StepRecord& r : series) {
    std::snprintf(buf, sizeof buf,
                  "%ld,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,"
                  "%.17g,%.17g\n",
                  r.step, r.t, r.dt, r.mass, r.l2u_sq, r.l3u, r.linf_u, r.l2v_sq, r.gradv_l2_sq,
                  r.gradv_l4_4, r.lap_v_l2_sq, r.vt_l2_sq, r.phi_u, r.phiprime_u_usq,
                  r.clipped_mass);
    out += buf;
  }
  return out;
}

std::vector<StepRecord> series_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("series: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kSeriesHeader) throw std::runtime_error("series: unexpected header");
  std::vector<StepRecord> out;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    StepRecord r;
    double cols[14];
    char* p = line.data();
    char* end = nullptr;
    r.step = std::strtol(p, &end, 10);
    p = end;
    for (int c = 0; c < 14; ++c) {
      if (*p != ',') throw std::runtime_error("series: malformed row");
      ++p;
      cols[c] = std::strtod(p, &end);
      if (end == p) throw std::runtime_error("series: malformed row");
      p = end;
    }
    if (*p != '\0') throw std::runtime_error("series: trailing characters");
    r.t = cols[0];
    r.dt = cols[1];
    r.mass = cols[2];
    r.l2u_sq = cols[3];
    r.l3u = cols[4];
    r.linf_u = cols[5];
    r.l2v_sq = cols[6];
    r.gradv_l2_sq = cols[7];
    r.gradv_l4_4 = cols[8];
    r.lap_v_l2_sq = cols[9];
    r.vt_l2_sq = cols[10];
    r.phi_u = cols[11];
    r.phiprime_u_usq = cols[12];
    r.clipped_mass = cols[13];
    out.push_back(r);
  }
  return out;
}

std::string bound_report_to_json(const BoundReport& rep) {
  json entries = json::array();
  for (const BoundEntry& e : rep.entries)
    entries.push_back(json{{"lemma", e.lemma},
                           {"inequality", e.inequality},
                           {"margin", e.margin},
                           {"pass", e.pass},
                           {"at_t", e.at_t}});
  json j{{"format", 1}, {"all_pass", rep.all_pass()}, {"entries", entries}};
  return j.dump(2) + "\n";
}

BoundReport bound_report_from_json(const std::string& text) {
  const json j = json::parse(text);
  BoundReport rep;
  for (const json& e : j.at("entries")) {
    BoundEntry be;
    be.lemma = e.at("lemma").get<std::string>();
    be.inequality = e.at("inequality").get<std::string>();
    be.margin = e.at("margin").get<double>();
    be.pass = e.at("pass").get<bool>();
    be.at_t = e.at("at_t").get<double>();
    rep.entries.push_back(std::move(be));
  }
  return rep;
}

std::string phi_to_json(const PhiArtifact& art) {
  json samples = json::array();
  for (std::size_t i = 0; i < art.weight.x.size(); ++i)
    samples.push_back({art.weight.x[i], art.weight.h[i]});
  json j{{"phi_format", 1},
         {"knots", art.spec.knots},
         {"eps", art.eps_ladder},
         {"march_step", art.march_step},
         {"x_max", art.x_max},
         {"lipschitz_phi_c", art.lipschitz_phi_c},
         {"samples", samples}};
  return j.dump(2) + "\n";
}

PhiArtifact phi_from_json(const std::string& text) {
  const json j = json::parse(text);
  if (j.at("phi_format").get<int>() != 1) throw std::runtime_error("phi.json: unknown format");
  PhiArtifact art;
  art.spec.knots = j.at("knots").get<std::vector<double>>();
  art.eps_ladder = j.at("eps").get<std::vector<double>>();
  art.march_step = j.at("march_step").get<double>();
  art.x_max = j.at("x_max").get<double>();
  art.lipschitz_phi_c = j.at("lipschitz_phi_c").get<double>();
  AdjustedWeight w;
  w.march_step = art.march_step;
  w.x_max = art.x_max;
  w.lipschitz_phi_c = art.lipschitz_phi_c;
  for (const json& row : j.at("samples")) {
    const double xv = row.at(0).get<double>();
    if (xv == 0.0) continue;  // the leading row is re-prepended by finalize
    w.x.push_back(xv);
    w.h.push_back(row.at(1).get<double>());
  }
  w.f.resize(w.x.size());
  for (std::size_t i = 0; i < w.x.size(); ++i) w.f[i] = art.spec.slope_deriv(w.x[i]);
  art.weight = finalize_phi(art.spec, w);
  return art;
}

// --- building blocks ---------------------------------------------------------

FamilyResult build_member(const RunConfig& cfg, double eps, SpectralSolver& solver) {
  validate_spec(cfg.data, cfg.grid.lx, cfg.grid.ly);
  if (eps > 0.0) return build_family(cfg.data, cfg.grid, eps, solver, cfg.delta_scale);
  FamilyResult out;
  out.u0e = sample_u0(cfg.data, cfg.grid);
  out.v0e = sample_v0(cfg.data, cfg.grid);
  out.eps = 0.0;
  out.clamp_level = std::numeric_limits<double>::infinity();
  out.delta = 0.0;
  return out;
}

PhiArtifact build_weight_artifact(const RunConfig& cfg, SpectralSolver& solver) {
  PhiArtifact art;
  std::vector<Field> members;
  for (int k = cfg.family_k_min; k <= cfg.family_k_max; ++k) {
    const double eps = std::ldexp(1.0, -k);
    art.eps_ladder.push_back(eps);
    members.push_back(build_family(cfg.data, cfg.grid, eps, solver, cfg.delta_scale).u0e);
  }
  const auto profile = [&members](double M) {
    double sup = 0.0;
    for (const Field& f : members) sup = std::max(sup, tail_mass(f, M));
    return sup;
  };
  art.spec = construct_phi(profile, cfg.phi_k_max);
  art.x_max = cfg.phi_x_max > 0.0 ? cfg.phi_x_max : art.spec.knots.back();
  art.march_step = cfg.march_step;
  const PhiSpec& spec = art.spec;
  AdjustedWeight w =
      adjust_weight([&spec](double x) { return spec.slope_deriv(x); }, art.x_max, art.march_step);
  art.lipschitz_phi_c = w.lipschitz_phi_c;
  art.weight = finalize_phi(art.spec, w);
  return art;
}

FamilyNorms compute_norms(const RunConfig& cfg, const FamilyResult& fam, const FinalWeight* phi) {
  FamilyNorms norms;
  norms.area = cfg.grid.area();
  norms.u0_l1 = u0_l1_analytic(cfg.data, cfg.grid.lx, cfg.grid.ly);
  norms.u0e_l1 = integrate(fam.u0e);
  norms.v0_w12 = v0_w12_analytic(cfg.data, cfg.grid.lx, cfg.grid.ly).norm();
  norms.initial = evaluate_functionals(fam.u0e, fam.v0e, phi);
  return norms;
}

RunProducts execute_run(const RunConfig& cfg, const PhiArtifact* phi, SpectralSolver& solver) {
  RunProducts prod;
  prod.family = build_member(cfg, cfg.model.eps, solver);
  const FinalWeight* w = phi ? &phi->weight : nullptr;
  prod.norms = compute_norms(cfg, prod.family, w);
  prod.result =
      run_simulation(prod.family.u0e, prod.family.v0e, cfg.model, solver, snapshot_times(cfg), w);
  prod.report = check_bounds(prod.result.series, cfg.model, prod.norms, w);
  return prod;
}

void persist_run(const RunConfig& cfg, const RunProducts& prod, const PhiArtifact* phi) {
  fs::create_directories(cfg.out_dir);
  json files;

  const auto emit = [&](const std::string& name, const std::string& bytes) {
    write_text_file((fs::path(cfg.out_dir) / name).string(), bytes);
    files[name] = hash_hex(fnv1a64(bytes.data(), bytes.size()));
  };

  emit("series.csv", series_to_csv(prod.result.series));
  for (std::size_t s = 0; s < prod.result.snapshots.size(); ++s) {
    const auto& [t, uv] = prod.result.snapshots[s];
    char name[40];
    std::snprintf(name, sizeof name, "snap_u_%03zu.csv", s);
    emit(name, snapshot_to_string(uv.first, t));
    std::snprintf(name, sizeof name, "snap_v_%03zu.csv", s);
    emit(name, snapshot_to_string(uv.second, t));
  }
  emit("bound_report.json", bound_report_to_json(prod.report));
  if (phi) emit("phi.json", phi_to_json(*phi));

  json derived{{"area", cfg.grid.area()},
               {"u0_l1_analytic", prod.norms.u0_l1},
               {"u0e_l1", prod.norms.u0e_l1},
               {"v0_w12_analytic", prod.norms.v0_w12},
               {"clamp_level", std::isfinite(prod.family.clamp_level) ? prod.family.clamp_level
                                                                      : 0.0},
               {"delta", prod.family.delta},
               {"rescaled_u", prod.family.rescaled_u},
               {"rescaled_v", prod.family.rescaled_v},
               {"initial", initial_json(prod.norms.initial)}};
  json status{{"completed", prod.result.completed},
              {"steps", prod.result.series.size()},
              {"final_t", prod.result.state.t},
              {"clipped_mass_cum", prod.result.state.clipped_mass_cum},
              {"aborted_at_step", prod.result.aborted_at_step},
              {"abort_reason", prod.result.abort_reason},
              {"bounds_pass", prod.report.all_pass()}};
  json manifest{{"tool", "kslab"},   {"version", "1.0.0"},   {"format", 1},
                {"config", config_echo(cfg)}, {"derived", derived}, {"files", files},
                {"status", status}};
  write_text_file((fs::path(cfg.out_dir) / "manifest.json").string(), manifest.dump(2) + "\n");
}

int sweep_worker_count(const RunConfig& cfg, int jobs_override, std::size_t n_members) {
  int jobs = 0;
  if (jobs_override > 0) {
    jobs = jobs_override;
  } else if (const char* env = std::getenv("KS_LAB_JOBS"); env && *env) {
    jobs = std::atoi(env);
  }
  if (jobs <= 0) jobs = cfg.jobs;
  if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
  if (jobs <= 0) jobs = 1;
  return static_cast<int>(std::min<std::size_t>(jobs, std::max<std::size_t>(n_members, 1)));
}

// --- commands ----------------------------------------------------------------

int cmd_run(const std::string& config_path) {
  const RunConfig cfg = load_config(config_path);
  SpectralSolver solver(cfg.grid);
  const PhiArtifact phi = build_weight_artifact(cfg, solver);
  const RunProducts prod = execute_run(cfg, &phi, solver);
  persist_run(cfg, prod, &phi);

  print_bound_table("run " + cfg.out_dir, prod.report);
  if (!prod.result.completed) {
    std::printf("aborted at step %ld: %s\n", prod.result.aborted_at_step,
                prod.result.abort_reason.c_str());
    return 3;
  }
  std::printf("steps %zu, final t %.17g, clipped mass %.3e\n", prod.result.series.size(),
              prod.result.state.t, prod.result.state.clipped_mass_cum);
  return prod.report.all_pass() ? 0 : 4;
}

int cmd_sweep(const std::string& config_path, std::vector<double> eps_list,
              std::vector<int> nx_list, int jobs_override) {
  const RunConfig cfg = load_config(config_path);
  if (eps_list.empty() == nx_list.empty())
    throw ConfigError("sweep", "exactly one of --eps and --nx must be given");

  if (!eps_list.empty()) {
    std::sort(eps_list.begin(), eps_list.end(), std::greater<double>());
    eps_list.erase(std::unique(eps_list.begin(), eps_list.end()), eps_list.end());
    for (double e : eps_list)
      if (!(e > 0.0)) throw ConfigError("sweep.eps", "members must be > 0 (the limit is added)");

    SpectralSolver solver(cfg.grid);
    const PhiArtifact phi = build_weight_artifact(cfg, solver);

    std::vector<RunConfig> member_cfgs;
    std::vector<MemberOutcome> outcomes(eps_list.size() + 1);
    for (std::size_t i = 0; i <= eps_list.size(); ++i) {
      const double eps = i < eps_list.size() ? eps_list[i] : 0.0;
      RunConfig m = cfg;
      m.model.eps = eps;
      m.model.T = cfg.sweep_probe_time;
      m.out_dir = (fs::path(cfg.out_dir) / eps_tag(eps)).string();
      member_cfgs.push_back(std::move(m));
      outcomes[i].eps = eps;
      outcomes[i].dir = member_cfgs.back().out_dir;
    }

    const int jobs = sweep_worker_count(cfg, jobs_override, member_cfgs.size());
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w)
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= member_cfgs.size()) return;
          run_member(member_cfgs[i], &phi, outcomes[i]);
        }
      });
    for (std::thread& th : pool) th.join();

    bool any_abort = false, all_bounds = true;
    for (const MemberOutcome& o : outcomes) {
      if (!o.completed) any_abort = true;
      if (!o.bounds_pass) all_bounds = false;
      if (!o.error.empty()) std::fprintf(stderr, "%s: %s\n", o.dir.c_str(), o.error.c_str());
    }

    json report{{"kind", "eps"}, {"probe_time", cfg.sweep_probe_time}};
    json members = json::array();
    for (const MemberOutcome& o : outcomes)
      members.push_back(json{{"eps", o.eps},
                             {"dir", o.dir},
                             {"completed", o.completed},
                             {"bounds_pass", o.bounds_pass}});
    report["members"] = members;

    bool monotone_ok = true;
    if (!any_abort && eps_list.size() >= 2) {
      std::vector<const Field*> fields;
      for (std::size_t i = 0; i < eps_list.size(); ++i) fields.push_back(&outcomes[i].u_final);
      const EpsCompareReport cmp =
          compare_eps_members(eps_list, fields, outcomes.back().u_final);
      json gaps = json::array();
      for (const EpsCompareRow& r : cmp.gaps)
        gaps.push_back(json{{"eps_hi", r.eps_hi},
                            {"eps_lo", r.eps_lo},
                            {"d_l2", r.d_l2},
                            {"d_linf", r.d_linf}});
      report["gaps"] = gaps;
      report["dist_l2"] = cmp.dist_l2;
      report["gaps_decreasing"] = cmp.gaps_decreasing;
      report["dist_decreasing"] = cmp.dist_decreasing;
      monotone_ok = cmp.gaps_decreasing && cmp.dist_decreasing;
      std::printf("eps sweep at t* = %g\n", cfg.sweep_probe_time);
      for (const EpsCompareRow& r : cmp.gaps)
        std::printf("  d(%g, %g): L2 %.6e  Linf %.6e\n", r.eps_hi, r.eps_lo, r.d_l2, r.d_linf);
      for (std::size_t i = 0; i < cmp.dist_l2.size(); ++i)
        std::printf("  D(%g -> limit): L2 %.6e\n", eps_list[i], cmp.dist_l2[i]);
      std::printf("  gaps decreasing: %s, distances decreasing: %s\n",
                  cmp.gaps_decreasing ? "yes" : "no", cmp.dist_decreasing ? "yes" : "no");
    } else {
      report["gaps"] = json::array();
      report["dist_l2"] = json::array();
    }

    fs::create_directories(cfg.out_dir);
    write_text_file((fs::path(cfg.out_dir) / "sweep_report.json").string(),
                    report.dump(2) + "\n");
    if (any_abort) return 3;
    return (monotone_ok && all_bounds) ? 0 : 4;
  }

  // --nx: refinement probe of the rough datum
  std::sort(nx_list.begin(), nx_list.end());
  nx_list.erase(std::unique(nx_list.begin(), nx_list.end()), nx_list.end());
  for (int nx : nx_list)
    if (nx < 8) throw ConfigError("sweep.nx", "need nx >= 8");

  std::vector<RunConfig> member_cfgs;
  std::vector<MemberOutcome> outcomes(nx_list.size());
  std::vector<double> raw_sup(nx_list.size(), 0.0);
  for (std::size_t i = 0; i < nx_list.size(); ++i) {
    RunConfig m = cfg;
    m.grid.nx = nx_list[i];
    m.grid.ny = nx_list[i];
    m.model.T = cfg.tau;
    m.out_dir = (fs::path(cfg.out_dir) / ("nx_" + std::to_string(nx_list[i]))).string();
    member_cfgs.push_back(std::move(m));
    outcomes[i].dir = member_cfgs.back().out_dir;
  }

  const int jobs = sweep_worker_count(cfg, jobs_override, member_cfgs.size());
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < jobs; ++w)
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= member_cfgs.size()) return;
        raw_sup[i] = max_abs(sample_u0(member_cfgs[i].data, member_cfgs[i].grid));
        run_member(member_cfgs[i], nullptr, outcomes[i]);
      }
    });
  for (std::thread& th : pool) th.join();

  bool any_abort = false, all_bounds = true;
  std::vector<SmoothingRow> rows;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (!outcomes[i].completed) any_abort = true;
    if (!outcomes[i].bounds_pass) all_bounds = false;
    if (!outcomes[i].error.empty())
      std::fprintf(stderr, "%s: %s\n", outcomes[i].dir.c_str(), outcomes[i].error.c_str());
    SmoothingRow row;
    row.nx = nx_list[i];
    row.linf_u0_raw = raw_sup[i];
    row.linf_u_probe = outcomes[i].completed ? max_abs(outcomes[i].u_final) : 0.0;
    rows.push_back(row);
  }
  const SmoothingReport rep = assess_smoothing(rows, cfg.tau);

  json rows_json = json::array();
  for (const SmoothingRow& r : rep.rows)
    rows_json.push_back(
        json{{"nx", r.nx}, {"linf_u0_raw", r.linf_u0_raw}, {"linf_u_probe", r.linf_u_probe}});
  json report{{"kind", "nx"},
              {"probe_time", rep.probe_time},
              {"rows", rows_json},
              {"raw_grows", rep.raw_grows},
              {"probe_stable", rep.probe_stable}};
  fs::create_directories(cfg.out_dir);
  write_text_file((fs::path(cfg.out_dir) / "sweep_report.json").string(), report.dump(2) + "\n");

  std::printf("refinement probe at t = %g\n", rep.probe_time);
  for (const SmoothingRow& r : rep.rows)
    std::printf("  nx %4d: sup u0 %.6e  sup u(t) %.6e\n", r.nx, r.linf_u0_raw, r.linf_u_probe);
  std::printf("  raw datum grows: %s, evolved field stable: %s\n", rep.raw_grows ? "yes" : "no",
              rep.probe_stable ? "yes" : "no");
  if (any_abort) return 3;
  return (rep.raw_grows && rep.probe_stable && all_bounds) ? 0 : 4;
}

int cmd_phi(const std::string& config_path) {
  const RunConfig cfg = load_config(config_path);
  SpectralSolver solver(cfg.grid);

  // family ladder, tail profile, stage-1 spec
  std::vector<Field> members;
  std::vector<double> ladder;
  for (int k = cfg.family_k_min; k <= cfg.family_k_max; ++k) {
    const double eps = std::ldexp(1.0, -k);
    ladder.push_back(eps);
    members.push_back(build_family(cfg.data, cfg.grid, eps, solver, cfg.delta_scale).u0e);
  }
  const auto profile = [&members](double M) {
    double sup = 0.0;
    for (const Field& f : members) sup = std::max(sup, tail_mass(f, M));
    return sup;
  };
  PhiArtifact art;
  art.eps_ladder = ladder;
  art.spec = construct_phi(profile, cfg.phi_k_max);
  art.x_max = cfg.phi_x_max > 0.0 ? cfg.phi_x_max : art.spec.knots.back();
  art.march_step = cfg.march_step;
  const PhiSpec& spec = art.spec;
  const AdjustedWeight w =
      adjust_weight([&spec](double x) { return spec.slope_deriv(x); }, art.x_max, art.march_step);
  art.lipschitz_phi_c = w.lipschitz_phi_c;
  art.weight = finalize_phi(art.spec, w);

  bool ok = true;
  const auto check = [&ok](const char* name, bool pass, double value) {
    std::printf("  %-28s %s  (%.6e)\n", name, pass ? "PASS" : "FAIL", value);
    ok = ok && pass;
  };

  std::printf("weight construction: %zu knots, x_max %.6g, %zu march samples\n",
              art.spec.knots.size(), art.x_max, w.x.size());

  double worst_hx = 0.0;
  for (std::size_t i = 0; i < w.x.size(); ++i) worst_hx = std::max(worst_hx, w.h[i] * w.x[i]);
  check("second_derivative_cap", worst_hx <= 1.0 + 1e-12, worst_hx);

  double worst_psi = -std::numeric_limits<double>::infinity();
  for (double p : w.psi) worst_psi = std::max(worst_psi, p);
  check("psi_nonpositive", worst_psi <= 1e-12, worst_psi);

  // superlinearity witnessed on the knots: Phi(M_k)/M_k dominates the slope
  // one knot down, and the knot ratios increase
  bool knots_ok = true;
  double prev_ratio = 0.0, worst_knot = std::numeric_limits<double>::infinity();
  for (std::size_t k = 2; k < art.spec.knots.size(); ++k) {
    const double Mk = art.spec.knots[k];
    if (Mk > art.x_max) break;
    const double ratio = art.weight.upper(Mk) / Mk;
    const double target = spec.slope(art.spec.knots[k - 1]);
    worst_knot = std::min(worst_knot, ratio / target);
    if (ratio < target * (1.0 - 1e-6)) knots_ok = false;
    if (ratio <= prev_ratio) knots_ok = false;
    prev_ratio = ratio;
  }
  check("knot_superlinearity", knots_ok, worst_knot);

  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const Field& f : members) {
    const double v = integral_phi_of(f, art.weight);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  check("family_integral_spread", hi <= 1.5 * lo, hi / lo);

  // worked adjustment examples against closed forms
  {
    const AdjustedWeight at = adjust_weight([](double x) { return 1.0 / x; }, 1e3, 1e-3);
    double dev = 0.0;
    for (std::size_t i = 0; i < at.x.size(); ++i) dev = std::max(dev, std::fabs(at.h[i] - at.g[i]));
    check("example_f_at_envelope", dev <= 1e-12, dev);
  }
  {
    const AdjustedWeight at = adjust_weight([](double x) { return 1.0 / (1.0 + x); }, 1e3, 1e-3);
    double dev = 0.0;
    for (std::size_t i = 0; i < at.x.size(); ++i) dev = std::max(dev, std::fabs(at.h[i] - at.f[i]));
    check("example_f_below_envelope", dev <= 1e-12, dev);
  }
  {
    const AdjustedWeight at = adjust_weight([](double) { return 1.0; }, 2e3, 1e-3);
    // cumulative integral of h with the leading sample extended to x = 0
    std::vector<double> xs{0.0}, hs{at.h.front()};
    xs.insert(xs.end(), at.x.begin(), at.x.end());
    hs.insert(hs.end(), at.h.begin(), at.h.end());
    std::vector<double> cum(xs.size(), 0.0);
    for (std::size_t i = 1; i < xs.size(); ++i)
      cum[i] = cum[i - 1] + 0.5 * (hs[i] + hs[i - 1]) * (xs[i] - xs[i - 1]);
    bool pass = true;
    double worst = 0.0;
    for (double X : {10.0, 100.0, 1000.0}) {
      const std::size_t j =
          std::upper_bound(xs.begin(), xs.end(), X) - xs.begin();  // first x > X
      const double frac = (X - xs[j - 1]) / (xs[j] - xs[j - 1]);
      const double got = cum[j - 1] + frac * (cum[j] - cum[j - 1]);
      const double want = 1.0 + std::log(X);
      worst = std::max(worst, std::fabs(got - want) / want);
      if (std::fabs(got - want) > 0.01 * want) pass = false;
    }
    check("example_min_one_over_x", pass, worst);
  }

  fs::create_directories(cfg.out_dir);
  const std::string text = phi_to_json(art);
  write_text_file((fs::path(cfg.out_dir) / "phi.json").string(), text);
  std::printf("phi.json written to %s (%s)\n", cfg.out_dir.c_str(),
              hash_hex(fnv1a64(text.data(), text.size())).c_str());
  return ok ? 0 : 4;
}

int cmd_verify(const std::string& run_dir) {
  json manifest;
  try {
    manifest = json::parse(read_text_file((fs::path(run_dir) / "manifest.json").string()));
  } catch (const std::exception& e) {
    std::fprintf(stderr, "verify: %s\n", e.what());
    return 2;
  }

  bool ok = true;
  for (const auto& [name, hash] : manifest.at("files").items()) {
    std::string bytes;
    try {
      bytes = read_text_file((fs::path(run_dir) / name).string());
    } catch (const std::exception&) {
      std::printf("  %-20s MISSING\n", name.c_str());
      ok = false;
      continue;
    }
    const std::string got = hash_hex(fnv1a64(bytes.data(), bytes.size()));
    const bool match = got == hash.get<std::string>();
    if (!match) std::printf("  %-20s HASH MISMATCH (%s != %s)\n", name.c_str(), got.c_str(),
                            hash.get<std::string>().c_str());
    ok = ok && match;
  }
  if (!ok) return 4;

  // recompute the inequality checks from the stored series
  const json& jm = manifest.at("config").at("model");
  ModelParams p;
  p.chi = jm.at("chi").get<double>();
  p.kappa = jm.at("kappa").get<double>();
  p.mu = jm.at("mu").get<double>();
  p.eps = jm.at("eps").get<double>();
  p.T = jm.at("T").get<double>();
  p.dt_max = jm.at("dt_max").get<double>();
  p.cfl = jm.at("cfl").get<double>();
  p.tol = jm.at("tol").get<double>();
  p.saturated_source = jm.at("saturated_source").get<bool>();

  const json& jd = manifest.at("derived");
  FamilyNorms norms;
  norms.area = jd.at("area").get<double>();
  norms.u0_l1 = jd.at("u0_l1_analytic").get<double>();
  norms.u0e_l1 = jd.at("u0e_l1").get<double>();
  norms.v0_w12 = jd.at("v0_w12_analytic").get<double>();
  norms.initial = initial_from_json(jd.at("initial"));

  const std::vector<StepRecord> series =
      series_from_csv(read_text_file((fs::path(run_dir) / "series.csv").string()));

  PhiArtifact phi;
  bool has_phi = manifest.at("files").contains("phi.json");
  if (has_phi)
    phi = phi_from_json(read_text_file((fs::path(run_dir) / "phi.json").string()));

  const BoundReport fresh = check_bounds(series, p, norms, has_phi ? &phi.weight : nullptr);
  const BoundReport stored = bound_report_from_json(
      read_text_file((fs::path(run_dir) / "bound_report.json").string()));

  bool same = fresh.entries.size() == stored.entries.size();
  if (same)
    for (std::size_t i = 0; i < fresh.entries.size(); ++i) {
      const BoundEntry& a = fresh.entries[i];
      const BoundEntry& b = stored.entries[i];
      if (a.lemma != b.lemma || a.pass != b.pass ||
          std::fabs(a.margin - b.margin) > 1e-9 * std::max(1.0, std::fabs(b.margin)))
        same = false;
    }
  if (!same) {
    std::printf("verify: recomputed bound report disagrees with the stored one\n");
    print_bound_table("recomputed", fresh);
    print_bound_table("stored", stored);
    return 4;
  }
  if (manifest.at("status").at("bounds_pass").get<bool>() != stored.all_pass()) {
    std::printf("verify: manifest status disagrees with bound_report.json\n");
    return 4;
  }
  std::printf("verify %s: %zu files hashed, %zu checks recomputed, all consistent\n",
              run_dir.c_str(), manifest.at("files").size(), fresh.entries.size());
  return 0;
}

int cmd_report(const std::vector<std::string>& dirs) {
  std::vector<std::string> run_dirs;
  for (const std::string& d : dirs) {
    if (fs::exists(fs::path(d) / "manifest.json")) {
      run_dirs.push_back(d);
      continue;
    }
    if (!fs::is_directory(d)) {
      std::fprintf(stderr, "report: no such directory: %s\n", d.c_str());
      return 2;
    }
    std::vector<std::string> subs;
    for (const auto& entry : fs::directory_iterator(d))
      if (entry.is_directory() && fs::exists(entry.path() / "manifest.json"))
        subs.push_back(entry.path().string());
    std::sort(subs.begin(), subs.end());
    run_dirs.insert(run_dirs.end(), subs.begin(), subs.end());
  }
  if (run_dirs.empty()) {
    std::fprintf(stderr, "report: no run directories found\n");
    return 2;
  }
  for (const std::string& d : run_dirs) {
    json manifest;
    BoundReport rep;
    try {
      manifest = json::parse(read_text_file((fs::path(d) / "manifest.json").string()));
      rep = bound_report_from_json(read_text_file((fs::path(d) / "bound_report.json").string()));
    } catch (const std::exception& e) {
      std::fprintf(stderr, "report: %s: %s\n", d.c_str(), e.what());
      return 2;
    }
    const json& st = manifest.at("status");
    std::printf("%s  (steps %ld, final t %g, completed %s)\n", d.c_str(),
                static_cast<long>(st.at("steps").get<std::size_t>()),
                st.at("final_t").get<double>(),
                st.at("completed").get<bool>() ? "yes" : "no");
    print_bound_table("", rep);
  }
  return 0;
}

}  // namespace kslab
