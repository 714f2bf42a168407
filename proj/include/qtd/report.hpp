#pragma once

// Report builders and artifact plumbing shared by the command-line tool:
// every subcommand is a pure function from a RunConfig to a structured
// report plus an exit status, so outputs are byte-stable by construction.

#include <qtd/determinism.hpp>
#include <qtd/glued.hpp>
#include <qtd/local_rules.hpp>

#include <nlohmann/json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace qtd {

using nlohmann::json;

struct RunConfig {
  std::string spec = "grid2";  // builtin name or path to a substitution file
  int levels = 3;              // level bound for pooled checks
  int level = -1;              // single level (defaults to `levels`)
  long budget_bfs = 200000;
  long max_vertices = 5'000'000;
  int threads = 1;
  uint32_t seed = 20240826u;
  int sample_count = 100;
  int max_path_len = 12;
  std::string out;             // output path; empty = stdout
  std::string format = "json"; // "json" | "text"

  int effective_level() const { return level >= 0 ? level : levels; }
  void validate_bounds() const {
    if (levels < 0 || budget_bfs < 0 || max_vertices <= 0 || threads < 1)
      throw std::invalid_argument("budgets must be positive");
  }
};

// Exit statuses: 0 clean, 1 violations found, 2 usage error, >= 3 internal.
enum ExitStatus : int { kExitOk = 0, kExitViolations = 1, kExitUsage = 2, kExitInternal = 3 };

// Writes atomically: the content appears under `path` only in full.
inline void atomic_write(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + tmp + " for writing");
    os << content;
    if (!os.flush()) throw std::runtime_error("write to " + tmp + " failed");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("cannot rename " + tmp + " to " + path);
}

inline long env_max_vertices(long fallback) {
  if (const char* e = std::getenv("QTD_MAX_VERTICES")) {
    long v = std::atol(e);
    if (v > 0) return v;
  }
  return fallback;
}

// --- validate ---------------------------------------------------------------------

inline int run_validate(const RunConfig& cfg, json& out) {
  out["command"] = "validate";
  out["spec"] = cfg.spec;
  SubstitutionSpec sp;
  try {
    sp = spec_from_file_or_builtin(cfg.spec);
  } catch (const std::exception& e) {
    out["valid"] = false;
    out["errors"] = json::array({e.what()});
    return kExitViolations;
  }
  ValidationReport vr = sp.validate();
  out["valid"] = vr.ok();
  out["errors"] = vr.errors;
  out["warnings"] = vr.warnings;
  if (vr.ok()) {
    out["name"] = sp.name;
    out["side_vertices"] = sp.s;
    out["tiles"] = sp.tiles.size();
    out["corner_condition"] = sp.corner_condition;
    out["is_grid"] = sp.is_grid;
  }
  return vr.ok() ? kExitOk : kExitViolations;
}

// --- build ------------------------------------------------------------------------

inline int run_build(const RunConfig& cfg, json& out, std::string& text) {
  SubstitutionSpec sp = spec_from_file_or_builtin(cfg.spec);
  auto vr = sp.validate();
  if (!vr.ok()) throw std::invalid_argument("invalid substitution: " + vr.joined());
  Complex K = build_complex(sp, cfg.effective_level(), env_max_vertices(cfg.max_vertices));
  out["command"] = "build";
  out["spec"] = sp.name;
  out["level"] = K.level;
  out["vertices"] = K.verts.size();
  out["edges"] = K.edges.size();
  out["tiles"] = K.tiles.size();
  out["dump"] = K.dump();
  text = K.dump();
  return kExitOk;
}

// --- render -----------------------------------------------------------------------

// Vertices are filled from a fixed 16-color palette by a stable hash of the
// vertex Color; the legend maps each occurring Color to its palette entry.
inline std::string render_svg_colored(const Complex& K, const ColoringContext& ctx,
                                      json& legend, int size = 800) {
  static const char* kPalette[16] = {
      "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
      "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#aec7e8", "#ffbb78",
      "#98df8a", "#ff9896", "#c5b0d5", "#c49c94"};
  auto hue = [&](const std::string& c) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : c) h = (h ^ ch) * 1099511628211ull;
    return kPalette[h % 16];
  };
  auto px = [&](const Rat& r) { return r.get_d() * (size - 40) + 20; };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
     << "\">\n";
  for (auto& t : K.tiles) {
    os << "<polygon points=\"";
    for (int i = 0; i < 4; ++i) {
      const Vec2& p = K.verts[t.c[i]].pos;
      os << px(p.x) << "," << px(p.y) << (i < 3 ? " " : "");
    }
    os << "\" fill=\"none\" stroke=\"#cccccc\" stroke-width=\"0.5\"/>\n";
  }
  for (auto& e : K.edges) {
    const Vec2 &a = K.verts[e.tail].pos, &b = K.verts[e.head].pos;
    os << "<line x1=\"" << px(a.x) << "\" y1=\"" << px(a.y) << "\" x2=\"" << px(b.x)
       << "\" y2=\"" << px(b.y) << "\" stroke=\"#999999\" stroke-width=\"1\"/>\n";
  }
  for (Vid v = 0; v < (Vid)K.verts.size(); ++v) {
    const std::string& c = ctx.color(v);
    legend[c] = hue(c);
    os << "<circle cx=\"" << px(K.verts[v].pos.x) << "\" cy=\"" << px(K.verts[v].pos.y)
       << "\" r=\"3\" fill=\"" << hue(c) << "\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

inline int run_render(const RunConfig& cfg, std::string& svg, json& legend) {
  SubstitutionSpec sp = spec_from_file_or_builtin(cfg.spec);
  auto vr = sp.validate();
  if (!vr.ok()) throw std::invalid_argument("invalid substitution: " + vr.joined());
  Complex K = build_complex(sp, cfg.effective_level(), env_max_vertices(cfg.max_vertices));
  ColoringContext ctx(K);
  svg = render_svg_colored(K, ctx, legend);
  return kExitOk;
}

// --- census -----------------------------------------------------------------------

inline int run_census(const RunConfig& cfg, json& out) {
  SubstitutionSpec sp = spec_from_file_or_builtin(cfg.spec);
  auto vr = sp.validate();
  if (!vr.ok()) throw std::invalid_argument("invalid substitution: " + vr.joined());
  out["command"] = "census";
  out["spec"] = sp.name;
  json rows = json::array();
  std::set<std::string> prev_full, prev_plain;
  int stable_full = -1, stable_plain = -1;
  for (int n = 1; n <= cfg.levels; ++n) {
    Complex K = build_complex(sp, n, env_max_vertices(cfg.max_vertices));
    ColoringContext ctx(K);
    auto full = ctx.census();
    auto plain = ctx.own_color_census();
    if (n > 1 && stable_full < 0 && full == prev_full) stable_full = n - 1;
    if (n > 1 && stable_plain < 0 && plain == prev_plain) stable_plain = n - 1;
    rows.push_back({{"level", n},
                    {"full_colors", full.size()},
                    {"colors", plain.size()}});
    prev_full = std::move(full);
    prev_plain = std::move(plain);
  }
  out["levels"] = rows;
  out["stabilized_full_at"] = stable_full;
  out["stabilized_colors_at"] = stable_plain;
  return kExitOk;
}

// --- check-determinism ------------------------------------------------------------

inline int run_check_determinism(const RunConfig& cfg, json& out) {
  SubstitutionSpec sp = spec_from_file_or_builtin(cfg.spec);
  auto vr = sp.validate();
  if (!vr.ok()) throw std::invalid_argument("invalid substitution: " + vr.joined());
  out["command"] = "check-determinism";
  out["spec"] = sp.name;
  out["levels"] = cfg.levels;

  std::vector<Complex> Ks;
  for (int n = 1; n <= cfg.levels; ++n)
    Ks.push_back(build_complex(sp, n, env_max_vertices(cfg.max_vertices)));

  std::vector<CaseRec> cases;
  CompletionTables tables;
  json cons = json::array();
  bool cons_ok = true;
  for (const Complex& K : Ks) {
    ColoringContext ctx(K);
    for (auto& c : enumerate_cases(ctx, cfg.threads)) cases.push_back(std::move(c));
    tables.absorb(ctx);
    ConsequenceReport cr = check_consequences(ctx);
    cons_ok = cons_ok && cr.ok();
    cons.push_back({{"level", K.level},
                    {"directed_edges", cr.directed_edges},
                    {"c1_violations", cr.c1_violations},
                    {"c2_not_boss", cr.c2_not_boss},
                    {"c2_seniority_violations", cr.c2_seniority_violations},
                    {"c3_violations", cr.c3_violations},
                    {"ok", cr.ok()}});
  }
  DeterminismReport rep = classify_cases(cases);
  out["cases"] = rep.total_cases;
  out["classes"] = rep.classes;
  out["regular_classes"] = rep.regular_classes;
  out["special_classes"] = rep.special_classes;
  out["violations"] = rep.violations;
  out["consequences"] = cons;

  CompletionCheck cc = check_completion(tables, cases);
  out["completion"] = {{"checked", cc.checked},
                       {"agreed", cc.agreed},
                       {"special_agreed", cc.special_agreed},
                       {"mismatches", cc.mismatches}};
  bool ok = rep.violations.empty() && cons_ok && cc.mismatches.empty();
  out["ok"] = ok;
  return ok ? kExitOk : kExitViolations;
}

// --- glue / check-spatial ---------------------------------------------------------

inline json spatial_report_json(const SpatialReport& r) {
  return {{"windows", r.windows},
          {"skipped_special", r.skipped_special},
          {"skipped_unsubdivided", r.skipped_unsubdivided},
          {"classes", r.classes},
          {"violations", r.violations},
          {"violating_keys", r.violating_keys}};
}

inline int run_glue(const RunConfig& cfg, json& out, std::string& text) {
  SubstitutionSpec sp = spec_from_file_or_builtin(cfg.spec);
  GluedComplex G = build_glued(sp, cfg.effective_level(), env_max_vertices(cfg.max_vertices));
  out["command"] = "glue";
  out["spec"] = G.spec->name;
  out["depth"] = cfg.effective_level();
  out["vertices"] = G.gverts.size();
  out["edges"] = G.gedges.size();
  out["cells"] = G.gcells.size();
  out["bases"] = G.bases.size();
  out["glue_counts"] = G.glue_counts;
  out["dump"] = G.dump();
  text = G.dump();
  return kExitOk;
}

inline int run_check_spatial(const RunConfig& cfg, json& out) {
  SubstitutionSpec sp = spec_from_file_or_builtin(cfg.spec);
  GluedComplex G = build_glued(sp, cfg.effective_level(), env_max_vertices(cfg.max_vertices));
  SpatialReport rep = verify_spatial_determinism(G);
  out["command"] = "check-spatial";
  out["spec"] = G.spec->name;
  out["depth"] = cfg.effective_level();
  out["glue_counts"] = G.glue_counts;
  out["spatial"] = spatial_report_json(rep);
  out["ok"] = rep.violations == 0;
  return rep.violations == 0 ? kExitOk : kExitViolations;
}

// --- straighten -------------------------------------------------------------------

// Runs the sampled straightening study and emits the flip-sequence
// certificates; the certificate file is the structured output itself.
inline int run_straighten(const RunConfig& cfg, json& out) {
  SubstitutionSpec sp = spec_from_file_or_builtin(cfg.spec);
  GluedComplex G = build_glued(sp, cfg.effective_level(), env_max_vertices(cfg.max_vertices));
  out["command"] = "straighten";
  out["spec"] = G.spec->name;
  out["depth"] = cfg.effective_level();
  out["seed"] = cfg.seed;
  auto paths = sample_base_paths(G, 0, cfg.sample_count, cfg.max_path_len, cfg.seed);
  json certs = json::array();
  int ok_n = 0, exhausted = 0, inconclusive = 0;
  for (auto& p : paths) {
    StraightenResult r = straighten(G, p, 0, cfg.budget_bfs);
    json flips = json::array();
    for (auto& f : r.flips) flips.push_back({{"pos", f.pos}, {"from", f.from}, {"to", f.to}});
    certs.push_back({{"input", p},
                     {"ok", r.ok},
                     {"output", r.path},
                     {"flips", flips},
                     {"states_visited", r.states_visited},
                     {"detail", r.detail}});
    if (r.ok)
      ++ok_n;
    else if (r.detail == "class exhausted")
      ++exhausted;
    else
      ++inconclusive;
  }
  out["sampled"] = paths.size();
  out["straightened"] = ok_n;
  out["proven_stuck"] = exhausted;
  out["budget_exceeded"] = inconclusive;
  out["certificates"] = certs;
  return ok_n == (int)paths.size() ? kExitOk : kExitViolations;
}

// --- local-rules ------------------------------------------------------------------

inline int run_local_rules(const RunConfig& cfg, json& out) {
  SubstitutionSpec sp = spec_from_file_or_builtin(cfg.spec);
  auto vr = sp.validate();
  if (!vr.ok()) throw std::invalid_argument("invalid substitution: " + vr.joined());
  int nmax = std::max(2, cfg.levels);
  LatticeSources S = build_lattice_sources(sp, nmax);
  WindowLanguage L = collect_window_language(S);
  out["command"] = "local-rules";
  out["spec"] = sp.name;
  out["levels"] = nmax;
  out["language_size"] = L.windows.size();

  long side = 1;
  for (int i = 0; i < nmax; ++i) side *= S.grid_m;
  ++side;  // vertices per row of K_nmax
  json cuts = json::array();
  bool all_ok = true;
  std::vector<GridColoring> windows;
  std::mt19937 wrng(12345);
  for (int m : {2, 4, 8, 16}) {
    if (m + 1 > side) continue;
    long r = wrng() % (side - m), c = wrng() % (side - m);
    GridColoring g = cut_window(S, nmax, r, c, m, m);
    windows.push_back(g);
    bool valid = validate_grid_coloring(L, g).ok;
    Embedding e = embed_grid(S, L, g);
    all_ok = all_ok && valid && e.ok;
    cuts.push_back({{"size", m}, {"row", r}, {"col", c}, {"valid", valid}, {"embeds", e.ok}});
  }
  out["windows"] = cuts;

  std::vector<std::string> palette;
  {
    auto cs = S.ctx(nmax).census();
    palette.assign(cs.begin(), cs.end());
  }
  MutationStudy st = run_mutation_study(S, L, windows, palette, 200, cfg.seed);
  out["mutations"] = {{"attempts", st.attempts},
                      {"rejected_by_validation", st.rejected_by_validation},
                      {"rejected_by_embedding", st.rejected_by_embedding},
                      {"accepted", st.accepted},
                      {"rejection_rate", st.rejection_rate()}};
  bool ok = all_ok && st.rejection_rate() >= 0.95;
  out["ok"] = ok;
  return ok ? kExitOk : kExitViolations;
}

// --- report -----------------------------------------------------------------------

// The canonical combined report: structure, census, flat and spatial
// determinism, and (for grids) local rules, in one deterministic document.
inline int run_report(const RunConfig& cfg, json& out) {
  SubstitutionSpec sp = spec_from_file_or_builtin(cfg.spec);
  auto vr = sp.validate();
  if (!vr.ok()) throw std::invalid_argument("invalid substitution: " + vr.joined());
  out["command"] = "report";
  out["spec"] = sp.name;

  json structure = json::array();
  for (int n = 1; n <= cfg.levels; ++n) {
    Complex K = build_complex(sp, n, env_max_vertices(cfg.max_vertices));
    structure.push_back({{"level", n},
                         {"vertices", K.verts.size()},
                         {"edges", K.edges.size()},
                         {"tiles", K.tiles.size()}});
  }
  out["structure"] = structure;

  json census;
  run_census(cfg, census);
  out["census"] = {{"levels", census["levels"]},
                   {"stabilized_full_at", census["stabilized_full_at"]},
                   {"stabilized_colors_at", census["stabilized_colors_at"]}};

  json det;
  int det_rc = run_check_determinism(cfg, det);
  det.erase("command");
  out["determinism"] = det;

  int spatial_rc = kExitOk;
  json sj;
  if (sp.corner_condition) {
    RunConfig scfg = cfg;
    scfg.level = std::min(cfg.effective_level(), 3);
    spatial_rc = run_check_spatial(scfg, sj);
    sj.erase("command");
    out["spatial"] = sj;
  }

  int lr_rc = kExitOk;
  if (sp.is_grid) {
    json lr;
    RunConfig lcfg = cfg;
    lcfg.levels = std::min(cfg.levels, 4);
    lr_rc = run_local_rules(lcfg, lr);
    lr.erase("command");
    out["local_rules"] = lr;
  }
  bool ok = det_rc == kExitOk && spatial_rc == kExitOk && lr_rc == kExitOk;
  out["ok"] = ok;
  return ok ? kExitOk : kExitViolations;
}

}  // namespace qtd
