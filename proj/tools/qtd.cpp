// qtd — substitution quadrilateral complexes: build, color, verify.

#include <qtd/report.hpp>

#include <CLI11.hpp>

#include <iostream>
#include <string>

namespace {

using qtd::json;
using qtd::RunConfig;

void emit(const RunConfig& cfg, const std::string& content) {
  if (cfg.out.empty())
    std::cout << content;
  else
    qtd::atomic_write(cfg.out, content);
}

void emit_json(const RunConfig& cfg, const json& j) { emit(cfg, j.dump(2) + "\n"); }

void add_common(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--spec", cfg.spec, "builtin name (grid2, grid3, hepta) or spec file path");
  cmd->add_option("--levels", cfg.levels, "level bound for pooled checks");
  cmd->add_option("--level", cfg.level, "single level / depth");
  cmd->add_option("--budget-bfs", cfg.budget_bfs, "search budget for BFS oracles");
  cmd->add_option("--max-vertices", cfg.max_vertices,
                  "vertex cap (env QTD_MAX_VERTICES overrides)");
  cmd->add_option("--threads", cfg.threads, "worker threads (deterministic merge)");
  cmd->add_option("--out", cfg.out, "output file (written atomically; default stdout)");
  cmd->add_option("--format", cfg.format, "json | text")
      ->check(CLI::IsMember({"json", "text"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"substitution quadrilateral complexes: build, color, verify"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string picked;
  for (const char* name : {"validate", "build", "render", "census", "check-determinism",
                           "check-spatial", "glue", "straighten", "local-rules", "report"}) {
    CLI::App* sub = app.add_subcommand(name, "");
    add_common(sub, cfg);
    if (std::string(name) == "straighten") {
      sub->add_option("--seed", cfg.seed, "sampling seed");
      sub->add_option("--count", cfg.sample_count, "number of sampled paths");
      sub->add_option("--max-len", cfg.max_path_len, "maximum sampled path length (edges)");
    }
    sub->callback([&picked, name] { picked = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : qtd::kExitUsage;
  }

  try {
    cfg.validate_bounds();
    json out;
    std::string text;
    int rc;
    if (picked == "validate") {
      rc = qtd::run_validate(cfg, out);
      emit_json(cfg, out);
    } else if (picked == "build") {
      rc = qtd::run_build(cfg, out, text);
      if (cfg.format == "text")
        emit(cfg, text);
      else
        emit_json(cfg, out);
    } else if (picked == "render") {
      std::string svg;
      json legend;
      rc = qtd::run_render(cfg, svg, legend);
      emit(cfg, svg);
      if (!cfg.out.empty())
        qtd::atomic_write(cfg.out + ".legend.json", legend.dump(2) + "\n");
    } else if (picked == "census") {
      rc = qtd::run_census(cfg, out);
      emit_json(cfg, out);
    } else if (picked == "check-determinism") {
      rc = qtd::run_check_determinism(cfg, out);
      emit_json(cfg, out);
    } else if (picked == "check-spatial") {
      rc = qtd::run_check_spatial(cfg, out);
      emit_json(cfg, out);
    } else if (picked == "glue") {
      rc = qtd::run_glue(cfg, out, text);
      if (cfg.format == "text")
        emit(cfg, text);
      else
        emit_json(cfg, out);
    } else if (picked == "straighten") {
      rc = qtd::run_straighten(cfg, out);
      emit_json(cfg, out);
    } else if (picked == "local-rules") {
      rc = qtd::run_local_rules(cfg, out);
      emit_json(cfg, out);
    } else {
      rc = qtd::run_report(cfg, out);
      emit_json(cfg, out);
    }
    return rc;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return qtd::kExitViolations;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return qtd::kExitInternal;
  }
}
