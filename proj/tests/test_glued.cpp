#include <qtd/glued.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

using namespace qtd;

namespace {

std::vector<long> counts(const GluedComplex& G) {
  std::vector<long> c;
  for (auto n : G.glue_counts) c.push_back((long)n);
  return c;
}

}  // namespace

TEST_CASE("glued grid2 structure by depth") {
  auto spec = builtin_spec("grid2");

  auto G1 = build_glued(spec, 1);
  CHECK(G1.gverts.size() == 9);
  CHECK(G1.gcells.size() == 4);
  CHECK(G1.gedges.size() == 12);
  CHECK(G1.bases.size() == 1);
  CHECK(counts(G1) == std::vector<long>{0});

  auto G2 = build_glued(spec, 2);
  CHECK(G2.gverts.size() == 31);
  CHECK(G2.gcells.size() == 22);
  CHECK(G2.gedges.size() == 52);
  CHECK(G2.bases.size() == 7);
  CHECK(counts(G2) == std::vector<long>{0, 6});

  auto G3 = build_glued(spec, 3);
  CHECK(G3.gverts.size() == 157);
  CHECK(G3.gcells.size() == 140);
  CHECK(G3.gedges.size() == 296);
  CHECK(G3.bases.size() == 59);
  CHECK(counts(G3) == std::vector<long>{0, 6, 52});
}

TEST_CASE("glued grid3 and hepta structure") {
  auto G3 = build_glued(builtin_spec("grid3"), 3);
  CHECK(G3.gverts.size() == 1152);
  CHECK(G3.bases.size() == 241);
  CHECK(counts(G3) == std::vector<long>{0, 16, 224});

  auto Gh = build_glued(builtin_spec("hepta"), 3);
  CHECK(Gh.gverts.size() == 640);
  CHECK(Gh.bases.size() == 209);
  CHECK(counts(Gh) == std::vector<long>{0, 12, 196});
}

TEST_CASE("every vertex has exactly one owning base") {
  auto G = build_glued(builtin_spec("grid2"), 3);
  for (Vid v = 0; v < (Vid)G.gverts.size(); ++v) {
    int b = G.gverts[v].base;
    REQUIRE(b >= 0);
    REQUIRE(b < (int)G.bases.size());
    // the owner must actually contain the vertex
    CHECK(G.localize(v, b) != (Vid)-1);
    // and no base older than the owner may contain it
    for (int ob = 0; ob < b; ++ob) CHECK(G.localize(v, ob) == (Vid)-1);
  }
}

TEST_CASE("root base equals the flat complex, flaps equal younger flat complexes") {
  auto spec = builtin_spec("grid2");
  auto G = build_glued(spec, 3);
  auto vr = spec.validate();
  REQUIRE(vr.ok());

  CHECK(G.bases[0].cx.dump() == build_complex(spec, 3).dump());

  // A flap glued after the level-2 subdivision has been subdivided once more.
  bool found = false;
  for (size_t b = 1; b < G.bases.size() && !found; ++b)
    if (G.bases[b].created_level == 2) {
      CHECK(G.bases[b].cx.dump() == build_complex(spec, 1).dump());
      found = true;
    }
  CHECK(found);
}

TEST_CASE("freshly glued corner has degree 2") {
  auto G = build_glued(builtin_spec("grid2"), 3);
  int checked = 0;
  for (size_t b = 1; b < G.bases.size(); ++b) {
    if (G.bases[b].created_level != 3) continue;  // glued at the final level
    Vid d = G.bases[b].l2g[2];                    // fresh fourth corner
    CHECK(G.adj[d].size() == 2);
    ++checked;
  }
  CHECK(checked == 52);
}

TEST_CASE("gluing is idempotent once no candidates remain") {
  auto G = build_glued(builtin_spec("grid2"), 2);
  size_t bases = G.bases.size(), cells = G.gcells.size();
  G.glue_step();
  CHECK(G.bases.size() == bases);
  CHECK(G.gcells.size() == cells);
}

TEST_CASE("edge classes: opens match closes, the rest are flat") {
  auto G = build_glued(builtin_spec("grid2"), 3);
  long open = 0, close = 0, flat = 0;
  for (auto& e : G.gedges)
    for (auto [u, w] : {std::pair<Vid, Vid>{e.u, e.w}, {e.w, e.u}}) {
      switch (G.classify_edge(u, w).first) {
        case EdgeClass::kOpen: ++open; break;
        case EdgeClass::kClose: ++close; break;
        case EdgeClass::kFlat: ++flat; break;
      }
    }
  CHECK(open == close);
  CHECK(open == 128);
  CHECK(flat == 2 * 296 - 2 * 128);
  // each non-flat edge opens into the younger of the two owning bases
  for (auto& e : G.gedges) {
    int bu = G.gverts[e.u].base, bw = G.gverts[e.w].base;
    if (bu == bw) continue;
    auto [cls, flap] = G.classify_edge(e.u, e.w);
    CHECK(cls != EdgeClass::kFlat);
    CHECK((flap == bu || flap == bw));
    auto younger = [&](int a, int b) {
      if (G.bases[a].created_level != G.bases[b].created_level)
        return G.bases[a].created_level > G.bases[b].created_level ? a : b;
      return a > b ? a : b;
    };
    CHECK(flap == younger(bu, bw));
  }
}

TEST_CASE("bracket strings of sampled paths are per-flap alternating") {
  auto G = build_glued(builtin_spec("grid2"), 3);
  auto paths = sample_base_paths(G, 0, 100, 12, 20240826u);
  REQUIRE(paths.size() == 100);
  for (auto& p : paths) {
    CHECK(brackets_well_formed(G, p));
    std::string s = path_bracket_string(G, p);
    CHECK((int)s.size() == (int)p.size() - 1);
    CHECK(path_bracket_count(G, p) == (int)s.size() - (int)std::count(s.begin(), s.end(), 'f'));
  }
}

TEST_CASE("spatial weak determinism holds on all built-ins, depths 2 and 3") {
  struct Row {
    const char* name;
    int depth;
    long windows, sk_special, sk_unsub, classes;
  };
  const Row rows[] = {
      {"grid2", 2, 776, 392, 328, 776},
      {"grid2", 3, 7152, 4128, 5664, 6522},
      {"grid3", 2, 5368, 832, 960, 5368},
      {"grid3", 3, 71016, 12816, 19968, 66552},
      {"hepta", 2, 3302, 1742, 1444, 3218},
      {"hepta", 3, 49780, 29988, 52376, 38916},
  };
  for (const Row& r : rows) {
    INFO(r.name << " depth " << r.depth);
    auto G = build_glued(builtin_spec(r.name), r.depth);
    auto rep = verify_spatial_determinism(G);
    CHECK(rep.windows == r.windows);
    CHECK(rep.skipped_special == r.sk_special);
    CHECK(rep.skipped_unsubdivided == r.sk_unsub);
    CHECK(rep.classes == r.classes);
    CHECK(rep.violations == 0);
  }
}

TEST_CASE("corrupting one vertex flag is detected") {
  auto G = build_glued(builtin_spec("grid2"), 3);
  // Vertex 89 appears as the reconstructed corner of a multi-member window
  // class; blanking fan slot 6 (its own-base color) in its flag makes its
  // completions disagree with the class representative.
  auto bad = verify_spatial_determinism(G, -1, 89, 6);
  CHECK(bad.violations == 2);
  // Blanking a slot uniformly in every window flag is recoverable from the
  // rest of the encoding: the verifier stays clean.
  auto blanked = verify_spatial_determinism(G, 6);
  CHECK(blanked.violations == 0);
}

TEST_CASE("spatial path encodings: blanking and plain flags") {
  auto G = build_glued(builtin_spec("grid2"), 3);
  auto paths = sample_base_paths(G, 0, 5, 6, 1u);
  for (auto& p : paths) {
    std::string full = encode_spatial_path(G, p);
    std::string blank = encode_spatial_path(G, p, 6);
    CHECK(full != blank);
    std::string plain0 = encode_spatial_path(G, p, -1, 0);
    CHECK(plain0.size() < full.size());
  }
}

TEST_CASE("cell table is conflict-free and supports lookups") {
  auto G = build_glued(builtin_spec("grid2"), 3);
  auto ct = build_cell_table(G);
  CHECK(ct.windows == 107392);
  CHECK(ct.skipped_irregular == 127072);
  CHECK(ct.table.size() == 23120);
  CHECK(ct.ok());

  long in = 0, out = 0, checked = 0;
  for (auto& [k, e] : ct.table) (e.in_cell ? in : out)++;
  CHECK(in > 0);
  CHECK(out > 0);

  // every enumerated regular window's middle triple resolves consistently
  for_each_walk(G, 7, [&](const std::vector<Vid>& w) {
    if (checked >= 200) return;
    if (!window_flat_triples_regular(G, w)) return;
    ++checked;
    auto e = establish_cell(ct, encode_middle_triple(G, w));
    REQUIRE(e.has_value());
    bool truth =
        G.wedge_cell.count({w[3], std::min(w[2], w[4]), std::max(w[2], w[4])}) > 0;
    CHECK(e->in_cell == truth);
  });
  CHECK(checked == 200);
  CHECK(!establish_cell(ct, "no such encoding").has_value());
}

TEST_CASE("straightening sampled paths: successes replay, failures are proven") {
  auto G = build_glued(builtin_spec("grid2"), 3);
  auto paths = sample_base_paths(G, 0, 100, 12, 20240826u);
  int ok = 0, exhausted = 0, budget = 0;
  for (auto& p : paths) {
    auto r = straighten(G, p, 0);
    if (r.ok) {
      ++ok;
      CHECK(path_in_base(G, r.path, 0));
      CHECK(path_bracket_count(G, r.path) == 0);
      // the flip certificate replays to the reported path
      std::vector<Vid> cur = p;
      for (auto& f : r.flips) {
        REQUIRE(f.pos >= 0);
        REQUIRE(f.pos < (int)cur.size());
        REQUIRE(cur[f.pos] == f.from);
        cur = apply_flip(G, cur, f);
        REQUIRE(cur[f.pos] == f.to);
      }
      CHECK(cur == r.path);
    } else if (r.detail == "class exhausted") {
      ++exhausted;
    } else {
      CHECK(r.detail == "budget exceeded");
      ++budget;
    }
  }
  // 23 sampled paths are provably non-straightenable: their entire flip
  // class is enumerated without reaching the base subcomplex, a consequence
  // of grid2 complexes not being flip-flat-regular.
  CHECK(ok == 77);
  CHECK(exhausted == 23);
  CHECK(budget == 0);
}

TEST_CASE("flat regularity of grid2 complexes") {
  auto spec = builtin_spec("grid2");
  auto vr = spec.validate();
  REQUIRE(vr.ok());

  // K_0 is a single cell: every vertex lies on the boundary.
  auto K0 = build_complex(spec, 0);
  CHECK(flat_regular_check(K0, 4).status == Tristate::kTrue);

  // K_1 is not flat regular: the path mid-U -> center -> mid-D admits no
  // flips and never reaches the boundary.
  auto K1 = build_complex(spec, 1);
  auto r1 = flat_regular_check(K1, 6);
  CHECK(r1.status == Tristate::kFalse);
  CHECK(r1.stuck_path == "4,8,6");

  auto K2 = build_complex(spec, 2);
  CHECK(flat_regular_check(K2, 7).status == Tristate::kFalse);

  // with no budget the check cannot conclude anything
  CHECK(flat_regular_check(K1, 6, 0).status == Tristate::kInconclusive);
}

TEST_CASE("glued build is deterministic") {
  auto a = build_glued(builtin_spec("grid2"), 3);
  auto b = build_glued(builtin_spec("grid2"), 3);
  CHECK(a.dump() == b.dump());
}

TEST_CASE("invalid substitutions are rejected") {
  SubstitutionSpec bad;
  CHECK_THROWS_AS(build_glued(bad, 1), std::invalid_argument);
}
