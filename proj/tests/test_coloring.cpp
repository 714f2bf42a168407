#include <qtd/coloring.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <string>
#include <vector>

using namespace qtd;

namespace {

Vid find_vertex(const Complex& K, VKind kind, int level) {
  for (Vid v = 0; v < (Vid)K.verts.size(); ++v)
    if (K.verts[v].kind == kind && K.verts[v].level == level) return v;
  return -1;
}

}  // namespace

TEST_CASE("own colors of distinguished vertices") {
  SubstitutionSpec sp = builtin_spec("grid2");
  REQUIRE(sp.validate().ok());

  Complex K1 = build_complex(sp, 1);
  ColoringContext c1(K1);
  Vid center = find_vertex(K1, VKind::kInterior, 1);
  REQUIRE(center >= 0);
  CHECK(c1.color(center) == "I(0);l1;b0");

  Complex K2 = build_complex(sp, 2);
  ColoringContext c2(K2);

  // Corners of the whole square: age saturates, never bracketed.
  Vid tl = -1;
  for (Vid v = 0; v < (Vid)K2.verts.size(); ++v)
    if (K2.verts[v].kind == VKind::kCorner && K2.verts[v].corner == 0) tl = v;
  REQUIRE(tl >= 0);
  CHECK(c2.color(tl) == "C(TL);l3;b0");

  // The midpoint of the top boundary was inserted between two still-young
  // endpoints, so it is a mid vertex; one step later it still shows both
  // brackets.
  Vid mid = -1;
  for (Vid v = 0; v < (Vid)K2.verts.size(); ++v) {
    const VertexRec& r = K2.verts[v];
    if (r.kind == VKind::kBoundarySide && r.level == 1 && r.role_right == (int)Side::kTop)
      mid = v;
  }
  REQUIRE(mid >= 0);
  CHECK(c2.color(mid) == "B(U,1);l2;b3");

  // Full color = own color plus the 4s+4 = 8 boss colors.
  std::string fc = c2.full_color(mid);
  CHECK(fc.substr(0, fc.find('{')) == "B(U,1);l2;b3");
  CHECK(std::count(fc.begin(), fc.end(), '|') == 7);
  CHECK(fc.back() == '}');
}

TEST_CASE("bracket marks expire together with the age field") {
  for (auto name : {"grid2", "grid3", "hepta"}) {
    SubstitutionSpec sp = builtin_spec(name);
    REQUIRE(sp.validate().ok());
    for (int n = 1; n <= 4; ++n) {
      Complex K = build_complex(sp, n);
      ColoringContext ctx(K);
      for (Vid v = 0; v < (Vid)K.verts.size(); ++v) {
        int b = ctx.bracket(v);
        int l = ctx.three_level(v);
        if (b == 1 || b == 2) {
          CHECK(l == 1);
          CHECK((K.verts[v].kind == VKind::kSidePos ||
                 K.verts[v].kind == VKind::kBoundarySide));
        }
        if (b == 3) CHECK(l <= 2);
        if (l == 3) CHECK(b == 0);
        if (K.verts[v].kind == VKind::kCorner || K.verts[v].kind == VKind::kInterior)
          CHECK(b == 0);
      }
    }
  }
}

TEST_CASE("every vertex has exactly 4s+4 bosses") {
  for (auto name : {"grid2", "grid3", "hepta"}) {
    SubstitutionSpec sp = builtin_spec(name);
    REQUIRE(sp.validate().ok());
    Complex K = build_complex(sp, 3);
    ColoringContext ctx(K);
    for (Vid v = 0; v < (Vid)K.verts.size(); ++v)
      CHECK((int)ctx.bosses(v).size() == 4 * sp.s + 4);
  }
}

TEST_CASE("path encodings and edge marks") {
  SubstitutionSpec sp = builtin_spec("grid2");
  REQUIRE(sp.validate().ok());
  Complex K = build_complex(sp, 2);
  ColoringContext ctx(K);

  // A single-vertex path encodes to the vertex's full color.
  CHECK(ctx.encode_path({0}) == ctx.full_color(0));

  // Reversing an edge swaps the out- and in-halves of its mark.
  for (Eid e = 0; e < (Eid)K.edges.size(); ++e) {
    Vid u = K.edges[e].tail, w = K.edges[e].head;
    std::string f = ctx.edge_mark(u, w), r = ctx.edge_mark(w, u);
    size_t fgt = f.find('>'), rgt = r.find('>');
    CHECK(f.substr(1, fgt - 1) == r.substr(rgt + 1, r.size() - rgt - 2));
    CHECK(f.substr(fgt + 1, f.size() - fgt - 2) == r.substr(1, rgt - 1));
  }

  // Marks are defined only on edges.
  Vid far = (Vid)K.verts.size() - 1;
  REQUIRE(K.find_edge(0, far) < 0);
  CHECK_THROWS_AS(ctx.edge_mark(0, far), std::invalid_argument);
}

TEST_CASE("two-edge paths around a cell reverse consistently") {
  SubstitutionSpec sp = builtin_spec("hepta");
  REQUIRE(sp.validate().ok());
  Complex K = build_complex(sp, 2);
  ColoringContext ctx(K);
  const TileRec& t = K.tiles.back();
  std::string fwd = ctx.encode_path({t.c[0], t.c[1], t.c[2]});
  std::string rev = ctx.encode_path({t.c[2], t.c[1], t.c[0]});
  CHECK(fwd != rev);
  CHECK(fwd.size() == rev.size());
}

TEST_CASE("set of plain colors saturates at level 4") {
  struct Row {
    const char* name;
    std::vector<size_t> sizes;  // levels 1..5
  };
  const Row rows[] = {
      {"grid2", {9, 22, 39, 47, 47}},
      {"grid3", {16, 68, 160, 208, 208}},
      {"hepta", {12, 34, 72, 92, 92}},
  };
  for (const Row& row : rows) {
    SubstitutionSpec sp = builtin_spec(row.name);
    REQUIRE(sp.validate().ok());
    std::set<std::string> at4, at5;
    for (int n = 1; n <= 5; ++n) {
      Complex K = build_complex(sp, n);
      ColoringContext ctx(K);
      auto cs = ctx.own_color_census();
      INFO(row.name << " level " << n);
      CHECK(cs.size() == row.sizes[n - 1]);
      if (n == 4) at4 = cs;
      if (n == 5) at5 = cs;
    }
    CHECK(at4 == at5);
  }
}

TEST_CASE("grid2 full-color census saturates at level 7") {
  SubstitutionSpec sp = builtin_spec("grid2");
  REQUIRE(sp.validate().ok());
  const std::vector<size_t> sizes = {9, 25, 69, 213, 497, 801, 929, 929};
  std::set<std::string> prev;
  for (int n = 1; n <= 8; ++n) {
    Complex K = build_complex(sp, n);
    ColoringContext ctx(K);
    auto cs = ctx.census();
    INFO("level " << n);
    CHECK(cs.size() == sizes[n - 1]);
    if (n >= 5) {
      // From level 4 on the census grows monotonically until it freezes.
      for (const std::string& c : prev) CHECK(cs.count(c) == 1);
    }
    if (n == 8) CHECK(cs == prev);
    prev = std::move(cs);
  }
}

TEST_CASE("same creation role at different deep levels gives equal full colors") {
  SubstitutionSpec sp = builtin_spec("grid2");
  REQUIRE(sp.validate().ok());
  // Everything three or more levels deep is saturated, so the census of a
  // deeper complex contains the saturated part of the shallower one.
  Complex K7 = build_complex(sp, 7), K8 = build_complex(sp, 8);
  ColoringContext c7(K7), c8(K8);
  CHECK(c7.census() == c8.census());
}
