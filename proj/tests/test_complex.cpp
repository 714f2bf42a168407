#include <qtd/complex.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <set>

using namespace qtd;

namespace {

// Independent counting oracle for grid substitutions: after n subdivisions of
// the square into m x m cells, the complex is the N x N lattice with N = m^n.
struct LatticeCounts {
  long V, E, F;
};
LatticeCounts lattice_oracle(int m, int n) {
  long N = 1;
  for (int i = 0; i < n; ++i) N *= m;
  // Count by direct enumeration, not by formula.
  long V = 0, E = 0, F = 0;
  for (long x = 0; x <= N; ++x)
    for (long y = 0; y <= N; ++y) {
      V++;
      if (x < N) E++;  // horizontal edge to (x+1, y)
      if (y < N) E++;  // vertical edge to (x, y+1)
      if (x < N && y < N) F++;
    }
  return {V, E, F};
}

Complex build(const std::string& name, int n) {
  static std::map<std::string, SubstitutionSpec> cache;
  auto it = cache.find(name);
  if (it == cache.end()) {
    SubstitutionSpec sp = builtin_spec(name);
    REQUIRE(sp.validate().ok());
    it = cache.emplace(name, std::move(sp)).first;
  }
  return build_complex(it->second, n);
}

}  // namespace

TEST_CASE("grid counts match the lattice oracle") {
  for (int n = 0; n <= 5; ++n) {
    Complex K = build("grid2", n);
    auto o = lattice_oracle(2, n);
    CHECK(K.count_vertices() == o.V);
    CHECK(K.count_edges() == o.E);
    CHECK(K.count_cells() == o.F);
  }
  for (int n = 0; n <= 3; ++n) {
    Complex K = build("grid3", n);
    auto o = lattice_oracle(3, n);
    CHECK(K.count_vertices() == o.V);
    CHECK(K.count_edges() == o.E);
    CHECK(K.count_cells() == o.F);
  }
}

TEST_CASE("Euler characteristic is 1 for all built-ins") {
  for (auto name : {"grid2", "grid3", "hepta"})
    for (int n = 0; n <= 4; ++n) {
      Complex K = build(name, n);
      INFO(name << " level " << n);
      CHECK(K.euler() == 1);
    }
}

TEST_CASE("construction is deterministic") {
  CHECK(build("hepta", 3).dump() == build("hepta", 3).dump());
  CHECK(build("grid3", 2).dump() == build("grid3", 2).dump());
}

TEST_CASE("lower levels are prefixes of higher ones") {
  Complex a = build("hepta", 2), b = build("hepta", 3);
  REQUIRE(a.verts.size() <= b.verts.size());
  for (Vid v = 0; v < (Vid)a.verts.size(); ++v) {
    CHECK(a.verts[v].kind == b.verts[v].kind);
    CHECK(a.verts[v].level == b.verts[v].level);
    CHECK(a.verts[v].pos == b.verts[v].pos);
  }
  // Macroedge chains refine but keep identity, type, level, and owner.
  REQUIRE(a.medges.size() <= b.medges.size());
  for (Mid m = 0; m < (Mid)a.medges.size(); ++m) {
    CHECK(a.medges[m].type == b.medges[m].type);
    CHECK(a.medges[m].level == b.medges[m].level);
    CHECK(a.medges[m].owner_sub == b.medges[m].owner_sub);
  }
}

TEST_CASE("macroedge invariants") {
  for (auto name : {"grid2", "grid3", "hepta"}) {
    Complex K = build(name, 3);
    INFO(name);
    // Every unit edge lies on exactly one macroedge, as a consecutive chain pair.
    std::map<std::pair<Vid, Vid>, int> on;
    for (Mid m = 0; m < (Mid)K.medges.size(); ++m) {
      auto& ch = K.medges[m].chain;
      for (size_t i = 0; i + 1 < ch.size(); ++i)
        on[{std::min(ch[i], ch[i + 1]), std::max(ch[i], ch[i + 1])}]++;
    }
    long covered = 0;
    bool chain_matches = true, once = true;
    for (auto& e : K.edges) {
      auto key = std::make_pair(std::min(e.tail, e.head), std::max(e.tail, e.head));
      auto it = on.find(key);
      if (it == on.end()) chain_matches = false;
      else if (it->second != 1) once = false;
      else covered++;
    }
    CHECK(chain_matches);
    CHECK(once);
    CHECK(covered == K.count_edges());
    CHECK((long)on.size() == K.count_edges());
    // Chain interiors carry side-kind vertices of the macroedge's own record.
    bool interior_kinds = true;
    for (Mid m = 0; m < (Mid)K.medges.size(); ++m) {
      auto& me = K.medges[m];
      for (size_t i = 1; i + 1 < me.chain.size(); ++i) {
        const VertexRec& v = K.verts[me.chain[i]];
        if (v.medge != m) interior_kinds = false;
        if (me.type < 0 && v.kind != VKind::kBoundarySide) interior_kinds = false;
        if (me.type >= 0 && v.kind != VKind::kSidePos) interior_kinds = false;
        if (v.level <= me.level) interior_kinds = false;
      }
    }
    CHECK(interior_kinds);
    // Boundary macroedges exist from level 0; interior types are positive.
    int boundary = 0;
    for (auto& me : K.medges)
      if (me.type < 0) {
        boundary++;
        CHECK(me.level == 0);
      }
    CHECK(boundary == 4);
  }
}

TEST_CASE("boss lists") {
  for (auto name : {"grid2", "grid3", "hepta"}) {
    SubstitutionSpec sp = builtin_spec(name);
    REQUIRE(sp.validate().ok());
    Complex K3 = build_complex(sp, 3), K4 = build_complex(sp, 4);
    INFO(name);
    bool sized = true, stable = true, fresh_ok = true;
    for (size_t i = 0; i < K3.subs.size(); ++i) {
      if ((int)K3.subs[i].bosses.size() != 4 * sp.s + 4) sized = false;
      if (K3.subs[i].bosses != K4.subs[i].bosses) stable = false;
      // Side-position bosses were created when the subcomplex was subdivided.
      for (size_t b = 0; b < K3.subs[i].bosses.size(); ++b) {
        Vid w = K3.subs[i].bosses[b];
        bool is_corner_slot = (b % (sp.s + 1)) == 0;
        if (!is_corner_slot && K3.verts[w].level != K3.subs[i].level + 1) fresh_ok = false;
      }
    }
    CHECK(sized);
    CHECK(stable);
    CHECK(fresh_ok);
  }
}

TEST_CASE("ring wedge property and main edges") {
  for (auto name : {"grid2", "grid3", "hepta"}) {
    Complex K = build(name, 3);
    INFO(name);
    // Cell lookup by unordered corner pairs that are cell sides.
    std::map<std::pair<Vid, Vid>, std::set<Tid>> side_cells;
    for (Tid t = 0; t < (Tid)K.tiles.size(); ++t)
      for (int sd = 0; sd < 4; ++sd) {
        Vid a = K.tiles[t].c[sd], b = K.tiles[t].c[(sd + 1) % 4];
        side_cells[{std::min(a, b), std::max(a, b)}].insert(t);
      }
    bool wedge_ok = true, ranks_ok = true;
    for (Vid v = 0; v < (Vid)K.verts.size(); ++v) {
      auto& r = K.ring[v];
      bool on_boundary = K.verts[v].kind == VKind::kCorner ||
                         K.verts[v].kind == VKind::kBoundarySide;
      int wedges = (int)r.size() - (on_boundary ? 1 : 0);
      for (int i = 0; i < wedges; ++i) {
        Vid a = K.other_end(r[i], v), b = K.other_end(r[(i + 1) % r.size()], v);
        // Some cell must contain both ring-consecutive edges at v.
        auto ia = side_cells.find({std::min(v, a), std::max(v, a)});
        auto ib = side_cells.find({std::min(v, b), std::max(v, b)});
        bool found = false;
        if (ia != side_cells.end() && ib != side_cells.end())
          for (Tid t : ia->second)
            if (ib->second.count(t)) found = true;
        if (!found) wedge_ok = false;
      }
      int firsts = 0, seconds = 0;
      for (uint8_t rk : K.ring_rank[v]) {
        if (rk == 1) firsts++;
        if (rk == 2) seconds++;
      }
      if (firsts != 1 || seconds != 1) ranks_ok = false;
      if (K.ring_rank[v][0] != 1) ranks_ok = false;
    }
    CHECK(wedge_ok);
    CHECK(ranks_ok);
  }
}

TEST_CASE("rings stabilize at creation") {
  // The clockwise slot structure of a vertex, recorded as the macroedge of
  // each incident edge, never changes after the vertex first gets its ring.
  for (auto name : {"grid2", "hepta"}) {
    SubstitutionSpec sp = builtin_spec(name);
    REQUIRE(sp.validate().ok());
    Complex a = build_complex(sp, 2), b = build_complex(sp, 3);
    INFO(name);
    bool stable = true;
    for (Vid v = 0; v < (Vid)a.verts.size(); ++v) {
      if (a.ring[v].size() != b.ring[v].size()) { stable = false; continue; }
      for (size_t i = 0; i < a.ring[v].size(); ++i) {
        if (a.edges[a.ring[v][i]].medge != b.edges[b.ring[v][i]].medge) stable = false;
        if (a.ring_rank[v][i] != b.ring_rank[v][i]) stable = false;
      }
    }
    CHECK(stable);
  }
}

TEST_CASE("static senior-minimum rule matches the data-level definition") {
  for (auto name : {"grid2", "grid3", "hepta"}) {
    SubstitutionSpec sp = builtin_spec(name);
    REQUIRE(sp.validate().ok());
    for (int n = 1; n <= 3; ++n) {
      Complex K = build_complex(sp, n);
      bool match = true;
      for (Tid t = 0; t < (Tid)K.tiles.size(); ++t)
        if (K.special_role(t) != sp.special_role[K.tiles[t].type - 1]) match = false;
      INFO(name << " level " << n);
      CHECK(match);
    }
  }
}

TEST_CASE("local finiteness constants (frozen)") {
  CHECK(build("grid2", 4).local_finiteness_constant() == 4);
  CHECK(build("hepta", 4).local_finiteness_constant() == 4);
}

TEST_CASE("vertex budget guard") {
  SubstitutionSpec sp = builtin_spec("grid3");
  REQUIRE(sp.validate().ok());
  CHECK_THROWS_WITH(build_complex(sp, 4, 1000),
                    Catch::Matchers::ContainsSubstring("budget"));
}
