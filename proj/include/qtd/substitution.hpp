#pragma once

// Substitution templates on the unit square: s side vertices per side,
// k quadrilateral tiles, v interior vertices, r interior edge types.
// Loaded from JSON or taken from the built-in catalogue, then validated
// against the combinatorial side-to-side conditions.

#include <qtd/rational.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace qtd {

// Sides of a quad, clockwise from the top; side i runs corner i -> corner (i+1)%4.
enum Side : int { kTop = 0, kRight = 1, kBottom = 2, kLeft = 3 };
inline const char* side_name(int s) {
  static const char* names[4] = {"U", "R", "D", "L"};
  return names[s];
}
inline const char* corner_name(int c) {
  static const char* names[4] = {"TL", "TR", "BR", "BL"};
  return names[c];
}

// Template vertices are indexed in one flat space:
//   0..3                corners TL,TR,BR,BL
//   4 + side*s + (i-1)  side vertex i (1-based, in the side's clockwise direction)
//   4 + 4s + j          interior vertex j (0-based)
struct TRef {
  enum Kind : uint8_t { kCorner, kSide, kInterior } kind;
  int corner = -1;    // 0..3
  int side = -1;      // 0..3
  int index = -1;     // 1..s
  int interior = -1;  // 0..v-1
};

struct TemplateEdge {
  int a, b;           // template vertex indices, as declared
  int first_tile;     // 0-based tile index declared as the first side
  // Derived during validation:
  int tail = -1, head = -1;        // canonical direction: first_tile lies on the right
  int right_tile = -1, left_tile = -1;
};

struct TemplateTile {
  std::array<int, 4> c;  // corners clockwise from top-left
};

struct ValidationReport {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  bool ok() const { return errors.empty(); }
  std::string joined() const {
    std::string out;
    for (auto& e : errors) out += "error: " + e + "\n";
    for (auto& w : warnings) out += "warning: " + w + "\n";
    return out;
  }
};

struct SubstitutionSpec {
  std::string name;
  int s = 0;  // side vertices per side
  std::vector<std::string> interior_names;
  std::vector<Vec2> interior_pos;
  std::vector<TemplateTile> tiles;          // tile type t = index+1
  std::vector<TemplateEdge> edges;          // interior edge type = index+1

  // ---- derived data (filled by finalize/validate) ----
  std::vector<Vec2> vpos;                   // position of every template vertex
  std::vector<TRef> refs;                   // kind of every template vertex
  std::vector<int> contact;                 // per tile: # corners on the perimeter
  std::vector<int> special_role;            // per tile: senior-minimum corner role, -1 if none
  bool corner_condition = false;            // all corner-orbit template corners have degree 2
  bool is_grid = false;                     // (s+1)^2 lattice subdivision
  bool corner_free_interior = true;         // no interior edge touches a template corner

  int nverts() const { return 4 + 4 * s + (int)interior_pos.size(); }
  int k() const { return (int)tiles.size(); }
  int v() const { return (int)interior_pos.size(); }
  int r() const { return (int)edges.size(); }

  int corner_id(int c) const { return c; }
  int side_id(int side, int i) const { return 4 + side * s + (i - 1); }
  int interior_id(int j) const { return 4 + 4 * s + j; }

  TRef ref(int id) const { return refs[id]; }

  std::string vert_name(int id) const {
    const TRef& t = refs[id];
    switch (t.kind) {
      case TRef::kCorner: return corner_name(t.corner);
      case TRef::kSide: return side_name(t.side) + std::to_string(t.index);
      default: return interior_names[t.interior];
    }
  }

  // Perimeter vertices clockwise from TL: TL,U1..Us,TR,R1..Rs,BR,D1..Ds,BL,L1..Ls.
  std::vector<int> perimeter_cycle() const {
    std::vector<int> cyc;
    for (int side = 0; side < 4; ++side) {
      cyc.push_back(corner_id(side));
      for (int i = 1; i <= s; ++i) cyc.push_back(side_id(side, i));
    }
    return cyc;
  }

  // Boss slot of a perimeter vertex: clockwise index in the 4s+4 cycle above.
  int boss_slot(int template_vertex) const {
    auto cyc = perimeter_cycle();
    for (int i = 0; i < (int)cyc.size(); ++i)
      if (cyc[i] == template_vertex) return i;
    return -1;
  }

  void finalize();                           // fills vpos/refs
  ValidationReport validate();               // fills derived combinatorics
};

// --- geometry of template vertices -----------------------------------------

inline void SubstitutionSpec::finalize() {
  int n = nverts();
  vpos.assign(n, Vec2{0, 0});
  refs.assign(n, TRef{});
  const Vec2 cpos[4] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  for (int c = 0; c < 4; ++c) {
    vpos[c] = cpos[c];
    refs[c] = TRef{TRef::kCorner, c, -1, -1, -1};
  }
  for (int side = 0; side < 4; ++side)
    for (int i = 1; i <= s; ++i) {
      Rat t = Rat(i) / Rat(s + 1);
      vpos[side_id(side, i)] = lerp(cpos[side], cpos[(side + 1) % 4], t);
      refs[side_id(side, i)] = TRef{TRef::kSide, -1, side, i, -1};
    }
  for (int j = 0; j < v(); ++j) {
    vpos[interior_id(j)] = interior_pos[j];
    refs[interior_id(j)] = TRef{TRef::kInterior, -1, -1, -1, j};
  }
}

// --- validation -------------------------------------------------------------

inline ValidationReport SubstitutionSpec::validate() {
  ValidationReport rep;
  auto err = [&](std::string m) { rep.errors.push_back(std::move(m)); };
  if (s < 1) err("side vertex count must be >= 1");
  if (tiles.empty()) err("no tiles");
  if (!rep.ok()) return rep;
  finalize();
  int n = nverts();

  for (auto& t : tiles)
    for (int c : t.c)
      if (c < 0 || c >= n) err("tile corner index out of range");
  for (auto& e : edges) {
    if (e.a < 0 || e.a >= n || e.b < 0 || e.b >= n) err("edge endpoint out of range");
    if (e.first_tile < 0 || e.first_tile >= k()) err("edge first_side tile out of range");
  }
  if (!rep.ok()) return rep;

  // Distinct positions; interior vertices strictly inside the square.
  std::map<std::pair<std::string, std::string>, int> seen;
  for (int i = 0; i < n; ++i) {
    auto key = std::make_pair(rat_str(vpos[i].x), rat_str(vpos[i].y));
    auto [it, fresh] = seen.emplace(key, i);
    if (!fresh) err("vertices " + vert_name(it->second) + " and " + vert_name(i) + " coincide");
  }
  for (int j = 0; j < v(); ++j) {
    const Vec2& p = interior_pos[j];
    if (!(p.x > 0 && p.x < 1 && p.y > 0 && p.y < 1))
      err("interior vertex " + interior_names[j] + " not strictly inside the unit square");
  }

  auto ekey = [](int a, int b) { return std::make_pair(std::min(a, b), std::max(a, b)); };

  // Edge incidence: declared interior edges plus implicit perimeter edges.
  std::map<std::pair<int, int>, int> interior_edge_of;  // key -> edge index
  for (int i = 0; i < r(); ++i) {
    auto& e = edges[i];
    if (e.a == e.b) { err("degenerate interior edge"); continue; }
    if (refs[e.a].kind != TRef::kInterior && refs[e.b].kind != TRef::kInterior)
      err("interior edge " + vert_name(e.a) + "-" + vert_name(e.b) +
          " has both endpoints on the perimeter");
    if (!interior_edge_of.emplace(ekey(e.a, e.b), i).second)
      err("duplicate interior edge " + vert_name(e.a) + "-" + vert_name(e.b));
  }
  std::set<std::pair<int, int>> perimeter_edges;
  {
    auto cyc = perimeter_cycle();
    for (size_t i = 0; i < cyc.size(); ++i)
      perimeter_edges.insert(ekey(cyc[i], cyc[(i + 1) % cyc.size()]));
  }

  // Every tile side must be a template edge; count flanks.
  std::map<std::pair<int, int>, std::vector<std::pair<int, int>>> flanks;  // edge -> (tile, side)
  for (int t = 0; t < k(); ++t) {
    std::set<int> uniq(tiles[t].c.begin(), tiles[t].c.end());
    if (uniq.size() != 4) err("tile " + std::to_string(t + 1) + " repeats a corner");
    for (int sd = 0; sd < 4; ++sd) {
      int a = tiles[t].c[sd], b = tiles[t].c[(sd + 1) % 4];
      auto key = ekey(a, b);
      if (!interior_edge_of.count(key) && !perimeter_edges.count(key))
        err("side " + vert_name(a) + "-" + vert_name(b) + " of tile " + std::to_string(t + 1) +
            " is not a template edge (tiles must meet side to side)");
      flanks[key].push_back({t, sd});
    }
  }

  for (auto& [key, fl] : flanks) {
    bool perim = perimeter_edges.count(key) > 0;
    if (perim && fl.size() != 1)
      err("perimeter edge " + vert_name(key.first) + "-" + vert_name(key.second) +
          " flanked by " + std::to_string(fl.size()) + " tiles (want 1)");
    if (!perim && fl.size() != 2)
      err("interior edge " + vert_name(key.first) + "-" + vert_name(key.second) +
          " flanked by " + std::to_string(fl.size()) + " tiles (want 2)");
  }
  for (auto& pe : perimeter_edges)
    if (!flanks.count(pe))
      err("perimeter edge " + vert_name(pe.first) + "-" + vert_name(pe.second) +
          " not covered by any tile");
  for (int i = 0; i < r(); ++i) {
    auto key = ekey(edges[i].a, edges[i].b);
    if (!flanks.count(key))
      err("interior edge " + vert_name(edges[i].a) + "-" + vert_name(edges[i].b) +
          " is not the side of any tile");
  }
  if (!rep.ok()) return rep;

  // Canonical direction: first_side tile lies on the right of tail->head.
  for (int i = 0; i < r(); ++i) {
    auto& e = edges[i];
    auto& fl = flanks[ekey(e.a, e.b)];
    int ft = e.first_tile;
    auto it = std::find_if(fl.begin(), fl.end(), [&](auto& p) { return p.first == ft; });
    if (it == fl.end()) {
      err("edge " + vert_name(e.a) + "-" + vert_name(e.b) + ": first_side tile " +
          std::to_string(ft + 1) + " does not flank it");
      continue;
    }
    int sd = it->second;
    // Traversing tile corners clockwise keeps the interior on the right
    // (screen coordinates), so the canonical tail is corner sd of first_tile.
    e.tail = tiles[ft].c[sd];
    e.head = tiles[ft].c[(sd + 1) % 4];
    e.right_tile = ft;
    for (auto& p : fl)
      if (p.first != ft) e.left_tile = p.first;
  }

  // Euler count for a disc complex: V - E + F = 1.
  {
    long V = n, E = (long)r() + (long)perimeter_edges.size(), F = k();
    if (V - E + F != 1)
      err("Euler characteristic V-E+F = " + std::to_string(V - E + F) + " (want 1)");
  }

  // Contact classes and adjacency constraint on perimeter corners of tiles.
  contact.assign(k(), 0);
  special_role.assign(k(), -1);
  for (int t = 0; t < k(); ++t) {
    std::vector<int> on_perim, corner_roles, side_roles;
    for (int sd = 0; sd < 4; ++sd) {
      const TRef& tr = refs[tiles[t].c[sd]];
      if (tr.kind != TRef::kInterior) on_perim.push_back(sd);
      if (tr.kind == TRef::kCorner) corner_roles.push_back(sd);
      if (tr.kind == TRef::kSide) side_roles.push_back(sd);
    }
    contact[t] = (int)on_perim.size();
    if (contact[t] == 4)
      err("tile " + std::to_string(t + 1) + " has all four corners on the perimeter");
    if (contact[t] == 2) {
      int d = (on_perim[1] - on_perim[0]) % 4;
      if (d == 2) err("tile " + std::to_string(t + 1) +
                      " touches the perimeter at two opposite corners");
    }
    if (corner_roles.size() > 1)
      err("tile " + std::to_string(t + 1) + " contains two template corners");
    // Senior-minimum corner: template-corner role beats side roles beats interior.
    if (corner_roles.size() == 1) special_role[t] = corner_roles[0];
    else if (side_roles.size() == 1) special_role[t] = side_roles[0];
  }
  if (!rep.ok()) return rep;

  // Degrees; interior edges touching corners break local finiteness of rings.
  std::vector<int> deg(n, 0);
  for (auto& pe : perimeter_edges) { deg[pe.first]++; deg[pe.second]++; }
  for (auto& e : edges) { deg[e.a]++; deg[e.b]++; }
  corner_free_interior = true;
  for (auto& e : edges)
    if (refs[e.a].kind == TRef::kCorner || refs[e.b].kind == TRef::kCorner)
      corner_free_interior = false;
  if (!corner_free_interior)
    rep.warnings.push_back("an interior edge touches a template corner; "
                           "vertex degrees are unbounded under iteration");

  // Corner condition: iterate role -> role of that corner inside the unique
  // tile containing it; every template corner in the orbit must have degree 2.
  {
    corner_condition = true;
    for (int start = 0; start < 4; ++start) {
      int role = start;
      for (int steps = 0; steps < 8; ++steps) {
        int tv = corner_id(role);
        if (deg[tv] != 2) { corner_condition = false; break; }
        int tile = -1;
        for (int t = 0; t < k(); ++t)
          if (std::find(tiles[t].c.begin(), tiles[t].c.end(), tv) != tiles[t].c.end()) tile = t;
        int next = -1;
        for (int sd = 0; sd < 4; ++sd)
          if (tiles[tile].c[sd] == tv) next = sd;
        if (next == role) break;  // fixed point
        role = next;
      }
      if (!corner_condition) break;
    }
    if (!corner_condition)
      rep.warnings.push_back("corner condition fails: a corner-orbit corner has degree != 2");
  }

  // Grid detection: interior vertices on the (s+1)-lattice and tiles equal
  // to the lattice cells.
  {
    int m = s + 1;
    auto lattice_ref = [&](int x, int y) -> int {
      bool bx = (x == 0 || x == m), by = (y == 0 || y == m);
      if (bx && by) return corner_id(x == 0 ? (y == 0 ? 0 : 3) : (y == 0 ? 1 : 2));
      if (y == 0) return side_id(kTop, x);
      if (x == m) return side_id(kRight, y);
      if (y == m) return side_id(kBottom, m - x);
      if (x == 0) return side_id(kLeft, m - y);
      // interior lattice point: find by exact position
      Vec2 p{Rat(x) / m, Rat(y) / m};
      for (int j = 0; j < v(); ++j)
        if (interior_pos[j] == p) return interior_id(j);
      return -1;
    };
    is_grid = (k() == m * m) && (v() == (m - 1) * (m - 1));
    if (is_grid) {
      std::set<std::array<int, 4>> want, have;
      for (int y = 0; y < m && is_grid; ++y)
        for (int x = 0; x < m; ++x) {
          int a = lattice_ref(x, y), b = lattice_ref(x + 1, y), c = lattice_ref(x + 1, y + 1),
              d = lattice_ref(x, y + 1);
          if (a < 0 || b < 0 || c < 0 || d < 0) { is_grid = false; break; }
          want.insert({a, b, c, d});
        }
      for (auto& t : tiles) have.insert(t.c);
      if (is_grid) is_grid = (want == have);
    }
  }

  return rep;
}

// --- JSON I/O ---------------------------------------------------------------

inline Vec2 parse_vec2(const nlohmann::json& j) {
  auto get = [](const nlohmann::json& e) -> Rat {
    if (e.is_string()) return parse_rat(e.get<std::string>());
    if (e.is_number_integer()) return Rat((long)e.get<long>());
    if (e.is_number_float()) {
      // Reject floats that are not exactly representable small decimals.
      std::ostringstream os;
      os << e;
      return parse_rat(os.str());
    }
    throw std::invalid_argument("coordinate must be an integer, decimal, or \"p/q\" string");
  };
  if (!j.is_array() || j.size() != 2) throw std::invalid_argument("position must be [x, y]");
  return Vec2{get(j[0]), get(j[1])};
}

inline SubstitutionSpec spec_from_json(const nlohmann::json& j) {
  SubstitutionSpec sp;
  sp.name = j.value("name", "unnamed");
  sp.s = j.at("side_vertices").get<int>();
  if (sp.s < 1) throw std::invalid_argument("side_vertices must be >= 1");

  std::map<std::string, int> by_name;
  auto add_name = [&](const std::string& nm, int id) {
    if (!by_name.emplace(nm, id).second)
      throw std::invalid_argument("duplicate vertex id: " + nm);
  };
  for (int c = 0; c < 4; ++c) add_name(corner_name(c), c);
  for (int side = 0; side < 4; ++side)
    for (int i = 1; i <= sp.s; ++i)
      add_name(side_name(side) + std::to_string(i), sp.side_id(side, i));

  for (auto& iv : j.value("internal_vertices", nlohmann::json::array())) {
    std::string id = iv.at("id").get<std::string>();
    int idx = (int)sp.interior_names.size();
    sp.interior_names.push_back(id);
    sp.interior_pos.push_back(parse_vec2(iv.at("pos")));
    add_name(id, sp.interior_id(idx));
  }

  auto look = [&](const nlohmann::json& x) -> int {
    std::string nm = x.get<std::string>();
    auto it = by_name.find(nm);
    if (it == by_name.end()) throw std::invalid_argument("unknown vertex id: " + nm);
    return it->second;
  };

  for (auto& tj : j.at("tiles")) {
    auto& cs = tj.at("corners");
    if (!cs.is_array() || cs.size() != 4)
      throw std::invalid_argument("tile corners must list exactly 4 vertices");
    TemplateTile t;
    for (int i = 0; i < 4; ++i) t.c[i] = look(cs[i]);
    sp.tiles.push_back(t);
  }
  for (auto& ej : j.value("internal_edges", nlohmann::json::array())) {
    auto& ends = ej.at("ends");
    if (!ends.is_array() || ends.size() != 2)
      throw std::invalid_argument("edge ends must list exactly 2 vertices");
    TemplateEdge e;
    e.a = look(ends[0]);
    e.b = look(ends[1]);
    int ft = ej.at("first_side").get<int>();
    if (ft < 1 || ft > (int)sp.tiles.size())
      throw std::invalid_argument("first_side must be a 1-based tile type");
    e.first_tile = ft - 1;
    sp.edges.push_back(e);
  }
  sp.finalize();
  return sp;
}

inline nlohmann::json spec_to_json(const SubstitutionSpec& sp) {
  nlohmann::json j;
  j["name"] = sp.name;
  j["side_vertices"] = sp.s;
  j["internal_vertices"] = nlohmann::json::array();
  for (int i = 0; i < sp.v(); ++i)
    j["internal_vertices"].push_back(
        {{"id", sp.interior_names[i]},
         {"pos", {rat_str(sp.interior_pos[i].x), rat_str(sp.interior_pos[i].y)}}});
  j["tiles"] = nlohmann::json::array();
  for (auto& t : sp.tiles) {
    nlohmann::json cs = nlohmann::json::array();
    for (int c : t.c) cs.push_back(sp.vert_name(c));
    j["tiles"].push_back({{"corners", cs}});
  }
  j["internal_edges"] = nlohmann::json::array();
  for (auto& e : sp.edges)
    j["internal_edges"].push_back({{"ends", {sp.vert_name(e.a), sp.vert_name(e.b)}},
                                   {"first_side", e.first_tile + 1}});
  return j;
}

// --- built-in catalogue -----------------------------------------------------

inline SubstitutionSpec builtin_spec(const std::string& name);

inline SubstitutionSpec spec_from_file_or_builtin(const std::string& arg) {
  std::ifstream in(arg);
  if (!in) return builtin_spec(arg);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const std::exception& e) {
    throw std::invalid_argument(std::string("JSON parse error in ") + arg + ": " + e.what());
  }
  return spec_from_json(j);
}

namespace detail {

inline SubstitutionSpec make_grid(int m, const std::string& name) {
  SubstitutionSpec sp;
  sp.name = name;
  sp.s = m - 1;
  for (int y = 1; y < m; ++y)
    for (int x = 1; x < m; ++x) {
      sp.interior_names.push_back("A" + std::to_string((y - 1) * (m - 1) + x));
      sp.interior_pos.push_back(Vec2{Rat(x) / m, Rat(y) / m});
    }
  auto ref = [&](int x, int y) -> int {
    bool bx = (x == 0 || x == m), by = (y == 0 || y == m);
    if (bx && by) return sp.corner_id(x == 0 ? (y == 0 ? 0 : 3) : (y == 0 ? 1 : 2));
    if (y == 0) return sp.side_id(kTop, x);
    if (x == m) return sp.side_id(kRight, y);
    if (y == m) return sp.side_id(kBottom, m - x);
    if (x == 0) return sp.side_id(kLeft, m - y);
    return sp.interior_id((y - 1) * (m - 1) + (x - 1));
  };
  for (int y = 0; y < m; ++y)
    for (int x = 0; x < m; ++x)
      sp.tiles.push_back(TemplateTile{{ref(x, y), ref(x + 1, y), ref(x + 1, y + 1), ref(x, y + 1)}});
  auto tile_at = [&](int x, int y) { return y * m + x; };
  // Vertical interior lattice edges (x = 1..m-1), first side = tile on the left.
  for (int x = 1; x < m; ++x)
    for (int y = 0; y < m; ++y)
      sp.edges.push_back(TemplateEdge{ref(x, y), ref(x, y + 1), tile_at(x - 1, y)});
  // Horizontal interior lattice edges (y = 1..m-1), first side = tile above.
  for (int y = 1; y < m; ++y)
    for (int x = 0; x < m; ++x)
      sp.edges.push_back(TemplateEdge{ref(x, y), ref(x + 1, y), tile_at(x, y - 1)});
  sp.finalize();
  return sp;
}

inline SubstitutionSpec make_hepta() {
  nlohmann::json j = {
      {"name", "hepta"},
      {"side_vertices", 1},
      {"internal_vertices",
       {{{"id", "P"}, {"pos", {"3/10", "3/10"}}},
        {{"id", "Q"}, {"pos", {"17/25", "8/25"}}},
        {{"id", "R"}, {"pos", {"1/2", "9/20"}}},
        {{"id", "S"}, {"pos", {"7/25", "17/25"}}}}},
      {"tiles",
       {{{"corners", {"TL", "U1", "P", "L1"}}},
        {{"corners", {"U1", "TR", "R1", "Q"}}},
        {{"corners", {"P", "U1", "Q", "R"}}},
        {{"corners", {"L1", "P", "R", "S"}}},
        {{"corners", {"Q", "R1", "BR", "D1"}}},
        {{"corners", {"R", "Q", "D1", "S"}}},
        {{"corners", {"L1", "S", "D1", "BL"}}}}},
      {"internal_edges",
       {{{"ends", {"U1", "P"}}, {"first_side", 1}},
        {{"ends", {"P", "L1"}}, {"first_side", 1}},
        {{"ends", {"U1", "Q"}}, {"first_side", 3}},
        {{"ends", {"R1", "Q"}}, {"first_side", 2}},
        {{"ends", {"Q", "R"}}, {"first_side", 3}},
        {{"ends", {"P", "R"}}, {"first_side", 4}},
        {{"ends", {"R", "S"}}, {"first_side", 4}},
        {{"ends", {"L1", "S"}}, {"first_side", 7}},
        {{"ends", {"Q", "D1"}}, {"first_side", 6}},
        {{"ends", {"S", "D1"}}, {"first_side", 7}}}}};
  return spec_from_json(j);
}

}  // namespace detail

inline SubstitutionSpec builtin_spec(const std::string& name) {
  if (name == "grid2") return detail::make_grid(2, "grid2");
  if (name == "grid3") return detail::make_grid(3, "grid3");
  if (name == "hepta") return detail::make_hepta();
  throw std::invalid_argument("no such file and no such built-in substitution: " + name +
                              " (built-ins: grid2, grid3, hepta)");
}

}  // namespace qtd
