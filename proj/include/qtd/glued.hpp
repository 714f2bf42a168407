#pragma once
// Glued quadrilateral complexes: a root square complex together with square
// flaps attached along corner wedges, grown in lockstep (subdivide, then
// glue fresh flaps, repeat).  On top of the combinatorial structure this
// header provides spatially-aware path encodings (fans/flags), an
// encoding-driven cell detector, a spatial determinism verifier, and a path
// straightening procedure driven by cell flips.

#include <qtd/coloring.hpp>

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace qtd {

enum class EdgeClass { kFlat, kOpen, kClose };
enum class Tristate { kTrue, kFalse, kInconclusive };

inline char edge_class_char(EdgeClass c) {
  return c == EdgeClass::kFlat ? 'f' : (c == EdgeClass::kOpen ? 'o' : 'c');
}

// A complex built by alternating subdivision and gluing.  Vertices carry
// global ids; every vertex belongs to one or more flat base complexes
// (the root square plus one unit square per glued flap), with local ids
// translated through per-base l2g/g2l tables.
class GluedComplex {
 public:
  struct GVert {
    int level;  // global step at which the vertex appeared
    int base;   // owning base: the oldest base containing it
  };
  struct Base {
    Complex cx;             // flat complex of this base, in local ids
    int created_level = 0;  // global step at which the base was attached
    Vid core = -1;          // global id of the wedge vertex B (-1 for root)
    std::vector<Vid> l2g;   // local vid -> global vid
    std::unordered_map<Vid, Vid> g2l;  // global vid -> local vid
  };
  struct GEdge {
    Vid u, w;   // endpoints, u < w
    int owner;  // oldest base containing the edge
  };
  struct GCell {
    std::array<Vid, 4> c;  // global corner ids, clockwise from top-left
    int base;              // base holding the cell
    Tid tile;              // local tile id within that base
  };

  std::unique_ptr<SubstitutionSpec> spec;
  int level = 0;  // global subdivision steps performed so far
  std::vector<GVert> gverts;
  std::deque<Base> bases;  // bases[0] is the root; deque keeps refs stable
  std::vector<int> glue_counts;  // flaps attached at each step 1..level

  // Derived structure, rebuilt after every step.
  std::vector<GEdge> gedges;
  std::map<std::pair<Vid, Vid>, int> edge_index;
  std::vector<std::vector<std::pair<Vid, int>>> adj;  // vertex -> (nbr, geid)
  std::vector<GCell> gcells;
  // (B, min(A,C), max(A,C)) -> index into gcells of the unique cell in
  // which B is a corner and A, C are its two cyclic neighbors.
  std::map<std::tuple<Vid, Vid, Vid>, int> wedge_cell;
  std::vector<std::unique_ptr<ColoringContext>> ctxs;

  Vid localize(Vid g, int b) const {
    auto it = bases[b].g2l.find(g);
    return it == bases[b].g2l.end() ? (Vid)-1 : it->second;
  }

  // Flap strictly containing g, or 0.  A flap's boundary with the rest of
  // the complex is its seam (the two glued sides); everything else of the
  // flap, including the fresh corner D and the two new sides, counts as
  // inside.  Seam vertices are always owned by an older base, so strict
  // containment coincides with ownership.
  int glued_interior_of(Vid g) const { return gverts[g].base; }

  bool has_edge(Vid u, Vid w) const {
    return edge_index.count({std::min(u, w), std::max(u, w)}) > 0;
  }

  // The glued flap entered (kOpen) or left (kClose) by the directed edge
  // u -> w; 0 when the edge is flat.
  std::pair<EdgeClass, int> classify_edge(Vid u, Vid w) const {
    if (!has_edge(u, w)) throw std::invalid_argument("classify_edge: not an edge");
    int bu = glued_interior_of(u), bw = glued_interior_of(w);
    if (bu == bw) return {EdgeClass::kFlat, 0};
    // When both endpoints are strictly inside (different) flaps, the edge is
    // local to the younger flap, whose seam carries the older vertex, so the
    // path is entering (or leaving) the nested flap.
    if (bw != 0 && (bu == 0 || bases[bw].created_level > bases[bu].created_level ||
                    (bases[bw].created_level == bases[bu].created_level && bw > bu)))
      return {EdgeClass::kOpen, bw};
    return {EdgeClass::kClose, bu};
  }

  const ColoringContext& ctx(int b) const { return *ctxs[b]; }

  void subdivide_step() {
    int n = level + 1;
    // Fresh global ids on a shared edge, keyed by the global endpoints,
    // listed from the smaller endpoint to the larger.
    std::map<std::pair<Vid, Vid>, std::vector<Vid>> bound;
    for (size_t b = 0; b < bases.size(); ++b) {
      Base& B = bases[b];
      size_t old_n = B.cx.verts.size();
      B.cx.subdivide();
      B.l2g.resize(B.cx.verts.size(), -1);
      for (const RefinedEdge& re : B.cx.last_refinement) {
        Vid ga = B.l2g[re.a], gb = B.l2g[re.b];
        std::pair<Vid, Vid> key{std::min(ga, gb), std::max(ga, gb)};
        auto it = bound.find(key);
        if (it == bound.end()) {
          std::vector<Vid> glist;
          for (size_t i = 0; i < re.fresh.size(); ++i) {
            glist.push_back((Vid)gverts.size());
            gverts.push_back(GVert{n, (int)b});
          }
          if (ga > gb) std::reverse(glist.begin(), glist.end());
          it = bound.emplace(key, std::move(glist)).first;
        }
        std::vector<Vid> ordered = it->second;  // smaller gid -> larger gid
        if (ga > gb) std::reverse(ordered.begin(), ordered.end());
        for (size_t i = 0; i < re.fresh.size(); ++i) {
          B.l2g[re.fresh[i]] = ordered[i];
          B.g2l[ordered[i]] = re.fresh[i];
        }
      }
      for (Vid l = (Vid)old_n; l < (Vid)B.cx.verts.size(); ++l) {
        if (B.l2g[l] != -1) continue;
        Vid g = (Vid)gverts.size();
        gverts.push_back(GVert{n, (int)b});
        B.l2g[l] = g;
        B.g2l[g] = l;
      }
    }
    level = n;
    rebuild();
  }

  // Attach a fresh unit-square flap over every corner wedge A-B-C with
  // level(B) == level-1, level(A) == level(C) == level, edges AB and BC
  // present, and no cell having A, B, C among its corners.  The flap's
  // corners, clockwise from top-left, are B, C, D, A with D fresh.
  int glue_step() {
    if (!spec->corner_condition)
      throw std::runtime_error("gluing requires the corner condition");
    struct Cand {
      Vid b, a, c;
    };
    std::vector<Cand> cands;
    for (Vid B = 0; B < (Vid)gverts.size(); ++B) {
      if (gverts[B].level != level - 1) continue;
      std::vector<Vid> fresh;
      for (auto& [nbr, geid] : adj[B])
        if (gverts[nbr].level == level) fresh.push_back(nbr);
      std::sort(fresh.begin(), fresh.end());
      for (size_t i = 0; i < fresh.size(); ++i)
        for (size_t j = i + 1; j < fresh.size(); ++j)
          if (!wedge_cell.count({B, fresh[i], fresh[j]}))
            cands.push_back(Cand{B, fresh[i], fresh[j]});
    }
    for (const Cand& cd : cands) {
      Vid D = (Vid)gverts.size();
      gverts.push_back(GVert{level, (int)bases.size()});
      Base nb;
      nb.cx = build_complex(*spec, 0);
      nb.created_level = level;
      nb.core = cd.b;
      nb.l2g = {cd.b, cd.c, D, cd.a};  // local TL, TR, BR, BL
      for (Vid l = 0; l < 4; ++l) nb.g2l[nb.l2g[l]] = l;
      bases.push_back(std::move(nb));
    }
    glue_counts.push_back((int)cands.size());
    rebuild();
    return (int)cands.size();
  }

  void rebuild() {
    gedges.clear();
    edge_index.clear();
    gcells.clear();
    wedge_cell.clear();
    for (size_t b = 0; b < bases.size(); ++b) {
      const Base& B = bases[b];
      for (const EdgeRec& e : B.cx.edges) {
        Vid u = B.l2g[e.tail], w = B.l2g[e.head];
        std::pair<Vid, Vid> key{std::min(u, w), std::max(u, w)};
        if (!edge_index.count(key)) {
          edge_index[key] = (int)gedges.size();
          gedges.push_back(GEdge{key.first, key.second, (int)b});
        }
      }
      for (Tid t = 0; t < (Tid)B.cx.tiles.size(); ++t) {
        GCell cell;
        for (int c = 0; c < 4; ++c) cell.c[c] = B.l2g[B.cx.tiles[t].c[c]];
        cell.base = (int)b;
        cell.tile = t;
        gcells.push_back(cell);
      }
    }
    adj.assign(gverts.size(), {});
    for (int ei = 0; ei < (int)gedges.size(); ++ei) {
      adj[gedges[ei].u].push_back({gedges[ei].w, ei});
      adj[gedges[ei].w].push_back({gedges[ei].u, ei});
    }
    for (auto& a : adj)
      std::sort(a.begin(), a.end());
    for (int ci = 0; ci < (int)gcells.size(); ++ci) {
      const auto& c = gcells[ci].c;
      for (int i = 0; i < 4; ++i) {
        Vid mid = c[i], prev = c[(i + 3) % 4], next = c[(i + 1) % 4];
        auto key = std::make_tuple(mid, std::min(prev, next), std::max(prev, next));
        auto it = wedge_cell.find(key);
        if (it != wedge_cell.end() && it->second != ci)
          throw std::runtime_error("two cells share the same corner wedge");
        wedge_cell[key] = ci;
      }
    }
    ctxs.clear();
    for (const Base& B : bases) ctxs.push_back(std::make_unique<ColoringContext>(B.cx));
  }

  // Fourth corner of the unique cell in which B sits between A and C, with
  // the cell index, or (-1, -1).
  std::pair<Vid, int> opposite_corner(Vid a, Vid b, Vid c) const {
    auto it = wedge_cell.find({b, std::min(a, c), std::max(a, c)});
    if (it == wedge_cell.end()) return {-1, -1};
    const GCell& cell = gcells[it->second];
    for (int i = 0; i < 4; ++i)
      if (cell.c[i] == b) return {cell.c[(i + 2) % 4], it->second};
    return {-1, -1};
  }

  long total_cells() const { return (long)gcells.size(); }

  // Canonical text dump: global vertex table, edge table, and per-base
  // records (creation level, core, corner ids) followed by each base's flat
  // dump.
  std::string dump() const {
    std::ostringstream os;
    os << "glued level=" << level << " verts=" << gverts.size() << " bases=" << bases.size()
       << " edges=" << gedges.size() << " cells=" << gcells.size() << "\n";
    os << "glue_counts=";
    for (size_t i = 0; i < glue_counts.size(); ++i) os << (i ? "," : "") << glue_counts[i];
    os << "\n";
    for (Vid v = 0; v < (Vid)gverts.size(); ++v)
      os << "g" << v << " level=" << gverts[v].level << " base=" << gverts[v].base << "\n";
    for (const GEdge& e : gedges)
      os << "e " << e.u << "-" << e.w << " owner=" << e.owner << "\n";
    for (size_t b = 0; b < bases.size(); ++b) {
      const Base& B = bases[b];
      os << "base " << b << " created=" << B.created_level << " core=" << B.core
         << " corners=";
      for (int c = 0; c < 4 && c < (int)B.l2g.size(); ++c) os << (c ? "," : "") << B.l2g[c];
      os << "\n";
    }
    return os.str();
  }
};

// Builds the glued complex of the given depth: starting from the unit
// square, repeat `depth` times: subdivide every base once (in lockstep,
// sharing fresh vertices along common edges), then glue flaps over all
// uncovered corner wedges of the new level.
inline GluedComplex build_glued(const SubstitutionSpec& spec, int depth,
                                long max_vertices = 5'000'000) {
  GluedComplex G;
  G.spec = std::make_unique<SubstitutionSpec>(spec);
  auto vr = G.spec->validate();
  if (!vr.ok()) throw std::invalid_argument("invalid substitution: " + vr.joined());
  {
    GluedComplex::Base root;
    root.cx = build_complex(*G.spec, 0);
    root.l2g = {0, 1, 2, 3};
    for (Vid v = 0; v < 4; ++v) {
      root.g2l[v] = v;
      G.gverts.push_back(GluedComplex::GVert{0, 0});
    }
    G.bases.push_back(std::move(root));
  }
  G.rebuild();
  for (int m = 1; m <= depth; ++m) {
    G.subdivide_step();
    G.glue_step();
    if ((long)G.gverts.size() > max_vertices)
      throw std::runtime_error("vertex budget exceeded at step " + std::to_string(m));
  }
  return G;
}

// ---------------------------------------------------------------------------
// Spatial encodings: fans, flags, and path serialization.

// The complexes associated with one path position: the base owning the
// vertex, plus the flaps entered/left by the incoming and outgoing path
// edges (-1 when absent).
struct OmegaTriple {
  int base = -1;
  int left = -1;   // flap of the incoming edge, when it opens or closes
  int right = -1;  // flap of the outgoing edge, when it opens or closes
};

inline std::vector<OmegaTriple> path_omegas(const GluedComplex& G,
                                            const std::vector<Vid>& path) {
  std::vector<OmegaTriple> om(path.size());
  for (size_t i = 0; i < path.size(); ++i) om[i].base = G.gverts[path[i]].base;
  for (size_t i = 0; i + 1 < path.size(); ++i) {
    auto [cls, flap] = G.classify_edge(path[i], path[i + 1]);
    if (cls != EdgeClass::kFlat) {
      om[i].right = flap;
      om[i + 1].left = flap;
    }
  }
  return om;
}

// The fan of position i: the 15 complexes (possibly absent) referenced by
// the omega triples at positions i-2 .. i+2.
inline std::array<int, 15> fan_at(const std::vector<OmegaTriple>& om, size_t i) {
  std::array<int, 15> fan;
  fan.fill(-1);
  for (int d = -2; d <= 2; ++d) {
    long j = (long)i + d;
    if (j < 0 || j >= (long)om.size()) continue;
    int s = 3 * (d + 2);
    fan[s] = om[j].base;
    fan[s + 1] = om[j].left;
    fan[s + 2] = om[j].right;
  }
  return fan;
}

// The flag of position i: for each fan slot, the color of the vertex
// relative to that complex ("." when the slot is empty, "-" when the vertex
// does not belong to it), followed by the generalized types of its bosses
// in that complex — each boss's colors relative to every complex of the
// fan.  Base identities are not serialized, so identical local windows in
// different flaps produce identical flags.
inline std::string flag_at(const GluedComplex& G, Vid v, const std::array<int, 15>& fan,
                           int blank_slot = -1, bool with_bosses = true) {
  std::string out = "[";
  for (int s = 0; s < 15; ++s) {
    if (s) out += '|';
    if (s == blank_slot || fan[s] < 0) {
      out += '.';
      continue;
    }
    int b = fan[s];
    Vid l = G.localize(v, b);
    if (l == (Vid)-1) {
      out += '-';
      continue;
    }
    out += G.ctx(b).color(l);
    if (!with_bosses) continue;
    out += '{';
    bool first_boss = true;
    for (Vid lb : G.ctx(b).bosses(l)) {
      if (!first_boss) out += '&';
      first_boss = false;
      Vid gb = G.bases[b].l2g[lb];
      for (int t = 0; t < 15; ++t) {
        if (t) out += ',';
        if (t == blank_slot || fan[t] < 0) {
          out += '.';
          continue;
        }
        Vid lt = G.localize(gb, fan[t]);
        out += (lt == (Vid)-1) ? "-" : G.ctx(fan[t]).color(lt);
      }
    }
    out += '}';
  }
  out += ']';
  return out;
}

// 128-bit FNV-1a digest (hex) for keying large encodings compactly.
inline std::string encoding_digest(const std::string& s) {
  uint64_t h1 = 1469598103934665603ull, h2 = 1099511628211ull * 31 + 7;
  for (unsigned char c : s) {
    h1 = (h1 ^ c) * 1099511628211ull;
    h2 = (h2 ^ (c + 0x9e)) * 0x100000001b3ull;
  }
  char buf[33];
  std::snprintf(buf, sizeof buf, "%016llx%016llx", (unsigned long long)h1,
                (unsigned long long)h2);
  return buf;
}

// Edge mark of u -> w relative to the oldest base containing the edge,
// prefixed by the edge class.
inline std::string spatial_edge_mark(const GluedComplex& G, Vid u, Vid w) {
  auto it = G.edge_index.find({std::min(u, w), std::max(u, w)});
  if (it == G.edge_index.end()) throw std::invalid_argument("spatial_edge_mark: not an edge");
  int b = G.gedges[it->second].owner;
  auto [cls, flap] = G.classify_edge(u, w);
  (void)flap;
  return std::string(1, edge_class_char(cls)) + ':' +
         G.ctx(b).edge_mark(G.localize(u, b), G.localize(w, b));
}

// Serialization of a path: flags interleaved with classed edge marks.
// `blank_slot` optionally blanks one fan slot in every flag (used to show
// the verifier notices the lost information).
// `plain_flag_pos`, when set, emits that position's flag without boss data:
// weak determinism pins a reconstructed vertex's own colors but not its
// bosses (mirroring the flat theorem, where the determined value is marks
// plus the plain color of the fourth corner).
// `corrupt_vertex`/`corrupt_slot` blank one fan slot in the flag of one
// specific vertex wherever it occurs — a single-flag corruption used to show
// the verifier notices inconsistent flag data.
inline std::string encode_spatial_path(const GluedComplex& G, const std::vector<Vid>& path,
                                       int blank_slot = -1, int plain_flag_pos = -1,
                                       Vid corrupt_vertex = (Vid)-1, int corrupt_slot = -1) {
  if (path.empty()) throw std::invalid_argument("encode_spatial_path: empty path");
  auto om = path_omegas(G, path);
  std::string out;
  for (size_t i = 0; i < path.size(); ++i) {
    if (i) out += spatial_edge_mark(G, path[i - 1], path[i]);
    int bs = path[i] == corrupt_vertex ? corrupt_slot : blank_slot;
    out += flag_at(G, path[i], fan_at(om, i), bs, (int)i != plain_flag_pos);
  }
  return out;
}

// Bracket classes of the path's edges, as a string over {o, c, f}.
inline std::string path_bracket_string(const GluedComplex& G, const std::vector<Vid>& path) {
  std::string s;
  for (size_t i = 0; i + 1 < path.size(); ++i)
    s += edge_class_char(G.classify_edge(path[i], path[i + 1]).first);
  return s;
}

inline int path_bracket_count(const GluedComplex& G, const std::vector<Vid>& path) {
  int n = 0;
  for (size_t i = 0; i + 1 < path.size(); ++i)
    if (G.classify_edge(path[i], path[i + 1]).first != EdgeClass::kFlat) ++n;
  return n;
}

// ---------------------------------------------------------------------------
// Encoding-driven cell detection over 7-vertex windows.

// Whether the corner opposite to `b` in the given cell is the cell's unique
// senior-minimum ("special") corner, evaluated in the cell's own base.
inline bool wedge_is_special(const GluedComplex& G, int cell_idx, Vid b) {
  const GluedComplex::GCell& cell = G.gcells[cell_idx];
  const Complex& cx = G.bases[cell.base].cx;
  int sr = cx.special_role(cell.tile);
  if (sr < 0) return false;
  for (int i = 0; i < 4; ++i)
    if (cell.c[i] == b) return (i + 2) % 4 == sr;
  return false;
}

// Hypothesis filter for 7-windows: every three consecutive vertices lying in
// one flat base must form a regular wedge there (when they span a cell, its
// fourth corner is not special).
inline bool window_flat_triples_regular(const GluedComplex& G, const std::vector<Vid>& w) {
  for (size_t i = 0; i + 2 < w.size(); ++i) {
    auto it = G.wedge_cell.find(
        {w[i + 1], std::min(w[i], w[i + 2]), std::max(w[i], w[i + 2])});
    if (it == G.wedge_cell.end()) continue;
    if (wedge_is_special(G, it->second, w[i + 1])) return false;
  }
  return true;
}

struct CellTableEntry {
  bool in_cell = false;
  int tile_type = -1;  // template type of the witnessing cell, when in_cell
};

// Table mapping the spatial encoding of the middle triple A3 A4 A5 of a
// 7-window to whether A3, A4, A5 are three corners of a common cell.  Built
// by exhaustive enumeration; any conflict is reported.
struct CellTable {
  std::map<std::string, CellTableEntry> table;
  long windows = 0;
  long skipped_irregular = 0;
  std::vector<std::string> conflicts;

  bool ok() const { return conflicts.empty(); }
};

inline std::string encode_middle_triple(const GluedComplex& G, const std::vector<Vid>& w7) {
  auto om = path_omegas(G, w7);
  std::string out;
  for (size_t i = 2; i <= 4; ++i) {
    if (i > 2) out += spatial_edge_mark(G, w7[i - 1], w7[i]);
    out += flag_at(G, w7[i], fan_at(om, i));
  }
  return out;
}

// Enumerates non-backtracking walks of a fixed vertex count.
template <class F>
inline void for_each_walk(const GluedComplex& G, int nverts, F&& visit) {
  std::vector<Vid> w;
  std::function<void()> rec = [&]() {
    if ((int)w.size() == nverts) {
      visit(w);
      return;
    }
    Vid tail = w.back();
    for (auto& [nbr, geid] : G.adj[tail]) {
      if (w.size() >= 2 && nbr == w[w.size() - 2]) continue;
      w.push_back(nbr);
      rec();
      w.pop_back();
    }
  };
  for (Vid v = 0; v < (Vid)G.gverts.size(); ++v) {
    w.assign(1, v);
    rec();
  }
}

inline CellTable build_cell_table(const GluedComplex& G) {
  CellTable ct;
  for_each_walk(G, 7, [&](const std::vector<Vid>& w) {
    if (!window_flat_triples_regular(G, w)) {
      ++ct.skipped_irregular;
      return;
    }
    ++ct.windows;
    auto it = G.wedge_cell.find({w[3], std::min(w[2], w[4]), std::max(w[2], w[4])});
    CellTableEntry e;
    if (it != G.wedge_cell.end()) {
      e.in_cell = true;
      const GluedComplex::GCell& cell = G.gcells[it->second];
      e.tile_type = G.bases[cell.base].cx.tiles[cell.tile].type;
    }
    std::string key = encoding_digest(encode_middle_triple(G, w));
    auto [pos, fresh] = ct.table.emplace(key, e);
    if (!fresh && (pos->second.in_cell != e.in_cell || pos->second.tile_type != e.tile_type))
      ct.conflicts.push_back(key);
  });
  return ct;
}

// Looks up the verdict for an encoded middle triple (table keys are digests
// of the encodings).
inline std::optional<CellTableEntry> establish_cell(const CellTable& ct,
                                                    const std::string& encoding) {
  auto it = ct.table.find(encoding_digest(encoding));
  if (it == ct.table.end()) return std::nullopt;
  return it->second;
}

// ---------------------------------------------------------------------------
// Spatial determinism over 5-windows.

struct SpatialReport {
  long windows = 0;              // windows satisfying both lemma conditions
  long skipped_special = 0;      // excluded: the replaced corner is special
  long skipped_unsubdivided = 0;  // excluded: the cell is an unsubdivided flap
  long classes = 0;
  long violations = 0;  // classes with more than one completion
  std::vector<std::string> violating_keys;
};

// For every 5-window A2..A6 whose middle triple A3 A4 A5 spans a cell with
// a non-special fourth corner X, the encoding of A2 A3 A4 A5 A6 must
// determine the encoding of A2 A3 X A5 A6.  Windows whose witnessing cell is
// the root square of a never-subdivided flap are excluded: wedge regularity
// is relative to the subdivision structure of the cell's flat base, and such
// flaps have none yet (they only occur at the top gluing level).
inline SpatialReport verify_spatial_determinism(const GluedComplex& G, int blank_slot = -1,
                                                Vid corrupt_vertex = (Vid)-1,
                                                int corrupt_slot = -1) {
  SpatialReport rep;
  std::map<std::string, std::set<std::string>> classes;
  for (int ci = 0; ci < (int)G.gcells.size(); ++ci) {
    const GluedComplex::GCell& gc = G.gcells[ci];
    bool unsubdivided = G.bases[gc.base].cx.tiles[gc.tile].type == 0;
    const auto& c = gc.c;
    for (int m = 0; m < 4; ++m) {  // A4 = c[m], A3/A5 its cyclic neighbors
      Vid a4 = c[m];
      Vid n1 = c[(m + 3) % 4], n2 = c[(m + 1) % 4];
      Vid x = c[(m + 2) % 4];
      for (int dir = 0; dir < 2; ++dir) {
        Vid a3 = dir ? n2 : n1, a5 = dir ? n1 : n2;
        bool special = wedge_is_special(G, ci, a4);
        for (auto& [a2, e2] : G.adj[a3]) {
          if (a2 == a4) continue;
          for (auto& [a6, e6] : G.adj[a5]) {
            if (a6 == a4) continue;
            if (unsubdivided) {
              ++rep.skipped_unsubdivided;
              continue;
            }
            if (special) {
              ++rep.skipped_special;
              continue;
            }
            ++rep.windows;
            std::vector<Vid> win{a2, a3, a4, a5, a6};
            std::vector<Vid> rep_win{a2, a3, x, a5, a6};
            // blank_slot corrupts only the window key; the completion stays
            // intact, so any information the blanked slot carried shows up
            // as classes with more than one completion.  A corrupted vertex
            // flag applies everywhere, so a class mixing windows whose
            // completion vertex is and is not corrupted becomes a violation.
            classes[encoding_digest(encode_spatial_path(G, win, blank_slot, -1, corrupt_vertex,
                                                        corrupt_slot))]
                .insert(encoding_digest(
                    encode_spatial_path(G, rep_win, -1, 2, corrupt_vertex, corrupt_slot)));
          }
        }
      }
    }
  }
  rep.classes = (long)classes.size();
  for (auto& [k, vals] : classes) {
    if (vals.size() > 1) {
      ++rep.violations;
      if (rep.violating_keys.size() < 8) rep.violating_keys.push_back(k);
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Straightening: cell flips that pull a path into a target base.

struct FlipStep {
  int pos;   // path position replaced
  Vid from;  // vertex removed
  Vid to;    // vertex inserted (opposite corner of the witnessing cell)
};

struct StraightenResult {
  bool ok = false;
  std::vector<Vid> path;        // final path (equals input when ok == false)
  std::vector<FlipStep> flips;  // replayable certificate
  long states_visited = 0;
  std::string detail;
};

inline std::vector<Vid> apply_flip(const GluedComplex& G, const std::vector<Vid>& p,
                                   const FlipStep& f) {
  if (f.pos <= 0 || f.pos + 1 >= (int)p.size() || p[f.pos] != f.from)
    throw std::invalid_argument("apply_flip: bad position");
  auto [d, cell] = G.opposite_corner(p[f.pos - 1], p[f.pos], p[f.pos + 1]);
  if (d != f.to) throw std::invalid_argument("apply_flip: no witnessing cell");
  std::vector<Vid> q = p;
  q[f.pos] = f.to;
  return q;
}

inline bool path_in_base(const GluedComplex& G, const std::vector<Vid>& p, int base) {
  for (Vid v : p)
    if (G.localize(v, base) == (Vid)-1) return false;
  return true;
}

// Breadth-first search over flip equivalence, complete up to the budget:
// succeeds when a path with every vertex in `target_base` is reached.  When
// the whole equivalence class is exhausted without success, the input is
// provably not straightenable into the target (detail "class exhausted");
// hitting the budget instead is inconclusive ("budget exceeded").
inline StraightenResult straighten(const GluedComplex& G, const std::vector<Vid>& start,
                                   int target_base = 0, long budget = 200000) {
  for (size_t i = 0; i + 1 < start.size(); ++i)
    if (!G.has_edge(start[i], start[i + 1]))
      throw std::invalid_argument("straighten: input is not a path");
  StraightenResult res;
  res.path = start;
  struct Node {
    std::vector<Vid> p;
    std::vector<FlipStep> flips;
  };
  auto key_of = [](const std::vector<Vid>& p) {
    std::string k;
    for (Vid v : p) k += std::to_string(v) + ",";
    return k;
  };
  std::deque<Node> queue{{start, {}}};
  std::unordered_set<std::string> seen{key_of(start)};
  while (!queue.empty()) {
    Node cur = std::move(queue.front());
    queue.pop_front();
    if (++res.states_visited > budget) {
      res.detail = "budget exceeded";
      return res;
    }
    if (path_in_base(G, cur.p, target_base)) {
      res.ok = true;
      res.path = cur.p;
      res.flips = cur.flips;
      return res;
    }
    for (int i = 1; i + 1 < (int)cur.p.size(); ++i) {
      auto [d, cell] = G.opposite_corner(cur.p[i - 1], cur.p[i], cur.p[i + 1]);
      if (d < 0) continue;
      Node nxt;
      nxt.p = cur.p;
      nxt.p[i] = d;
      if (!seen.insert(key_of(nxt.p)).second) continue;
      nxt.flips = cur.flips;
      nxt.flips.push_back(FlipStep{i, cur.p[i], d});
      queue.push_back(std::move(nxt));
    }
  }
  res.detail = "class exhausted";
  return res;
}

// Deterministic sample of non-backtracking paths with both endpoints in the
// given base (uniform random walks, fixed seed), for straightening studies.
inline std::vector<std::vector<Vid>> sample_base_paths(const GluedComplex& G, int base,
                                                       int count, int max_len,
                                                       uint32_t seed) {
  std::mt19937 rng(seed);
  std::vector<std::vector<Vid>> out;
  while ((int)out.size() < count) {
    Vid v = rng() % (Vid)G.gverts.size();
    if (G.localize(v, base) == (Vid)-1) continue;
    int len = 2 + (int)(rng() % (uint32_t)(max_len - 1));  // 2..max_len edges
    std::vector<Vid> p{v};
    for (int i = 0; i < len; ++i) {
      std::vector<Vid> opts;
      for (auto& [w, e] : G.adj[p.back()])
        if (p.size() < 2 || w != p[p.size() - 2]) opts.push_back(w);
      if (opts.empty()) break;
      p.push_back(opts[rng() % opts.size()]);
    }
    if ((int)p.size() != len + 1) continue;
    if (G.localize(p.back(), base) == (Vid)-1) continue;
    out.push_back(std::move(p));
  }
  return out;
}

// Bracket marks of each flap must alternate along the path: entering and
// leaving a fixed flap flips its containment state, so two consecutive
// marks of the same kind for one flap are impossible.  (Marks of different
// flaps may sit adjacent when flaps nest.)
inline bool brackets_well_formed(const GluedComplex& G, const std::vector<Vid>& path) {
  std::map<int, char> last;
  for (size_t i = 0; i + 1 < path.size(); ++i) {
    auto [cls, flap] = G.classify_edge(path[i], path[i + 1]);
    if (cls == EdgeClass::kFlat) continue;
    char c = edge_class_char(cls);
    auto it = last.find(flap);
    if (it != last.end() && it->second == c) return false;
    last[flap] = c;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Flat regularity of a plain complex: every path of bounded length with both
// endpoints on the outer boundary can be flipped, cell by cell, into a path
// lying entirely on the boundary.

struct FlatRegularReport {
  Tristate status = Tristate::kInconclusive;
  long paths_checked = 0;
  std::string stuck_path;  // comma-separated vids of a counterexample
};

inline bool flat_on_boundary(const Complex& K, const std::vector<Vid>& p) {
  for (Vid v : p) {
    VKind k = K.verts[v].kind;
    if (k != VKind::kCorner && k != VKind::kBoundarySide) return false;
  }
  return true;
}

inline FlatRegularReport flat_regular_check(const Complex& K, int max_len,
                                            long budget = 2'000'000) {
  FlatRegularReport rep;
  auto boundary = [&](Vid v) {
    VKind k = K.verts[v].kind;
    return k == VKind::kCorner || k == VKind::kBoundarySide;
  };
  auto key_of = [](const std::vector<Vid>& p) {
    std::string k;
    for (Vid v : p) k += std::to_string(v) + ",";
    return k;
  };
  // Flip-reachability of a boundary path, breadth-first with a global budget.
  long used = 0;
  auto straightenable = [&](const std::vector<Vid>& start) -> std::optional<bool> {
    std::deque<std::vector<Vid>> queue{start};
    std::unordered_set<std::string> seen{key_of(start)};
    while (!queue.empty()) {
      std::vector<Vid> p = std::move(queue.front());
      queue.pop_front();
      if (++used > budget) return std::nullopt;
      if (flat_on_boundary(K, p)) return true;
      for (int i = 1; i + 1 < (int)p.size(); ++i) {
        Eid e1 = K.find_edge(p[i - 1], p[i]), e2 = K.find_edge(p[i], p[i + 1]);
        if (e1 < 0 || e2 < 0) continue;
        for (Tid side : {K.edges[e1].right, K.edges[e1].left}) {
          if (side < 0) continue;
          const auto& c = K.tiles[side].c;
          for (int j = 0; j < 4; ++j) {
            if (c[j] != p[i]) continue;
            Vid prev = c[(j + 3) % 4], next = c[(j + 1) % 4];
            if (!((prev == p[i - 1] && next == p[i + 1]) ||
                  (next == p[i - 1] && prev == p[i + 1])))
              continue;
            std::vector<Vid> q = p;
            q[i] = c[(j + 2) % 4];
            if (seen.insert(key_of(q)).second) queue.push_back(std::move(q));
          }
        }
      }
    }
    return false;
  };
  // Enumerate non-backtracking paths from boundary vertices; check those
  // whose far endpoint is also on the boundary.
  std::vector<Vid> w;
  bool inconclusive = false;
  std::function<void()> rec = [&]() {
    if (inconclusive) return;
    if (w.size() >= 2 && boundary(w.back())) {
      ++rep.paths_checked;
      auto r = straightenable(w);
      if (!r.has_value()) {
        inconclusive = true;
        return;
      }
      if (!*r && rep.stuck_path.empty()) {
        for (size_t i = 0; i < w.size(); ++i)
          rep.stuck_path += (i ? "," : "") + std::to_string(w[i]);
      }
    }
    if ((int)w.size() > max_len) return;
    Vid tail = w.back();
    for (Eid e : K.ring[tail]) {
      Vid nbr = K.other_end(e, tail);
      if (w.size() >= 2 && nbr == w[w.size() - 2]) continue;
      w.push_back(nbr);
      rec();
      w.pop_back();
    }
  };
  for (Vid v = 0; v < (Vid)K.verts.size(); ++v) {
    if (!boundary(v)) continue;
    w.assign(1, v);
    rec();
    if (inconclusive) break;
  }
  if (inconclusive)
    rep.status = Tristate::kInconclusive;
  else
    rep.status = rep.stuck_path.empty() ? Tristate::kTrue : Tristate::kFalse;
  return rep;
}

}  // namespace qtd
