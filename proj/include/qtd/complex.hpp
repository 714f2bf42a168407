#pragma once

// Iterated subdivision complexes K_n of a substitution template: vertices,
// unit edges grouped into maximal macroedges, elementary cells, subdivided
// subcomplex records with their boss lists, and clockwise edge rings.

#include <qtd/substitution.hpp>

#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace qtd {

using Vid = int32_t;
using Eid = int32_t;
using Mid = int32_t;
using Tid = int32_t;

enum class VKind : uint8_t { kCorner, kBoundarySide, kSidePos, kInterior };

inline const char* vkind_name(VKind k) {
  switch (k) {
    case VKind::kCorner: return "corner";
    case VKind::kBoundarySide: return "boundary";
    case VKind::kSidePos: return "side";
    default: return "interior";
  }
}

struct VertexRec {
  VKind kind;
  int level = 0;       // subdivision step that created the vertex
  Vec2 pos;
  Mid medge = -1;      // macroedge this vertex is interior to (side kinds)
  int owner_sub = -1;  // subcomplex record owning the vertex (interior kinds)
  // corner
  uint8_t corner = 0;
  // side kinds: roles of the refined unit edge in the flanking cells
  uint8_t role_right = 0, role_left = 0;  // side index in right / left flank
  uint16_t idx = 0;                       // 1-based position along canonical direction
  int16_t metype = 0;                     // macroedge type; -(side+1) on the boundary
  uint8_t bracket = 0;                    // 0 none, 1 left, 2 right, 3 both (mid)
  // interior kind
  uint16_t interior_j = 0;
};

struct MacroRec {
  int16_t type;   // interior edge type 1..r, or -(side+1) for boundary sides
  int level;      // creation step
  int owner_sub;  // subcomplex whose subdivision created it (root for boundary)
  std::vector<Vid> chain;  // vertices in canonical direction
};

struct EdgeRec {
  Vid tail, head;  // canonical direction of the macroedge
  Mid medge;
  Tid right = -1, left = -1;  // flanking cells at the current level
};

struct TileRec {
  uint16_t type;  // template tile type (1-based); 0 for the root square
  std::array<Vid, 4> c;
  int parent_sub = -1;
  std::vector<uint8_t> addr;  // tile-type address from the root
};

struct SubRec {
  std::vector<uint8_t> addr;
  uint16_t type;           // template type of the subdivided tile
  int level;               // level at which the tile existed (= addr.size())
  std::array<Vid, 4> c;
  std::vector<Vid> bosses;  // 4s+4 perimeter vertices clockwise from top-left
};

// One refined unit edge: old endpoints and the fresh vertices between them.
struct RefinedEdge {
  Vid a, b;                  // old canonical tail and head
  std::vector<Vid> fresh;    // ordered a -> b
};

struct Complex {
  const SubstitutionSpec* spec = nullptr;
  int level = 0;
  std::vector<VertexRec> verts;
  std::vector<MacroRec> medges;
  std::vector<EdgeRec> edges;
  std::vector<TileRec> tiles;
  std::vector<SubRec> subs;
  std::vector<RefinedEdge> last_refinement;  // from the most recent step

  // Rebuilt each step:
  std::vector<std::vector<Eid>> ring;        // clockwise, first main at slot 0
  std::vector<std::vector<uint8_t>> ring_rank;  // 1 first main, 2 second, 3 other main, 0 rest
  std::map<std::pair<Vid, Vid>, Eid> edge_lookup;

  Vid other_end(Eid e, Vid v) const { return edges[e].tail == v ? edges[e].head : edges[e].tail; }

  Eid find_edge(Vid u, Vid v) const {
    auto it = edge_lookup.find({std::min(u, v), std::max(u, v)});
    return it == edge_lookup.end() ? -1 : it->second;
  }

  int ring_slot(Vid v, Eid e) const {
    auto& r = ring[v];
    for (int i = 0; i < (int)r.size(); ++i)
      if (r[i] == e) return i;
    return -1;
  }

  int main_rank(Vid v, Eid e) const {
    int slot = ring_slot(v, e);
    return slot < 0 ? -1 : ring_rank[v][slot];
  }

  // Senior rank: lexicographic (level, phase); edge-inserted vertices precede
  // tile-interior vertices created in the same step.
  std::pair<int, int> senior_rank(Vid v) const {
    return {verts[v].level, verts[v].kind == VKind::kInterior ? 1 : 0};
  }

  // Corner role of the cell's unique senior-minimum corner, or -1.
  int special_role(Tid t) const {
    int best = -1;
    for (int i = 0; i < 4; ++i) {
      if (best == -1 || senior_rank(tiles[t].c[i]) < senior_rank(tiles[t].c[best])) best = i;
    }
    for (int i = 0; i < 4; ++i)
      if (i != best && !(senior_rank(tiles[t].c[best]) < senior_rank(tiles[t].c[i]))) return -1;
    return best;
  }

  bool is_special(Tid t, int corner_idx) const { return special_role(t) == corner_idx; }

  int root_sub() const { return 0; }

  void subdivide();
  void rebuild_rings();
  std::string dump() const;

  long count_vertices() const { return (long)verts.size(); }
  long count_edges() const { return (long)edges.size(); }
  long count_cells() const { return (long)tiles.size(); }
  long euler() const { return count_vertices() - count_edges() + count_cells(); }

  // Max over vertices of (vertex level - min incident macroedge level).
  int local_finiteness_constant() const {
    int best = 0;
    for (Vid v = 0; v < (Vid)verts.size(); ++v) {
      int m = -1;
      for (Eid e : ring[v]) {
        int el = medges[edges[e].medge].level;
        if (m < 0 || el < m) m = el;
      }
      if (m >= 0) best = std::max(best, verts[v].level - m);
    }
    return best;
  }
};

inline Complex build_complex(const SubstitutionSpec& spec, int n,
                             long max_vertices = 5'000'000) {
  Complex K;
  K.spec = &spec;
  // K_0: the unit square.
  const Vec2 cpos[4] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  for (int c = 0; c < 4; ++c) {
    VertexRec v;
    v.kind = VKind::kCorner;
    v.level = 0;
    v.pos = cpos[c];
    v.corner = (uint8_t)c;
    v.owner_sub = 0;  // root
    K.verts.push_back(v);
  }
  for (int side = 0; side < 4; ++side) {
    MacroRec m;
    m.type = (int16_t)(-(side + 1));
    m.level = 0;
    m.owner_sub = 0;
    m.chain = {side, (side + 1) % 4};
    K.medges.push_back(m);
    K.edges.push_back(EdgeRec{side, (side + 1) % 4, side});
  }
  K.tiles.push_back(TileRec{0, {0, 1, 2, 3}, -1, {}});
  // Root subcomplex record; bosses filled by the first subdivision.
  K.subs.push_back(SubRec{{}, 0, 0, {0, 1, 2, 3}, {}});
  K.rebuild_rings();
  for (int i = 0; i < n; ++i) {
    K.subdivide();
    if ((long)K.verts.size() > max_vertices)
      throw std::runtime_error("vertex budget exceeded at level " + std::to_string(K.level));
  }
  return K;
}

inline void Complex::subdivide() {
  const SubstitutionSpec& sp = *spec;
  int n = level + 1;
  int s = sp.s;

  // Side role of the unit edge (a,b) in cell t, or -1.
  auto side_role_in = [&](Tid t, Vid a, Vid b) {
    for (int sd = 0; sd < 4; ++sd) {
      Vid u = tiles[t].c[sd], w = tiles[t].c[(sd + 1) % 4];
      if ((u == a && w == b) || (u == b && w == a)) return sd;
    }
    return -1;
  };

  // Phase A: refine every unit edge.
  std::vector<EdgeRec> new_edges;
  std::map<std::pair<Vid, Vid>, int> refined_of;  // old edge endpoints -> refinement idx
  last_refinement.clear();
  for (Eid ei = 0; ei < (Eid)edges.size(); ++ei) {
    const EdgeRec e = edges[ei];
    const MacroRec& med = medges[e.medge];
    int la = verts[e.tail].level, lb = verts[e.head].level;
    uint8_t bracket;
    if (la == n - 1 && lb == n - 1) bracket = 3;
    else if (lb == n - 1) bracket = 1;  // the one-step-older neighbor sits forward: left
    else if (la == n - 1) bracket = 2;
    else throw std::logic_error("refined unit edge with both endpoints aged 2+ steps");

    RefinedEdge refd{e.tail, e.head, {}};
    for (int i = 1; i <= s; ++i) {
      VertexRec v;
      v.level = n;
      v.pos = lerp(verts[e.tail].pos, verts[e.head].pos, Rat(i) / Rat(s + 1));
      v.medge = e.medge;
      v.owner_sub = med.owner_sub;
      v.idx = (uint16_t)i;
      v.metype = med.type;
      v.bracket = bracket;
      if (med.type < 0) {
        v.kind = VKind::kBoundarySide;
        v.role_right = (uint8_t)(-med.type - 1);
        v.role_left = 255;
      } else {
        v.kind = VKind::kSidePos;
        int rr = side_role_in(e.right, e.tail, e.head);
        int rl = side_role_in(e.left, e.tail, e.head);
        if (rr < 0 || rl < 0) throw std::logic_error("interior unit edge without two flanks");
        v.role_right = (uint8_t)rr;
        v.role_left = (uint8_t)rl;
      }
      refd.fresh.push_back((Vid)verts.size());
      verts.push_back(v);
    }
    Vid prev = e.tail;
    for (Vid x : refd.fresh) {
      new_edges.push_back(EdgeRec{prev, x, e.medge});
      prev = x;
    }
    new_edges.push_back(EdgeRec{prev, e.head, e.medge});
    refined_of[{std::min(e.tail, e.head), std::max(e.tail, e.head)}] =
        (int)last_refinement.size();
    last_refinement.push_back(std::move(refd));
  }

  // Oriented list of fresh vertices between old neighbors u -> w.
  auto fresh_between = [&](Vid u, Vid w) {
    const RefinedEdge& r = last_refinement[refined_of.at({std::min(u, w), std::max(u, w)})];
    std::vector<Vid> out = r.fresh;
    if (r.a != u) std::reverse(out.begin(), out.end());
    return out;
  };

  // Splice fresh vertices into every macroedge chain.
  for (auto& med : medges) {
    std::vector<Vid> chain;
    for (size_t i = 0; i + 1 < med.chain.size(); ++i) {
      chain.push_back(med.chain[i]);
      for (Vid x : fresh_between(med.chain[i], med.chain[i + 1])) chain.push_back(x);
    }
    chain.push_back(med.chain.back());
    med.chain = std::move(chain);
  }

  // Phase B: instantiate the template inside every cell.
  std::vector<TileRec> new_tiles;
  for (Tid t = 0; t < (Tid)tiles.size(); ++t) {
    const TileRec tile = tiles[t];
    int sub_idx = (t == 0 && tile.type == 0 && tile.addr.empty()) ? 0 : (int)subs.size();
    if (sub_idx != 0)
      subs.push_back(SubRec{tile.addr, tile.type, level, tile.c, {}});
    SubRec& rec = subs[sub_idx];
    // Bosses clockwise from the top-left corner.
    rec.bosses.clear();
    for (int sd = 0; sd < 4; ++sd) {
      rec.bosses.push_back(tile.c[sd]);
      for (Vid x : fresh_between(tile.c[sd], tile.c[(sd + 1) % 4])) rec.bosses.push_back(x);
    }

    // Template vertex -> complex vertex.
    std::vector<Vid> vmap(sp.nverts(), -1);
    for (int c = 0; c < 4; ++c) vmap[sp.corner_id(c)] = tile.c[c];
    for (int sd = 0; sd < 4; ++sd) {
      auto fr = fresh_between(tile.c[sd], tile.c[(sd + 1) % 4]);
      for (int i = 1; i <= s; ++i) vmap[sp.side_id(sd, i)] = fr[i - 1];
    }
    // By value: pushing interior vertices below may reallocate `verts`.
    const Vec2 p0 = verts[tile.c[0]].pos, p1 = verts[tile.c[1]].pos,
               p2 = verts[tile.c[2]].pos, p3 = verts[tile.c[3]].pos;
    for (int j = 0; j < sp.v(); ++j) {
      VertexRec v;
      v.kind = VKind::kInterior;
      v.level = n;
      v.pos = bilinear(p0, p1, p2, p3, sp.interior_pos[j].x, sp.interior_pos[j].y);
      v.owner_sub = sub_idx;
      v.interior_j = (uint16_t)j;
      vmap[sp.interior_id(j)] = (Vid)verts.size();
      verts.push_back(v);
    }
    for (int i = 0; i < sp.r(); ++i) {
      const TemplateEdge& te = sp.edges[i];
      MacroRec m;
      m.type = (int16_t)(i + 1);
      m.level = n;
      m.owner_sub = sub_idx;
      m.chain = {vmap[te.tail], vmap[te.head]};
      new_edges.push_back(EdgeRec{vmap[te.tail], vmap[te.head], (Mid)medges.size()});
      medges.push_back(std::move(m));
    }
    for (int tt = 0; tt < sp.k(); ++tt) {
      TileRec nt;
      nt.type = (uint16_t)(tt + 1);
      for (int c = 0; c < 4; ++c) nt.c[c] = vmap[sp.tiles[tt].c[c]];
      nt.parent_sub = sub_idx;
      nt.addr = tile.addr;
      nt.addr.push_back((uint8_t)(tt + 1));
      new_tiles.push_back(std::move(nt));
    }
  }

  // Phase C: flanking cells of the new unit edges.
  edges = std::move(new_edges);
  tiles = std::move(new_tiles);
  level = n;
  edge_lookup.clear();
  for (Eid ei = 0; ei < (Eid)edges.size(); ++ei)
    edge_lookup[{std::min(edges[ei].tail, edges[ei].head),
                 std::max(edges[ei].tail, edges[ei].head)}] = ei;
  for (Tid t = 0; t < (Tid)tiles.size(); ++t)
    for (int sd = 0; sd < 4; ++sd) {
      Vid a = tiles[t].c[sd], b = tiles[t].c[(sd + 1) % 4];
      Eid e = find_edge(a, b);
      if (e < 0) throw std::logic_error("cell side is not a unit edge");
      if (edges[e].tail == a) edges[e].right = t;
      else edges[e].left = t;
    }

  rebuild_rings();
}

inline void Complex::rebuild_rings() {
  if (edge_lookup.empty())
    for (Eid ei = 0; ei < (Eid)edges.size(); ++ei)
      edge_lookup[{std::min(edges[ei].tail, edges[ei].head),
                   std::max(edges[ei].tail, edges[ei].head)}] = ei;
  ring.assign(verts.size(), {});
  ring_rank.assign(verts.size(), {});
  std::vector<std::vector<Eid>> incident(verts.size());
  for (Eid ei = 0; ei < (Eid)edges.size(); ++ei) {
    incident[edges[ei].tail].push_back(ei);
    incident[edges[ei].head].push_back(ei);
  }
  // Rotation system from the cells: at corner v of a cell, the edge to the
  // clockwise-next corner is followed (clockwise around v) by the edge to the
  // clockwise-previous corner, since the cell fills exactly one wedge.
  std::vector<std::map<Vid, Vid>> rot(verts.size());  // next-corner -> prev-corner
  for (auto& t : tiles)
    for (int i = 0; i < 4; ++i)
      rot[t.c[i]][t.c[(i + 1) % 4]] = t.c[(i + 3) % 4];
  for (Vid v = 0; v < (Vid)verts.size(); ++v) {
    auto& r = ring[v];
    // Start edge: one whose far end is nobody's rotation image (boundary
    // vertices have such an edge); otherwise the cycle can start anywhere.
    std::set<Vid> images;
    for (auto& [nx, pv] : rot[v]) images.insert(pv);
    Vid start = -1;
    for (Eid e : incident[v]) {
      Vid x = other_end(e, v);
      if (!images.count(x)) { start = x; break; }
    }
    if (start == -1) start = other_end(incident[v][0], v);
    Vid cur = start;
    for (size_t i = 0; i < incident[v].size(); ++i) {
      Eid e = find_edge(v, cur);
      if (e < 0) throw std::logic_error("rotation system mismatch");
      r.push_back(e);
      auto it = rot[v].find(cur);
      if (it == rot[v].end()) break;  // boundary vertex: walk ends
      cur = it->second;
    }
    if (r.size() != incident[v].size())
      throw std::logic_error("rotation walk did not cover all incident edges");
    // Identify mains and rotate the first main to slot 0.
    const VertexRec& vr = verts[v];
    std::vector<uint8_t> rank(r.size(), 0);
    int first = -1;
    if (vr.kind == VKind::kCorner) {
      // Both stubs are main; the first leaves along the boundary chain.
      for (int i = 0; i < (int)r.size(); ++i) {
        const EdgeRec& e = edges[r[i]];
        if (medges[e.medge].type >= 0) continue;
        if (e.tail == v) { rank[i] = 1; first = i; }
        else if (e.head == v) rank[i] = 2;
      }
    } else if (vr.kind == VKind::kBoundarySide || vr.kind == VKind::kSidePos) {
      for (int i = 0; i < (int)r.size(); ++i) {
        const EdgeRec& e = edges[r[i]];
        if (e.medge != vr.medge) continue;
        if (e.tail == v) { rank[i] = 1; first = i; }
        else if (e.head == v) rank[i] = 2;
      }
    } else {
      // Interior: mains lie on the macroedges born with the vertex; the first
      // two ranks follow the template edge type order.
      std::vector<std::pair<int, int>> mains;  // (metype, slot)
      for (int i = 0; i < (int)r.size(); ++i) {
        const MacroRec& m = medges[edges[r[i]].medge];
        if (m.level == vr.level && m.owner_sub == vr.owner_sub) mains.push_back({m.type, i});
      }
      std::sort(mains.begin(), mains.end());
      for (size_t i = 0; i < mains.size(); ++i)
        rank[mains[i].second] = (uint8_t)(i == 0 ? 1 : (i == 1 ? 2 : 3));
      if (!mains.empty()) first = mains[0].second;
    }
    if (first < 0) throw std::logic_error("vertex without a first main edge");
    std::rotate(r.begin(), r.begin() + first, r.end());
    std::rotate(rank.begin(), rank.begin() + first, rank.end());
    ring_rank[v] = std::move(rank);
  }
}

inline std::string addr_str(const std::vector<uint8_t>& addr) {
  if (addr.empty()) return "root";
  std::string out;
  for (size_t i = 0; i < addr.size(); ++i)
    out += (i ? "." : "") + std::to_string((int)addr[i]);
  return out;
}

inline std::string Complex::dump() const {
  std::ostringstream os;
  os << "complex level=" << level << " V=" << verts.size() << " E=" << edges.size()
     << " F=" << tiles.size() << "\n";
  for (Vid v = 0; v < (Vid)verts.size(); ++v) {
    const VertexRec& r = verts[v];
    os << "v" << v << " " << vkind_name(r.kind) << " lvl=" << r.level << " pos=("
       << rat_str(r.pos.x) << "," << rat_str(r.pos.y) << ")";
    if (r.kind == VKind::kSidePos)
      os << " roles=" << (int)r.role_right << "/" << (int)r.role_left << " i=" << r.idx
         << " metype=" << r.metype << " br=" << (int)r.bracket;
    if (r.kind == VKind::kBoundarySide)
      os << " side=" << (int)r.role_right << " i=" << r.idx << " br=" << (int)r.bracket;
    if (r.kind == VKind::kInterior) os << " j=" << r.interior_j;
    os << " owner=" << r.owner_sub << "\n";
  }
  for (Mid m = 0; m < (Mid)medges.size(); ++m) {
    os << "m" << m << " type=" << medges[m].type << " lvl=" << medges[m].level
       << " owner=" << medges[m].owner_sub << " chain=";
    for (Vid v : medges[m].chain) os << v << " ";
    os << "\n";
  }
  for (Eid e = 0; e < (Eid)edges.size(); ++e)
    os << "e" << e << " " << edges[e].tail << "->" << edges[e].head << " m=" << edges[e].medge
       << "\n";
  for (Tid t = 0; t < (Tid)tiles.size(); ++t) {
    os << "t" << t << " type=" << tiles[t].type << " addr=" << addr_str(tiles[t].addr)
       << " c=";
    for (Vid v : tiles[t].c) os << v << " ";
    os << "\n";
  }
  for (size_t i = 0; i < subs.size(); ++i) {
    os << "sub" << i << " addr=" << addr_str(subs[i].addr) << " bosses=";
    for (Vid v : subs[i].bosses) os << v << " ";
    os << "\n";
  }
  return os.str();
}

// Plain SVG rendering of the current level (edges plus vertex dots).
inline std::string render_svg(const Complex& K, int size = 800) {
  std::ostringstream os;
  auto px = [&](const Rat& r) { return r.get_d() * (size - 40) + 20; };
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
     << "\">\n";
  for (auto& e : K.edges) {
    const Vec2 &a = K.verts[e.tail].pos, &b = K.verts[e.head].pos;
    bool boundary = K.medges[e.medge].type < 0;
    os << "<line x1=\"" << px(a.x) << "\" y1=\"" << px(a.y) << "\" x2=\"" << px(b.x)
       << "\" y2=\"" << px(b.y) << "\" stroke=\"" << (boundary ? "#333" : "#888")
       << "\" stroke-width=\"" << (boundary ? 2 : 1) << "\"/>\n";
  }
  for (auto& v : K.verts)
    os << "<circle cx=\"" << px(v.pos.x) << "\" cy=\"" << px(v.pos.y)
       << "\" r=\"2\" fill=\"#c33\"/>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace qtd
