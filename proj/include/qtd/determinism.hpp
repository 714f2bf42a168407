#pragma once

// Weak determinism of colorings: exhaustive enumeration of two-edge corner
// paths around cells, classification of their encodings, verification of the
// structural consequences of the coloring, and reconstruction of the fourth
// corner of a cell from a path encoding alone (via conflict-checked tables).

#include <qtd/coloring.hpp>

#include <atomic>
#include <future>
#include <map>
#include <sstream>
#include <thread>
#include <tuple>

namespace qtd {

// --- canonical path encodings: parsing --------------------------------------

struct ParsedMark {
  int out_slot, out_rank, in_slot, in_rank;
};

struct ParsedPath {
  std::vector<std::string> full;              // full colors
  std::vector<std::string> own;               // own color prefixes
  std::vector<std::vector<std::string>> boss; // boss color lists
  std::vector<ParsedMark> marks;
};

inline ParsedPath parse_path_encoding(const std::string& enc) {
  ParsedPath p;
  size_t i = 0;
  auto fail = [&](const std::string& m) {
    throw std::invalid_argument("bad path encoding (" + m + "): " + enc);
  };
  while (i < enc.size()) {
    size_t brace = enc.find('{', i);
    size_t close = enc.find('}', i);
    if (brace == std::string::npos || close == std::string::npos || close < brace)
      fail("missing boss braces");
    p.own.push_back(enc.substr(i, brace - i));
    std::vector<std::string> bosses;
    std::string inner = enc.substr(brace + 1, close - brace - 1);
    std::stringstream ss(inner);
    std::string item;
    while (std::getline(ss, item, '|')) bosses.push_back(item);
    p.boss.push_back(std::move(bosses));
    p.full.push_back(enc.substr(i, close - i + 1));
    i = close + 1;
    if (i == enc.size()) break;
    if (enc[i] != '(') fail("expected edge mark");
    size_t end = enc.find(')', i);
    if (end == std::string::npos) fail("unterminated edge mark");
    ParsedMark m;
    if (sscanf(enc.c_str() + i, "(%d/%d>%d/%d)", &m.out_slot, &m.out_rank, &m.in_slot,
               &m.in_rank) != 4)
      fail("malformed edge mark");
    p.marks.push_back(m);
    i = end + 1;
  }
  if (p.full.size() != p.marks.size() + 1) fail("length mismatch");
  return p;
}

// --- case enumeration --------------------------------------------------------

struct CaseRec {
  int level;
  std::string key;  // encoding of A-B-C (two sides of a cell around corner B)
  std::string val;  // completion along A-D-C: mark(AD) + Color(D) + mark(DC)
  bool special;     // D is the senior-minimum corner of the cell
  int contact;      // contact class of the cell's template type
  uint16_t tile_type;
  Tid tile;
  uint8_t b_role;
  bool reversed;
};

inline std::vector<CaseRec> enumerate_cases(const ColoringContext& ctx, int threads = 1) {
  const Complex& K = ctx.complex();
  const SubstitutionSpec& sp = *K.spec;
  long ntiles = (long)K.tiles.size();
  const long chunk = 64;  // fixed chunk size: results independent of thread count
  long nchunks = (ntiles + chunk - 1) / chunk;
  std::vector<std::vector<CaseRec>> parts(nchunks);

  auto run_chunk = [&](long ci) {
    auto& out = parts[ci];
    for (Tid t = (Tid)(ci * chunk); t < (Tid)std::min(ntiles, (ci + 1) * chunk); ++t) {
      for (int b = 0; b < 4; ++b)
        for (int dir = 0; dir < 2; ++dir) {
          Vid B = K.tiles[t].c[b];
          Vid A = K.tiles[t].c[(b + (dir ? 1 : 3)) % 4];
          Vid C = K.tiles[t].c[(b + (dir ? 3 : 1)) % 4];
          Vid D = K.tiles[t].c[(b + 2) % 4];
          CaseRec rec;
          rec.level = K.level;
          rec.key = ctx.encode_path({A, B, C});
          rec.val = ctx.edge_mark(A, D) + ctx.color(D) + ctx.edge_mark(D, C);
          rec.special = K.is_special(t, (b + 2) % 4);
          rec.contact = sp.contact.empty() ? -1 : sp.contact[K.tiles[t].type - 1];
          rec.tile_type = K.tiles[t].type;
          rec.tile = t;
          rec.b_role = (uint8_t)b;
          rec.reversed = dir == 1;
          out.push_back(std::move(rec));
        }
    }
  };

  if (threads <= 1) {
    for (long ci = 0; ci < nchunks; ++ci) run_chunk(ci);
  } else {
    std::atomic<long> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w)
      pool.emplace_back([&] {
        for (long ci = next.fetch_add(1); ci < nchunks; ci = next.fetch_add(1)) run_chunk(ci);
      });
    for (auto& th : pool) th.join();
  }
  std::vector<CaseRec> all;
  for (auto& p : parts)
    for (auto& r : p) all.push_back(std::move(r));
  return all;
}

// --- classification ----------------------------------------------------------

struct ClassInfo {
  std::set<std::string> completions;
  std::set<bool> specials;
  long count = 0;
  CaseRec sample;
};

struct DeterminismReport {
  long total_cases = 0;
  long classes = 0;
  long special_classes = 0;   // classes whose cases all have a special D
  long regular_classes = 0;   // all non-special, single completion
  std::vector<std::string> violations;
  std::map<std::string, ClassInfo> groups;

  std::string summary() const {
    std::ostringstream os;
    os << "cases=" << total_cases << " classes=" << classes << " regular=" << regular_classes
       << " special=" << special_classes << " violations=" << violations.size();
    return os.str();
  }
};

inline DeterminismReport classify_cases(const std::vector<CaseRec>& cases) {
  DeterminismReport rep;
  for (auto& c : cases) {
    auto& g = rep.groups[c.key];
    if (g.count == 0) g.sample = c;
    g.count++;
    g.specials.insert(c.special);
    g.completions.insert(c.val);
  }
  rep.total_cases = (long)cases.size();
  rep.classes = (long)rep.groups.size();
  for (auto& [key, g] : rep.groups) {
    if (g.specials.size() > 1) {
      rep.violations.push_back("class with mixed special flag: " + key);
      continue;
    }
    if (*g.specials.begin()) {
      rep.special_classes++;
      continue;
    }
    if (g.completions.size() > 1)
      rep.violations.push_back("class with " + std::to_string(g.completions.size()) +
                               " distinct completions: " + key);
    else
      rep.regular_classes++;
  }
  return rep;
}

// --- structural consequences of the coloring ---------------------------------

struct ConsequenceReport {
  long directed_edges = 0;
  long c1_checked = 0, c1_violations = 0;  // non-main out => main in at the head
  long c2_checked = 0, c2_not_boss = 0;    // non-main out => tail is a boss of the head
  long c2_int_level_equal = 0;             // head at the same integer level as the tail
  long c2_int_level_younger = 0;           // head at a strictly older integer level
  long c2_seniority_violations = 0;        // tail not strictly senior under (level, phase)
  long c3_checked = 0, c3_violations = 0;  // main-main => identical ordered boss lists
  bool ok() const {
    return c1_violations == 0 && c2_not_boss == 0 && c2_seniority_violations == 0 &&
           c3_violations == 0;
  }
};

inline ConsequenceReport check_consequences(const ColoringContext& ctx) {
  const Complex& K = ctx.complex();
  ConsequenceReport rep;
  for (Eid e = 0; e < (Eid)K.edges.size(); ++e) {
    for (int d = 0; d < 2; ++d) {
      Vid u = d ? K.edges[e].head : K.edges[e].tail;
      Vid w = d ? K.edges[e].tail : K.edges[e].head;
      rep.directed_edges++;
      int ru = K.main_rank(u, e), rw = K.main_rank(w, e);
      if (ru == 0) {
        rep.c1_checked++;
        if (rw == 0) rep.c1_violations++;
        rep.c2_checked++;
        const auto& bs = ctx.bosses(w);
        if (std::find(bs.begin(), bs.end(), u) == bs.end()) rep.c2_not_boss++;
        if (K.verts[u].level == K.verts[w].level) rep.c2_int_level_equal++;
        if (K.verts[u].level > K.verts[w].level) rep.c2_int_level_younger++;
        if (!(K.senior_rank(u) < K.senior_rank(w))) rep.c2_seniority_violations++;
      }
      if (d == 0 && ru != 0 && rw != 0) {
        rep.c3_checked++;
        if (ctx.bosses(u) != ctx.bosses(w)) rep.c3_violations++;
      }
    }
  }
  return rep;
}

// --- completion tables --------------------------------------------------------

struct CompletionTables {
  const SubstitutionSpec* spec = nullptr;

  // own color -> per-slot main ranks (and thereby the degree)
  std::map<std::string, std::vector<uint8_t>> ring_layout;
  // (own color of B, slot of edge BA, slot of edge BC) -> (type, rB, rA, rC)
  std::map<std::tuple<std::string, int, int>, std::array<int, 4>> wedge;
  // (own color of v, cell type, role of v, role of adjacent corner o)
  //   -> slot of edge vo at v
  std::map<std::tuple<std::string, int, int, int>, int> edge_slot;

  std::vector<std::string> conflicts;

  template <typename M, typename KeyT, typename ValT>
  void put(M& m, const char* what, const KeyT& k, const ValT& v) {
    auto [it, fresh] = m.emplace(k, v);
    if (!fresh && it->second != v) conflicts.push_back(std::string("conflict in ") + what);
  }

  void absorb(const ColoringContext& ctx) {
    const Complex& K = ctx.complex();
    spec = K.spec;
    for (Vid v = 0; v < (Vid)K.verts.size(); ++v)
      put(ring_layout, "ring_layout", ctx.color(v), K.ring_rank[v]);
    for (Tid t = 0; t < (Tid)K.tiles.size(); ++t) {
      int tt = K.tiles[t].type;
      for (int b = 0; b < 4; ++b) {
        Vid B = K.tiles[t].c[b];
        int rA = (b + 3) % 4, rC = (b + 1) % 4;
        Vid A = K.tiles[t].c[rA], C = K.tiles[t].c[rC];
        int sa = K.ring_slot(B, K.find_edge(B, A));
        int sc = K.ring_slot(B, K.find_edge(B, C));
        put(wedge, "wedge", std::make_tuple(ctx.color(B), sa, sc),
            std::array<int, 4>{tt, b, rA, rC});
        put(wedge, "wedge", std::make_tuple(ctx.color(B), sc, sa),
            std::array<int, 4>{tt, b, rC, rA});
        // Slots at the cell's senior-minimum corner are not single-valued per
        // color (an old vertex can fill that role in several same-type cells)
        // and are never needed: a reconstructed D is always non-special.
        if (b != K.spec->special_role[tt - 1]) {
          put(edge_slot, "edge_slot", std::make_tuple(ctx.color(B), tt, b, rA),
              K.ring_slot(B, K.find_edge(B, A)));
          put(edge_slot, "edge_slot", std::make_tuple(ctx.color(B), tt, b, rC),
              K.ring_slot(B, K.find_edge(B, C)));
        }
      }
    }
  }
};

struct Completion {
  enum Status { kOk, kSpecial, kUnrealizable } status;
  std::string encoded;  // mark(AD) + Color(D) + mark(DC) when kOk
  std::string detail;
};

// Reconstructs the far side of the cell around B -- the color of the fourth
// corner D and the edge entry/exit data along A-D-C -- from the encoding of
// A-B-C alone, consulting only the tables.
inline Completion complete_path(const CompletionTables& T, const std::string& key) {
  auto miss = [&](const std::string& d) { return Completion{Completion::kUnrealizable, "", d}; };
  ParsedPath p;
  try {
    p = parse_path_encoding(key);
  } catch (const std::exception& e) {
    return miss(e.what());
  }
  if (p.full.size() != 3) return miss("not a two-edge path");
  const SubstitutionSpec& sp = *T.spec;

  auto wit = T.wedge.find({p.own[1], p.marks[0].in_slot, p.marks[1].out_slot});
  if (wit == T.wedge.end()) return miss("no cell wedge at the middle vertex");
  auto [tt, rB, rA, rC] = wit->second;
  int rD = 6 - rA - rB - rC;

  if (sp.special_role[tt - 1] == rD)
    return Completion{Completion::kSpecial, "", ""};

  // Own color of D.
  const TRef dref = sp.refs[sp.tiles[tt - 1].c[rD]];
  if (dref.kind == TRef::kCorner) return miss("corner role is not special (inconsistent)");
  std::string cD;
  int roles[3] = {rA, rB, rC};
  int interior_path_idx = -1;  // path position (0,1,2) whose role is cell-interior
  for (int i = 0; i < 3; ++i)
    if (sp.refs[sp.tiles[tt - 1].c[roles[i]]].kind == TRef::kInterior) {
      interior_path_idx = i;
      break;
    }
  if (dref.kind == TRef::kInterior) {
    cD = "I(" + std::to_string(dref.interior) + ");l1;b0";
  } else {
    // D sits on the parent's side: its color is recorded in the boss list of
    // the cell's interior-role corners, all of which share the parent's bosses.
    if (interior_path_idx < 0) return miss("no interior-role vertex on the path");
    int slot = sp.boss_slot(sp.tiles[tt - 1].c[rD]);
    const auto& bl = p.boss[interior_path_idx];
    if (slot < 0 || slot >= (int)bl.size()) return miss("boss slot out of range");
    cD = bl[slot];
  }

  // Ring geometry at A: the cell occupies one wedge, so the edge AD sits in
  // the slot next to AB (clockwise if B is the clockwise-next corner at A).
  auto la = T.ring_layout.find(p.own[0]);
  auto lc = T.ring_layout.find(p.own[2]);
  auto ld = T.ring_layout.find(cD);
  if (la == T.ring_layout.end() || lc == T.ring_layout.end() || ld == T.ring_layout.end())
    return miss("unknown ring layout");
  int degA = (int)la->second.size(), degC = (int)lc->second.size();
  auto step = [&](int slot, int deg, bool plus) { return ((slot + (plus ? 1 : -1)) % deg + deg) % deg; };
  int slotAD = step(p.marks[0].out_slot, degA, rB == (rA + 1) % 4);
  int slotCD = step(p.marks[1].in_slot, degC, rB == (rC + 1) % 4);

  auto es_da = T.edge_slot.find({cD, tt, rD, rA});
  auto es_dc = T.edge_slot.find({cD, tt, rD, rC});
  if (es_da == T.edge_slot.end() || es_dc == T.edge_slot.end())
    return miss("unknown edge slot at D");

  auto mark = [&](int os_, int or_, int is_, int ir_) {
    return "(" + std::to_string(os_) + "/" + std::to_string(or_) + ">" + std::to_string(is_) +
           "/" + std::to_string(ir_) + ")";
  };
  std::string enc =
      mark(slotAD, la->second[slotAD], es_da->second, ld->second[es_da->second]) + cD +
      mark(es_dc->second, ld->second[es_dc->second], slotCD, lc->second[slotCD]);
  return Completion{Completion::kOk, enc, ""};
}

struct CompletionCheck {
  long checked = 0, agreed = 0, special_agreed = 0;
  std::vector<std::string> mismatches;
  bool ok() const { return mismatches.empty(); }
};

inline CompletionCheck check_completion(const CompletionTables& T,
                                        const std::vector<CaseRec>& cases) {
  CompletionCheck out;
  for (auto& c : cases) {
    out.checked++;
    Completion comp = complete_path(T, c.key);
    if (c.special) {
      if (comp.status == Completion::kSpecial) out.special_agreed++;
      else
        out.mismatches.push_back("expected special marker, got " +
                                 (comp.status == Completion::kOk ? comp.encoded : comp.detail));
    } else if (comp.status == Completion::kOk && comp.encoded == c.val) {
      out.agreed++;
    } else {
      out.mismatches.push_back("level " + std::to_string(c.level) + " tile " +
                               std::to_string(c.tile) + ": " +
                               (comp.status == Completion::kOk
                                    ? "wrong completion\n  want " + c.val + "\n  got  " + comp.encoded
                                    : "unrealizable: " + comp.detail + "\n  key " + c.key));
    }
  }
  return out;
}

}  // namespace qtd
