#pragma once

// Three-level coloring of a complex: vertex types, brackets, boss lists,
// full colors, and canonical encodings of vertex paths.

#include <qtd/complex.hpp>

#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace qtd {

class ColoringContext {
 public:
  explicit ColoringContext(const Complex& K) : K_(K) { recompute(); }

  const Complex& complex() const { return K_; }

  // Saturated age: 1 = created at the top level, 2 = one step older, 3 = older.
  int three_level(Vid v) const {
    int d = K_.level - K_.verts[v].level;
    return d >= 2 ? 3 : d + 1;
  }

  // 0 none, 1 left, 2 right, 3 both (mid). Left/right marks apply only to
  // vertices of the top level; the mid mark also survives one step longer,
  // so that every bracket field saturates to 0 together with the age field.
  int bracket(Vid v) const {
    const VertexRec& r = K_.verts[v];
    if (r.kind != VKind::kSidePos && r.kind != VKind::kBoundarySide) return 0;
    if (r.bracket == 3) return three_level(v) <= 2 ? 3 : 0;
    return three_level(v) == 1 ? r.bracket : 0;
  }

  // Subcomplex whose bosses serve the vertex.
  int owner_sub(Vid v) const {
    const VertexRec& r = K_.verts[v];
    if (r.kind == VKind::kInterior) return r.owner_sub;
    if (r.kind == VKind::kCorner) return K_.root_sub();
    return K_.medges[r.medge].owner_sub;
  }

  const std::vector<Vid>& bosses(Vid v) const { return K_.subs[owner_sub(v)].bosses; }

  // Replace the own color of a vertex (corruption hook for negative tests).
  void override_color(Vid v, std::string c) {
    overrides_[v] = std::move(c);
    recompute();
  }

  // Caches are computed eagerly so lookups are safe under concurrent readers.
  const std::string& color(Vid v) const { return color_cache_[v]; }
  const std::string& full_color(Vid v) const { return full_cache_[v]; }

  // Edge crossing marks: ring slot and main rank at each end.
  std::string edge_mark(Vid u, Vid w) const {
    Eid e = K_.find_edge(u, w);
    if (e < 0) throw std::invalid_argument("edge_mark: vertices not adjacent");
    int os = K_.ring_slot(u, e), is = K_.ring_slot(w, e);
    return "(" + std::to_string(os) + "/" + std::to_string((int)K_.ring_rank[u][os]) + ">" +
           std::to_string(is) + "/" + std::to_string((int)K_.ring_rank[w][is]) + ")";
  }

  std::string encode_path(const std::vector<Vid>& path) const {
    if (path.empty()) return "";
    std::string out = full_color(path[0]);
    for (size_t i = 1; i < path.size(); ++i)
      out += edge_mark(path[i - 1], path[i]) + full_color(path[i]);
    return out;
  }

  std::set<std::string> census() const {
    std::set<std::string> out;
    for (Vid v = 0; v < (Vid)K_.verts.size(); ++v) out.insert(full_color(v));
    return out;
  }

  std::set<std::string> own_color_census() const {
    std::set<std::string> out;
    for (Vid v = 0; v < (Vid)K_.verts.size(); ++v) out.insert(color(v));
    return out;
  }

 private:
  void recompute() {
    color_cache_.resize(K_.verts.size());
    full_cache_.resize(K_.verts.size());
    for (Vid v = 0; v < (Vid)K_.verts.size(); ++v) {
      auto it = overrides_.find(v);
      color_cache_[v] = it != overrides_.end() ? it->second : make_color(v);
    }
    for (Vid v = 0; v < (Vid)K_.verts.size(); ++v) {
      std::string f = color_cache_[v] + "{";
      const auto& bs = bosses(v);
      for (size_t i = 0; i < bs.size(); ++i) f += (i ? "|" : "") + color_cache_[bs[i]];
      full_cache_[v] = f + "}";
    }
  }

  std::string make_color(Vid v) const {
    const VertexRec& r = K_.verts[v];
    std::string t;
    switch (r.kind) {
      case VKind::kCorner:
        t = std::string("C(") + corner_name(r.corner) + ")";
        break;
      case VKind::kBoundarySide:
        t = std::string("B(") + side_name(r.role_right) + "," + std::to_string(r.idx) + ")";
        break;
      case VKind::kSidePos:
        t = "S(" + std::to_string((int)r.role_right) + "," + std::to_string(r.idx) + "," +
            std::to_string((int)r.role_left) + "," +
            std::to_string(K_.spec->s + 1 - (int)r.idx) + "," + std::to_string(r.metype) + ")";
        break;
      default:
        t = "I(" + std::to_string(r.interior_j) + ")";
    }
    return t + ";l" + std::to_string(three_level(v)) + ";b" + std::to_string(bracket(v));
  }

  const Complex& K_;
  std::unordered_map<Vid, std::string> overrides_;
  std::vector<std::string> color_cache_;
  std::vector<std::string> full_cache_;
};

}  // namespace qtd
