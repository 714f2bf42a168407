#pragma once

// Exact rational plane geometry: points in the unit square (screen
// convention, y grows downward) and an exact clockwise angle order
// starting from north, used to sort edge rings around a vertex.

#include <gmpxx.h>

#include <cassert>
#include <stdexcept>
#include <string>

namespace qtd {

using Rat = mpq_class;

struct Vec2 {
  Rat x, y;

  friend Vec2 operator+(const Vec2& a, const Vec2& b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(const Vec2& a, const Vec2& b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(const Rat& s, const Vec2& a) { return {s * a.x, s * a.y}; }
  friend bool operator==(const Vec2& a, const Vec2& b) { return a.x == b.x && a.y == b.y; }
  friend bool operator!=(const Vec2& a, const Vec2& b) { return !(a == b); }
};

inline Rat cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }

// Linear interpolation a + t*(b-a).
inline Vec2 lerp(const Vec2& a, const Vec2& b, const Rat& t) { return a + t * (b - a); }

// Bilinear map of the unit square onto the quad (c0,c1,c2,c3) listed
// clockwise from top-left: (0,0)->c0, (1,0)->c1, (1,1)->c2, (0,1)->c3.
inline Vec2 bilinear(const Vec2& c0, const Vec2& c1, const Vec2& c2, const Vec2& c3,
                     const Rat& u, const Rat& v) {
  Vec2 top = lerp(c0, c1, u);
  Vec2 bot = lerp(c3, c2, u);
  return lerp(top, bot, v);
}

// Quadrant sector of a nonzero direction, counted clockwise from north
// in screen coordinates (north = (0,-1), east = (1,0)).
//   0: north..east (exclusive of east), 1: east..south, 2: south..west, 3: west..north.
inline int cw_sector(const Vec2& d) {
  int sx = sgn(d.x), sy = sgn(d.y);
  if (sx == 0 && sy == 0) throw std::invalid_argument("zero direction");
  if (sy < 0) return sx >= 0 ? 0 : 3;   // up-ish: north itself starts sector 0
  if (sy > 0) return sx > 0 ? 1 : 2;    // down-ish: south itself starts sector 2
  return sx > 0 ? 1 : 3;                // exactly east / west
}

// Strict clockwise-from-north order on directions. Equal directions
// (parallel, same orientation) compare false both ways.
inline bool cw_less(const Vec2& a, const Vec2& b) {
  int sa = cw_sector(a), sb = cw_sector(b);
  if (sa != sb) return sa < sb;
  // Same sector: a precedes b iff rotating a clockwise reaches b, i.e.
  // cross(a,b) > 0 in screen coordinates (y down flips the usual sign).
  return cross(a, b) > 0;
}

inline std::string rat_str(const Rat& r) { return r.get_str(); }

// Parses "p/q", "p", or a plain decimal like "0.25" / "-1.5".
inline Rat parse_rat(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("empty rational literal");
  auto dot = s.find('.');
  if (dot == std::string::npos) {
    Rat r;
    if (r.set_str(s, 10) != 0) throw std::invalid_argument("bad rational literal: " + s);
    r.canonicalize();
    return r;
  }
  std::string digits = s.substr(0, dot) + s.substr(dot + 1);
  size_t frac_len = s.size() - dot - 1;
  if (frac_len == 0 || digits.empty()) throw std::invalid_argument("bad decimal literal: " + s);
  Rat num;
  if (num.set_str(digits, 10) != 0) throw std::invalid_argument("bad decimal literal: " + s);
  Rat den(1);
  for (size_t i = 0; i < frac_len; ++i) den *= 10;
  Rat r = num / den;
  r.canonicalize();
  return r;
}

}  // namespace qtd
