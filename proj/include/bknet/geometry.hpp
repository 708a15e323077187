#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace bknet {

/// Raised when an argument violates an operation's precondition.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }
inline double distance(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

/// Axis-aligned rectangle [x0,x1]x[y0,y1]. Valid when x0 < x1 and y0 < y1.
struct Rect {
    double x0 = 0.0;
    double y0 = 0.0;
    double x1 = 0.0;
    double y1 = 0.0;

    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    double area() const { return width() * height(); }
    bool valid() const {
        return std::isfinite(x0) && std::isfinite(y0) && std::isfinite(x1) &&
               std::isfinite(y1) && x0 < x1 && y0 < y1;
    }
    bool contains(Vec2 p) const { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; }
    bool contains(const Rect& r) const {
        return r.x0 >= x0 && r.x1 <= x1 && r.y0 >= y0 && r.y1 <= y1;
    }
    /// True when the interiors overlap.
    bool overlaps(const Rect& r) const {
        return r.x0 < x1 && x0 < r.x1 && r.y0 < y1 && y0 < r.y1;
    }
    friend bool operator==(const Rect&, const Rect&) = default;
};

/// Throws unless `r` is a valid rectangle; `what` names the argument.
inline const Rect& require_valid(const Rect& r, const char* what) {
    if (!r.valid()) throw ValidationError(std::string(what) + ": degenerate or non-finite rectangle");
    return r;
}

/// Area of the intersection, 0 when disjoint.
inline double intersection_area(const Rect& a, const Rect& b) {
    const double w = std::fmin(a.x1, b.x1) - std::fmax(a.x0, b.x0);
    const double h = std::fmin(a.y1, b.y1) - std::fmax(a.y0, b.y0);
    return (w > 0.0 && h > 0.0) ? w * h : 0.0;
}

/// Half-open membership [x0,x1)x[y0,y1), closed on the sides shared with `domain`.
inline bool contains_half_open(const Rect& r, Vec2 p, const Rect& domain) {
    const bool in_x = p.x >= r.x0 && (p.x < r.x1 || (p.x == r.x1 && r.x1 == domain.x1));
    const bool in_y = p.y >= r.y0 && (p.y < r.y1 || (p.y == r.y1 && r.y1 == domain.y1));
    return in_x && in_y;
}

struct Segment {
    Vec2 a;
    Vec2 b;

    double length() const { return distance(a, b); }
    bool horizontal() const { return a.y == b.y && a.x != b.x; }
    friend bool operator==(const Segment&, const Segment&) = default;
};

/// Uniform scaling followed by translation: p -> scale * p + shift.
struct Similarity {
    double scale = 1.0;
    Vec2 shift{};

    Vec2 apply(Vec2 p) const { return scale * p + shift; }
    Rect apply(const Rect& r) const {
        return {scale * r.x0 + shift.x, scale * r.y0 + shift.y, scale * r.x1 + shift.x,
                scale * r.y1 + shift.y};
    }
    Segment apply(const Segment& s) const { return {apply(s.a), apply(s.b)}; }
    Similarity inverse() const { return {1.0 / scale, (-1.0 / scale) * shift}; }

    /// The similarity taking `from` onto `to`; both must be squares or share an aspect ratio.
    static Similarity between(const Rect& from, const Rect& to) {
        const double s = to.width() / from.width();
        return {s, {to.x0 - s * from.x0, to.y0 - s * from.y0}};
    }
};

}  // namespace bknet
