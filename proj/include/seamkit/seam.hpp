#pragma once

#include <tuple>
#include <vector>

#include "geom.hpp"

namespace seamkit {

// Lexicographic comparison by (y, z, x); y is the vertical axis.
inline bool yzx_less(const Vec3& a, const Vec3& b) {
    return std::tie(a.y, a.z, a.x) < std::tie(b.y, b.z, b.x);
}

inline bool yzx_equal(const Vec3& a, const Vec3& b) {
    return a.x == b.x && a.y == b.y && a.z == b.z;
}

// One seam segment: a 3D line between two endpoints in normalized model
// coordinates. Canonical form keeps head before tail in yzx order.
struct SeamSegment {
    Vec3 head;
    Vec3 tail;

    void canonicalize() {
        if (yzx_less(tail, head)) std::swap(head, tail);
    }

    bool degenerate() const { return yzx_equal(head, tail); }

    bool operator==(const SeamSegment& o) const {
        return yzx_equal(head, o.head) && yzx_equal(tail, o.tail);
    }
};

inline bool segment_less(const SeamSegment& a, const SeamSegment& b) {
    if (!yzx_equal(a.head, b.head)) return yzx_less(a.head, b.head);
    return yzx_less(a.tail, b.tail);
}

struct SeamSequence {
    std::vector<SeamSegment> segments;

    size_t count() const { return segments.size(); }
    bool empty() const { return segments.empty(); }

    bool operator==(const SeamSequence& o) const { return segments == o.segments; }
};

} // namespace seamkit
