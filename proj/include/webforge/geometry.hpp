#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace webforge {

struct GeometryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Viewport {
    int width = 1280;
    int height = 800;

    bool operator==(const Viewport&) const = default;
};

inline void require_valid(const Viewport& vp) {
    if (vp.width <= 0 || vp.height <= 0)
        throw GeometryError("viewport dimensions must be positive");
}

struct PixelPoint {
    int x = 0;
    int y = 0;
    bool operator==(const PixelPoint&) const = default;
};

// Normalized coordinates live on a fixed 0.01 grid over [0, 100]. Storing
// hundredths as integers makes quantization and equality exact.
struct NormPoint {
    int x_centi = 0; // 0..10000
    int y_centi = 0;

    static NormPoint from_centi(int xc, int yc) {
        if (xc < 0 || xc > 10000 || yc < 0 || yc > 10000)
            throw GeometryError("normalized coordinate out of [0,100]");
        return NormPoint{xc, yc};
    }

    double x() const { return x_centi / 100.0; }
    double y() const { return y_centi / 100.0; }

    bool operator==(const NormPoint&) const = default;
};

// Scroll offsets share the grid but span [-100, 100].
struct NormOffset {
    int dx_centi = 0; // -10000..10000
    int dy_centi = 0;

    static NormOffset from_centi(int dxc, int dyc) {
        if (dxc < -10000 || dxc > 10000 || dyc < -10000 || dyc > 10000)
            throw GeometryError("scroll delta out of [-100,100]");
        return NormOffset{dxc, dyc};
    }

    double dx() const { return dx_centi / 100.0; }
    double dy() const { return dy_centi / 100.0; }

    bool operator==(const NormOffset&) const = default;
};

// round_half_up(p / dim * 100, 2 decimals), done in exact integer arithmetic:
// centi = floor((20000*p + dim) / (2*dim)).
inline int centi_from_pixel(int p, int dim) {
    std::int64_t num = 20000ll * p + dim;
    return static_cast<int>(num / (2ll * dim));
}

// p = round_half_up(centi / 10000 * dim)
inline int pixel_from_centi(int centi, int dim) {
    std::int64_t num = static_cast<std::int64_t>(centi) * dim + 5000;
    return static_cast<int>(num / 10000);
}

inline NormPoint normalize(PixelPoint p, const Viewport& vp) {
    require_valid(vp);
    if (p.x < 0 || p.x > vp.width || p.y < 0 || p.y > vp.height)
        throw GeometryError("pixel point outside viewport");
    return NormPoint{centi_from_pixel(p.x, vp.width), centi_from_pixel(p.y, vp.height)};
}

inline PixelPoint denormalize(const NormPoint& n, const Viewport& vp) {
    require_valid(vp);
    return PixelPoint{pixel_from_centi(n.x_centi, vp.width), pixel_from_centi(n.y_centi, vp.height)};
}

struct Rect {
    double x = 0;
    double y = 0;
    double w = 0;
    double h = 0;

    double x1() const { return x + w; }
    double y1() const { return y + h; }
    double cx() const { return x + w / 2.0; }
    double cy() const { return y + h / 2.0; }

    bool contains(double px, double py) const {
        return px >= x && px <= x1() && py >= y && py <= y1();
    }

    bool intersects(const Rect& o) const {
        return x < o.x1() && o.x < x1() && y < o.y1() && o.y < y1();
    }

    // Intersection; empty (w or h <= 0) when disjoint.
    Rect clip(const Rect& o) const {
        double nx0 = std::max(x, o.x);
        double ny0 = std::max(y, o.y);
        double nx1 = std::min(x1(), o.x1());
        double ny1 = std::min(y1(), o.y1());
        return Rect{nx0, ny0, nx1 - nx0, ny1 - ny0};
    }

    bool operator==(const Rect&) const = default;
};

} // namespace webforge
