#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "planeflow/field.hpp"
#include "planeflow/flow.hpp"
#include "planeflow/serialize.hpp"
#include "planeflow/vec.hpp"

namespace planeflow {

struct PortraitSpec {
    std::vector<double> levels;
    std::vector<Vec2> orbit_seeds;
    double orbit_span = 3.0;     // integration time per seed, both directions
    int width = 480;             // image size in px (square)
    int grid_n = 256;            // marching-squares grid resolution
    std::string level_stroke = "#1f77b4";
    std::string orbit_stroke = "#d62728";
};

namespace contour {

/// Marching squares: extract segments of the zero set of f on an n x n grid
/// over [-radius, radius]^2, then join them into polylines.
inline std::vector<std::vector<Vec2>> zero_set(const std::function<double(double, double)>& f,
                                               double radius, int n) {
    std::vector<double> vals(static_cast<size_t>(n) * n);
    auto coord = [&](int i) { return -radius + 2.0 * radius * i / (n - 1); };
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) vals[j * n + i] = f(coord(i), coord(j));

    auto interp = [&](Vec2 a, Vec2 b, double fa, double fb) -> Vec2 {
        double t = (fa == fb) ? 0.5 : fa / (fa - fb);
        return {a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
    };

    std::vector<std::pair<Vec2, Vec2>> segs;
    for (int j = 0; j + 1 < n; ++j) {
        for (int i = 0; i + 1 < n; ++i) {
            Vec2 p00{coord(i), coord(j)}, p10{coord(i + 1), coord(j)};
            Vec2 p01{coord(i), coord(j + 1)}, p11{coord(i + 1), coord(j + 1)};
            double f00 = vals[j * n + i], f10 = vals[j * n + i + 1];
            double f01 = vals[(j + 1) * n + i], f11 = vals[(j + 1) * n + i + 1];
            int mask = (f00 > 0) | ((f10 > 0) << 1) | ((f11 > 0) << 2) | ((f01 > 0) << 3);
            if (mask == 0 || mask == 15) continue;
            Vec2 bottom = interp(p00, p10, f00, f10);
            Vec2 right = interp(p10, p11, f10, f11);
            Vec2 top = interp(p01, p11, f01, f11);
            Vec2 left = interp(p00, p01, f00, f01);
            auto emit = [&](Vec2 a, Vec2 b) { segs.emplace_back(a, b); };
            switch (mask) {
                case 1: case 14: emit(left, bottom); break;
                case 2: case 13: emit(bottom, right); break;
                case 3: case 12: emit(left, right); break;
                case 4: case 11: emit(right, top); break;
                case 6: case 9: emit(bottom, top); break;
                case 7: case 8: emit(left, top); break;
                case 5:  // saddle: resolve by the cell average
                case 10: {
                    double center = 0.25 * (f00 + f10 + f01 + f11);
                    bool flip = (mask == 5) == (center > 0);
                    if (flip) {
                        emit(left, top);
                        emit(bottom, right);
                    } else {
                        emit(left, bottom);
                        emit(right, top);
                    }
                    break;
                }
                default: break;
            }
        }
    }

    // join segments into polylines by snapping endpoints to a fine lattice
    double snap = radius * 1e-9;
    auto key = [&](Vec2 p) {
        return std::pair<long long, long long>(std::llround(p.x / snap), std::llround(p.y / snap));
    };
    std::map<std::pair<long long, long long>, std::vector<size_t>> at;
    for (size_t s = 0; s < segs.size(); ++s) {
        at[key(segs[s].first)].push_back(s);
        at[key(segs[s].second)].push_back(s);
    }
    std::vector<bool> used(segs.size(), false);
    std::vector<std::vector<Vec2>> lines;
    for (size_t s = 0; s < segs.size(); ++s) {
        if (used[s]) continue;
        used[s] = true;
        std::vector<Vec2> line{segs[s].first, segs[s].second};
        for (int dir = 0; dir < 2; ++dir) {
            for (;;) {
                Vec2 end = line.back();
                size_t next = segs.size();
                for (size_t cand : at[key(end)])
                    if (!used[cand]) next = cand;
                if (next == segs.size()) break;
                used[next] = true;
                Vec2 a = segs[next].first, b = segs[next].second;
                line.push_back(key(a) == key(end) ? b : a);
            }
            std::reverse(line.begin(), line.end());
        }
        lines.push_back(std::move(line));
    }
    return lines;
}

}  // namespace contour

/// Render level curves of g (marching squares) and optional orbit polylines
/// into a deterministic SVG 1.1 document.
inline std::string render_portrait(const PlaneField& field, const PortraitSpec& spec) {
    if (spec.levels.empty() && spec.orbit_seeds.empty())
        throw std::invalid_argument("portrait: need at least one level or orbit seed");
    double R = field.working_radius();
    int W = spec.width;
    auto px = [&](Vec2 p) -> std::pair<double, double> {
        return {(p.x + R) / (2 * R) * W, (R - p.y) / (2 * R) * W};
    };
    auto path_of = [&](const std::vector<Vec2>& line) {
        std::string d;
        for (size_t i = 0; i < line.size(); ++i) {
            auto [ux, uy] = px(line[i]);
            char buf[64];
            std::snprintf(buf, sizeof buf, "%s%.3f %.3f", i == 0 ? "M" : "L", ux, uy);
            d += buf;
        }
        return d;
    };

    std::string svg;
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
           std::to_string(W) + "\" height=\"" + std::to_string(W) + "\" viewBox=\"0 0 " +
           std::to_string(W) + " " + std::to_string(W) + "\">\n";
    svg += "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "  <g stroke=\"#999999\" stroke-width=\"1\">\n";
    {
        auto [ox, oy] = px({0, 0});
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "    <line x1=\"0\" y1=\"%.3f\" x2=\"%d\" y2=\"%.3f\"/>\n", oy, W, oy);
        svg += buf;
        std::snprintf(buf, sizeof buf,
                      "    <line x1=\"%.3f\" y1=\"0\" x2=\"%.3f\" y2=\"%d\"/>\n", ox, ox, W);
        svg += buf;
    }
    svg += "  </g>\n";

    svg += "  <g fill=\"none\" stroke=\"" + spec.level_stroke + "\" stroke-width=\"1.5\">\n";
    for (double level : spec.levels) {
        auto lines = contour::zero_set(
            [&](double x, double y) { return field.g_value({x, y}) - level; }, R, spec.grid_n);
        for (const auto& line : lines)
            svg += "    <path d=\"" + path_of(line) + "\"/>\n";
    }
    svg += "  </g>\n";

    if (!spec.orbit_seeds.empty()) {
        svg += "  <g fill=\"none\" stroke=\"" + spec.orbit_stroke + "\" stroke-width=\"1.2\">\n";
        for (Vec2 seed : spec.orbit_seeds) {
            for (double dir : {1.0, -1.0}) {
                Trajectory tr;
                try {
                    tr = orbit_trace(field, seed, {0.0, dir * spec.orbit_span}, 200,
                                     FlowOptions{.tol = 1e-9});
                } catch (const flow_error&) {
                    continue;  // orbit left the working domain: skip this leg
                }
                svg += "    <path d=\"" + path_of(tr.z) + "\"/>\n";
            }
        }
        svg += "  </g>\n";
    }
    svg += "</svg>\n";
    return svg;
}

}  // namespace planeflow
