#pragma once

#include <json.hpp>

#include <cstdio>
#include <string>

#include "planeflow/flow.hpp"
#include "planeflow/jets.hpp"
#include "planeflow/shift.hpp"
#include "planeflow/star.hpp"

namespace planeflow {

// ordered_json keeps insertion order, so reports serialize with a stable key
// order and fixed configs produce byte-identical output
using json = nlohmann::ordered_json;

inline json to_json(const StarReport& rep) {
    json j;
    j["holds"] = rep.holds;
    j["via_squarefree"] = rep.via_squarefree;
    j["via_coprime_partials"] = rep.via_coprime_partials;
    j["detail"] = rep.detail;
    return j;
}

inline json to_json(const FactorDecomp& dec) {
    json j;
    j["y_mult"] = dec.y_mult;
    json roots = json::array();
    for (const auto& r : dec.roots) {
        json e;
        e["angle"] = r.angle;
        e["mult"] = r.multiplicity;
        roots.push_back(e);
    }
    j["roots"] = roots;
    j["tau_definite"] = dec.tau_definite;
    j["scale"] = dec.scale;
    j["window_center"] = dec.window_center;
    j["degree"] = dec.degree;
    return j;
}

inline json to_json(const JetReport& rep) {
    json j;
    j["orders"] = rep.orders;
    j["strips"] = rep.strips;
    j["sups"] = rep.sups;
    j["order_verdicts"] = rep.order_verdicts;
    j["flat"] = rep.flat;
    return j;
}

inline json to_json(const ShiftSample& s) {
    json j;
    json pts = json::array(), al = json::array(), rs = json::array();
    for (size_t i = 0; i < s.points.size(); ++i) {
        pts.push_back({s.points[i].x, s.points[i].y});
        al.push_back(s.alpha[i]);
        rs.push_back(s.residual[i]);
    }
    j["points"] = pts;
    j["alpha"] = al;
    j["residual"] = rs;
    j["max_residual"] = s.max_residual;
    json fl = json::array();
    for (const auto& f : s.failures) {
        json e;
        e["point"] = {f.point.x, f.point.y};
        e["reason"] = f.reason;
        e["map_undefined"] = f.map_undefined;
        fl.push_back(e);
    }
    j["failures"] = fl;
    if (s.flatness) j["flatness"] = to_json(*s.flatness);
    if (s.separatrix_checks > 0) {
        j["separatrix_checks"] = s.separatrix_checks;
        j["separatrix_max_dev"] = s.separatrix_max_dev;
    }
    j["verified"] = s.verified;
    return j;
}

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline std::string trajectory_csv(const Trajectory& traj) {
    std::string out = "t,x,y\n";
    for (size_t i = 0; i < traj.t.size(); ++i) {
        out += format_double(traj.t[i]);
        out += ',';
        out += format_double(traj.z[i].x);
        out += ',';
        out += format_double(traj.z[i].y);
        out += '\n';
    }
    return out;
}

inline std::string trajectory_jsonl(const Trajectory& traj) {
    std::string out;
    for (size_t i = 0; i < traj.t.size(); ++i) {
        json j;
        j["t"] = traj.t[i];
        j["x"] = traj.z[i].x;
        j["y"] = traj.z[i].y;
        out += j.dump();
        out += '\n';
    }
    return out;
}

inline std::string shift_sample_csv(const ShiftSample& s) {
    std::string out = "x,y,alpha,residual\n";
    for (size_t i = 0; i < s.points.size(); ++i) {
        out += format_double(s.points[i].x) + "," + format_double(s.points[i].y) + "," +
               format_double(s.alpha[i]) + "," + format_double(s.residual[i]) + "\n";
    }
    return out;
}

}  // namespace planeflow
