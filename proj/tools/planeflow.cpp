// planeflow: check property (*) of a homogeneous polynomial, lift its
// Hamiltonian field to polar coordinates, integrate orbits, recover shift
// functions of orbit-preserving maps, and draw phase portraits.

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>

#include "planeflow/parse.hpp"
#include "planeflow/polar.hpp"
#include "planeflow/portrait.hpp"
#include "planeflow/serialize.hpp"
#include "planeflow/shift.hpp"
#include "planeflow/star.hpp"

using namespace planeflow;

namespace {

constexpr double kPi = std::numbers::pi;

struct CommonOpts {
    std::string poly;
    std::string eta = "1";
    double radius = 2.0;
    double tol = 1e-7;
    bool json = false;
    std::string out;
};

void add_common(CLI::App* cmd, CommonOpts& c) {
    cmd->add_option("--poly", c.poly, "homogeneous polynomial in x, y")->required();
    cmd->add_option("--eta", c.eta, "multiplier eta(x, y), nonvanishing on the disk");
    cmd->add_option("--radius", c.radius, "working disk radius");
    cmd->add_option("--tol", c.tol, "tolerance for recovery residuals");
    cmd->add_flag("--json", c.json, "machine output only (JSON is the default format)");
    cmd->add_option("--out", c.out, "output file (default: stdout)");
}

void write_output(const CommonOpts& c, const std::string& text) {
    if (c.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(c.out, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file: " + c.out);
    f << text;
}

SmoothFn parse_eta(const std::string& text) {
    if (text == "1" || text.empty()) return SmoothFn::constant(1.0);
    return parse_fn(text, VarPair::XY);
}

PlaneField make_field(const CommonOpts& c) {
    HomoPoly g = parse_poly(c.poly);
    SmoothFn eta = parse_eta(c.eta);
    if (eta.is_const_one()) return PlaneField(g, eta, c.radius);
    return with_multiplier(PlaneField(g, SmoothFn::constant(1.0), c.radius), eta, c.radius);
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(std::stod(item));
    }
    return out;
}

std::vector<Vec2> parse_points(const std::string& text) {
    std::vector<Vec2> out;
    std::stringstream ss(text);
    std::string pair;
    while (std::getline(ss, pair, ';')) {
        auto comma = pair.find(',');
        if (comma == std::string::npos) throw std::runtime_error("bad point: " + pair);
        out.push_back({std::stod(pair.substr(0, comma)), std::stod(pair.substr(comma + 1))});
    }
    return out;
}

int cmd_check(const CommonOpts& c, double window_center) {
    HomoPoly g = parse_poly(c.poly);
    StarReport rep = is_star(g);
    FactorDecomp dec = factor_decomposition(g, window_center);
    json j = to_json(rep);
    json d = to_json(dec);
    for (auto& [k, v] : d.items()) j[k] = v;
    write_output(c, j.dump(2) + "\n");
    return rep.holds ? 0 : 2;
}

int cmd_lift(const CommonOpts& c, bool force) {
    HomoPoly g = parse_poly(c.poly);
    StarReport rep = is_star(g);
    if (!rep.holds && !force) {
        std::cerr << "planeflow lift: " << c.poly
                  << " does not have property (*); use --force to proceed\n";
        return 2;
    }
    SmoothFn eta = parse_eta(c.eta);
    PlaneField field(g, eta, c.radius);
    HalfPlaneField F = lift_field(field);
    FactorDecomp dec = factor_decomposition(g, 0.0);

    json j;
    j["poly"] = c.poly;
    j["eta"] = c.eta;
    j["star"] = to_json(rep);
    json roots = json::array();
    for (const auto& r : dec.roots) {
        json e;
        e["angle"] = r.angle;
        e["a_exponent"] = r.multiplicity;
        if (eta.is_const_one() && r.multiplicity == 1) {
            GammaSamplers gs = extract_gammas(g, r.angle, r.multiplicity);
            e["gamma1"] = gs.gamma1_at_root();
            e["gamma2"] = gs.gamma2_at_root();
        }
        roots.push_back(e);
    }
    j["angular_roots"] = roots;

    double worst = 0.0;
    json samples = json::array();
    for (int i = 0; i < 12; ++i) {
        for (int jr = 0; jr < 5; ++jr) {
            double phi = 2 * kPi * i / 12;
            double rho = 0.2 + (c.radius - 0.2) * jr / 4.0;
            Vec2 v = F(HalfPlanePoint{phi, rho});
            double dev = std::abs(v.x - f1_formula(g, eta, {phi, rho}));
            worst = std::max(worst, dev);
            json e;
            e["phi"] = phi;
            e["rho"] = rho;
            e["F1"] = v.x;
            e["F2"] = v.y;
            samples.push_back(e);
        }
    }
    j["samples"] = samples;
    j["f1_max_deviation"] = worst;
    write_output(c, j.dump(2) + "\n");
    return 0;
}

int cmd_flow(const CommonOpts& c, double x, double y, double t, int n, double flow_tol,
             double t_max) {
    PlaneField field = make_field(c);
    FlowOptions opt{.tol = flow_tol, .t_max = t_max};
    Trajectory traj;
    Vec2 z{x, y};
    Vec2 v = field(z);
    if (t == 0.0 || (v.x == 0.0 && v.y == 0.0)) {
        traj.t.push_back(0.0);
        traj.z.push_back(z);
        traj.tol_used = flow_tol;
    } else {
        traj = orbit_trace(field, z, {0.0, t}, n, opt);
    }
    write_output(c, c.json ? trajectory_jsonl(traj) : trajectory_csv(traj));
    return 0;
}

int cmd_recover(const CommonOpts& c, const std::string& map_spec, double grid_inner,
                double grid_outer, int grid_n, bool with_flatness, bool csv) {
    PlaneField field = make_field(c);

    PlanarMap h;
    std::vector<Vec2> grid;
    if (map_spec.rfind("shift:", 0) == 0) {
        // alpha(O) only ever feeds h(O) = O, so a default origin value is safe
        SmoothFn alpha = parse_fn(map_spec.substr(6), VarPair::XY, 0.0);
        h = make_shift_map(field, alpha, FlowOptions{.tol = 1e-11});
    } else if (map_spec.rfind("rotate:", 0) == 0) {
        double th = std::stod(map_spec.substr(7));
        h = [th](Vec2 z) -> Vec2 {
            return {std::cos(th) * z.x - std::sin(th) * z.y,
                    std::sin(th) * z.x + std::cos(th) * z.y};
        };
    } else if (map_spec.rfind("table:", 0) == 0) {
        std::ifstream f(map_spec.substr(6));
        if (!f) throw std::runtime_error("cannot open point table: " + map_spec.substr(6));
        std::vector<std::pair<Vec2, Vec2>> rows;
        std::string line;
        while (std::getline(f, line)) {
            if (line.empty() || line[0] == '#' || line.rfind("x,", 0) == 0) continue;
            std::stringstream ss(line);
            std::string cell;
            double vals[4];
            int k = 0;
            while (std::getline(ss, cell, ',') && k < 4) vals[k++] = std::stod(cell);
            if (k != 4) throw std::runtime_error("point table rows need x,y,hx,hy");
            rows.push_back({{vals[0], vals[1]}, {vals[2], vals[3]}});
        }
        for (auto& [z, hz] : rows) grid.push_back(z);
        h = [rows](Vec2 z) -> Vec2 {
            for (auto& [p, hp] : rows)
                if (p == z) return hp;
            throw std::runtime_error("point not in table");
        };
    } else {
        throw std::runtime_error("map spec must be shift:<expr>, rotate:<angle> or table:<file>");
    }

    if (grid.empty()) {
        int rings = std::max(2, static_cast<int>(std::floor(std::sqrt(grid_n / 6.0))));
        int angles = (grid_n + rings - 1) / rings;
        grid = annulus_grid({grid_inner, grid_outer, rings, angles});
    }

    RecoverOptions ropt;
    ropt.with_flatness = with_flatness;
    ShiftSample s = recover_shift(field, h, grid, c.tol, ropt);
    if (csv) {
        write_output(c, shift_sample_csv(s));
    } else {
        json j = to_json(s);
        j["map"] = map_spec;
        j["tol"] = c.tol;
        write_output(c, j.dump(2) + "\n");
    }
    return s.verified ? 0 : 3;
}

int cmd_portrait(const CommonOpts& c, const std::string& levels, const std::string& seeds,
                 int size, int grid) {
    PlaneField field = make_field(c);
    PortraitSpec spec;
    spec.levels = parse_list(levels);
    if (!seeds.empty()) spec.orbit_seeds = parse_points(seeds);
    spec.width = size;
    spec.grid_n = grid;
    if (spec.levels.empty() && spec.orbit_seeds.empty())
        throw std::runtime_error("portrait: need --levels or --seeds");
    write_output(c, render_portrait(field, spec));
    return 0;
}

// Expand "--config FILE" into flags: the file holds key = value lines (keys
// are the long option names without dashes); explicit flags win. Section
// headers and # comments are ignored.
std::vector<std::string> apply_config(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string config_path;
    for (size_t i = 0; i + 1 < args.size(); ++i) {
        if (args[i] == "--config") {
            config_path = args[i + 1];
            args.erase(args.begin() + i, args.begin() + i + 2);
            break;
        }
    }
    if (config_path.empty()) return args;
    std::ifstream f(config_path);
    if (!f) throw std::runtime_error("cannot open config file: " + config_path);
    std::string line;
    while (std::getline(f, line)) {
        auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos) continue;
        if (line[first] == '#' || line[first] == '[') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line is not key = value: " + line);
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t");
            auto e = s.find_last_not_of(" \t\r");
            if (b == std::string::npos) return std::string();
            s = s.substr(b, e - b + 1);
            if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front())
                s = s.substr(1, s.size() - 2);
            return s;
        };
        std::string key = "--" + trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        bool already = false;
        for (const auto& a : args) already = already || a == key;
        if (already) continue;  // flags win
        args.push_back(key);
        if (value != "true") args.push_back(value);
    }
    return args;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"planar Hamiltonian fields of homogeneous polynomials: property (*) checks, "
                 "polar lifts, flows, and orbit shift functions"};
    app.require_subcommand(1);

    CommonOpts c_check, c_lift, c_flow, c_recover, c_portrait;

    auto* check = app.add_subcommand("check", "decide property (*) and factor the circle zeros");
    double window_center = 0.0;
    add_common(check, c_check);
    check->add_option("--window-center", window_center, "center of the angular root window");

    auto* lift = app.add_subcommand("lift", "lift the field to the polar half-plane");
    bool force = false;
    add_common(lift, c_lift);
    lift->add_flag("--force", force, "proceed even without property (*)");

    auto* flowc = app.add_subcommand("flow", "integrate one orbit and emit t,x,y rows");
    double fx = 1.0, fy = 0.0, ft = 1.0, flow_tol = 1e-10, t_max = 50.0;
    int fn = 100;
    add_common(flowc, c_flow);
    flowc->add_option("--x", fx, "start x")->required();
    flowc->add_option("--y", fy, "start y")->required();
    flowc->add_option("--t", ft, "integration time (signed)")->required();
    flowc->add_option("--n", fn, "number of output rows");
    flowc->add_option("--flow-tol", flow_tol, "integrator local error tolerance");
    flowc->add_option("--t-max", t_max, "hard cap on |t|");

    auto* recover = app.add_subcommand("recover", "recover the shift function of a map");
    std::string map_spec;
    double grid_inner = 0.3, grid_outer = 1.0;
    int grid_n = 200;
    bool with_flatness = false, recover_csv = false;
    add_common(recover, c_recover);
    recover->add_option("--map", map_spec, "shift:<expr> | rotate:<angle> | table:<csv>")
        ->required();
    recover->add_option("--grid-inner", grid_inner, "annulus inner radius");
    recover->add_option("--grid-outer", grid_outer, "annulus outer radius");
    recover->add_option("--grid-n", grid_n, "total grid point target");
    recover->add_flag("--flatness", with_flatness, "attach a flatness report of the sample");
    recover->add_flag("--csv", recover_csv, "emit x,y,alpha,residual rows instead of JSON");

    auto* portrait = app.add_subcommand("portrait", "render level curves and orbits as SVG");
    std::string levels, seeds;
    int size = 480, pgrid = 256;
    add_common(portrait, c_portrait);
    portrait->add_option("--levels", levels, "comma-separated level values");
    portrait->add_option("--seeds", seeds, "semicolon-separated orbit seeds x,y;x,y");
    portrait->add_option("--size", size, "image size in pixels");
    portrait->add_option("--grid", pgrid, "marching-squares grid resolution");

    app.footer("Any subcommand accepts --config FILE with key = value lines naming the long\n"
               "options (poly = \"x*y\", grid-n = 100, ...); explicit flags win.");

    try {
        std::vector<std::string> args = apply_config(argc, argv);
        std::reverse(args.begin(), args.end());  // CLI11 consumes from the back
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "planeflow: " << e.what() << "\n";
        return 1;
    }

    try {
        if (check->parsed()) return cmd_check(c_check, window_center);
        if (lift->parsed()) return cmd_lift(c_lift, force);
        if (flowc->parsed()) return cmd_flow(c_flow, fx, fy, ft, fn, flow_tol, t_max);
        if (recover->parsed())
            return cmd_recover(c_recover, map_spec, grid_inner, grid_outer, grid_n, with_flatness,
                               recover_csv);
        if (portrait->parsed()) return cmd_portrait(c_portrait, levels, seeds, size, pgrid);
    } catch (const parse_error& e) {
        std::cerr << "planeflow: parse error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "planeflow: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
