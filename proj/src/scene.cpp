#include "radsim/scene.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "radsim/constants.hpp"

namespace radsim {

double ReflectionPoint::range() const {
    return std::hypot(x_m, y_m);
}

double ReflectionPoint::sin_azimuth() const {
    const double r = range();
    if (r <= 0.0) return 0.0;
    return -x_m / r;
}

std::optional<ReflectionPoint> assign_reflectivity(const SurfaceElement& surface,
                                                   const ReflectivityParams& params,
                                                   RandomSource& rng) {
    const double r = std::hypot(surface.x_m, surface.y_m);
    if (r <= 0.0 || r > params.max_range_m) return std::nullopt;
    if (surface.y_m <= 0.0) return std::nullopt;  // behind the array axis
    const double sin_az = -surface.x_m / r;
    if (std::abs(sin_az) > params.sin_fov_limit) return std::nullopt;

    // cos psi: normal against the unit vector from the surface back to origin.
    const double nx = surface.normal_x;
    const double ny = surface.normal_y;
    const double norm = std::hypot(nx, ny);
    if (norm <= 0.0) throw std::invalid_argument("surface element has zero normal");
    const double cos_psi = (nx * -surface.x_m + ny * -surface.y_m) / (norm * r);
    if (cos_psi <= 0.0) return std::nullopt;

    const double magnitude = std::sqrt(surface.material_reflectivity) *
                             std::pow(cos_psi, params.cosine_exponent) / (r * r);
    const double phase = rng.uniform(0.0, kTwoPi);
    ReflectionPoint point;
    point.x_m = surface.x_m;
    point.y_m = surface.y_m;
    point.radial_velocity_mps = surface.radial_velocity_mps;
    point.reflectivity = std::polar(magnitude, phase);
    return point;
}

Scene generate_procedural_scene(const SceneSpec& spec) {
    Scene scene;
    scene.rng_seed = spec.seed;
    RandomSource rng(substream_seed(spec.seed, kStreamScene));
    for (const ScenePrimitive& prim : spec.primitives) {
        if (prim.kind == ScenePrimitive::Kind::kPoint) {
            SurfaceElement el;
            el.x_m = prim.x1;
            el.y_m = prim.y1;
            // Point stand-ins face the radar head on.
            const double r = std::hypot(prim.x1, prim.y1);
            if (r <= 0.0) continue;
            el.normal_x = -prim.x1 / r;
            el.normal_y = -prim.y1 / r;
            el.material_reflectivity = prim.material_reflectivity;
            el.radial_velocity_mps = prim.radial_velocity_mps;
            if (auto p = assign_reflectivity(el, spec.reflectivity, rng)) {
                scene.points.push_back(*p);
            }
        } else {
            const double dx = prim.x2 - prim.x1;
            const double dy = prim.y2 - prim.y1;
            const double length = std::hypot(dx, dy);
            const auto count =
                std::max<long>(1, std::lround(length * prim.density_per_m));
            const double mx = 0.5 * (prim.x1 + prim.x2);
            const double my = 0.5 * (prim.y1 + prim.y2);
            double nx, ny;
            if (length > 0.0) {
                // Segment normal: the perpendicular that faces the radar
                // (decided at the midpoint).
                nx = -dy / length;
                ny = dx / length;
                if (nx * -mx + ny * -my < 0.0) {
                    nx = -nx;
                    ny = -ny;
                }
            } else {
                // Degenerate segment: a single midpoint sample facing the
                // radar head on, like a point primitive.
                const double r = std::hypot(mx, my);
                if (r <= 0.0) continue;
                nx = -mx / r;
                ny = -my / r;
            }
            for (long i = 0; i < count; ++i) {
                const double t = (static_cast<double>(i) + 0.5) / static_cast<double>(count);
                SurfaceElement el;
                el.x_m = prim.x1 + t * dx;
                el.y_m = prim.y1 + t * dy;
                el.normal_x = nx;
                el.normal_y = ny;
                el.material_reflectivity = prim.material_reflectivity;
                el.radial_velocity_mps = prim.radial_velocity_mps;
                if (auto p = assign_reflectivity(el, spec.reflectivity, rng)) {
                    scene.points.push_back(*p);
                }
            }
        }
    }
    return scene;
}

namespace {

ScenePrimitive segment(double x1, double y1, double x2, double y2, double rho, double v,
                       double density) {
    ScenePrimitive p;
    p.kind = ScenePrimitive::Kind::kSegment;
    p.x1 = x1;
    p.y1 = y1;
    p.x2 = x2;
    p.y2 = y2;
    p.material_reflectivity = rho;
    p.radial_velocity_mps = v;
    p.density_per_m = density;
    return p;
}

ScenePrimitive point(double x, double y, double rho, double v) {
    ScenePrimitive p;
    p.kind = ScenePrimitive::Kind::kPoint;
    p.x1 = x;
    p.y1 = y;
    p.material_reflectivity = rho;
    p.radial_velocity_mps = v;
    return p;
}

}  // namespace

SceneSpec make_random_scene_spec(std::uint64_t seed) {
    SceneSpec spec;
    spec.seed = seed;
    spec.reflectivity.sin_fov_limit = std::sin(60.0 * kPi / 180.0);
    RandomSource rng(substream_seed(seed, 0x7261666663ULL));  // scene layout stream

    const int cars = 2 + static_cast<int>(rng.bits() % 4);  // 2..5
    for (int c = 0; c < cars; ++c) {
        const double r = rng.uniform(10.0, 45.0);
        const double s = rng.uniform(-0.7, 0.7);
        const double cx = -s * r;
        const double cy = std::sqrt(std::max(1.0, r * r - cx * cx));
        const double yaw = rng.uniform(0.0, kPi);
        const double half_w = 0.95, half_l = 2.25;
        const double ca = std::cos(yaw), sa = std::sin(yaw);
        // Rear edge and one side edge of a box footprint.
        const double rho = rng.uniform(0.5, 1.5);
        const double v = rng.uniform(-15.0, 15.0);
        const double rx = cx - ca * half_l, ry = cy - sa * half_l;
        spec.primitives.push_back(segment(rx - sa * half_w, ry + ca * half_w,
                                          rx + sa * half_w, ry - ca * half_w, rho, v, 6.0));
        const double sx = cx - sa * half_w, sy = cy + ca * half_w;
        spec.primitives.push_back(segment(sx - ca * half_l, sy - sa * half_l,
                                          sx + ca * half_l, sy + sa * half_l, rho, v, 6.0));
    }
    const int poles = 1 + static_cast<int>(rng.bits() % 4);  // 1..4
    for (int p = 0; p < poles; ++p) {
        const double r = rng.uniform(8.0, 45.0);
        const double s = rng.uniform(-0.8, 0.8);
        spec.primitives.push_back(point(-s * r, std::sqrt(std::max(1.0, r * r - s * s * r * r)),
                                        rng.uniform(1.0, 3.0), 0.0));
    }
    const int pedestrians = static_cast<int>(rng.bits() % 4);  // 0..3
    for (int p = 0; p < pedestrians; ++p) {
        const double r = rng.uniform(5.0, 30.0);
        const double s = rng.uniform(-0.7, 0.7);
        spec.primitives.push_back(point(-s * r, std::sqrt(std::max(1.0, r * r - s * s * r * r)),
                                        rng.uniform(0.03, 0.08), rng.uniform(-2.0, 2.0)));
    }
    return spec;
}

SceneSpec load_scene_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scene spec: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error(path + ": scene spec parse error: " + e.what());
    }
    SceneSpec spec;
    try {
        spec.seed = j.value("seed", 0ULL);
        if (j.contains("reflectivity")) {
            const auto& rj = j.at("reflectivity");
            ReflectivityParams& params = spec.reflectivity;
            params.cosine_exponent = rj.value("cosine_exponent", params.cosine_exponent);
            params.max_range_m = rj.value("max_range_m", params.max_range_m);
            params.sin_fov_limit = rj.value("sin_fov_limit", params.sin_fov_limit);
        }
        for (const auto& pj : j.at("primitives")) {
            ScenePrimitive prim;
            const std::string kind = pj.at("type").get<std::string>();
            if (kind == "point") {
                prim.kind = ScenePrimitive::Kind::kPoint;
                prim.x1 = pj.at("x").get<double>();
                prim.y1 = pj.at("y").get<double>();
            } else if (kind == "segment") {
                prim.kind = ScenePrimitive::Kind::kSegment;
                prim.x1 = pj.at("x1").get<double>();
                prim.y1 = pj.at("y1").get<double>();
                prim.x2 = pj.at("x2").get<double>();
                prim.y2 = pj.at("y2").get<double>();
                prim.density_per_m = pj.value("density_per_m", 10.0);
            } else {
                throw std::runtime_error("unknown primitive type: " + kind);
            }
            prim.material_reflectivity = pj.value("reflectivity", 1.0);
            prim.radial_velocity_mps = pj.value("velocity_mps", 0.0);
            spec.primitives.push_back(prim);
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(path + ": scene spec field error: " + e.what());
    }
    return spec;
}

}  // namespace radsim
