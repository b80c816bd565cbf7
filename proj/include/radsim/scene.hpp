#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "radsim/random.hpp"

namespace radsim {

// Bird's-eye-view point scatterer. The radar sits at the origin, boresight +y;
// radial velocity is dr/dt (positive = receding).
struct ReflectionPoint {
    double x_m = 0.0;
    double y_m = 0.0;
    double radial_velocity_mps = 0.0;
    std::complex<double> reflectivity;

    double range() const;
    double sin_azimuth() const;  // -x/r, positive counterclockwise from +y
};

struct SurfaceElement {
    double x_m = 0.0;
    double y_m = 0.0;
    double normal_x = 0.0;
    double normal_y = 0.0;
    double material_reflectivity = 1.0;  // rho_mat >= 0
    double radial_velocity_mps = 0.0;
};

struct Scene {
    std::vector<ReflectionPoint> points;
    std::uint64_t rng_seed = 0;
};

struct ReflectivityParams {
    double cosine_exponent = 1.0;  // gamma
    double max_range_m = 50.0;
    double sin_fov_limit = 1.0;  // points with |sin az| beyond this are excluded
};

// |c| = sqrt(rho_mat) * max(0, cos psi)^gamma / r^2 with psi the angle between
// the surface normal and the direction back to the radar; phase uniform from
// `rng`. Returns nullopt when the element faces away, sits behind the radar,
// or falls outside range/FoV. The 1/r^2 factor is applied here and only here.
std::optional<ReflectionPoint> assign_reflectivity(const SurfaceElement& surface,
                                                   const ReflectivityParams& params,
                                                   RandomSource& rng);

// Procedural scene primitives: line segments sampled at a fixed density with
// the normal facing the radar, and single points (pole/pedestrian stand-ins).
struct ScenePrimitive {
    enum class Kind { kPoint, kSegment } kind = Kind::kPoint;
    double x1 = 0.0, y1 = 0.0;
    double x2 = 0.0, y2 = 0.0;  // segment end (unused for points)
    double material_reflectivity = 1.0;
    double radial_velocity_mps = 0.0;
    double density_per_m = 10.0;  // segment sampling density
};

struct SceneSpec {
    std::vector<ScenePrimitive> primitives;
    std::uint64_t seed = 0;
    ReflectivityParams reflectivity;
};

// Deterministic for a given spec: segment primitives sample
// max(1, round(length * density)) points at subdivision midpoints, point
// primitives one each; phases come from the spec seed. Out-of-view elements
// are dropped silently.
Scene generate_procedural_scene(const SceneSpec& spec);

// Multi-object traffic scene (cars as rear+side segment pairs, poles,
// pedestrians) randomized from `seed`. Used for dataset generation.
SceneSpec make_random_scene_spec(std::uint64_t seed);

// JSON scene-spec file: primitives array, seed, and an optional
// "reflectivity" block overriding the ReflectivityParams defaults.
SceneSpec load_scene_spec(const std::string& path);

}  // namespace radsim
