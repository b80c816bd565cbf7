#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "radsim/dsp.hpp"

namespace radsim {

// A thresholded pixel, reported at its center position in the (x, y) plane.
struct DetectionPoint {
    double x_m = 0.0;
    double y_m = 0.0;
    double score = 0.0;  // pixel amplitude
};

// Centers of pixels whose amplitude is >= threshold. Used both for ground
// truth (super image at the fixed noise threshold) and for detections.
std::vector<DetectionPoint> extract_points(const RadarImage& image,
                                           double amplitude_threshold);

struct MatchResult {
    std::size_t true_positives = 0;
    std::size_t false_positives = 0;
    std::size_t false_negatives = 0;
    // matched ground-truth index per detection, -1 for false positives
    std::vector<long> assignment;
};

// Greedy one-to-one matching: detections in descending score order, each
// consuming the nearest unmatched ground-truth point within `radius_m`.
MatchResult match_detections(const std::vector<DetectionPoint>& detections,
                             const std::vector<DetectionPoint>& ground_truth,
                             double radius_m);

struct PrPoint {
    double threshold = 0.0;
    double precision = 0.0;
    double recall = 0.0;
};

struct EvalReport {
    std::vector<PrPoint> curve;  // descending threshold order
    double average_precision = 0.0;
    double match_radius_m = 0.0;
};

inline constexpr double kMatchRadiusM = 0.25;

// Log-spaced threshold sweep (descending). `floor` and `ceil` bound the sweep;
// typically the image noise floor and max amplitude.
std::vector<double> log_spaced_thresholds(double floor, double ceil, std::size_t count = 100);

// PR curve + AP of one image against fixed ground-truth points. AP integrates
// the running-max precision envelope over recall (trapezoid, anchored at
// recall 0, no extrapolation past the maximum achieved recall).
EvalReport precision_recall_ap(const RadarImage& image,
                               const std::vector<DetectionPoint>& ground_truth,
                               const std::vector<double>& thresholds,
                               double radius_m = kMatchRadiusM);

// Pooled variant: TP/FP/FN summed across images per threshold (each image i
// scored against ground_truth[i]), one curve for the whole set.
EvalReport precision_recall_ap_pooled(
    const std::vector<const RadarImage*>& images,
    const std::vector<std::vector<DetectionPoint>>& ground_truth,
    const std::vector<double>& thresholds, double radius_m = kMatchRadiusM);

}  // namespace radsim
