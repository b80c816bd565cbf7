#include "radsim/eval.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace radsim {

namespace {

// Spatial hash with cell size = match radius: candidate ground-truth points
// for any query live in the 3x3 cell neighborhood.
class GtGrid {
  public:
    GtGrid(const std::vector<DetectionPoint>& points, double radius)
        : points_(points), radius_(radius), matched_(points.size(), false) {
        cells_.reserve(points.size());
        for (std::size_t i = 0; i < points.size(); ++i) {
            cells_[key(points[i].x_m, points[i].y_m)].push_back(i);
        }
    }

    // Nearest unmatched point within the radius (inclusive); distance ties go
    // to the lowest index.
    long take_nearest(double x, double y) {
        const long cx = cell_of(x);
        const long cy = cell_of(y);
        long best = -1;
        double best_dist = 0.0;
        for (long dy = -1; dy <= 1; ++dy) {
            for (long dx = -1; dx <= 1; ++dx) {
                const auto it = cells_.find(pack(cx + dx, cy + dy));
                if (it == cells_.end()) continue;
                for (std::size_t i : it->second) {
                    if (matched_[i]) continue;
                    const double d = std::hypot(points_[i].x_m - x, points_[i].y_m - y);
                    if (d > radius_) continue;
                    if (best < 0 || d < best_dist ||
                        (d == best_dist && static_cast<long>(i) < best)) {
                        best_dist = d;
                        best = static_cast<long>(i);
                    }
                }
            }
        }
        if (best >= 0) matched_[best] = true;
        return best;
    }

  private:
    long cell_of(double v) const { return static_cast<long>(std::floor(v / radius_)); }
    std::int64_t pack(long cx, long cy) const {
        return (static_cast<std::int64_t>(cx) << 32) ^ (cy & 0xffffffffLL);
    }
    std::int64_t key(double x, double y) const { return pack(cell_of(x), cell_of(y)); }

    const std::vector<DetectionPoint>& points_;
    double radius_;
    std::vector<bool> matched_;
    std::unordered_map<std::int64_t, std::vector<std::size_t>> cells_;
};

std::vector<std::size_t> descending_score_order(const std::vector<DetectionPoint>& dets) {
    std::vector<std::size_t> order(dets.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return dets[a].score > dets[b].score;
    });
    return order;
}

}  // namespace

std::vector<DetectionPoint> extract_points(const RadarImage& image,
                                           double amplitude_threshold) {
    std::vector<DetectionPoint> points;
    for (std::uint32_t n = 0; n < image.num_range_bins; ++n) {
        const double r = image.range_of(n);
        for (std::uint32_t l = 0; l < image.num_angle_bins; ++l) {
            const double amp = image.amplitude(n, l);
            if (amp < amplitude_threshold) continue;
            const double s = image.sin_azimuth_of(l);
            DetectionPoint p;
            p.x_m = -s * r;
            p.y_m = r * std::sqrt(std::max(0.0, 1.0 - s * s));
            p.score = amp;
            points.push_back(p);
        }
    }
    return points;
}

MatchResult match_detections(const std::vector<DetectionPoint>& detections,
                             const std::vector<DetectionPoint>& ground_truth,
                             double radius_m) {
    if (radius_m <= 0.0) throw std::invalid_argument("match_detections: radius must be positive");
    MatchResult result;
    result.assignment.assign(detections.size(), -1);
    GtGrid grid(ground_truth, radius_m);
    for (std::size_t i : descending_score_order(detections)) {
        const long gt = grid.take_nearest(detections[i].x_m, detections[i].y_m);
        result.assignment[i] = gt;
        if (gt >= 0) {
            ++result.true_positives;
        } else {
            ++result.false_positives;
        }
    }
    result.false_negatives = ground_truth.size() - result.true_positives;
    return result;
}

std::vector<double> log_spaced_thresholds(double floor, double ceil, std::size_t count) {
    if (!(floor > 0.0)) throw std::invalid_argument("log_spaced_thresholds: floor must be > 0");
    if (count < 1) throw std::invalid_argument("log_spaced_thresholds: empty sweep");
    if (ceil <= floor) return {floor};
    std::vector<double> thresholds(count);
    const double lo = std::log(floor);
    const double hi = std::log(ceil);
    for (std::size_t i = 0; i < count; ++i) {
        const double f = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
        thresholds[i] = std::exp(hi - f * (hi - lo));  // descending
    }
    return thresholds;
}

namespace {

// One greedy pass over all detections in descending score order. Because the
// detection set at a higher threshold is a prefix of this order and greedy
// decisions never depend on later (lower-score) detections, the prefix state
// reproduces the per-threshold matching exactly.
struct ScoredOutcomes {
    std::vector<double> tp_scores;  // descending
    std::vector<double> fp_scores;  // descending
    std::size_t gt_count = 0;
};

ScoredOutcomes greedy_outcomes(const RadarImage& image,
                               const std::vector<DetectionPoint>& ground_truth,
                               double min_threshold, double radius) {
    ScoredOutcomes out;
    out.gt_count = ground_truth.size();
    std::vector<DetectionPoint> dets = extract_points(image, min_threshold);
    GtGrid grid(ground_truth, radius);
    for (std::size_t i : descending_score_order(dets)) {
        const long gt = grid.take_nearest(dets[i].x_m, dets[i].y_m);
        if (gt >= 0) {
            out.tp_scores.push_back(dets[i].score);
        } else {
            out.fp_scores.push_back(dets[i].score);
        }
    }
    std::sort(out.tp_scores.rbegin(), out.tp_scores.rend());
    std::sort(out.fp_scores.rbegin(), out.fp_scores.rend());
    return out;
}

std::size_t count_at_least(const std::vector<double>& descending, double threshold) {
    auto it = std::lower_bound(descending.begin(), descending.end(), threshold,
                               [](double value, double t) { return value >= t; });
    return static_cast<std::size_t>(it - descending.begin());
}

EvalReport curve_from_outcomes(const std::vector<ScoredOutcomes>& outcomes,
                               const std::vector<double>& thresholds, double radius) {
    std::size_t total_gt = 0;
    for (const auto& o : outcomes) total_gt += o.gt_count;
    if (total_gt == 0) {
        throw std::invalid_argument("precision_recall_ap: no ground-truth points");
    }

    EvalReport report;
    report.match_radius_m = radius;
    report.curve.reserve(thresholds.size());
    for (double t : thresholds) {
        std::size_t tp = 0, fp = 0;
        for (const auto& o : outcomes) {
            tp += count_at_least(o.tp_scores, t);
            fp += count_at_least(o.fp_scores, t);
        }
        PrPoint point;
        point.threshold = t;
        point.precision = (tp + fp) == 0 ? 1.0 : static_cast<double>(tp) / (tp + fp);
        point.recall = static_cast<double>(tp) / static_cast<double>(total_gt);
        report.curve.push_back(point);
    }

    // Running-max precision envelope over the recall-ascending curve, then a
    // trapezoid from the (0, envelope-start) anchor; no extrapolation past the
    // maximum achieved recall.
    std::vector<PrPoint> sorted = report.curve;
    std::sort(sorted.begin(), sorted.end(),
              [](const PrPoint& a, const PrPoint& b) { return a.recall < b.recall; });
    std::vector<double> envelope(sorted.size());
    double running = 0.0;
    for (std::size_t i = sorted.size(); i-- > 0;) {
        running = std::max(running, sorted[i].precision);
        envelope[i] = running;
    }
    double ap = 0.0;
    double prev_recall = 0.0;
    double prev_env = sorted.empty() ? 0.0 : envelope.front();
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        ap += (sorted[i].recall - prev_recall) * 0.5 * (envelope[i] + prev_env);
        prev_recall = sorted[i].recall;
        prev_env = envelope[i];
    }
    report.average_precision = ap;
    return report;
}

}  // namespace

EvalReport precision_recall_ap(const RadarImage& image,
                               const std::vector<DetectionPoint>& ground_truth,
                               const std::vector<double>& thresholds, double radius_m) {
    if (thresholds.empty()) throw std::invalid_argument("precision_recall_ap: no thresholds");
    const double min_threshold = *std::min_element(thresholds.begin(), thresholds.end());
    std::vector<ScoredOutcomes> outcomes;
    outcomes.push_back(greedy_outcomes(image, ground_truth, min_threshold, radius_m));
    return curve_from_outcomes(outcomes, thresholds, radius_m);
}

EvalReport precision_recall_ap_pooled(
    const std::vector<const RadarImage*>& images,
    const std::vector<std::vector<DetectionPoint>>& ground_truth,
    const std::vector<double>& thresholds, double radius_m) {
    if (images.size() != ground_truth.size()) {
        throw std::invalid_argument("precision_recall_ap_pooled: size mismatch");
    }
    if (thresholds.empty()) throw std::invalid_argument("precision_recall_ap: no thresholds");
    const double min_threshold = *std::min_element(thresholds.begin(), thresholds.end());
    std::vector<ScoredOutcomes> outcomes;
    outcomes.reserve(images.size());
    for (std::size_t i = 0; i < images.size(); ++i) {
        outcomes.push_back(greedy_outcomes(*images[i], ground_truth[i], min_threshold, radius_m));
    }
    return curve_from_outcomes(outcomes, thresholds, radius_m);
}

}  // namespace radsim
