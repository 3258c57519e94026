#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "hvs/core.hpp"

namespace hvs {

/// Axis-aligned box. confidence is meaningful for detections only.
/// image_id scopes matching when boxes from several images are pooled.
struct Box {
    int class_id = 0;
    double x = 0, y = 0, w = 0, h = 0;
    double confidence = 0.0;
    int image_id = 0;
};

inline double iou(const Box& a, const Box& b) {
    if (a.w <= 0 || a.h <= 0 || b.w <= 0 || b.h <= 0) throw Error("iou: boxes must have positive extent");
    const double ix = std::max(0.0, std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x));
    const double iy = std::max(0.0, std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y));
    const double inter = ix * iy;
    const double uni = a.w * a.h + b.w * b.h - inter;
    return inter <= 0 ? 0.0 : inter / uni;
}

namespace detail {

struct MatchOutcome {
    std::vector<int> det_order;     // detection indices sorted by confidence desc, stable
    std::vector<bool> is_tp;       // per sorted detection
    std::vector<double> tp_iou;    // IoU of each matched pair, aligned with is_tp
};

// Greedy matching: detections in confidence order (ties by input order) each
// take the unmatched ground truth of the same image with highest IoU >= thr.
inline MatchOutcome greedy_match(const std::vector<Box>& dets, const std::vector<Box>& gts,
                                 double iou_thr) {
    MatchOutcome m;
    m.det_order.resize(dets.size());
    for (std::size_t i = 0; i < dets.size(); ++i) m.det_order[static_cast<std::size_t>(i)] = static_cast<int>(i);
    std::stable_sort(m.det_order.begin(), m.det_order.end(), [&](int a, int b) {
        return dets[static_cast<std::size_t>(a)].confidence > dets[static_cast<std::size_t>(b)].confidence;
    });

    std::vector<bool> gt_used(gts.size(), false);
    m.is_tp.resize(dets.size(), false);
    m.tp_iou.resize(dets.size(), 0.0);
    for (std::size_t k = 0; k < m.det_order.size(); ++k) {
        const Box& d = dets[static_cast<std::size_t>(m.det_order[k])];
        int best = -1;
        double best_iou = 0.0;
        for (std::size_t g = 0; g < gts.size(); ++g) {
            if (gt_used[g] || gts[g].image_id != d.image_id) continue;
            const double v = iou(d, gts[g]);
            if (v >= iou_thr && v > best_iou) {
                best_iou = v;
                best = static_cast<int>(g);
            }
        }
        if (best >= 0) {
            gt_used[static_cast<std::size_t>(best)] = true;
            m.is_tp[k] = true;
            m.tp_iou[k] = best_iou;
        }
    }
    return m;
}

}  // namespace detail

/// AP for one class: AP = sum_k P(k)*rel(k) / max(1, sum_k rel(k)), with
/// P(k) the precision among the first k confidence-sorted detections and
/// rel(k) the true-positive indicator at an IoU threshold (default 0.50).
/// Empty conventions: no gt and no det -> 1; gt present but nothing matched -> 0.
inline double average_precision(const std::vector<Box>& dets, const std::vector<Box>& gts,
                                double iou_thr = 0.5) {
    if (dets.empty() && gts.empty()) return 1.0;
    const auto m = detail::greedy_match(dets, gts, iou_thr);
    double ap_sum = 0.0;
    int tp = 0;
    int rel_total = 0;
    for (std::size_t k = 0; k < m.is_tp.size(); ++k) {
        if (m.is_tp[k]) {
            ++tp;
            ++rel_total;
            ap_sum += static_cast<double>(tp) / static_cast<double>(k + 1);
        }
    }
    return ap_sum / std::max(1, rel_total);
}

/// Detections and ground truths of one class (possibly pooled over images).
struct ClassInstances {
    std::vector<Box> detections;
    std::vector<Box> ground_truths;
};

struct EvalResult {
    std::map<int, double> ap_per_class;  // classes present in ground truth
    double map = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double mean_iou = 0.0;  // over matched pairs
};

/// mAP = arithmetic mean of per-class AP over classes present in the ground
/// truth; precision/recall/F1 are reported at the all-detections operating
/// point, mean IoU over matched pairs.
inline EvalResult mean_average_precision(const std::map<int, ClassInstances>& per_class,
                                         double iou_thr = 0.5) {
    EvalResult out;
    std::int64_t tp = 0, fp = 0, gt_total = 0;
    double iou_sum = 0.0;
    double ap_sum = 0.0;
    int classes_with_gt = 0;
    for (const auto& [class_id, inst] : per_class) {
        const auto m = detail::greedy_match(inst.detections, inst.ground_truths, iou_thr);
        for (std::size_t k = 0; k < m.is_tp.size(); ++k) {
            if (m.is_tp[k]) {
                ++tp;
                iou_sum += m.tp_iou[k];
            } else {
                ++fp;
            }
        }
        gt_total += static_cast<std::int64_t>(inst.ground_truths.size());
        if (!inst.ground_truths.empty()) {
            const double ap = average_precision(inst.detections, inst.ground_truths, iou_thr);
            out.ap_per_class[class_id] = ap;
            ap_sum += ap;
            ++classes_with_gt;
        }
    }
    if (classes_with_gt == 0) throw Error("mean_average_precision: no class has ground truth");
    out.map = ap_sum / classes_with_gt;
    out.precision = (tp + fp) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    out.recall = gt_total > 0 ? static_cast<double>(tp) / static_cast<double>(gt_total) : 0.0;
    out.f1 = (out.precision + out.recall) > 0
                 ? 2.0 * out.precision * out.recall / (out.precision + out.recall)
                 : 0.0;
    out.mean_iou = tp > 0 ? iou_sum / static_cast<double>(tp) : 0.0;
    return out;
}

/// 10*log10(255^2 / MSE); identical frames yield the empty optional rather
/// than a fabricated number.
inline std::optional<double> psnr(const Frame& a, const Frame& b) {
    if (a.width != b.width || a.height != b.height) throw Error("psnr: dimension mismatch");
    std::int64_t sq = 0;
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        const int d = static_cast<int>(a.samples[i]) - static_cast<int>(b.samples[i]);
        sq += static_cast<std::int64_t>(d) * d;
    }
    if (sq == 0) return std::nullopt;
    const double mse = static_cast<double>(sq) / static_cast<double>(a.samples.size());
    return 10.0 * std::log10(255.0 * 255.0 / mse);
}

}  // namespace hvs
