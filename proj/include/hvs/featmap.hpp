#pragma once

#include <cstdint>
#include <vector>

#include "hvs/codec.hpp"
#include "hvs/core.hpp"

namespace hvs {

namespace detail {

inline Frame featmap_canvas(const std::vector<CodingTree>& trees, std::uint32_t width,
                            std::uint32_t height, Sample fill) {
    const std::uint32_t pw = padded_extent(width);
    const std::uint32_t ph = padded_extent(height);
    const std::size_t expected =
        static_cast<std::size_t>(pw / kCtuSize) * static_cast<std::size_t>(ph / kCtuSize);
    if (trees.size() != expected) throw Error("feature map: coding trees do not cover the frame");
    std::size_t i = 0;
    for (std::uint32_t cy = 0; cy < ph; cy += kCtuSize)
        for (std::uint32_t cx = 0; cx < pw; cx += kCtuSize, ++i)
            if (trees[i].rect != Rect{static_cast<int>(cx), static_cast<int>(cy), kCtuSize})
                throw Error("feature map: coding tree out of raster position");
    return Frame(pw, ph, fill);
}

inline void draw_rect_outline(Frame& f, Rect r, Sample value) {
    for (int x = r.x; x < r.x + r.size; ++x) {
        f.at(static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(r.y)) = value;
        f.at(static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(r.y + r.size - 1)) = value;
    }
    for (int y = r.y; y < r.y + r.size; ++y) {
        f.at(static_cast<std::uint32_t>(r.x), static_cast<std::uint32_t>(y)) = value;
        f.at(static_cast<std::uint32_t>(r.x + r.size - 1), static_cast<std::uint32_t>(y)) = value;
    }
}

}  // namespace detail

/// Block-partition image: white background, black 1-pixel boundary lines at
/// every leaf rectangle edge.
inline Frame render_partition_map(const std::vector<CodingTree>& trees, std::uint32_t width,
                                  std::uint32_t height) {
    Frame canvas = detail::featmap_canvas(trees, width, height, 255);
    for (const auto& t : trees) {
        validate_tree(t);
        for_each_leaf(t, [&](const CodingTree& leaf) { detail::draw_rect_outline(canvas, leaf.rect, 0); });
    }
    return detail::crop(canvas, width, height);
}

/// Prediction-mode image: each leaf filled with round(mode * 255/34),
/// partition boundaries overlaid at intensity 0.
inline Frame render_mode_map(const std::vector<CodingTree>& trees, std::uint32_t width,
                             std::uint32_t height) {
    Frame canvas = detail::featmap_canvas(trees, width, height, 255);
    for (const auto& t : trees) {
        validate_tree(t);
        for_each_leaf(t, [&](const CodingTree& leaf) {
            const Sample fill = static_cast<Sample>((leaf.mode.index * 255 + 17) / 34);
            for (int y = leaf.rect.y; y < leaf.rect.y + leaf.rect.size; ++y)
                for (int x = leaf.rect.x; x < leaf.rect.x + leaf.rect.size; ++x)
                    canvas.at(static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(y)) = fill;
        });
    }
    for (const auto& t : trees)
        for_each_leaf(t, [&](const CodingTree& leaf) { detail::draw_rect_outline(canvas, leaf.rect, 0); });
    return detail::crop(canvas, width, height);
}

}  // namespace hvs
