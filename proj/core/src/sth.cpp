#include "texfuse/sth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace texfuse {

GrayField hist_equalize(const GrayField& field) {
  if (field.empty()) throw input_error("hist_equalize: empty field");
  std::vector<std::size_t> counts(256, 0);
  for (double v : field.data) {
    const int bin = std::clamp(static_cast<int>(v * 256.0), 0, 255);
    ++counts[bin];
  }
  std::vector<double> cdf(256);
  std::size_t running = 0;
  for (int b = 0; b < 256; ++b) {
    running += counts[b];
    cdf[b] = static_cast<double>(running) / static_cast<double>(field.size());
  }
  GrayField out(field.width, field.height);
  for (std::size_t i = 0; i < field.size(); ++i) {
    const int bin = std::clamp(static_cast<int>(field.data[i] * 256.0), 0, 255);
    out.data[i] = cdf[bin];
  }
  return out;
}

std::vector<int> quantize(const GrayField& field, int levels) {
  if (levels < 2) throw input_error("quantize: need at least 2 levels");
  std::vector<int> out(field.size());
  for (std::size_t i = 0; i < field.size(); ++i) {
    const int lvl = static_cast<int>(std::floor(field.data[i] * levels));
    out[i] = std::clamp(lvl, 0, levels - 1);
  }
  return out;
}

namespace {

struct Component {
  std::size_t count = 0;
  double sum_x = 0.0;
  double sum_y = 0.0;
};

}  // namespace

double sth_area(const GrayField& structure, const SthConfig& config) {
  if (structure.width < 16 || structure.height < 16)
    throw input_error("sth_area: field must be at least 16x16");
  if (config.dark_threshold < 1 || config.dark_threshold >= config.quant_levels)
    throw input_error("sth_area: dark_threshold must lie in 1..quant_levels-1");
  if (config.connectivity != 4 && config.connectivity != 8)
    throw input_error("sth_area: connectivity must be 4 or 8");

  const int w = structure.width, h = structure.height;
  const std::vector<int> levels = quantize(hist_equalize(structure), config.quant_levels);
  std::vector<char> mask(structure.size());
  bool any = false;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    mask[i] = levels[i] < config.dark_threshold;
    any = any || mask[i];
  }
  if (!any) throw input_error("sth_area: no dark object (empty mask)");

  static const int dx8[] = {1, -1, 0, 0, 1, 1, -1, -1};
  static const int dy8[] = {0, 0, 1, -1, 1, -1, 1, -1};
  const int nn = config.connectivity;

  std::vector<int> label(structure.size(), -1);
  std::vector<Component> comps;
  std::vector<std::size_t> stack;
  for (int y0 = 0; y0 < h; ++y0)
    for (int x0 = 0; x0 < w; ++x0) {
      const std::size_t start = static_cast<std::size_t>(y0) * w + x0;
      if (!mask[start] || label[start] >= 0) continue;
      const int id = static_cast<int>(comps.size());
      comps.emplace_back();
      label[start] = id;
      stack.assign(1, start);
      while (!stack.empty()) {
        const std::size_t p = stack.back();
        stack.pop_back();
        const int x = static_cast<int>(p % w), y = static_cast<int>(p / w);
        auto& c = comps[id];
        ++c.count;
        c.sum_x += x;
        c.sum_y += y;
        for (int k = 0; k < nn; ++k) {
          const int nx = x + dx8[k], ny = y + dy8[k];
          if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
          const std::size_t q = static_cast<std::size_t>(ny) * w + nx;
          if (mask[q] && label[q] < 0) {
            label[q] = id;
            stack.push_back(q);
          }
        }
      }
    }

  const double cx = config.roi_center ? config.roi_center->first : (w - 1) / 2.0;
  const double cy = config.roi_center ? config.roi_center->second : (h - 1) / 2.0;
  double best_dist = std::numeric_limits<double>::infinity();
  std::size_t best_count = 0;
  for (const auto& c : comps) {
    const double mx = c.sum_x / static_cast<double>(c.count);
    const double my = c.sum_y / static_cast<double>(c.count);
    const double d = std::hypot(mx - cx, my - cy);
    if (d < best_dist) {
      best_dist = d;
      best_count = c.count;
    }
  }
  return static_cast<double>(best_count);
}

std::vector<double> structural_feature_sth(const GrayField& structure,
                                           const SthConfig& config) {
  const double area = sth_area(structure, config);
  return {area / static_cast<double>(structure.size())};
}

}  // namespace texfuse
