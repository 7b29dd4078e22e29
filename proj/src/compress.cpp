#include "vgs/compress.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace vgs {

void validate(const ClusterConfig& cfg) {
  if (cfg.target_count < 1)
    throw std::invalid_argument("cluster: target_count must be >= 1");
  if (cfg.max_waste < 0.0)
    throw std::invalid_argument("cluster: max_waste must be >= 0");
}

namespace {

double added_volume(const Box& a, const Box& b, const Box& bb) {
  const Box cap = intersect(a, b);
  return volume(bb) - volume(a) - volume(b) + volume(cap);
}

struct Merge {
  double added;
  std::size_t i;
  std::size_t j;
};

struct MergeOrder {
  bool operator()(const Merge& a, const Merge& b) const {
    if (a.added != b.added) return a.added > b.added;
    if (a.i != b.i) return a.i > b.i;
    return a.j > b.j;
  }
};

}  // namespace

std::vector<Box> cluster(std::vector<Box> unsafe, const ClusterConfig& cfg) {
  validate(cfg);
  if (unsafe.size() <= 1) return unsafe;

  std::vector<Box> slots = std::move(unsafe);
  std::vector<bool> alive(slots.size(), true);
  std::size_t alive_count = slots.size();
  std::priority_queue<Merge, std::vector<Merge>, MergeOrder> heap;
  for (std::size_t i = 0; i < slots.size(); ++i)
    for (std::size_t j = i + 1; j < slots.size(); ++j)
      heap.push(
          Merge{added_volume(slots[i], slots[j],
                             bounding_union(slots[i], slots[j])),
                i, j});

  while (alive_count > static_cast<std::size_t>(cfg.target_count) &&
         !heap.empty()) {
    const Merge top = heap.top();
    heap.pop();
    if (!alive[top.i] || !alive[top.j]) continue;  // references a merged box
    const Box bb = bounding_union(slots[top.i], slots[top.j]);
    const double vol = volume(bb);
    const double waste = vol > 0.0 ? top.added / vol : 0.0;
    if (waste > cfg.max_waste) break;
    alive[top.i] = false;
    alive[top.j] = false;
    const std::size_t m = slots.size();
    slots.push_back(bb);
    alive.push_back(true);
    --alive_count;
    for (std::size_t k = 0; k < m; ++k)
      if (alive[k])
        heap.push(Merge{
            added_volume(slots[k], slots[m],
                         bounding_union(slots[k], slots[m])),
            k, m});
  }

  std::vector<Box> out;
  for (std::size_t i = 0; i < slots.size(); ++i)
    if (alive[i]) out.push_back(std::move(slots[i]));
  std::sort(out.begin(), out.end(),
            [](const Box& a, const Box& b) { return lex_less(a, b); });
  return out;
}

namespace {

/// SMT-LIB real literal: shortest fixed-point decimal that round-trips,
/// negatives as an application of unary minus.
std::string smt_number(double v) {
  char buf[384];
  const double a = std::abs(v);
  auto [end, ec] =
      std::to_chars(buf, buf + sizeof buf, a, std::chars_format::fixed);
  std::string digits(buf, end);
  if (std::signbit(v) && a != 0.0) return "(- " + digits + ")";
  return digits;
}

}  // namespace

std::vector<std::string> default_var_names(Eigen::Index dim) {
  std::vector<std::string> names;
  for (Eigen::Index i = 0; i < dim; ++i)
    names.push_back("x" + std::to_string(i + 1));
  return names;
}

std::string emit_smt(const std::vector<std::vector<SmtBound>>& regions,
                     const std::vector<std::string>& names) {
  for (const auto& region : regions)
    if (region.size() != names.size())
      throw std::invalid_argument("emit_smt: bounds do not match variables");
  std::ostringstream out;
  for (const auto& name : names)
    out << "(declare-const " << name << " Real)\n";
  if (regions.empty()) {
    out << "(assert false)\n";
    return out.str();
  }
  out << "(assert (or";
  for (const auto& region : regions) {
    out << "\n  (and";
    for (std::size_t d = 0; d < region.size(); ++d) {
      const SmtBound& b = region[d];
      out << " (" << (b.lo_strict ? "<" : "<=") << ' ' << smt_number(b.lo)
          << ' ' << names[d] << ')';
      out << " (" << (b.hi_strict ? "<" : "<=") << ' ' << names[d] << ' '
          << smt_number(b.hi) << ')';
    }
    out << ')';
  }
  out << "))\n";
  return out.str();
}

std::string emit_smt(const std::vector<Box>& boxes,
                     const std::vector<std::string>& names) {
  std::vector<std::vector<SmtBound>> regions;
  for (const auto& box : boxes) {
    if (box.dim() != static_cast<Eigen::Index>(names.size()))
      throw std::invalid_argument("emit_smt: bounds do not match variables");
    std::vector<SmtBound> region;
    for (Eigen::Index d = 0; d < box.dim(); ++d)
      region.push_back(SmtBound{box.lower[d], box.upper[d], false, false});
    regions.push_back(std::move(region));
  }
  return emit_smt(regions, names);
}

namespace {

/// Index of the single dimension where a and b differ, or -1 when they are
/// identical everywhere or differ in more than one place.
Eigen::Index lone_differing_dim(const Box& a, const Box& b) {
  Eigen::Index found = -1;
  for (Eigen::Index d = 0; d < a.dim(); ++d) {
    if (a.lower[d] == b.lower[d] && a.upper[d] == b.upper[d]) continue;
    if (found >= 0) return -1;
    found = d;
  }
  return found;
}

}  // namespace

std::vector<Box> simplify_boxes(std::vector<Box> boxes) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < boxes.size() && !changed; ++i) {
      for (std::size_t j = 0; j < boxes.size() && !changed; ++j) {
        if (i == j) continue;
        if (subsumes(boxes[i], boxes[j])) {
          boxes.erase(boxes.begin() + static_cast<std::ptrdiff_t>(j));
          changed = true;
          break;
        }
        if (j < i) continue;  // coalescing is symmetric, visit once
        const Eigen::Index d = lone_differing_dim(boxes[i], boxes[j]);
        if (d < 0) continue;
        const double lo = std::max(boxes[i].lower[d], boxes[j].lower[d]);
        const double hi = std::min(boxes[i].upper[d], boxes[j].upper[d]);
        if (lo > hi) continue;  // gap along d
        boxes[i].lower[d] = std::min(boxes[i].lower[d], boxes[j].lower[d]);
        boxes[i].upper[d] = std::max(boxes[i].upper[d], boxes[j].upper[d]);
        boxes.erase(boxes.begin() + static_cast<std::ptrdiff_t>(j));
        changed = true;
      }
    }
  }
  std::sort(boxes.begin(), boxes.end(),
            [](const Box& a, const Box& b) { return lex_less(a, b); });
  return boxes;
}

namespace {

int cell_of(const RegionIndex& idx, std::size_t which, double value) {
  const Eigen::Index d = idx.active_dims[which];
  const double w = idx.domain.upper[d] - idx.domain.lower[d];
  if (w <= 0.0) return 0;
  const double t = (value - idx.domain.lower[d]) / w;
  const int cell = static_cast<int>(t * idx.resolution);
  return std::clamp(cell, 0, idx.resolution - 1);
}

}  // namespace

RegionIndex build_index(const Box& domain, std::vector<Box> boxes,
                        int resolution) {
  if (resolution < 1)
    throw std::invalid_argument("build_index: resolution must be >= 1");
  for (const auto& b : boxes)
    if (b.dim() != domain.dim())
      throw std::invalid_argument("build_index: box dimension mismatch");
  RegionIndex idx;
  idx.domain = domain;
  idx.boxes = std::move(boxes);
  idx.resolution = resolution;

  // Pick the dimensions along which box centers spread the most; those
  // discriminate best between buckets.
  std::vector<std::pair<double, Eigen::Index>> spread;
  for (Eigen::Index d = 0; d < domain.dim(); ++d) {
    double lo = 0.0;
    double hi = 0.0;
    for (std::size_t k = 0; k < idx.boxes.size(); ++k) {
      const double c = (idx.boxes[k].lower[d] + idx.boxes[k].upper[d]) / 2.0;
      lo = k == 0 ? c : std::min(lo, c);
      hi = k == 0 ? c : std::max(hi, c);
    }
    spread.emplace_back(hi - lo, d);
  }
  std::sort(spread.begin(), spread.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  const std::size_t active =
      std::min<std::size_t>(2, static_cast<std::size_t>(domain.dim()));
  for (std::size_t k = 0; k < active; ++k)
    idx.active_dims.push_back(spread[k].second);
  std::sort(idx.active_dims.begin(), idx.active_dims.end());

  std::size_t cell_count = 1;
  for (std::size_t k = 0; k < idx.active_dims.size(); ++k)
    cell_count *= static_cast<std::size_t>(resolution);
  idx.cells.assign(cell_count, {});

  for (std::size_t b = 0; b < idx.boxes.size(); ++b) {
    std::vector<std::pair<int, int>> ranges;
    for (std::size_t k = 0; k < idx.active_dims.size(); ++k) {
      const Eigen::Index d = idx.active_dims[k];
      ranges.emplace_back(cell_of(idx, k, idx.boxes[b].lower[d]),
                          cell_of(idx, k, idx.boxes[b].upper[d]));
    }
    if (ranges.empty()) {
      idx.cells[0].push_back(static_cast<int>(b));
      continue;
    }
    std::vector<int> at(ranges.size());
    for (std::size_t k = 0; k < ranges.size(); ++k) at[k] = ranges[k].first;
    bool done = false;
    while (!done) {
      std::size_t flat = 0;
      for (std::size_t k = 0; k < at.size(); ++k)
        flat = flat * static_cast<std::size_t>(resolution) +
               static_cast<std::size_t>(at[k]);
      idx.cells[flat].push_back(static_cast<int>(b));
      done = true;
      for (std::size_t k = at.size(); k-- > 0;) {
        if (at[k] < ranges[k].second) {
          ++at[k];
          done = false;
          break;
        }
        at[k] = ranges[k].first;
      }
    }
  }
  return idx;
}

bool contains(const RegionIndex& idx, const Eigen::VectorXd& x,
              IndexStats* stats) {
  if (stats) ++stats->queries;
  if (x.size() != idx.domain.dim())
    throw std::invalid_argument("index: query dimension mismatch");
  if (!vgs::contains(idx.domain, x)) {
    if (stats) ++stats->out_of_domain;
    return true;
  }
  if (idx.cells.empty()) return false;
  std::size_t flat = 0;
  for (std::size_t k = 0; k < idx.active_dims.size(); ++k)
    flat = flat * static_cast<std::size_t>(idx.resolution) +
           static_cast<std::size_t>(cell_of(idx, k, x[idx.active_dims[k]]));
  const auto& bucket = idx.cells[flat];
  for (int b : bucket) {
    if (stats) ++stats->boxes_inspected;
    if (vgs::contains(idx.boxes[static_cast<std::size_t>(b)], x)) return true;
  }
  return false;
}

}  // namespace vgs
