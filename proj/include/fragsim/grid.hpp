#pragma once

#include <algorithm>
#include <cmath>

#include "fragsim/errors.hpp"

namespace fragsim {

/// Log-uniform grid on [x_min, x_max]: edges x_min * r^i with r = (x_max/x_min)^(1/n).
class LogGrid {
public:
  LogGrid(double x_min, double x_max, int n_cells)
      : x_min_(x_min), x_max_(x_max), n_(n_cells) {
    if (!(x_min > 0.0) || !(x_max > x_min))
      throw ConfigError("LogGrid: requires 0 < x_min < x_max");
    if (n_cells < 1) throw ConfigError("LogGrid: n_cells must be >= 1");
    log_min_ = std::log(x_min);
    dy_ = (std::log(x_max) - log_min_) / n_;
  }

  int n_cells() const { return n_; }
  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  double log_width() const { return dy_; }
  double ratio() const { return std::exp(dy_); }

  double edge(int i) const {
    if (i <= 0) return x_min_;
    if (i >= n_) return x_max_;
    return std::exp(log_min_ + dy_ * i);
  }

  double center(int i) const { return std::exp(log_min_ + dy_ * (i + 0.5)); }

  /// Cell index of x, counting [edge(i), edge(i+1)); -1 below the grid,
  /// n_cells() at or above x_max.
  int cell_index(double x) const {
    if (!(x > 0.0) || x < x_min_) return -1;
    if (x >= x_max_) return n_;
    const int i = static_cast<int>(std::floor((std::log(x) - log_min_) / dy_));
    return std::clamp(i, 0, n_ - 1);
  }

  bool same_geometry(const LogGrid& o) const {
    return n_ == o.n_ && x_min_ == o.x_min_ && x_max_ == o.x_max_;
  }

private:
  double x_min_, x_max_;
  int n_;
  double log_min_, dy_;
};

}  // namespace fragsim
