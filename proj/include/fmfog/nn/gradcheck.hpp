// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "fmfog/core/tensor.hpp"
#include "fmfog/nn/layers.hpp"

namespace fmfog::nn {

struct GradCheckEntry {
  std::string name;
  double max_rel_err = 0.0;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;
  double max_rel_err = 0.0;

  bool pass(double tolerance) const { return max_rel_err < tolerance; }

  const GradCheckEntry* worst() const {
    const GradCheckEntry* w = nullptr;
    for (const auto& e : entries) {
      if (!w || e.max_rel_err > w->max_rel_err) w = &e;
    }
    return w;
  }
};

// Central finite differences vs analytic gradients, double precision.
// `tracked` lists every differentiable tensor (parameters and inputs) with
// its gradient buffer; forward_backward must zero nothing itself - the
// harness zeroes grads, runs it once for analytic gradients, then perturbs
// each element with +-eps calling forward.
class GradChecker {
 public:
  using Tracked = std::vector<std::pair<std::string, Param<double>*>>;

  static GradCheckReport run(const Tracked& tracked,
                             const std::function<double()>& forward,
                             const std::function<double()>& forward_backward,
                             double eps = 1e-5) {
    for (const auto& [name, p] : tracked) p->zero_grad();
    forward_backward();

    GradCheckReport report;
    for (const auto& [name, p] : tracked) {
      GradCheckEntry entry{name, 0.0};
      for (int64_t i = 0; i < p->size(); ++i) {
        const double saved = p->value[i];
        p->value[i] = saved + eps;
        const double fp = forward();
        p->value[i] = saved - eps;
        const double fm = forward();
        p->value[i] = saved;
        const double numeric = (fp - fm) / (2.0 * eps);
        const double analytic = p->grad[i];
        const double denom = std::max({std::fabs(analytic), std::fabs(numeric), 1e-3});
        entry.max_rel_err = std::max(entry.max_rel_err, std::fabs(analytic - numeric) / denom);
      }
      report.max_rel_err = std::max(report.max_rel_err, entry.max_rel_err);
      report.entries.push_back(std::move(entry));
    }
    return report;
  }
};

}  // namespace fmfog::nn
