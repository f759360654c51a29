/*
 Copyright 2026 The dsopf Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/


#ifndef DSOPF_TESTS_ORACLES_SCALAR_HPP
#define DSOPF_TESTS_ORACLES_SCALAR_HPP

#include <cmath>
#include <functional>

namespace dsopf::oracle {

// Minimizer of a unimodal f on [lo, hi] by golden-section search.
inline double golden_section(const std::function<double(double)>& f, double lo, double hi,
                             double tol = 1e-13, int max_iters = 400) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int k = 0; k < max_iters && b - a > tol * (1.0 + std::fabs(a) + std::fabs(b)); ++k) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = f(x2);
    }
  }
  // endpoints win ties so box-constrained minima land exactly on the bound
  double best = 0.5 * (a + b), fb = f(best);
  if (f(lo) <= fb) {
    best = lo;
    fb = f(lo);
  }
  if (f(hi) < fb) best = hi;
  return best;
}

}  // namespace dsopf::oracle

#endif  // DSOPF_TESTS_ORACLES_SCALAR_HPP
