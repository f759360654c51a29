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


#ifndef DSOPF_TESTS_ORACLES_DENSE_KKT_HPP
#define DSOPF_TESTS_ORACLES_DENSE_KKT_HPP

#include <Eigen/Dense>
#include <vector>

namespace dsopf::oracle {

// Solves [[A, C'], [C, 0]] [x; nu] = [-b; d] with a full-pivot LU, for
// 1/2 x'Ax + b'x subject to Cx = d. `c` is row-major, rows x n.
inline std::vector<double> dense_kkt(const std::vector<double>& a_diag,
                                     const std::vector<double>& b,
                                     const std::vector<double>& c,
                                     const std::vector<double>& d) {
  const Eigen::Index n = static_cast<Eigen::Index>(a_diag.size());
  const Eigen::Index m = static_cast<Eigen::Index>(d.size());
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + m, n + m);
  Eigen::VectorXd rhs(n + m);
  for (Eigen::Index i = 0; i < n; ++i) {
    K(i, i) = a_diag[i];
    rhs(i) = -b[i];
  }
  for (Eigen::Index r = 0; r < m; ++r) {
    for (Eigen::Index j = 0; j < n; ++j) {
      K(n + r, j) = c[r * n + j];
      K(j, n + r) = c[r * n + j];
    }
    rhs(n + r) = d[r];
  }
  const Eigen::VectorXd sol = K.fullPivLu().solve(rhs);
  return std::vector<double>(sol.data(), sol.data() + n);
}

}  // namespace dsopf::oracle

#endif  // DSOPF_TESTS_ORACLES_DENSE_KKT_HPP
