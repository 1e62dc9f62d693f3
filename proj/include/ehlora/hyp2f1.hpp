#pragma once

namespace ehlora {

// 2F1(1, 2/eta; 1 + 2/eta; z) for eta >= 2 and z <= 0. Result lies in (0, 1].
//
//   z > -0.9        direct Maclaurin series, sum_n b z^n / (b + n)
//   -9 <= z <= -0.9 Pfaff transform to w = z/(z-1) in [0.47, 0.9], then series
//   z < -9          expansion in 1/z about infinity
//
// with b = 2/eta.
double hyp2f1_special(double eta, double z);

// Individual branches, exposed for overlap testing. Each is accurate only in
// its own convergence region; `b` is 2/eta.
namespace hyp2f1_branch {
double direct_series(double b, double z);
double pfaff_series(double b, double z);
double large_argument(double b, double z);
}  // namespace hyp2f1_branch

}  // namespace ehlora
