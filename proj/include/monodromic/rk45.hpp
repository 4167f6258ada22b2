#ifndef MONODROMIC_RK45_HPP
#define MONODROMIC_RK45_HPP

#include <cmath>
#include <functional>
#include <vector>

namespace monodromic {

/// Dormand–Prince 5(4) with PI-style step control on a small vector ODE.
struct Rk45 {
  std::function<void(double, const std::vector<double>&, std::vector<double>&)> f;
  double rtol = 1e-12, atol = 1e-14;
  long max_steps = 2000000;
  long steps_taken = 0;

  bool integrate(double t0, double t1, std::vector<double>& y,
                 const std::function<void(double, const std::vector<double>&)>& observer = {}) {
    static const double c2 = 1. / 5, c3 = 3. / 10, c4 = 4. / 5, c5 = 8. / 9;
    static const double a21 = 1. / 5;
    static const double a31 = 3. / 40, a32 = 9. / 40;
    static const double a41 = 44. / 45, a42 = -56. / 15, a43 = 32. / 9;
    static const double a51 = 19372. / 6561, a52 = -25360. / 2187, a53 = 64448. / 6561,
                        a54 = -212. / 729;
    static const double a61 = 9017. / 3168, a62 = -355. / 33, a63 = 46732. / 5247,
                        a64 = 49. / 176, a65 = -5103. / 18656;
    static const double b1 = 35. / 384, b3 = 500. / 1113, b4 = 125. / 192, b5 = -2187. / 6784,
                        b6 = 11. / 84;
    static const double e1 = 71. / 57600, e3 = -71. / 16695, e4 = 71. / 1920,
                        e5 = -17253. / 339200, e6 = 22. / 525, e7 = -1. / 40;
    size_t n = y.size();
    double t = t0;
    double dir = (t1 >= t0) ? 1.0 : -1.0;
    double h = dir * std::min(1e-3, std::abs(t1 - t0) / 10 + 1e-12);
    std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), yt(n), ye(n);
    steps_taken = 0;
    if (observer) observer(t, y);
    for (long step = 0; step < max_steps; ++step) {
      if (dir * (t - t1) >= 0) return true;
      if (dir * (t + h - t1) > 0) h = t1 - t;
      f(t, y, k1);
      for (size_t i = 0; i < n; ++i) yt[i] = y[i] + h * a21 * k1[i];
      f(t + c2 * h, yt, k2);
      for (size_t i = 0; i < n; ++i) yt[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
      f(t + c3 * h, yt, k3);
      for (size_t i = 0; i < n; ++i) yt[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
      f(t + c4 * h, yt, k4);
      for (size_t i = 0; i < n; ++i)
        yt[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
      f(t + c5 * h, yt, k5);
      for (size_t i = 0; i < n; ++i)
        yt[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
      f(t + h, yt, k6);
      for (size_t i = 0; i < n; ++i)
        ye[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
      f(t + h, ye, k7);
      double errnorm = 0;
      for (size_t i = 0; i < n; ++i) {
        double err =
            h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        double sc = atol + rtol * std::max(std::abs(y[i]), std::abs(ye[i]));
        errnorm = std::max(errnorm, std::abs(err) / sc);
      }
      if (errnorm <= 1.0) {
        t += h;
        y = ye;
        ++steps_taken;
        if (observer) observer(t, y);
      }
      double fac = 0.9 * std::pow(std::max(errnorm, 1e-10), -0.2);
      fac = std::clamp(fac, 0.2, 5.0);
      h *= fac;
      if (std::abs(h) < 1e-15) return false;
    }
    return false;
  }
};

}  // namespace monodromic

#endif
