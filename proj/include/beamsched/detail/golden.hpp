#pragma once

#include <cmath>
#include <vector>

namespace beamsched {

template <class Fn>
double golden_section_maximize(Fn&& f, double lo, double hi, double width, std::vector<DualProbe>& trace) {
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  auto eval = [&](double x) {
    const double v = f(x);
    trace.push_back({x, v});
    return v;
  };
  double a = lo;
  double b = hi;
  double c = b - ratio * (b - a);
  double d = a + ratio * (b - a);
  double fc = eval(c);
  double fd = eval(d);
  while (b - a > width) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = eval(d);
    }
  }
  return fc >= fd ? c : d;
}

}  // namespace beamsched
