#include "mpsim/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <queue>
#include <sstream>
#include <vector>

#include "mpsim/error.hpp"

namespace mpsim {

namespace {

// Kronrod 15-point nodes (non-negative half) and weights, with the embedded
// 7-point Gauss weights on the odd-indexed nodes.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment kronrod(const std::function<double(double)>& f, double a, double b, int& evals) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const double fc = f(c);
  double k = kWgk[7] * fc;
  double g = kWg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const double s = f(c - dx) + f(c + dx);
    k += kWgk[j] * s;
    if (j % 2 == 1) g += kWg[j / 2] * s;
  }
  evals += 15;
  return {a, b, k * h, std::abs((k - g) * h)};
}

}  // namespace

QuadratureResult gauss_kronrod(const std::function<double(double)>& f, double a, double b, double rel_tol,
                               double abs_tol, int max_intervals) {
  QuadratureResult r;
  std::priority_queue<Segment> heap;
  heap.push(kronrod(f, a, b, r.evaluations));
  double value = heap.top().value, error = heap.top().error;
  while (error > std::max(abs_tol, rel_tol * std::abs(value))) {
    if (static_cast<int>(heap.size()) >= max_intervals) {
      std::ostringstream msg;
      msg << "quadrature refinement exhausted after " << max_intervals << " intervals (error estimate "
          << error << ", value " << value << ")";
      throw Error(ErrorClass::nonconvergence, msg.str());
    }
    const Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const Segment left = kronrod(f, worst.a, mid, r.evaluations);
    const Segment right = kronrod(f, mid, worst.b, r.evaluations);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum to avoid drift from the running updates.
  value = 0.0;
  error = 0.0;
  r.intervals = static_cast<int>(heap.size());
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  r.value = value;
  r.error = error;
  return r;
}

QuadratureResult integrate_half_line(const std::function<double(double)>& f, double rel_tol, double abs_tol,
                                     int max_intervals) {
  auto g = [&f](double t) {
    const double c = std::cos(t);
    if (c <= 0.0) return 0.0;
    return f(std::tan(t)) / (c * c);
  };
  return gauss_kronrod(g, 0.0, 0.5 * std::numbers::pi, rel_tol, abs_tol, max_intervals);
}

}  // namespace mpsim
