#include "zenomatch/quadrature.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <vector>

namespace zenomatch::quadrature {

namespace {

// Gauss-Legendre nodes/weights on [-1, 1], 17 significant digits.
constexpr std::array<double, 10> kNodes10 = {
    -0.9739065285171717,  -0.8650633666889845, -0.6794095682990244,
    -0.4333953941292472,  -0.14887433898163122, 0.14887433898163122,
    0.4333953941292472,   0.6794095682990244,  0.8650633666889845,
    0.9739065285171717,
};
constexpr std::array<double, 10> kWeights10 = {
    0.06667134430868807, 0.14945134915058036, 0.219086362515982,
    0.2692667193099965,  0.295524224714753,   0.295524224714753,
    0.2692667193099965,  0.219086362515982,   0.14945134915058036,
    0.06667134430868807,
};
constexpr std::array<double, 21> kNodes21 = {
    -0.9937521706203895, -0.9672268385663063, -0.9200993341504008,
    -0.8533633645833173, -0.7684399634756779, -0.6671388041974123,
    -0.5516188358872198, -0.4243421202074388, -0.2880213168024011,
    -0.1455618541608951, 0.0,                 0.1455618541608951,
    0.2880213168024011,  0.4243421202074388,  0.5516188358872198,
    0.6671388041974123,  0.7684399634756779,  0.8533633645833173,
    0.9200993341504008,  0.9672268385663063,  0.9937521706203895,
};
constexpr std::array<double, 21> kWeights21 = {
    0.016017228257774137, 0.03695378977085292, 0.057134425426857156,
    0.07610011362837935,  0.09344442345603382, 0.10879729916714831,
    0.12183141605372842,  0.13226893863333739, 0.13988739479107312,
    0.14452440398997007,  0.14608113364969047, 0.14452440398997007,
    0.13988739479107312,  0.13226893863333739, 0.12183141605372842,
    0.10879729916714831,  0.09344442345603382, 0.07610011362837935,
    0.057134425426857156, 0.03695378977085292, 0.016017228257774137,
};

struct Panel {
  double a = 0.0;
  double b = 0.0;
  double value = 0.0;  // 21-point estimate
  double error = 0.0;  // |21-point - 10-point|

  bool operator<(const Panel& other) const { return error < other.error; }
};

Panel evaluate(const std::function<double(double)>& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double coarse = 0.0;
  for (int i = 0; i < 10; ++i) {
    coarse += kWeights10[i] * f(mid + half * kNodes10[i]);
  }
  double fine = 0.0;
  for (int i = 0; i < 21; ++i) {
    fine += kWeights21[i] * f(mid + half * kNodes21[i]);
  }
  Panel p;
  p.a = a;
  p.b = b;
  p.value = fine * half;
  p.error = std::abs(fine - coarse) * half;
  return p;
}

}  // namespace

Result integrate(const std::function<double(double)>& f, double a, double b,
                 const Options& opt) {
  Result res;
  if (!(b > a)) {
    res.converged = true;
    return res;
  }

  std::priority_queue<Panel> queue;
  queue.push(evaluate(f, a, b));
  res.evaluations = 31;
  double total = queue.top().value;
  double err = queue.top().error;

  int panels = 1;
  while (panels < opt.max_panels) {
    const double target =
        std::max(opt.abs_tol, opt.rel_tol * std::abs(total));
    if (err <= target) break;

    Panel worst = queue.top();
    if (worst.b - worst.a <= opt.min_width ||
        worst.b - worst.a <= 8.0 * std::numeric_limits<double>::epsilon() *
                                 std::max(std::abs(worst.a), std::abs(worst.b))) {
      break;  // cannot meaningfully subdivide further
    }
    queue.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    Panel left = evaluate(f, worst.a, mid);
    Panel right = evaluate(f, mid, worst.b);
    res.evaluations += 62;
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    queue.push(left);
    queue.push(right);
    ++panels;
  }

  res.value = total;
  res.error = err;
  res.converged = err <= std::max(opt.abs_tol, opt.rel_tol * std::abs(total));
  return res;
}

}  // namespace zenomatch::quadrature
