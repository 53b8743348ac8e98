#include "eit/angular.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace eit::angular {
namespace {

// Factorials as long double. Exact through 25!, which covers every symbol
// with momenta up to F = 5 that the cesium model needs; larger arguments
// (up to the j = 20 limit) carry one rounding per table entry.
constexpr int kMaxFactorial = 170;

const std::array<long double, kMaxFactorial + 1>& factorials() {
  static const auto table = [] {
    std::array<long double, kMaxFactorial + 1> t{};
    t[0] = 1.0L;
    for (int n = 1; n <= kMaxFactorial; ++n) t[n] = t[n - 1] * n;
    return t;
  }();
  return table;
}

// n given as twice its value; must be a non-negative integer.
long double fact2(int twice_n) {
  if (twice_n < 0 || twice_n % 2 != 0 || twice_n / 2 > kMaxFactorial) {
    throw std::domain_error("factorial argument out of range: " +
                            std::to_string(twice_n / 2.0));
  }
  return factorials()[twice_n / 2];
}

void check_j(HalfInt j) {
  if (j.twice() < 0) throw std::domain_error("negative angular momentum " + j.to_string());
  if (j.twice() > 40) throw std::domain_error("angular momentum above 20: " + j.to_string());
}

void check_pair(HalfInt j, HalfInt m) {
  check_j(j);
  if (std::abs(m.twice()) > j.twice() || (j.twice() - m.twice()) % 2 != 0) {
    throw std::domain_error("invalid projection m=" + m.to_string() + " for j=" +
                            j.to_string());
  }
}

bool triangle(HalfInt a, HalfInt b, HalfInt c) {
  const int ta = a.twice(), tb = b.twice(), tc = c.twice();
  if ((ta + tb + tc) % 2 != 0) return false;
  return tc >= std::abs(ta - tb) && tc <= ta + tb;
}

// Triangle coefficient (a+b-c)!(a-b+c)!(-a+b+c)!/(a+b+c+1)! in twice units.
long double triangle_coefficient(int ta, int tb, int tc) {
  return fact2(ta + tb - tc) * fact2(ta - tb + tc) * fact2(-ta + tb + tc) /
         fact2(ta + tb + tc + 2);
}

int phase(int twice_exponent) {
  // (-1)^(twice_exponent / 2); exponent must be an integer.
  const int e = twice_exponent / 2;
  return (e % 2 == 0) ? 1 : -1;
}

}  // namespace

double wigner3j(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt m1, HalfInt m2,
                HalfInt m3) {
  check_pair(j1, m1);
  check_pair(j2, m2);
  check_pair(j3, m3);
  if (m1.twice() + m2.twice() + m3.twice() != 0) return 0.0;
  if (!triangle(j1, j2, j3)) return 0.0;
  const int a = j1.twice(), b = j2.twice(), c = j3.twice();
  const int ma = m1.twice(), mb = m2.twice(), mc = m3.twice();
  if (ma == 0 && mb == 0 && mc == 0 && ((a + b + c) / 2) % 2 != 0) return 0.0;

  // Racah's formula; all quantities in twice units.
  const int kmin = std::max({0, b - c - ma, a - c + mb});
  const int kmax = std::min({a + b - c, a - ma, b + mb});
  long double sum = 0.0L;
  for (int k = kmin; k <= kmax; k += 2) {
    const long double denom = fact2(k) * fact2(c - b + k + ma) * fact2(c - a + k - mb) *
                              fact2(a + b - c - k) * fact2(a - k - ma) *
                              fact2(b - k + mb);
    sum += (phase(k) > 0 ? 1.0L : -1.0L) / denom;
  }
  if (sum == 0.0L) return 0.0;
  const long double pre = std::sqrt(triangle_coefficient(a, b, c) * fact2(a + ma) *
                                    fact2(a - ma) * fact2(b + mb) * fact2(b - mb) *
                                    fact2(c + mc) * fact2(c - mc));
  return static_cast<double>(phase(a - b - mc) * pre * sum);
}

double wigner6j(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt j4, HalfInt j5,
                HalfInt j6) {
  for (HalfInt j : {j1, j2, j3, j4, j5, j6}) check_j(j);
  if (!triangle(j1, j2, j3) || !triangle(j1, j5, j6) || !triangle(j4, j2, j6) ||
      !triangle(j4, j5, j3)) {
    return 0.0;
  }
  const int t1 = j1.twice(), t2 = j2.twice(), t3 = j3.twice();
  const int t4 = j4.twice(), t5 = j5.twice(), t6 = j6.twice();
  const int a1 = t1 + t2 + t3, a2 = t1 + t5 + t6, a3 = t4 + t2 + t6, a4 = t4 + t5 + t3;
  const int b1 = t1 + t2 + t4 + t5, b2 = t2 + t3 + t5 + t6, b3 = t3 + t1 + t6 + t4;
  const int tmin = std::max({a1, a2, a3, a4});
  const int tmax = std::min({b1, b2, b3});
  long double sum = 0.0L;
  for (int t = tmin; t <= tmax; t += 2) {
    const long double term =
        fact2(t + 2) / (fact2(t - a1) * fact2(t - a2) * fact2(t - a3) * fact2(t - a4) *
                        fact2(b1 - t) * fact2(b2 - t) * fact2(b3 - t));
    sum += phase(t) > 0 ? term : -term;
  }
  if (sum == 0.0L) return 0.0;
  const long double pre =
      std::sqrt(triangle_coefficient(t1, t2, t3) * triangle_coefficient(t1, t5, t6) *
                triangle_coefficient(t4, t2, t6) * triangle_coefficient(t4, t5, t3));
  return static_cast<double>(pre * sum);
}

double hyperfine_reduction(HalfInt j_lower, HalfInt f_lower, HalfInt j_upper,
                           HalfInt f_upper, HalfInt nuclear_spin) {
  const HalfInt one = HalfInt::from_int(1);
  const double six = wigner6j(j_upper, f_upper, nuclear_spin, f_lower, j_lower, one);
  if (six == 0.0) return 0.0;
  const int sign =
      phase(f_lower.twice() + j_upper.twice() + 2 + nuclear_spin.twice());
  return sign * std::sqrt((f_lower.twice() + 1.0) * (f_upper.twice() + 1.0)) * six;
}

double dipole_element(const HyperfineLevel& lower, const HyperfineLevel& upper,
                      int q, double reduced_element) {
  if (q < -1 || q > 1) throw std::domain_error("dipole component q must be -1, 0 or +1");
  check_pair(lower.F, lower.mF);
  check_pair(upper.F, upper.mF);
  if (upper.mF.twice() != lower.mF.twice() + 2 * q) return 0.0;
  if (std::abs(upper.F.twice() - lower.F.twice()) > 2) return 0.0;
  const double three = wigner3j(upper.F, HalfInt::from_int(1), lower.F, -upper.mF,
                                HalfInt::from_int(q), lower.mF);
  if (three == 0.0) return 0.0;
  const double red = hyperfine_reduction(lower.J, lower.F, upper.J, upper.F, upper.I);
  if (red == 0.0) return 0.0;
  return phase(upper.F.twice() - upper.mF.twice()) * three * red * reduced_element;
}

}  // namespace eit::angular
