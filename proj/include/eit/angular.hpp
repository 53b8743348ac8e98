#pragma once

#include "eit/state.hpp"

// Wigner 3j/6j symbols (Racah sums) and hyperfine electric-dipole matrix
// elements. Phases follow the Condon-Shortley convention; reduced matrix
// elements use the symmetric (Edmonds) normalization
//   <j' m'| T^k_q |j m> = (-1)^(j'-m') ( j' k j ; -m' q m ) <j'||T^k||j>.
namespace eit::angular {

// Throws std::domain_error when an m does not pair with its j (|m| > j or
// 2m and 2j of different parity) or a j is negative. Returns exactly 0 for
// selection-rule violations.
double wigner3j(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt m1, HalfInt m2,
                HalfInt m3);

double wigner6j(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt j4, HalfInt j5,
                HalfInt j6);

// Fine- and hyperfine-coupled level: |(J I) F mF>.
struct HyperfineLevel {
  HalfInt J;
  HalfInt I;
  HalfInt F;
  HalfInt mF;
};

// <upper | d_q | lower> for the spherical component q in {-1, 0, +1} given
// the fine-structure reduced element <J_upper || d || J_lower>. Units follow
// reduced_element. Zero whenever mF_upper != mF_lower + q or |F - F'| > 1.
double dipole_element(const HyperfineLevel& lower, const HyperfineLevel& upper,
                      int q, double reduced_element);

// Hyperfine-reduced element <F_upper || d || F_lower> / <J_upper || d || J_lower>.
double hyperfine_reduction(HalfInt j_lower, HalfInt f_lower, HalfInt j_upper,
                           HalfInt f_upper, HalfInt nuclear_spin);

}  // namespace eit::angular
