// Small walk through the library on the three equiangular lines of the plane.

#include <closedsum/closedsum.hpp>

#include <iostream>

int main() {
  using namespace closedsum;
  const SubspaceSystem s = simplex_lines(3);

  const MarginReport gap = sum_gap(s);
  std::cout << "gap of P1+P2+P3: " << gap.margin("gap") << "\n";
  std::cout << "independence epsilon: " << independence_certificate(s).epsilon << "\n";

  const ReductionResult red = reduce_preserving_sum(s);
  std::cout << "reduced dims:";
  for (const auto& m : red.reduced.members()) std::cout << " " << m.dim();
  std::cout << " (sum preserved: " << std::boolalpha << red.sum_preserved << ")\n";

  const auto [h1, h2] = lines_at_angle(std::acos(-1.0) / 4.0);
  std::cout << "Friedrichs angle of 45 degree lines: " << friedrichs_angle(h1, h2) << "\n";
  return 0;
}
