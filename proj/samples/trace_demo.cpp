// Prints the three separation curves on a coarse eccentricity grid together
// with the classification of the midpoint of each mu-segment.

#include <cstdio>
#include <vector>

#include "robe/robe.hpp"

int main() {
  const std::vector<double> grid{0.0, 0.1, 0.2, 0.3, 0.4};
  const robe::CurveTraces traces = robe::trace_curves(grid);

  std::printf("%6s %12s %12s %12s   segment classes\n", "e", "mu_l", "mu_m", "mu_r");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double e = grid[i];
    const double l = traces.left.samples[i].mu;
    const double m = traces.middle.samples[i].mu;
    const double r = traces.right.samples[i].mu;
    std::printf("%6.2f %12.9f %12.9f %12.9f  ", e, l, m, r);
    for (double mu : {0.5 * (l + m), 0.5 * (m + r), 0.5 * (r + 1.0)}) {
      const auto cls = robe::classify_stability(robe::integrate_monodromy(robe::ParameterPoint(mu, e)));
      std::printf(" %s", robe::to_string(cls.tag).c_str());
    }
    std::printf("\n");
  }
  return 0;
}
