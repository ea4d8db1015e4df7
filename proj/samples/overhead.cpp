// Print the authentication-time comparison for a handful of fleet sizes.

#include <iostream>

#include "pufcan/analysis.hpp"

int main() {
  using namespace pufcan;
  using analysis::Framework;
  for (std::uint64_t n : {5, 20, 50, 100}) {
    std::cout << "n=" << n << "  existing "
              << analysis::format_ms(analysis::auth_time(Framework::Existing, n, BusSpeed::High, FrameKind::Standard))
              << " ms  proposed "
              << analysis::format_ms(analysis::auth_time(Framework::Proposed, n, BusSpeed::High, FrameKind::Standard))
              << " ms  ratio " << 100.0 * analysis::overhead_ratio(n) << "%\n";
  }
}
