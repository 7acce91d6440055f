#include "chronoflow/clock.hpp"

#include <thread>

namespace chronoflow::replay {

Nanos SteadyClock::now() {
  return std::chrono::duration_cast<Nanos>(std::chrono::steady_clock::now().time_since_epoch());
}

void SteadyClock::sleep_until(Nanos deadline) {
  std::this_thread::sleep_until(std::chrono::steady_clock::time_point(
      std::chrono::duration_cast<std::chrono::steady_clock::duration>(deadline)));
}

}  // namespace chronoflow::replay
