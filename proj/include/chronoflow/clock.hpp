#pragma once

#include <chrono>

namespace chronoflow::replay {

using Nanos = std::chrono::nanoseconds;

// Monotonic time source used by the replay scheduler.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual Nanos now() = 0;
  virtual void sleep_until(Nanos deadline) = 0;
};

class SteadyClock final : public Clock {
 public:
  Nanos now() override;
  void sleep_until(Nanos deadline) override;
};

// Jumps straight to each deadline; never moves backwards.
class VirtualClock final : public Clock {
 public:
  explicit VirtualClock(Nanos start = Nanos{0}) : now_(start) {}

  Nanos now() override { return now_; }
  void sleep_until(Nanos deadline) override {
    if (deadline > now_) now_ = deadline;
  }
  // Simulates time spent working (e.g. a slow sink).
  void advance(Nanos d) {
    if (d > Nanos{0}) now_ += d;
  }

 private:
  Nanos now_;
};

}  // namespace chronoflow::replay
