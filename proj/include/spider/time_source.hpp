#pragma once

#include <chrono>
#include <cstdint>
#include <memory>

namespace spider {

/// Clock and sleep injection point. The monotonic clock drives delays and
/// embargo arithmetic; the wall clock is only needed to interpret absolute
/// HTTP dates (Retry-After) and to stamp records.
class TimeSource {
public:
    virtual ~TimeSource() = default;
    virtual std::chrono::steady_clock::time_point now() = 0;
    virtual std::int64_t wall_epoch_seconds() = 0;
    virtual void sleep_until(std::chrono::steady_clock::time_point deadline) = 0;

    void sleep_for(std::chrono::milliseconds d) { sleep_until(now() + d); }
};

/// System clocks and real sleeping.
std::shared_ptr<TimeSource> real_time_source();

} // namespace spider
