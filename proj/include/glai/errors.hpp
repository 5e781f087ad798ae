#pragma once
#include <cstdint>
#include <stdexcept>
#include <string>

namespace glai {

struct config_error : std::runtime_error { using std::runtime_error::runtime_error; };
struct shape_error : std::runtime_error { using std::runtime_error::runtime_error; };
struct input_error : std::runtime_error { using std::runtime_error::runtime_error; };
struct format_error : std::runtime_error { using std::runtime_error::runtime_error; };
struct version_error : format_error { using format_error::format_error; };

// Thrown when enumerating paths would exceed the configured cap.
struct capacity_error : std::runtime_error {
    capacity_error(std::uint64_t predicted_, std::uint64_t cap_)
        : std::runtime_error("predicted path count " + std::to_string(predicted_) +
                             " exceeds cap " + std::to_string(cap_)),
          predicted(predicted_), cap(cap_) {}
    std::uint64_t predicted;
    std::uint64_t cap;
};

// Direct solver found a rank-deficient system while ridge == 0.
struct rank_error : std::runtime_error { using std::runtime_error::runtime_error; };

}  // namespace glai
