#pragma once

#include <string>
#include <variant>

namespace headimit {

struct HeadCommand {
  double yaw_deg = 0.0;
  double pitch_deg = 0.0;
  double speed_fraction = 1.0;  // (0, 1]
};

// Desired eyelid state per eye (true = closed).
struct EyelidCommand {
  bool left_closed = false;
  bool right_closed = false;
  friend bool operator==(const EyelidCommand&, const EyelidCommand&) = default;
};

struct SayCommand {
  std::string text;
};

using RobotCommand = std::variant<HeadCommand, EyelidCommand, SayCommand>;

}  // namespace headimit
