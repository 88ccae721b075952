#pragma once

#include <Eigen/Dense>

#include <cstdarg>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace aharm {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;

constexpr double kPi = 3.14159265358979323846;

/* All recoverable failures (bad input files, violated preconditions,
 * solver breakdowns) throw this type with a human-readable message. */
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::string strformat(const char* fmt, ...) {
  va_list args;
  va_start(args, fmt);
  char buf[1024];
  vsnprintf(buf, sizeof(buf), fmt, args);
  va_end(args);
  return std::string(buf);
}

template <class... A>
[[noreturn]] inline void fail(const char* fmt, A... a) {
  throw Error(strformat(fmt, a...));
}

} // namespace aharm
